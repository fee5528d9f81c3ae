#include "app/config.hpp"
#include "app/output.hpp"

#include <doctest.h>

using namespace nullkit::app;

TEST_CASE("fnv1a matches the reference offset basis and a known digest") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("doubles are written with 17 significant digits and no negative zero") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("csv tables carry headers only when there are several") {
  Table a{"a", {"x", "label"}, {}};
  a.add({1.5, std::string("p,q")});
  CHECK(render_csv({a}) == "x,label\n1.5,\"p,q\"\n");
  Table b{"b", {"n"}, {}};
  b.add({std::int64_t{3}});
  CHECK(render_csv({a, b}) == "# a\nx,label\n1.5,\"p,q\"\n\n# b\nn\n3\n");
}

TEST_CASE("json output keeps column order and metadata") {
  Table a{"a", {"z", "y"}, {}};
  a.add({true, 2.0});
  const auto j = Json::parse(render_json({"fixtures", "00", 7, "v"}, {a}));
  CHECK(j["metadata"]["seed"] == 7);
  CHECK(j["tables"]["a"][0]["z"] == true);
}

TEST_CASE("unknown keys are rejected") {
  const Json j = Json::parse(R"({"type": "sphere", "dim": 2, "radius": 1, "colour": "red"})");
  CHECK_THROWS_AS(build_fibre(Block(j, "fibre"), {}), ConfigError);
  const Json ok = Json::parse(R"({"type": "sphere", "dim": 2, "radius": 2})");
  CHECK(build_fibre(Block(ok, "fibre"), {})->dim() == 2);
}

TEST_CASE("extended numbers accept infinities only as named strings") {
  CHECK(extended_number(Json("-inf"), "x") == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(extended_number(Json("infinity"), "x"), ConfigError);
}
