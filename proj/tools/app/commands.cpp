#include "commands.hpp"

#include "nullkit/cone.hpp"
#include "nullkit/fixtures.hpp"
#include "nullkit/jacobi.hpp"
#include "nullkit/parallel.hpp"
#include "nullkit/staticspace.hpp"
#include "nullkit/twist.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace nullkit::app {

namespace {

using Row = std::vector<Cell>;

std::string fmt(double v) { return format_double(v); }

struct Task {
  Block b;
  const Spacetime* S;
  std::uint64_t seed;
  std::string name;  // table name prefix
  CommandResult* out;

  void fail(const std::string& msg) { out->failures.push_back(name + ": " + msg); }
  Table& table(const std::string& suffix, std::vector<std::string> columns) {
    out->tables.push_back({suffix.empty() ? name : name + "_" + suffix, std::move(columns), {}});
    return out->tables.back();
  }
  const Spacetime& space() const {
    if (!S) throw ConfigError("this command needs a spacetime block");
    return *S;
  }
};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& mid,
                              const std::vector<std::string>& tail) {
  head.insert(head.end(), mid.begin(), mid.end());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

std::vector<std::string> numbered(const std::string& stem, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

void push_vec(Row& r, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) r.emplace_back(v[i]);
}

void check_points(const std::vector<Vec>& pts, int dim, const std::string& where) {
  for (const Vec& p : pts)
    if (p.size() != dim) throw ConfigError(where + ": points must have " + std::to_string(dim) + " coordinates");
}

Vec fibre_point(Block& b, const std::string& key, int dim) {
  Vec x = b.vector(key);
  if (x.size() != dim) throw ConfigError(b.where() + "." + key + ": expected " + std::to_string(dim) + " coordinates");
  return x;
}

Orientation orientation(Block& b) {
  const auto o = b.string("orientation", "future");
  if (o == "future") return Orientation::Future;
  if (o == "past") return Orientation::Past;
  throw ConfigError(b.where() + ".orientation: expected future or past");
}

GraphHypersurface graph(Task& t) {
  const auto& S = t.space();
  S.require_grw(t.name);
  return GraphHypersurface(S.grw, ScalarField::parse(t.b.string("graph"), S.coordinates(), S.params));
}

/// Rows evaluated on the worker pool, kept in input order.
std::vector<Row> rows_parallel(std::size_t n, const std::function<Row(std::size_t)>& fn) {
  std::vector<Row> rows(n);
  parallel_for(n, [&](std::size_t i) { rows[i] = fn(i); });
  return rows;
}

void append(Table& T, std::vector<Row> rows) {
  for (auto& r : rows) T.add(std::move(r));
}

double max_of(const std::vector<Row>& rows, std::size_t col) {
  double m = 0.0;
  for (const auto& r : rows) {
    const double v = std::get<double>(r[col]);
    if (std::isnan(v)) return v;
    m = std::max(m, std::abs(v));
  }
  return m;
}

// ---------------------------------------------------------------------------

void cmd_validate(Task& t) {
  const auto L = graph(t);
  const auto grid = t.b.points("grid");
  check_points(grid, L.dim() - 1, t.b.where() + ".grid");
  const double tol = t.b.positive("tolerance", 1e-8);
  t.b.finish();
  const auto null = validate_null_graph(L, grid);
  const auto radial = radial_identity_check(L, grid);
  auto& T = t.table("", with({"point"}, t.space().coordinates(), {"h", "null_residual", "radial_identity_residual"}));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Row r{static_cast<std::int64_t>(i)};
    push_vec(r, grid[i]);
    r.insert(r.end(), {L.height(grid[i]), null.residuals[i], radial.residuals[i]});
    T.add(std::move(r));
  }
  if (!(null.max_residual <= tol)) t.fail("null condition residual " + fmt(null.max_residual) + " > " + fmt(tol));
}

void cmd_cone(Task& t) {
  const auto& S = t.space();
  const auto& M = S.require_grw("cone");
  const int m = M.fibre().dim();
  NullCone C{S.grw, t.b.number("vertex_time"), fibre_point(t.b, "vertex", m), orientation(t.b)};
  const int gens = t.b.integer("generators", 8);
  const auto params = t.b.numbers("parameters");
  const double tol = t.b.positive("tolerance", 1e-8);
  const double rho_tol = t.b.positive("rho_tolerance", 1e-5);
  t.b.finish();
  C.validate();
  if (gens <= 0) throw ConfigError(t.b.where() + ".generators: must be positive");

  std::mt19937_64 rng(t.seed);
  std::normal_distribution<double> N;
  std::vector<Vec> dirs;
  for (int i = 0; i < gens; ++i) {
    Vec u(m);
    for (int j = 0; j < m; ++j) u[j] = N(rng);
    dirs.push_back(u / norm(M.fibre(), C.x_star, u));
  }
  const auto L = cone_as_graph(C);
  const auto k = M.fibre().constant_curvature();
  struct Item {
    int gen;
    double s;
  };
  std::vector<Item> items;
  for (int g = 0; g < gens; ++g)
    for (double s : params) items.push_back({g, s});

  auto rows = rows_parallel(items.size(), [&](std::size_t i) {
    const auto [g, s] = items[i];
    const auto geo = null_geodesic_quadrature(M, C.t_star, C.x_star, dirs[g], C.orientation);
    Row r{static_cast<std::int64_t>(g), s};
    if (!(s > 0) || s >= geo.affine_limit()) {
      for (int j = 0; j < m + 4; ++j) r.emplace_back(std::nan(""));
      return r;
    }
    const Vec p = geo.point(s);
    push_vec(r, p);
    const auto mem = cone_contains(C, p, tol);
    double rho = std::nan(""), formula = std::nan("");
    try {
      rho = umbilic_factor(L, p.tail(m));
    } catch (const Error&) {
    }
    if (k) {
      try {
        formula = rw_cone_rho(*k, M.warping(), C.t_star, p[0], C.orientation);
      } catch (const Error&) {
      }
    }
    r.insert(r.end(), {mem.residual, rho, formula});
    return r;
  });
  auto& T = t.table("", with({"generator", "s", "t"}, S.coordinates(), {"membership_residual", "rho", "rho_formula"}));
  double worst = 0.0, worst_rho = 0.0;
  for (const auto& r : rows) {
    const double res = std::get<double>(r[3 + m]);
    if (std::isnan(res)) continue;
    worst = std::max(worst, res);
    const double a = std::get<double>(r[4 + m]), b = std::get<double>(r[5 + m]);
    if (std::isfinite(a) && std::isfinite(b)) worst_rho = std::max(worst_rho, std::abs(a - b));
  }
  append(T, std::move(rows));
  if (!(worst <= tol)) t.fail("membership residual " + fmt(worst) + " > " + fmt(tol));
  if (!(worst_rho <= rho_tol)) t.fail("rho differs from the closed form by " + fmt(worst_rho));
}

void cmd_umbilic(Task& t) {
  const auto L = graph(t);
  const auto grid = t.b.points("grid");
  check_points(grid, L.dim() - 1, t.b.where() + ".grid");
  const double tol = t.b.positive("tolerance", 1e-6);
  const int pairs = t.b.integer("pairs", 8);
  std::optional<Vec> anchor;
  if (t.b.has("classify_anchor")) anchor = fibre_point(t.b, "classify_anchor", L.dim() - 1);
  t.b.finish();
  const auto rep = umbilicity_test(L, grid, t.seed, tol, pairs);
  auto& T = t.table("", with({"point"}, t.space().coordinates(), {"rho", "residual", "sampled_residual"}));
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    const auto& s = rep.samples[i];
    Row r{static_cast<std::int64_t>(i)};
    push_vec(r, s.x);
    r.insert(r.end(), {s.rho, s.residual, s.sampled_residual});
    T.add(std::move(r));
  }
  if (!rep.umbilic) t.fail("umbilicity residual " + fmt(rep.max_residual) + " > " + fmt(tol));
  if (anchor) {
    const auto cls = classify_umbilic_sphere_fibre(L, *anchor, tol);
    auto& K = t.table("classification", with({"cone", "theta", "t_star"}, t.space().coordinates(), {"diagnostics"}));
    Row r{cls.cone, cls.theta};
    if (cls.cone) {
      push_vec(r, cls.vertex);
    } else {
      for (int i = 0; i < L.dim(); ++i) r.emplace_back(std::nan(""));
    }
    r.emplace_back(cls.diagnostics);
    K.add(std::move(r));
  }
}

void cmd_reconstruct(Task& t) {
  const auto L = graph(t);
  const int m = L.dim() - 1;
  const Vec x0 = fibre_point(t.b, "anchor", m);
  ReconstructOptions o;
  std::tie(o.s_lo, o.s_hi) = t.b.interval("s_range", {o.s_lo, o.s_hi});
  o.leaf_half_width = t.b.positive("leaf_half_width", o.leaf_half_width);
  o.leaf_nodes = t.b.integer("leaf_nodes", o.leaf_nodes);
  o.s_spacing = t.b.positive("s_spacing", o.s_spacing);
  o.umbilic_tolerance = t.b.positive("umbilic_tolerance", o.umbilic_tolerance);
  o.seed = t.seed;
  t.b.finish();
  const auto R = reconstruct_decomposition(L, x0, o);
  auto& T = t.table("", with(with({"line"}, numbered("z", m - 1), {"s"}), t.space().coordinates(),
                             {"log_mu", "mu", "dlog_mu", "unit_residual"}));
  for (std::size_t i = 0; i < R.flow_lines.size(); ++i) {
    const auto& F = R.flow_lines[i];
    for (std::size_t j = 0; j < F.s.size(); ++j) {
      Row r{static_cast<std::int64_t>(i)};
      push_vec(r, F.z);
      r.emplace_back(F.s[j]);
      push_vec(r, F.x[j]);
      r.insert(r.end(), {F.log_mu[j], std::exp(F.log_mu[j]), F.dlog_mu[j], F.unit_residual});
      T.add(std::move(r));
    }
  }
  auto& Sm = t.table("summary", {"t0", "umbilicity_residual", "s_lo", "s_hi"});
  Sm.add({R.t0, R.umbilicity_residual, R.decomposition.a, R.decomposition.b});
}

void cmd_construct(Task& t) {
  const auto& S = t.space();
  const auto& M = S.require_grw("construct");
  const auto* tw = dynamic_cast<const TwistedFibre*>(&M.fibre());
  if (!tw) throw ConfigError("construct needs a fibre of type warped");
  const double t0 = t.b.number("t0", 0.0);
  const bool dual = t.b.boolean("dual", false);
  const auto grid = t.b.points("grid");
  check_points(grid, M.fibre().dim(), t.b.where() + ".grid");
  const double tol = t.b.positive("tolerance", 1e-5);
  t.b.finish();
  TwistedDecomposition D;
  D.a = tw->base_lo();
  D.b = tw->base_hi();
  D.leaf = tw->leaf();
  D.mu = tw->mu();
  D.z0 = Vec::Zero(tw->leaf()->dim());
  const auto L = construct_hypersurface(S.grw, t0, dual);
  const auto null = validate_null_graph(L, grid);
  auto rows = rows_parallel(grid.size(), [&](std::size_t i) {
    const Vec& x = grid[i];
    const double H = mean_curvature(L, x), F = construct_mean_curvature(M, D, t0, x, dual);
    Row r{static_cast<std::int64_t>(i)};
    push_vec(r, x);
    r.insert(r.end(), {L.height(x), null.residuals[i], H, F, std::abs(H - F)});
    return r;
  });
  const double worst = max_of(rows, rows.empty() ? 0 : rows[0].size() - 1);
  auto& T = t.table("", with({"point"}, S.coordinates(), {"h", "null_residual", "H", "H_formula", "residual"}));
  append(T, std::move(rows));
  if (!(worst <= tol)) t.fail("mean curvature differs from the formula by " + fmt(worst));
  if (!(null.max_residual <= 1e-8)) t.fail("null condition residual " + fmt(null.max_residual));
}

void cmd_dual(Task& t) {
  const auto L = graph(t);
  const int m = L.dim() - 1;
  const Vec x0 = fibre_point(t.b, "anchor", m);
  const auto grid = t.b.points("grid");
  check_points(grid, m, t.b.where() + ".grid");
  const double tol = t.b.positive("tolerance", 1e-6);
  const double ftol = t.b.positive("formula_tolerance", 1e-5);
  t.b.finish();
  const double t0 = L.height(x0);
  const auto Ld = dual_hypersurface(L, x0);
  const auto Ldd = dual_hypersurface(Ld, x0);
  auto rows = rows_parallel(grid.size(), [&](std::size_t i) {
    const Vec& x = grid[i];
    Row r{static_cast<std::int64_t>(i)};
    push_vec(r, x);
    r.insert(r.end(), {L.height(x), Ld.height(x), Ldd.height(x), mean_curvature(Ld, x),
                       dual_mean_curvature_formula(L, t0, x)});
    return r;
  });
  double inv = 0.0, form = 0.0;
  for (const auto& r : rows) {
    const auto v = [&](int k) { return std::get<double>(r[1 + m + k]); };
    inv = std::max(inv, std::abs(v(2) - v(0)));
    form = std::max(form, std::abs(v(3) - v(4)));
  }
  auto& T = t.table("", with({"point"}, t.space().coordinates(), {"h", "h_dual", "h_dual_dual", "H_dual", "H_dual_formula"}));
  append(T, std::move(rows));
  if (!(inv <= tol)) t.fail("dual of the dual differs from the graph by " + fmt(inv));
  if (!(form <= ftol)) t.fail("dual mean curvature differs from the formula by " + fmt(form));
}

Row desitter_row(int n, double t0, const Vec& xs) {
  const auto c = classify_desitter_dual(n, t0, xs);
  Row r{t0, std::string(to_string(c.kind)), c.boundary_case, c.t_c, c.delta, c.vertex_time};
  if (c.vertex_point.size() == n - 1) {
    push_vec(r, c.vertex_point);
  } else {
    for (int i = 0; i < n - 1; ++i) r.emplace_back(std::nan(""));
  }
  return r;
}

std::vector<std::string> desitter_columns(int n) {
  return with({"t0", "classification", "boundary_case", "t_c", "delta", "vertex_time"}, numbered("a", n - 1), {});
}

void cmd_classify_ds(Task& t) {
  const int n = t.b.integer("n", 4);
  if (n < 3) throw ConfigError(t.b.where() + ".n: must be at least 3");
  const auto t0s = t.b.numbers("t0");
  Vec xs = Vec::Constant(n - 1, std::numbers::pi / 2);
  xs[n - 2] = 0.0;
  if (t.b.has("x_star")) xs = fibre_point(t.b, "x_star", n - 1);
  std::vector<std::string> expect;
  if (t.b.has("expect")) {
    for (const auto& e : t.b.raw("expect")) {
      if (!e.is_string()) throw ConfigError(t.b.where() + ".expect: expected strings");
      expect.push_back(e.get<std::string>());
    }
    if (expect.size() != t0s.size()) throw ConfigError(t.b.where() + ".expect: one entry per t0");
  }
  t.b.finish();
  auto& T = t.table("", desitter_columns(n));
  for (std::size_t i = 0; i < t0s.size(); ++i) {
    Row r = desitter_row(n, t0s[i], xs);
    const auto kind = std::get<std::string>(r[1]);
    if (!expect.empty() && kind != expect[i]) t.fail("t0 = " + fmt(t0s[i]) + " classified as " + kind);
    T.add(std::move(r));
  }
}

void cmd_conjugate(Task& t) {
  const auto& S = t.space();
  const auto& M = S.require_grw("conjugate");
  const int m = M.fibre().dim();
  const double ts = t.b.number("vertex_time", 0.0);
  const Vec xs = fibre_point(t.b, "vertex", m);
  Vec u = fibre_point(t.b, "direction", m);
  const Orientation o = orientation(t.b);
  const double s_max = t.b.positive("s_max", 10.0);
  const bool full = t.b.boolean("full", false);
  const double tol = t.b.positive("tolerance", 1e-6);
  std::optional<std::vector<double>> expect;
  if (t.b.has("expect")) expect = t.b.numbers("expect");
  t.b.finish();
  u /= norm(M.fibre(), xs, u);
  const NullGeodesic g(M, ts, xs, u, o);
  const auto scalar = scalar_jacobi(M, g, s_max);
  auto& Z = t.table("zeros", {"method", "index", "s", "multiplicity", "kernel_rank"});
  for (std::size_t i = 0; i < scalar.zeros.size(); ++i)
    Z.add({std::string("scalar"), static_cast<std::int64_t>(i), scalar.zeros[i].s,
           static_cast<std::int64_t>(scalar.zeros[i].multiplicity), static_cast<std::int64_t>(-1)});
  double prop = std::nan("");
  if (full) {
    const auto F = full_jacobi_system(M, GrwSpace::point(ts, xs), g.velocity(0.0), scalar.s_max);
    prop = F.proportionality_residual;
    for (std::size_t i = 0; i < F.zeros.size(); ++i)
      Z.add({std::string("full"), static_cast<std::int64_t>(i), F.zeros[i].s,
             static_cast<std::int64_t>(F.zeros[i].multiplicity),
             static_cast<std::int64_t>(F.zeros[i].kernel_rank.value_or(-1))});
    bool agree = F.zeros.size() == scalar.zeros.size();
    for (std::size_t i = 0; agree && i < F.zeros.size(); ++i)
      agree = std::abs(F.zeros[i].s - scalar.zeros[i].s) <= tol;
    if (!agree) t.fail("full Jacobi zeros disagree with the scalar reduction");
  }
  auto& Sm = t.table("summary", {"s_max", "zeros", "proportionality_residual", "diagnostics"});
  Sm.add({scalar.s_max, static_cast<std::int64_t>(scalar.zeros.size()), prop, scalar.diagnostics});
  if (expect) {
    bool ok = expect->size() == scalar.zeros.size();
    for (std::size_t i = 0; ok && i < expect->size(); ++i) ok = std::abs((*expect)[i] - scalar.zeros[i].s) <= tol;
    if (!ok) t.fail("conjugate points differ from the expected list");
  }
}

void cmd_static_radial(Task& t) {
  const auto& fam = *t.space().radial;
  const double r0 = t.b.number("r0");
  const auto [s_lo, s_hi] = t.b.interval("s_range", {-0.5, 0.5});
  const int samples = t.b.integer("samples", 11);
  Vec leaf(2);
  leaf << 1.1, 0.6;
  if (t.b.has("leaf_point")) leaf = fibre_point(t.b, "leaf_point", 2);
  const double tol = t.b.positive("tolerance", 1e-5);
  const double id_tol = t.b.positive("identity_tolerance", 1e-6);
  std::optional<std::pair<double, double>> cert_range;
  CertificateOptions co;
  std::string expect;
  if (t.b.has("certificate")) {
    Block c = t.b.child("certificate");
    cert_range = c.interval("range", {0, 1});
    co.eps_int = c.positive("eps_int", co.eps_int);
    co.h3_tol = c.positive("h3_tol", co.h3_tol);
    co.identity_half_width = c.positive("identity_half_width", co.identity_half_width);
    expect = c.string("expect", "");
    c.finish();
  }
  t.b.finish();
  if (samples < 2) throw ConfigError(t.b.where() + ".samples: need at least 2");

  const RadialProfile P(fam, r0, s_lo, s_hi);
  const auto data = radial_static_data(P);
  const auto L = static_umbilic_construct(data.decomposition, data.potential, 0.0);
  const auto Ld = static_dual(L);
  // B* uses differences of width 2e-3 around each sample
  const double margin = 1e-2, a = P.s_lo() + margin, b = P.s_hi() - margin;
  auto rows = rows_parallel(static_cast<std::size_t>(samples), [&](std::size_t i) {
    const double s = a + (b - a) * static_cast<double>(i) / (samples - 1);
    Vec x(3);
    x << s, leaf[0], leaf[1];
    return Row{s,
               P.r(s),
               P.mu(s),
               P.potential(s),
               static_mean_curvature(L.model, L.h, x),
               L.mean_curvature_formula(x),
               static_mean_curvature(Ld.model, Ld.h, x),
               Ld.mean_curvature_formula(x)};
  });
  double worst = 0.0;
  for (const auto& r : rows)
    for (int k : {4, 6}) worst = std::max(worst, std::abs(std::get<double>(r[k]) - std::get<double>(r[k + 1])));
  auto& T = t.table("profile", {"s", "r", "mu", "potential", "H_star", "H_star_formula", "H_dual", "H_dual_formula"});
  append(T, std::move(rows));
  auto& Pm = t.table("profile_summary", {"s_lo", "s_hi", "truncated", "report"});
  Pm.add({P.s_lo(), P.s_hi(), P.truncated(), P.report()});
  if (!(worst <= tol)) t.fail("measured mean curvature differs from the formula by " + fmt(worst));

  if (cert_range) {
    const auto c = uniqueness_certificate(fam, cert_range->first, cert_range->second, co);
    auto& C = t.table("certificate", {"r", "h3"});
    for (const auto& s : c.samples) C.add({s.r, s.h3});
    auto& Cs = t.table("certificate_summary", {"verdict", "exactly_two", "longest_flat", "identity_residual"});
    Cs.add({c.verdict, c.exactly_two, c.longest_flat, c.identity_residual});
    if (!(c.identity_residual <= id_tol)) t.fail("identity residual " + fmt(c.identity_residual));
    if (!expect.empty() && c.verdict.rfind(expect, 0) != 0) t.fail("certificate verdict: " + c.verdict);
  }
}

void cmd_static_general(Task& t) {
  const auto& S = t.space();
  const auto& model = *S.static_model;
  const ScalarField h = ScalarField::parse(t.b.string("graph"), S.coordinates(), S.params);
  const auto grid = t.b.points("grid");
  check_points(grid, model.fibre->dim(), t.b.where() + ".grid");
  const double tol = t.b.positive("tolerance", 1e-5);
  t.b.finish();
  const int n = model.fibre->dim() + 1;
  const auto Lc = conformal_graph(model, h);
  auto rows = rows_parallel(grid.size(), [&](std::size_t i) {
    const Vec& x = grid[i];
    const Mat E = static_screen(model, h, x);
    const Mat Bs = static_b_star(model, h, x, E);
    const Mat gram = E.transpose() * model.chart()->metric(GrwSpace::point(h.value(x), x)) * E;
    const double xl = static_xi_ln_phi(model, h, x);
    const Mat B = second_fundamental_matrix(Lc, x, E);
    const double Hc = mean_curvature(Lc, x);
    Row r{static_cast<std::int64_t>(i)};
    push_vec(r, x);
    r.insert(r.end(), {xl, Bs.trace(), Hc, std::abs(conformal_H_transform(Bs.trace(), xl, n) - Hc),
                       (conformal_B_transform(Bs, xl, model.phi.value(x), gram) - B).norm()});
    return r;
  });
  const std::size_t w = rows.empty() ? 0 : rows[0].size();
  const double worst = rows.empty() ? 0.0 : std::max(max_of(rows, w - 1), max_of(rows, w - 2));
  auto& T = t.table("", with({"point"}, S.coordinates(), {"xi_ln_phi", "H_star", "H_conformal", "H_transfer_residual",
                                                          "B_transfer_residual"}));
  append(T, std::move(rows));
  if (!(worst <= tol)) t.fail("conformal transfer residual " + fmt(worst));
}

void cmd_static(Task& t) {
  const auto& S = t.space();
  if (S.radial) return cmd_static_radial(t);
  if (S.static_model) return cmd_static_general(t);
  throw ConfigError("static needs a spacetime of kind static or radial-static");
}

void cmd_obstruction(Task& t) {
  const auto& S = t.space();
  if (!S.fibre) throw ConfigError("obstruction needs a spacetime with a fibre");
  const auto& F = *S.fibre;
  const Vec x = fibre_point(t.b, "point", F.dim());
  const int dirs = t.b.integer("directions", 200);
  const int planes = t.b.integer("planes", 8);
  std::vector<Vec> extra;
  if (t.b.has("extra_directions")) extra = t.b.points("extra_directions");
  check_points(extra, F.dim(), t.b.where() + ".extra_directions");
  const double at_least = t.b.number("min_spread_at_least", -1.0);
  const double at_most = t.b.extended("min_spread_at_most", std::numeric_limits<double>::infinity());
  t.b.finish();
  const auto rep = obstruction_scan(F, x, dirs, planes, t.seed, extra);
  auto& T = t.table("", with({"index"}, numbered("v", F.dim()), {"spread", "sampled_spread"}));
  for (std::size_t i = 0; i < rep.directions.size(); ++i) {
    const auto& d = rep.directions[i];
    Row r{static_cast<std::int64_t>(i)};
    push_vec(r, d.direction);
    r.insert(r.end(), {d.spread, d.sampled_spread});
    T.add(std::move(r));
  }
  auto& Sm = t.table("summary", {"min_spread", "argmin"});
  Sm.add({rep.min_spread, static_cast<std::int64_t>(rep.argmin)});
  if (rep.min_spread < at_least) t.fail("min spread " + fmt(rep.min_spread) + " < " + fmt(at_least));
  if (rep.min_spread > at_most) t.fail("min spread " + fmt(rep.min_spread) + " > " + fmt(at_most));
}

void cmd_fixtures(Task& t) {
  const int n = t.b.integer("n", 4);
  const double null_tol = t.b.positive("tolerance", 1e-8);
  const double h_tol = t.b.positive("mean_curvature_tolerance", 1e-6);
  t.b.finish();
  if (n < 3) throw ConfigError(t.b.where() + ".n: must be at least 3");
  auto& T = t.table("table1", with({"fixture", "point"}, numbered("x", n - 1),
                                   {"h", "null_residual", "H", "umbilic_residual", "sampled_residual"}));
  std::vector<Row> summary;
  for (const auto& name : fixtures::table1_names()) {
    const auto row = fixtures::table1(name, n);
    const auto& L = *row.graph;
    const auto null = validate_null_graph(L, row.grid);
    const auto umb = umbilicity_test(L, row.grid, t.seed);
    auto rows = rows_parallel(row.grid.size(), [&](std::size_t i) {
      const Vec& x = row.grid[i];
      Row r{name, static_cast<std::int64_t>(i)};
      push_vec(r, x);
      r.insert(r.end(), {L.height(x), null.residuals[i], mean_curvature(L, x), umb.samples[i].residual,
                         umb.samples[i].sampled_residual});
      return r;
    });
    const double maxH = max_of(rows, 3 + (n - 1));
    append(T, std::move(rows));
    const bool ok = null.max_residual <= null_tol && maxH <= h_tol;
    summary.push_back({name, null.max_residual, maxH, ok});
    if (!ok) t.fail(name + ": null residual " + fmt(null.max_residual) + ", max |H| " + fmt(maxH));
  }
  auto& Sm = t.table("summary", {"fixture", "max_null_residual", "max_abs_H", "passed"});
  append(Sm, std::move(summary));
  auto& D = t.table("desitter_duals", desitter_columns(n));
  const double tc = classify_desitter_dual(n, 0.5, Vec::Constant(n - 1, 1.0)).t_c;
  Vec xs = Vec::Constant(n - 1, std::numbers::pi / 2);
  xs[n - 2] = 0.0;
  for (double t0 : {0.4, tc, 1.5}) D.add(desitter_row(n, t0, xs));
}

using Handler = void (*)(Task&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> h{
      {"validate", cmd_validate},   {"cone", cmd_cone},           {"umbilic", cmd_umbilic},
      {"reconstruct", cmd_reconstruct}, {"construct", cmd_construct}, {"dual", cmd_dual},
      {"classify-ds", cmd_classify_ds}, {"conjugate", cmd_conjugate}, {"static", cmd_static},
      {"obstruction", cmd_obstruction}, {"fixtures", cmd_fixtures}};
  return h;
}

}  // namespace

std::uint64_t SeedPolicy::resolve(std::optional<std::uint64_t> task) const {
  if (cli) return *cli;
  if (task) return *task;
  if (env) return *env;
  return 1;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [n, h] : handlers()) out.push_back(n);
    return out;
  }();
  return names;
}

CommandResult run_command(const std::string& command, const std::optional<Spacetime>& spacetime,
                          const std::vector<Json>& tasks, const SeedPolicy& seeds, std::uint64_t& seed_used) {
  Handler handler = nullptr;
  for (const auto& [n, h] : handlers())
    if (n == command) handler = h;
  if (!handler) throw ConfigError("unknown command '" + command + "'");

  std::vector<Json> selected;
  for (const auto& t : tasks) {
    if (!t.contains("command") || t["command"] == command) selected.push_back(t);
  }
  static const Json empty = Json::object();
  if (selected.empty()) {
    if (command != "fixtures") throw ConfigError("no task block for command '" + command + "'");
    selected.push_back(empty);
  }

  CommandResult out;
  const Spacetime* S = spacetime ? &*spacetime : nullptr;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const std::string where = "task[" + std::to_string(i) + "]";
    Block b(selected[i], where);
    if (b.has("command")) b.string("command");
    std::optional<std::uint64_t> ts;
    if (b.has("seed")) {
      const Json& s = b.raw("seed");
      if (!s.is_number_unsigned()) throw ConfigError(where + ".seed: expected a non-negative integer");
      ts = s.get<std::uint64_t>();
    }
    const std::uint64_t seed = seeds.resolve(ts);
    if (i == 0) seed_used = seed;
    std::string name = command;
    for (auto& c : name)
      if (c == '-') c = '_';
    if (selected.size() > 1) name += "_" + std::to_string(i);
    Task t{std::move(b), S, seed, name, &out};
    try {
      handler(t);
    } catch (const ConfigError&) {
      throw;
    } catch (const expr::ParseError&) {
      throw;
    } catch (const Error& e) {
      t.fail(std::string("computation failed: ") + e.what());
    }
  }
  return out;
}

}  // namespace nullkit::app
