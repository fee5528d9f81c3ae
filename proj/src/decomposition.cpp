#include "nullkit/decomposition.hpp"

namespace nullkit {

namespace {

Vec join(double s, const Vec& z) {
  Vec p(z.size() + 1);
  p[0] = s;
  p.tail(z.size()) = z;
  return p;
}

}  // namespace

double TwistedDecomposition::mu_at(double s, const Vec& z) const { return mu.value(join(s, z)); }

double TwistedDecomposition::mu_s(double s, const Vec& z) const { return mu.gradient(join(s, z))[0]; }

FibrePtr TwistedDecomposition::fibre() const { return std::make_shared<TwistedFibre>(a, b, leaf, mu); }

}  // namespace nullkit
