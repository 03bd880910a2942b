#ifndef AHEM_TEST_FIXTURES_HPP
#define AHEM_TEST_FIXTURES_HPP

// Smooth test data on the compactified hyperbolic chart. Functions of
// C = 1/cosh r = ρ/(1 + ρ²/4) and Z = tanh r cos θ = (1 − ρ²/4)cos θ/(1 + ρ²/4)
// are regular both at the centre and on the axis.

#include <cmath>
#include <functional>
#include <random>

#include "ahem/geometry.hpp"

namespace fixtures {

inline double C(double rho) { return rho / (1.0 + 0.25 * rho * rho); }
inline double Z(double rho, double theta) {
  return (1.0 - 0.25 * rho * rho) * std::cos(theta) / (1.0 + 0.25 * rho * rho);
}

struct Coeffs {
  double w0, w1, h0, h1, h2, u0, u1;
};

inline Coeffs random_coeffs(std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {scale * u(rng), u(rng), scale * u(rng), u(rng), scale * u(rng), u(rng), u(rng)};
}

// Regular perturbation of the background: w̄ and a conformal-plus-radial
// metric perturbation decaying like ρ², U with boundary value u0 + u1 cos θ.
inline ahem::StaticTriple regular_triple(const ahem::GridPtr& g, const Coeffs& k) {
  ahem::StaticTriple t = ahem::StaticTriple::background(g);
  for (int q = 0; q < g->size(); ++q) {
    const double r = g->rho_at(q), th = g->theta_at(q);
    const double c = C(r), z = g->axisymmetric() ? Z(r, th) : 0.0;
    const double c2 = c * c;
    t.wbar.comps[0](q) = k.w0 * c2 * (1.0 + k.w1 * z);
    const double conf = k.h0 * c2 * (1.0 + k.h1 * z);
    // dr⊗dr has frame component 1 on ρ̂ρ̂; its coefficient must vanish at the centre
    const double radial = k.h2 * c2 * (1.0 - c2);
    t.hbar.comps[0](q) = conf + radial;
    if (g->axisymmetric()) {
      t.hbar.comps[2](q) = conf;
      t.hbar.comps[3](q) = conf;
    } else {
      t.hbar.comps[1](q) = conf;
    }
    t.U.comps[0](q) = k.u0 + k.u1 * z;
  }
  return t;
}

inline ahem::Field scalar_of(const ahem::GridPtr& g, const std::function<double(double, double)>& f, double weight = 0.0) {
  ahem::Field out = ahem::Field::zeros(g, ahem::TensorKind::scalar, "f", weight);
  for (int q = 0; q < g->size(); ++q) out.comps[0](q) = f(g->rho_at(q), g->theta_at(q));
  return out;
}

inline ahem::Field regular_sym2(const ahem::GridPtr& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng), e = u(rng);
  ahem::Field h = ahem::Field::zeros(g, ahem::TensorKind::sym2, "h", 2.0);
  for (int q = 0; q < g->size(); ++q) {
    const double r = g->rho_at(q), th = g->theta_at(q);
    const double k = C(r), z = g->axisymmetric() ? Z(r, th) : 0.0;
    const double conf = k * k * (a + b * z);
    const double radial = c * k * k * (1.0 - k * k);
    h.comps[0](q) = conf + radial;
    if (g->axisymmetric()) {
      // sin θ·(1 − C²)-type profiles keep ρ̂θ̂ regular on the axis and at the centre
      h.comps[1](q) = d * k * k * (1.0 - k * k) * std::sin(th);
      h.comps[2](q) = conf + e * k * k * (1.0 - k * k) * std::sin(th) * std::sin(th);
      h.comps[3](q) = conf;
    } else {
      h.comps[1](q) = conf;
    }
  }
  return h;
}

inline ahem::Field regular_scalar(const ahem::GridPtr& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng), b = u(rng), c = u(rng);
  return scalar_of(g, [&](double r, double th) {
    const double k = C(r), z = g->axisymmetric() ? Z(r, th) : 0.0;
    return k * k * (a + b * z + c * z * z);
  }, 2.0);
}

// C⁷ bump on (a, b), peak 1; spectral derivatives converge quickly on it
inline double bump(double r, double a, double b) {
  if (r <= a || r >= b) return 0.0;
  return std::pow(4.0 * (r - a) * (b - r) / ((b - a) * (b - a)), 8);
}

}  // namespace fixtures

#endif
