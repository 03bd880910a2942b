#include <cmath>

#include "ahem/asymptotics.hpp"
#include "doctest.h"

using namespace ahem;

namespace {

template <class F>
Field sample(const GridPtr& g, F f, const char* name = "f") {
  Eigen::VectorXd v(g->size());
  for (int q = 0; q < g->size(); ++q) v(q) = f(g->rho_at(q), g->theta_at(q));
  return Field::scalar(g, v, name);
}

}  // namespace

TEST_CASE("pure power and power-plus-log fits recover their parameters") {
  auto g = Grid::build(Chart{4, Symmetry::axisymmetric}, 48, 12);
  const Field p = sample(g, [](double r, double th) { return (2.0 + std::cos(th)) * std::pow(r, 1.5); });
  const DecayFit a = fit_decay(p, DecayModel::pure_power);
  CHECK(a.exponent == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(a.residual < 1e-12);
  CHECK(a.half_width < 1e-10);
  for (int j = 0; j < g->n_ang(); ++j) CHECK(a.exponents(j) == doctest::Approx(1.5).epsilon(1e-12));

  const Field l = sample(g, [](double r, double) { return r * r * std::log(r) + 0.3 * r * r; });
  const DecayFit b = fit_decay(l, DecayModel::power_plus_log);
  CHECK(b.exponent == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(b.log_coefficient - 1.0) < 5e-3);
  CHECK(std::abs(b.coefficient - 0.3) < 0.3e-4);
  CHECK(b.residual < 1e-8);
  // the pure power misses the log
  CHECK(fit_decay(l, DecayModel::pure_power).residual > 1e2 * b.residual);
}

TEST_CASE("decay exponents are scale-equivariant") {
  auto g = Grid::build(Chart{4, Symmetry::axisymmetric}, 48, 8);
  const Field f = sample(g, [](double r, double th) {
    return r * r * (0.7 * std::log(r) * std::cos(th) + 1.0) + 0.2 * std::pow(r, 3);
  });
  for (DecayModel m : {DecayModel::pure_power, DecayModel::power_plus_log}) {
    const DecayFit ref = fit_decay(f, m);
    for (double c : {1e-7, -3.0, 4.1e5}) {
      Field s = f;
      s.comps[0] *= c;
      const DecayFit fc = fit_decay(s, m);
      CHECK(std::abs(fc.exponent - ref.exponent) < 1e-12);
      CHECK(std::abs(fc.residual - ref.residual) < 1e-12);
    }
  }
}

TEST_CASE("vanishing fields and small windows") {
  auto g = Grid::build(Chart{3, Symmetry::axisymmetric}, 48, 6);
  const DecayFit z = fit_decay(Field::zeros(g, TensorKind::sym2, "h"), DecayModel::pure_power);
  CHECK(z.vanishes());
  CHECK(z.exponent > 0.0);

  auto small = Grid::build(Chart{3, Symmetry::axisymmetric}, 12, 6);
  CHECK_THROWS_AS(fit_decay(Field::zeros(small, TensorKind::scalar), DecayModel::pure_power), ConfigError);
  CHECK_THROWS_AS(fit_decay(Field::zeros(g, TensorKind::scalar), DecayModel::pure_power, DecayWindow{3, 0.01}),
                  ConfigError);
}

TEST_CASE("tensors are fitted through their frame norm") {
  for (Symmetry sym : {Symmetry::axisymmetric, Symmetry::radial}) {
    auto g = Grid::build(Chart{5, sym}, 48, sym == Symmetry::radial ? 0 : 8);
    Field h = Field::zeros(g, TensorKind::sym2, "h");
    for (int q = 0; q < g->size(); ++q) {
      const double r = g->rho_at(q);
      for (int c = 0; c < h.num_components(); ++c) h.comps[c](q) = (c + 1.0) * r * r;
    }
    const DecayFit f = fit_decay(h, DecayModel::pure_power);
    CHECK(f.exponent == doctest::Approx(2.0).epsilon(1e-12));
    // |h|² = Σ mult·c² with multiplicities (1, 2, 1, n − 2) or (1, n − 1)
    const double norm2 = sym == Symmetry::radial ? 1.0 + 4.0 * 4 : 1.0 + 2.0 * 4 + 9.0 + 3.0 * 16;
    CHECK(f.coefficient == doctest::Approx(std::sqrt(norm2)).epsilon(1e-12));
  }
}

TEST_CASE("boundary data of the background and of a metric with a ρ¹ term") {
  for (int n : {3, 4}) {
    auto g = Grid::build(Chart{n, Symmetry::axisymmetric}, 32, 8);
    StaticTriple t = StaticTriple::background(g);
    const FGData d = fg_check(t);
    CHECK(d.odd_residual < 1e-10);
    for (int j = 0; j < g->n_ang(); ++j) {
      CHECK(d.V_breve(j) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(d.rho2_coefficient(j) == doctest::Approx(-0.5).epsilon(1e-10));
      CHECK(d.h_breve[0](j) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(d.h_breve[1](j)) < 1e-12);
      CHECK(d.h_breve[2](j) == doctest::Approx(1.0).epsilon(1e-12));
    }

    // s²(1 + ĥ_f̂f̂) = s² + 10⁻³ρ cos θ
    const int ff = t.hbar.num_components() - 1;
    for (int q = 0; q < g->size(); ++q) {
      const double r = g->rho_at(q), s = 1.0 - 0.25 * r * r;
      t.hbar.comps[ff](q) = 1e-3 * r * std::cos(g->theta_at(q)) / (s * s);
    }
    const FGData e = fg_check(t);
    double peak = 0;
    for (int j = 0; j < g->n_ang(); ++j) peak = std::max(peak, std::abs(std::cos(e.theta(j))));
    CHECK(std::abs(e.odd_residual - 1e-3 * peak) < 1e-4 * peak);
  }
}

TEST_CASE("lapse decay of a perturbed background") {
  auto g = Grid::build(Chart{4, Symmetry::radial}, 48, 0);
  StaticTriple t = StaticTriple::background(g);
  for (int q = 0; q < g->size(); ++q) {
    const double r = g->rho_at(q);
    t.wbar.comps[0](q) = 0.1 * r * r / (1.0 + 0.25 * r * r) * (1.0 + 0.1 * r);
  }
  // V − V̊ = V̊ w̄ = 0.1 ρ (1 + 0.1 ρ)
  Field dv = t.wbar;
  for (int q = 0; q < g->size(); ++q) {
    const double r = g->rho_at(q);
    dv.comps[0](q) *= (1.0 + 0.25 * r * r) / r;
  }
  const DecayFit f = fit_decay(dv, DecayModel::pure_power);
  CHECK(std::abs(f.exponent - 1.0) < 0.05);
  CHECK(fg_check(t).V_breve(0) == doctest::Approx(1.0).epsilon(1e-12));
}
