#include <cmath>
#include <random>

#include "ahem/asymptotics.hpp"
#include "ahem/maxwell.hpp"
#include "doctest.h"
#include "mode_ode.hpp"

using namespace ahem;

namespace {

double mode_error(const Field& U, int n, int l) {
  const Grid& g = *U.grid;
  std::vector<double> rh;
  for (int i = 1; i < g.n_rho(); ++i) rh.push_back(g.rho()(i));
  const std::vector<double> f = oracle::mode_profile(n, l, rh);
  double e = 0;
  for (int q = 0; q < g.size(); ++q) {
    if (g.is_boundary(q)) continue;
    e = std::max(e, std::abs(U.comps[0](q) - f[g.rho_index(q) - 1] * zonal_harmonic(n, l, g.theta_at(q))));
  }
  return e;
}

Field minus_boundary(const Field& U, const BoundaryData& bd) {
  Field d = U;
  d.comps[0] -= bd.U_hat_nodal(*U.grid);
  d.name = "U - U_hat";
  return d;
}

}  // namespace

TEST_CASE("constant boundary potential gives a constant field") {
  for (int n : {3, 4, 5}) {
    for (Symmetry sym : {Symmetry::axisymmetric, Symmetry::radial}) {
      auto g = Grid::build(Chart{n, sym}, 20, sym == Symmetry::radial ? 0 : 6);
      auto [t, bd] = ads_background(n, g);
      bd.U_hat = {{0, 0.3}};
      const MaxwellSolution s = solve_maxwell(bd, t);
      CHECK((s.U.comps[0].array() - 0.3).abs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("n = 3 dipole matches the mode ODE") {
  auto g = Grid::build(Chart{3, Symmetry::axisymmetric}, 32, 16);
  auto [t, bd] = ads_background(3, g);
  bd.U_hat = {{1, 1.0}};
  const MaxwellSolution s = solve_maxwell(bd, t);
  CHECK(mode_error(s.U, 3, 1) < 1e-8);
  CHECK(s.residual_conditioned < 1e-10);

  // the ρ² term biases the fit on [ρ₃, 0.3] low by O(ρ_max); ρ₃ shrinks with N_ρ
  auto g128 = Grid::build(Chart{3, Symmetry::axisymmetric}, 128, 16);
  auto [t128, bd128] = ads_background(3, g128);
  bd128.U_hat = {{1, 1.0}};
  const DecayFit f = fit_decay(minus_boundary(solve_maxwell(bd128, t128).U, bd128), DecayModel::pure_power);
  CHECK(std::abs(f.exponent - 1.0) < 0.05);
}

TEST_CASE("n = 4 log coefficient from solved fields") {
  for (int l : {1, 2}) {
    auto g = Grid::build(Chart{4, Symmetry::axisymmetric}, 48, 16);
    auto [t, bd] = ads_background(4, g);
    bd.U_hat = {{l, 1.0}};
    const MaxwellSolution s = solve_maxwell(bd, t);
    // the ρ²lnρ term limits the spectral rate
    CHECK(mode_error(s.U, 4, l) < 1e-5);
    const LogCoefficient fit = extract_log_coefficient(s.U, bd);
    const LogCoefficient pr = predicted_log_coefficient(bd, *g);
    CHECK(fit.status == LogStatus::fitted);
    CHECK((fit.value - pr.value).cwiseAbs().maxCoeff() < 0.02 * pr.sup());

    const Field d = minus_boundary(s.U, bd);
    const DecayFit pl = fit_decay(d, DecayModel::power_plus_log);
    const DecayFit pp = fit_decay(d, DecayModel::pure_power);
    CHECK(pp.residual >= 5.0 * pl.residual);
  }
}

TEST_CASE("predicted log coefficients") {
  BoundaryData bd;
  bd.n = 4;
  bd.U_hat = {{1, 1.0}};
  for (double th : {0.0, 0.4, 1.3, 2.9, M_PI})
    CHECK(predicted_log_coefficient_at(bd, th) == doctest::Approx(1.5 * std::cos(th)).epsilon(1e-12));
  bd.U_hat = {{2, 1.0}};
  for (double th : {0.0, 0.4, 1.3, 2.9})
    CHECK(predicted_log_coefficient_at(bd, th) == doctest::Approx(4.0 * zonal_harmonic(4, 2, th)).epsilon(1e-12));
  bd.U_hat = {{0, 2.0}};
  CHECK(predicted_log_coefficient_at(bd, 0.7) == 0.0);

  // V̆ = 1 + 0.2 cos θ, Û = cos θ: U_ln = ½(3 cos θ + 0.2 sin²θ / V̆)
  bd.U_hat = {{1, 1.0}};
  bd.V_breve = {{0, 1.0}, {1, 0.2}};
  for (double th : {0.0, 1e-9, 0.5, 1.6, 3.0}) {
    const double v = 1.0 + 0.2 * std::cos(th);
    const double want = 0.5 * (3.0 * std::cos(th) + 0.2 * std::sin(th) * std::sin(th) / v);
    CHECK(predicted_log_coefficient_at(bd, th) == doctest::Approx(want).epsilon(1e-10));
  }

  Eigen::VectorXd th(3);
  th << 0.1, 1.0, 2.0;
  bd.n = 3;
  bd.V_breve = {{0, 1.0}};
  const LogCoefficient a = predicted_log_coefficient(bd, th);
  CHECK(a.status == LogStatus::absent);
  CHECK(a.sup() == 0.0);
  bd.n = 5;
  CHECK(predicted_log_coefficient(bd, th).status == LogStatus::conjectural);
}

TEST_CASE("log-term integral identity") {
  auto g = Grid::build(Chart{4, Symmetry::axisymmetric}, 8, 16);
  BoundaryData bd;
  bd.n = 4;
  bd.U_hat = {{1, 1.0}};
  LogIdentity id = logterm_identity_check(bd, predicted_log_coefficient(bd, *g), *g);
  CHECK(id.residual < 1e-8);
  CHECK(id.rhs > 0.0);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    bd.U_hat = {{0, u(rng)}, {1, u(rng)}, {2, u(rng)}, {3, u(rng)}};
    bd.V_breve = {{0, 1.0}, {1, 0.3 * u(rng)}, {2, 0.2 * u(rng)}};
    id = logterm_identity_check(bd, predicted_log_coefficient(bd, *g), *g);
    CHECK(id.residual < 1e-6);
  }

  bd.U_hat = {{0, 1.0}};
  id = logterm_identity_check(bd, predicted_log_coefficient(bd, *g), *g);
  CHECK(id.rhs == 0.0);
  CHECK(id.residual == 0.0);
}

TEST_CASE("log coefficient of a synthetic expansion") {
  auto g = Grid::build(Chart{4, Symmetry::axisymmetric}, 48, 8);
  BoundaryData bd;
  bd.n = 4;
  bd.U_hat = {{1, 1.0}};
  Eigen::VectorXd v(g->size());
  for (int q = 0; q < g->size(); ++q) {
    const double r = g->rho_at(q), c = std::cos(g->theta_at(q));
    const double lr = r > 0 ? std::log(r) : 0.0;
    v(q) = c + 0.7 * r * r * lr * c + r * r - 0.3 * std::pow(r, 4) * lr;
  }
  const LogCoefficient fit = extract_log_coefficient(Field::scalar(g, v, "U"), bd);
  for (int j = 0; j < g->n_ang(); ++j) {
    CHECK(std::abs(fit.value(j) - 0.7 * std::cos(fit.theta(j))) < 0.7e-3);
    CHECK(std::abs(fit.rho2(j) - 1.0) < 1e-3);
  }
  CHECK(fit.fit_residual < 1e-10);
}

TEST_CASE("solved potential obeys the maximum principle") {
  auto g = Grid::build(Chart{4, Symmetry::axisymmetric}, 24, 12);
  auto [t, bd] = ads_background(4, g);
  bd.U_hat = {{0, 0.5}, {1, 1.0}, {2, -0.4}};
  const MaxwellSolution s = solve_maxwell(bd, t);
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k <= 2000; ++k) {
    const double u = bd.U_hat_at(M_PI * k / 2000.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(s.U.comps[0].minCoeff() >= lo - 1e-10);
  CHECK(s.U.comps[0].maxCoeff() <= hi + 1e-10);
}

TEST_CASE("Maxwell error paths") {
  auto g = Grid::build(Chart{4, Symmetry::axisymmetric}, 16, 6);
  auto [t, bd] = ads_background(4, g);
  bd.U_hat = {{1, 1.0}};
  CHECK_THROWS_AS(solve_maxwell(bd, t, 0.0), ConfigError);
  BoundaryData b3 = bd;
  b3.n = 3;
  CHECK_THROWS_AS(solve_maxwell(b3, t), ConfigError);

  auto gr = Grid::build(Chart{4, Symmetry::radial}, 16, 0);
  auto [tr, bdr] = ads_background(4, gr);
  bdr.U_hat = {{1, 1.0}};
  CHECK_THROWS_AS(solve_maxwell(bdr, tr), ConfigError);

  auto g3 = Grid::build(Chart{3, Symmetry::axisymmetric}, 16, 6);
  CHECK_THROWS_AS(extract_log_coefficient(Field::zeros(g3, TensorKind::scalar), b3), ConfigError);
  CHECK_THROWS_AS(extract_log_coefficient(Field::zeros(g, TensorKind::scalar), bd, LogFitWindow{0.0, 0.3, 0}),
                  ConfigError);
  CHECK_THROWS_AS(extract_log_coefficient(Field::zeros(g, TensorKind::scalar), bd, LogFitWindow{0.0, 0.05, 2}),
                  ConfigError);
}
