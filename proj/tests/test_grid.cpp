#include <cmath>
#include <numbers>

#include "ahem/grid.hpp"
#include "doctest.h"

using namespace ahem;
using Eigen::VectorXd;

namespace {

Chart radial(int n) { return Chart{n, Symmetry::radial}; }
Chart axi(int n) { return Chart{n, Symmetry::axisymmetric}; }

VectorXd sample(const Grid& g, auto&& f) {
  VectorXd v(g.size());
  for (int q = 0; q < g.size(); ++q) v(q) = f(g.rho_at(q), g.theta_at(q));
  return v;
}

}  // namespace

TEST_CASE("radial derivative is exact on low-degree polynomials") {
  auto g = Grid::build(radial(3), 32, 0);
  const VectorXd f = sample(*g, [](double r, double) { return r * r * r; });
  const VectorXd df = g->apply_rho(g->d_rho(), f);
  const VectorXd d2f = g->apply_rho(g->d2_rho(), f);
  for (int i = 0; i < g->n_rho(); ++i) {
    const double r = g->rho()(i);
    CHECK(df(i) == doctest::Approx(3 * r * r).epsilon(1e-12));
    CHECK(std::abs(d2f(i) - 6 * r) < 1e-10);
  }
  const VectorXd ones = VectorXd::Ones(g->size());
  CHECK(g->apply_rho(g->d_rho(), ones).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("differentiate on fields") {
  auto g = Grid::build(axi(3), 16, 16);
  Field c = Field::scalar(g, VectorXd::Constant(g->size(), 2.5));
  CHECK(differentiate(c, Direction::rho).sup_norm() < 1e-11);
  CHECK(differentiate(c, Direction::theta).sup_norm() < 1e-11);

  Field r2 = Field::scalar(g, sample(*g, [](double r, double) { return r * r; }));
  const Field dr2 = differentiate(r2, Direction::rho);
  for (int q = 0; q < g->size(); ++q) CHECK(std::abs(dr2.comps[0](q) - 2 * g->rho_at(q)) < 1e-12);

  Field st = Field::scalar(g, sample(*g, [](double, double t) { return std::sin(t); }));
  const Field dst = differentiate(st, Direction::theta);
  double err = 0.0;
  for (int q = 0; q < g->size(); ++q) err = std::max(err, std::abs(dst.comps[0](q) - std::cos(g->theta_at(q))));
  CHECK(err < 1e-10);

  auto gr = Grid::build(radial(3), 16, 0);
  CHECK_THROWS_AS(differentiate(Field::zeros(gr, TensorKind::scalar), Direction::theta), ConfigError);
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS_AS(Grid::build(axi(3), 4, 8), ConfigError);
  CHECK_THROWS_AS(Grid::build(axi(3), 16, 0), ConfigError);
  CHECK_THROWS_AS(Grid::build(axi(4), 512, 512), ConfigError);
  CHECK_NOTHROW(Grid::build(radial(3), 8, 0));
}

TEST_CASE("boundary quadrature matches sphere areas") {
  auto g4 = Grid::build(axi(4), 48, 24);
  Field one = Field::scalar(g4, VectorXd::Ones(g4->size()));
  CHECK(std::abs(integrate(one, Domain::boundary) - 2 * std::numbers::pi * std::numbers::pi) < 1e-12);

  auto g3 = Grid::build(axi(3), 16, 12);
  Field one3 = Field::scalar(g3, VectorXd::Ones(g3->size()));
  CHECK(std::abs(integrate(one3, Domain::boundary) - 4 * std::numbers::pi) < 1e-10);

  auto g3r = Grid::build(radial(3), 16, 0);
  Field one3r = Field::scalar(g3r, VectorXd::Ones(g3r->size()));
  CHECK(std::abs(integrate(one3r, Domain::boundary) - 4 * std::numbers::pi) < 1e-10);

  CHECK(integrate(Field::zeros(g4, TensorKind::scalar), Domain::boundary) == 0.0);
}

TEST_CASE("boundary quadrature is exact on products of zonal harmonics") {
  // ∫ Z_l Z_m = δ_lm |S^{n−1}| / dim H_l, with dim H_l = 2l+1 on S², (l+1)² on S³.
  for (int n : {3, 4}) {
    const int nt = 16;
    auto g = Grid::build(axi(n), 8, nt);
    for (int l = 0; l <= nt / 2; ++l)
      for (int m = 0; l + m < nt; ++m) {
        Field f = Field::scalar(g, sample(*g, [&](double, double t) {
          return zonal_harmonic(n, l, t) * zonal_harmonic(n, m, t);
        }));
        const double dim = n == 3 ? 2.0 * l + 1 : (l + 1.0) * (l + 1.0);
        const double expect = l == m ? sphere_area(n - 1) / dim : 0.0;
        CHECK(std::abs(integrate(f, Domain::boundary) - expect) < 1e-12);
      }
  }
}

TEST_CASE("bulk integration checks the declared weight") {
  auto g = Grid::build(axi(3), 16, 8);
  Field f = Field::scalar(g, VectorXd::Ones(g->size()), "one", 0.0);
  CHECK_THROWS_AS(integrate(f, Domain::bulk), ConfigError);
  f.weight = 3.0;
  CHECK_NOTHROW(integrate(f, Domain::bulk));
  CHECK(integrate(Field::zeros(g, TensorKind::scalar, "z", 3.0), Domain::bulk) == 0.0);
  Field v = Field::zeros(g, TensorKind::covector);
  CHECK_THROWS_AS(integrate(v, Domain::boundary), ConfigError);
}

TEST_CASE("bulk quadrature converges on a compactly supported bump") {
  // ∫ φ(r) dvol over hyperbolic 3-space, φ a bump in the geodesic radius.
  auto bump = [](double rho) {
    const double x = (rho - 1.0) / 0.5;
    return std::abs(x) < 1 ? std::exp(-1.0 / (1 - x * x)) : 0.0;
  };
  auto total = [&](int nr) {
    auto g = Grid::build(radial(3), nr, 0);
    Field f = Field::scalar(g, sample(*g, [&](double r, double) { return bump(r); }), "b", 10.0);
    return integrate(f, Domain::bulk);
  };
  const double a = total(32), b = total(64), c = total(128);
  CHECK(std::abs(b - c) < 0.1 * std::abs(a - c) + 1e-12);
}
