// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ahem/einstein.hpp"
#include "ahem/frame.hpp"
#include "ahem/linops.hpp"
#include "ahem/stress.hpp"
#include "fixtures.hpp"
#include "mode_ode.hpp"

using namespace ahem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() ? "; " : "") << what << (ok ? "" : " [x]");
  }
  void info(const std::string& what) { detail << (detail.tellp() ? "; " : "") << what; }
};

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

double interior_sup(const Field& f, const std::function<double(int, int, double)>& g) {
  double m = 0;
  for (int c = 0; c < f.num_components(); ++c)
    for (int q = 0; q < f.grid->size(); ++q)
      if (!f.grid->is_boundary(q)) m = std::max(m, g(c, q, f.comps[c](q)));
  return m;
}

Field minus_boundary(const Field& U, const BoundaryData& bd) {
  Field d = U;
  d.comps[0] -= bd.U_hat_nodal(*U.grid);
  d.name = "U - U_hat";
  return d;
}

// Zonal harmonics on S³ normalised to 1 at θ = 0, and their θ-derivatives.
double z4(int l, double th) { return l == 1 ? std::cos(th) : (4.0 * std::cos(th) * std::cos(th) - 1.0) / 3.0; }
double dz4(int l, double th) { return l == 1 ? -std::sin(th) : -8.0 * std::cos(th) * std::sin(th) / 3.0; }

// ---------------------------------------------------------------------------

void background(Outcome& o) {
  for (int n : {3, 4})
    for (Symmetry sym : {Symmetry::radial, Symmetry::axisymmetric}) {
      auto g = Grid::build(Chart{n, sym}, 64, sym == Symmetry::radial ? 0 : 16);
      const auto [t, bd] = ads_background(n, g);
      const double res = static_residual(t).sup();
      const double target = -n * (n + 1.0);
      const double curv =
          interior_sup(warped_curvature(t, -1).scalar, [&](int, int, double v) { return std::abs(v - target); });
      const std::string tag = "n=" + std::to_string(n) + (sym == Symmetry::radial ? " radial" : " 64x16");
      o.require(res < 1e-10, tag + " residual " + fmt(res));
      o.require(curv < 1e-9, "R+n(n+1) " + fmt(curv));
    }
}

void linearization(Outcome& o) {
  std::mt19937 rng(21);
  for (int n : {3, 4}) {
    auto g = Grid::build(Chart{n, Symmetry::axisymmetric}, 16, 8);
    const auto [bg, bd] = ads_background(n, g);
    double worst = 0, ratio_lo = 1e300, ratio_hi = 0;
    for (int k = 0; k < 5; ++k) {
      const Field W = fixtures::regular_scalar(g, rng), h = fixtures::regular_sym2(g, rng);
      const LinearPair lp = apply_lL(W, h, bg);
      auto err = [&](double step) {
        StaticTriple t = bg;
        t.wbar.comps[0] = step * W.comps[0];
        for (int c = 0; c < h.num_components(); ++c) t.hbar.comps[c] = step * h.comps[c];
        const MapValue m = assemble_F(bd, t);
        double e = 0;
        for (int q = 0; q < g->size(); ++q) {
          if (g->is_boundary(q)) continue;
          e = std::max(e, std::abs(m.R_V.comps[0](q) / step - lp.l.comps[0](q)));
          for (int c = 0; c < h.num_components(); ++c)
            e = std::max(e, std::abs(m.R_g.comps[c](q) / step - lp.L.comps[c](q)));
        }
        return e;
      };
      const double h0 = 1e-4, e0 = err(h0), e1 = err(h0 / 2), e2 = err(h0 / 4);
      worst = std::max(worst, e0 / h0);
      for (double r : {e0 / e1, e1 / e2}) {
        ratio_lo = std::min(ratio_lo, r);
        ratio_hi = std::max(ratio_hi, r);
      }
    }
    o.require(worst <= 10.0, "n=" + std::to_string(n) + " max err/step " + fmt(worst));
    o.require(ratio_lo > 1.8 && ratio_hi < 2.2, "halving ratios [" + fmt(ratio_lo) + ", " + fmt(ratio_hi) + "]");
  }
}

void rewriting(Outcome& o) {
  std::mt19937 rng(22);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const int n = 3 + k % 2;
    auto g = Grid::build(Chart{n, Symmetry::axisymmetric}, 12, 8);
    const StaticTriple at =
        k < 2 ? ads_background(n, g).first : fixtures::regular_triple(g, fixtures::random_coeffs(rng, 0.3));
    const Field W = fixtures::regular_scalar(g, rng), h = fixtures::regular_sym2(g, rng);
    const RewriteDefect d = rewrite_defect(W, h, at);
    const RewrittenPair rp = apply_pP(W, h, at);
    worst = std::max({worst, d.p_conditioned / (1.0 + rp.p.sup_norm(true)),
                      d.P_conditioned / (1.0 + rp.P.sup_norm(true))});
  }
  o.require(worst < 1e-10, "rewrite defect " + fmt(worst));
  auto g = Grid::build(Chart{3, Symmetry::axisymmetric}, 16, 8);
  for (double s : {-3.0, -1.0, 3.0}) {
    double c = 0;
    for (int k = 0; k < 3; ++k)
      c = std::max(c, conjugation_defect(fixtures::regular_scalar(g, rng), s,
                                         fixtures::regular_triple(g, fixtures::random_coeffs(rng, 0.3))));
    o.require(c < 1e-10, "s=" + fmt(s) + " conjugation " + fmt(c));
  }
}

void beta_identity(Outcome& o) {
  // n = 3: U is smooth up to ρ = 0; n = 4 carries ρ²lnρ and is reported only
  for (int n : {3, 4}) {
    std::vector<double> err;
    double paths = 0;
    const std::vector<int> ladder{32, 48, 64};
    for (int nr : ladder) {
      auto g = Grid::build(Chart{n, Symmetry::axisymmetric}, nr, 16);
      auto [t, bd] = ads_background(n, g);
      bd.U_hat = {{1, 1.0}};
      t.U = solve_maxwell(bd, t).U;
      const SourcePair sp = source_pair(maxwell_stress(t), n);
      const Field b1 = beta(t, sp.a, sp.A), b2 = beta_expanded(t, sp.a, sp.A);
      err.push_back(conditioned_sup(b1, 2));
      for (int c = 0; c < b1.num_components(); ++c)
        paths = std::max(paths, interior_sup(b1, [&](int cc, int q, double v) {
          return cc == c ? std::abs(v - b2.comps[c](q)) : 0.0;
        }));
    }
    double order = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < ladder.size(); ++k)
      order = std::min(order, std::log(err[k - 1] / err[k]) / std::log(double(ladder[k]) / ladder[k - 1]));
    // rounding floor of the conditioned β for O(1) stress
    const bool floor = *std::max_element(err.begin(), err.end()) < 1e-10;
    std::string tag = "n=" + std::to_string(n) + " beta " + fmt(err[0]) + "/" + fmt(err[1]) + "/" + fmt(err[2]) +
                      (floor ? " (rounding floor)" : " order " + fmt(order));
    if (n == 3) {
      o.require(floor || order >= 3.0, tag);
      o.require(err.back() < 1e-6, "at 64 " + fmt(err.back()));
    } else {
      o.info("info " + tag);
    }
    o.require(paths < 1e-10, "paths " + fmt(paths));
  }
}

void maxwell_mode(Outcome& o) {
  {
    auto g = Grid::build(Chart{3, Symmetry::axisymmetric}, 32, 16);
    auto [t, bd] = ads_background(3, g);
    bd.U_hat = {{1, 1.0}};
    const Field U = solve_maxwell(bd, t).U;
    std::vector<double> rh;
    for (int i = 1; i < g->n_rho(); ++i) rh.push_back(g->rho()(i));
    const std::vector<double> f = oracle::mode_profile(3, 1, rh);
    double e = 0;
    for (int q = 0; q < g->size(); ++q)
      if (!g->is_boundary(q))
        e = std::max(e, std::abs(U.comps[0](q) - f[g->rho_index(q) - 1] * std::cos(g->theta_at(q))));
    o.require(e < 1e-8, "ODE error " + fmt(e));
  }
  for (int nr : {64, 160}) {
    auto g = Grid::build(Chart{3, Symmetry::axisymmetric}, nr, 16);
    auto [t, bd] = ads_background(3, g);
    bd.U_hat = {{1, 1.0}};
    const DecayFit f = fit_decay(minus_boundary(solve_maxwell(bd, t).U, bd), DecayModel::pure_power);
    const std::string tag = "exponent@" + std::to_string(nr) + " " + fmt(f.exponent);
    // the fit window starts at the third node, so the ρ² correction shrinks with N_ρ
    if (nr == 160) o.require(std::abs(f.exponent - 1.0) < 0.05, tag);
    else o.info(tag);
  }
}

void log_coefficient(Outcome& o) {
  const int n = 4;
  for (int l : {1, 2}) {
    auto g = Grid::build(Chart{n, Symmetry::axisymmetric}, 48, 16);
    auto [t, bd] = ads_background(n, g);
    bd.U_hat = {{l, 1.0}};
    const LogCoefficient ex = extract_log_coefficient(solve_maxwell(bd, t).U, bd);
    // U_ln = ½ l(l + 2) Z_l for V̆ = 1
    double diff = 0, ref = 0;
    for (int j = 0; j < ex.theta.size(); ++j) {
      const double want = 0.5 * l * (l + 2.0) * z4(l, ex.theta(j));
      diff = std::max(diff, std::abs(ex.value(j) - want));
      ref = std::max(ref, std::abs(want));
    }
    o.require(diff < 0.02 * ref, "l=" + std::to_string(l) + " U_ln rel " + fmt(diff / ref));

    // 2∫ÛU_ln = ∫|∇̆Û|² on S³: Simpson in θ with weight sin²θ
    const int m = 20000;
    double lhs = 0, rhs = 0;
    for (int k = 0; k <= m; ++k) {
      const double th = M_PI * k / m, w = (k == 0 || k == m ? 1.0 : (k % 2 ? 4.0 : 2.0)) * std::pow(std::sin(th), 2);
      lhs += w * 2.0 * z4(l, th) * 0.5 * l * (l + 2.0) * z4(l, th);
      rhs += w * dz4(l, th) * dz4(l, th);
    }
    const LogIdentity id = logterm_identity_check(bd, predicted_log_coefficient(bd, *g), *g);
    o.require(std::abs(lhs - rhs) < 1e-6 * rhs && id.residual < 1e-6,
              "identity " + fmt(std::abs(lhs - rhs) / rhs) + "/" + fmt(id.residual));
  }
  {
    auto g = Grid::build(Chart{n, Symmetry::axisymmetric}, 48, 16);
    auto [t, bd] = ads_background(n, g);
    bd.U_hat = {{0, 0.3}};
    const double s = extract_log_coefficient(solve_maxwell(bd, t).U, bd).sup();
    o.require(s < 1e-8, "constant U_ln " + fmt(s));
  }
  SolverConfig c;
  c.n = n;
  c.n_rho = 24;
  c.n_theta = 12;
  c.modes = {{0, 0.3}};
  c.epsilon = 1.0;
  const Solution s = newton_solve(c);
  const double w = s.triple.wbar.sup_norm(), h = s.triple.hbar.sup_norm();
  o.require(w < 1e-8 && h < 1e-8, "vacuum |W| " + fmt(w) + " |h| " + fmt(h));
}

std::optional<Solution> dipole;  // shared by criteria 7 and 8

SolverConfig dipole_config(double eps) {
  SolverConfig c;
  c.n = 4;
  c.n_rho = 48;
  c.n_theta = 24;
  c.modes = {{1, 1.0}};
  c.epsilon = eps;
  return c;
}

const Solution& solved_dipole() {
  if (!dipole) dipole = newton_solve(dipole_config(0.01));
  return *dipole;
}

void existence(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Solution& s = solved_dipole();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const ResidualReport r = verify_solution(s);
  o.require(secs <= 600.0, "solve " + fmt(secs) + " s, " + std::to_string(s.history.size()) + " evaluations");
  o.require(r.modified_sup < 1e-8, "modified " + fmt(r.modified_sup));
  o.require(r.omega_sup < 1e-8, "Omega " + fmt(r.omega_sup));
  // 𝓑(Ω) and the static residual are measured with the chart conditioning
  o.require(r.B_omega_cond < 1e-7, "B(Omega) " + fmt(r.B_omega_cond) + " (raw " + fmt(r.B_omega_sup) + ")");
  o.require(r.static_cond < 1e-7, "static " + fmt(r.static_cond) + " (raw " + fmt(r.static_sup) + ")");
  const Solution half = newton_solve(dipole_config(0.005));
  const double ratio = metric_perturbation_sup(s.triple) / metric_perturbation_sup(half.triple);
  o.require(std::abs(ratio - 4.0) < 0.4, "eps/half ratio " + fmt(ratio));
}

void decay(Outcome& o) {
  SolverConfig c3 = dipole_config(0.01);
  c3.n = 3;
  c3.n_theta = 16;
  const Solution s3 = newton_solve(c3);
  for (const Solution* s : {&s3, &solved_dipole()}) {
    const int n = s->config.n;
    const ResidualReport r = verify_solution(*s);
    double pure = 0, plog = 0;
    for (const DecayFit& f : r.fits) {
      const std::string tag = "n=" + std::to_string(n) + " " + f.name + " " + fmt(f.exponent);
      if (f.name == "V - V0") o.require(std::abs(f.exponent - 1.0) < 0.05, tag);
      if (f.name == "h") o.require(std::abs(f.exponent - 2.0) < 0.1, tag);
      if (f.name == "T_NN") o.require(std::abs(f.exponent - 4.0) < 0.2, tag);
      if (f.name == "U - U_hat") (f.model == DecayModel::pure_power ? pure : plog) = f.residual;
    }
    if (n == 4) o.require(pure >= 5.0 * plog, "n=4 U-U_hat residual ratio " + fmt(pure / plog));
    for (const std::string& note : r.notes) o.require(false, note);
  }
}

void weights(Outcome& o) {
  std::vector<std::pair<int, Rational>> cases{{3, Rational(-1)}, {4, Rational(-1)}, {3, Rational(-3)},
                                              {3, Rational(3)},  {5, Rational(-1)}, {4, Rational(3)}};
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> num(-30, 30), den(1, 8), dim(3, 7);
  while (cases.size() < 50) {
    const int n = dim(rng);
    const Rational s(num(rng), den(rng));
    if (s != Rational(1 - n)) cases.push_back({n, s});
  }
  int bad = 0;
  for (const auto& [n, s] : cases) {
    const WeightSpec w = weight_spec(n, s);
    const Rational m = s + Rational(n - 1), zero(0);
    const Rational lo = std::min(zero, m), hi = std::max(zero, m);
    // roots: sum n − 1, product −(s/2)(s/2 + n − 1), gap |s + n − 1|
    const bool roots = w.root_minus + w.root_plus == Rational(n - 1) &&
                       w.root_minus * w.root_plus == -(s / 2) * (s / 2 + Rational(n - 1)) &&
                       w.root_plus - w.root_minus == (m < zero ? -m : m);
    const bool kc = w.kernel_constants == (Rational(2) * s < Rational(1 - n));
    if (w.lower != lo || w.upper != hi || !roots || !kc || w.excluded) ++bad;
  }
  o.require(bad == 0, std::to_string(cases.size() - bad) + "/" + std::to_string(cases.size()) + " exact");
  const WeightSpec w3 = weight_spec(3, Rational(-1)), w4 = weight_spec(4, Rational(-1));
  o.require(w3.lower == Rational(0) && w3.upper == Rational(1) && w3.admissible(Rational(1, 2)),
            "n=3 delta in (0,1)");
  o.require(w4.lower == Rational(0) && w4.upper == Rational(2) && w4.admissible(Rational(1)), "n=4 delta=1 in (0,2)");
  o.require(weight_spec(3, Rational(-2)).excluded, "s=1-n excluded");
}

void nondegeneracy(Outcome& o) {
  for (int n : {3, 4}) {
    for (Symmetry sym : {Symmetry::radial, Symmetry::axisymmetric}) {
      const auto ladder = sym == Symmetry::radial ? std::vector<std::pair<int, int>>{{16, 0}, {32, 0}, {64, 0}}
                                                  : std::vector<std::pair<int, int>>{{8, 4}, {16, 8}};
      const NondegeneracyReport r = nondegeneracy_probe(Chart{n, sym}, ladder);
      std::string tag = "n=" + std::to_string(n) + (sym == Symmetry::radial ? " radial" : " axisym") + " sigma_min";
      bool ok = true;
      for (std::size_t k = 0; k < r.ladder.size(); ++k) {
        tag += " " + fmt(r.ladder[k].smallest);
        ok = ok && r.ladder[k].smallest > 1e-3;
        if (k > 0) {
          const double q = r.ladder[k].smallest / r.ladder[k - 1].smallest;
          ok = ok && q >= 0.5 && q <= 2.0;
        }
      }
      o.require(ok, tag);
    }
  }
}

void poincare(Outcome& o) {
  std::mt19937 rng(24);
  std::uniform_real_distribution<double> ua(0.02, 0.3), ub(0.6, 1.6), uc(-1.0, 1.0);
  auto bumps = [&](const GridPtr& g, int count) {
    std::vector<Field> out;
    for (int k = 0; k < count; ++k) {
      const double a = ua(rng), b = ub(rng), c = uc(rng);
      out.push_back(fixtures::scalar_of(g, [&](double r, double th) {
        const double x = r > 0 ? std::log(r / a) / std::log(b / a) : -1.0;
        return x > 0 && x < 1 ? fixtures::bump(x, 0.0, 1.0) * (1.0 + 0.5 * c * std::cos(th)) : 0.0;
      }));
    }
    return out;
  };
  // smallest C with ratio ≥ bound·(1 − C ρ_max) on every bump
  auto fit_C = [](const std::vector<PoincareResult>& rs) {
    double c = 0;
    for (const PoincareResult& r : rs) c = std::max(c, (1.0 - r.ratio / r.bound) / r.rho_max);
    return c;
  };
  for (int n : {3, 4}) {
    auto g = Grid::build(Chart{n, Symmetry::axisymmetric}, 64, 12);
    const auto [ads, bd] = ads_background(n, g);
    std::vector<PoincareResult> r;
    for (const Field& f : bumps(g, 10)) r.push_back(poincare_check(f, ads));
    const double c0 = fit_C(r);
    double lo = 1e300;
    for (const PoincareResult& p : r) lo = std::min(lo, p.ratio / p.bound);
    o.require(c0 == 0.0, "n=" + std::to_string(n) + " hyperbolic C " + fmt(c0) + " min ratio/bound " + fmt(lo));

    // perturbed metric: C calibrated on 10 bumps must hold on 10 others
    const StaticTriple bg = fixtures::regular_triple(g, fixtures::random_coeffs(rng, 0.3));
    std::vector<PoincareResult> cal, val;
    for (const Field& f : bumps(g, 10)) cal.push_back(poincare_check(f, bg));
    for (const Field& f : bumps(g, 10)) val.push_back(poincare_check(f, bg));
    const double c1 = fit_C(cal);
    bool held = true;
    for (const PoincareResult& p : val) held = held && p.ratio >= p.bound * (1.0 - c1 * p.rho_max);
    o.require(held, "perturbed C " + fmt(c1) + " (validation C " + fmt(fit_C(val)) + ")");
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"background exactness", background},
      {"linearization consistency", linearization},
      {"rewriting identities", rewriting},
      {"beta identity", beta_identity},
      {"Maxwell mode oracle", maxwell_mode},
      {"log coefficient (n=4)", log_coefficient},
      {"nonlinear existence", existence},
      {"decay suite", decay},
      {"weight arithmetic", weights},
      {"non-degeneracy probe", nondegeneracy},
      {"Poincare bound", poincare},
  };
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::stoi(argv[k]));
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << std::setw(2) << id << "  " << criteria[k].first << "  ("
              << fmt(secs) << " s)  " << o.detail.str() << std::endl;
    if (!o.pass) ++failed;
  }
  std::cout << failed << " criteria failed" << std::endl;
  return failed ? 1 : 0;
}
