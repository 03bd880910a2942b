#include "ahem/einstein.hpp"

#include <cmath>
#include <sstream>

#include "ahem/frame.hpp"
#include "ahem/linops.hpp"
#include "ahem/stress.hpp"

namespace ahem {

void SolverConfig::validate() const {
  if (n != 3 && n != 4) throw ConfigError("the solver supports n = 3 and n = 4");
  if (!(epsilon >= 0.0)) throw ConfigError("amplitude must be non-negative");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("need at least one iteration");
  if (continuation_steps < 0 || max_step_halvings < 0) throw ConfigError("negative continuation or halving count");
  for (const Mode& m : modes)
    if (m.l < 0) throw ConfigError("mode degree must be non-negative");
  boundary().validate();
}

BoundaryData SolverConfig::boundary() const {
  BoundaryData bd;
  bd.n = n;
  for (const Mode& m : modes) bd.U_hat.push_back({m.l, epsilon * m.amplitude});
  return bd;
}

GridPtr SolverConfig::grid() const { return Grid::build(Chart{n, symmetry}, n_rho, n_theta); }

namespace {

Eigen::VectorXd pack(const StaticTriple& t) {
  const int N = t.grid->size(), nc = t.hbar.num_components();
  Eigen::VectorXd x(N * (1 + nc));
  x.head(N) = t.wbar.comps[0];
  for (int c = 0; c < nc; ++c) x.segment((1 + c) * N, N) = t.hbar.comps[c];
  return x;
}

void unpack(const Eigen::VectorXd& x, StaticTriple& t) {
  const int N = t.grid->size(), nc = t.hbar.num_components();
  t.wbar.comps[0] = x.head(N);
  for (int c = 0; c < nc; ++c) t.hbar.comps[c] = x.segment((1 + c) * N, N);
}

Eigen::VectorXd pack(const MapValue& m) {
  const int N = m.R_V.grid->size(), nc = m.R_g.num_components();
  Eigen::VectorXd f(N * (1 + nc));
  f.head(N) = m.R_V.comps[0];
  for (int c = 0; c < nc; ++c) f.segment((1 + c) * N, N) = m.R_g.comps[c];
  return f;
}

// Row-equilibrated LU of a collocation Jacobian.
struct Factored {
  Eigen::VectorXd rs;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;

  explicit Factored(const Eigen::MatrixXd& j)
      : rs(j.rowwise().lpNorm<Eigen::Infinity>().cwiseInverse()), lu(rs.asDiagonal() * j) {}
  Eigen::VectorXd solve(const Eigen::VectorXd& f) const { return lu.solve(rs.cwiseProduct(f)); }
};

// Newton at one amplitude from t; returns the converged triple.
StaticTriple newton_stage(const SolverConfig& cfg, const BoundaryData& bd, StaticTriple t, const Factored* frozen,
                          double eps, std::vector<IterationRecord>& history) {
  const double inner = 0.01 * cfg.tol;
  Eigen::VectorXd x = pack(t);
  double last = std::numeric_limits<double>::infinity();
  int increases = 0;
  for (int it = 0; it <= cfg.max_iterations; ++it) {
    const MapValue m = assemble_F(bd, t, inner);
    IterationRecord rec{eps, it, m.sup, m.raw, 0.0, 1.0};
    if (m.sup <= cfg.tol) {
      t.U = m.U;
      history.push_back(rec);
      return t;
    }
    increases = m.sup > last ? increases + 1 : 0;
    last = m.sup;
    if (increases >= 3) {
      history.push_back(rec);
      throw SolverError("Newton residual increased for 3 consecutive steps", history);
    }
    if (it == cfg.max_iterations) {
      history.push_back(rec);
      throw SolverError("Newton iteration limit reached", history);
    }

    Eigen::VectorXd f = pack(m);
    for (int c = 0; c <= t.hbar.num_components(); ++c)
      for (int j = 0; j < t.grid->n_ang(); ++j) {
        const Eigen::Index k = c * t.grid->size() + t.grid->node(0, j);
        f(k) = x(k);
      }
    const Eigen::VectorXd dx =
        frozen ? Eigen::VectorXd(-frozen->solve(f)) : Eigen::VectorXd(-Factored(assemble_lL(t)).solve(f));
    rec.step = dx.cwiseAbs().maxCoeff();

    double lambda = 1.0;
    for (int halving = 0;; ++halving) {
      StaticTriple trial = t;
      unpack(x + lambda * dx, trial);
      try {
        trial.check();
        t = std::move(trial);
        break;
      } catch (const NumericalError&) {
        if (halving == cfg.max_step_halvings) {
          history.push_back(rec);
          throw SolverError("positivity lost along the Newton step", history);
        }
        lambda *= 0.5;
      }
    }
    x += lambda * dx;
    rec.damping = lambda;
    history.push_back(rec);
  }
  throw SolverError("Newton iteration limit reached", history);
}

Solution finish(const SolverConfig& cfg, StaticTriple t, std::vector<IterationRecord> history,
                std::vector<double> ladder) {
  Solution s;
  s.config = cfg;
  s.bd = cfg.boundary();
  const MapValue m = assemble_F(s.bd, t, 0.01 * cfg.tol);
  t.U = m.U;
  s.maxwell_residual = m.maxwell_residual;
  s.modified = modified_residual(t);
  s.stat = static_residual(t);
  s.gauge = gauge_vector(t);
  s.triple = std::move(t);
  s.history = std::move(history);
  s.ladder = std::move(ladder);
  return s;
}

}  // namespace

MapValue assemble_F(const BoundaryData& bd, const StaticTriple& t, double inner_tol) {
  t.check();
  StaticTriple cur = t;
  const MaxwellSolution ms = solve_maxwell(bd, cur, inner_tol);
  cur.U = ms.U;
  const ResidualTriple r = modified_residual(cur);
  MapValue m{r.R_V, r.R_g, ms.U, ms.residual_conditioned, std::max(r.cond_V, r.cond_g), std::max(r.sup_V, r.sup_g)};
  return m;
}

Solution newton_solve(const SolverConfig& config) {
  config.validate();
  return newton_solve(config, StaticTriple::background(config.grid()));
}

Solution newton_solve(const SolverConfig& config, const StaticTriple& initial) {
  config.validate();
  const GridPtr grid = initial.grid;
  if (grid->n() != config.n || grid->n_rho() != config.n_rho ||
      (grid->axisymmetric() && grid->n_theta() != config.n_theta) ||
      grid->axisymmetric() != (config.symmetry == Symmetry::axisymmetric))
    throw ConfigError("initial iterate is not on the configured grid");
  const StaticTriple bg = StaticTriple::background(grid);
  {
    const ResidualTriple r0 = modified_residual(bg);
    if (std::max(r0.cond_V, r0.cond_g) > config.tol) throw NumericalError("background residual above the tolerance");
  }
  std::optional<Factored> frozen;
  if (config.jacobian == JacobianMode::frozen) frozen.emplace(assemble_lL(bg));
  const Factored* fz = frozen ? &*frozen : nullptr;

  std::vector<IterationRecord> history;
  try {
    StaticTriple t = newton_stage(config, config.boundary(), initial, fz, config.epsilon, history);
    return finish(config, std::move(t), std::move(history), {config.epsilon});
  } catch (const NumericalError&) {
    if (config.continuation_steps == 0 || config.epsilon == 0.0) {
      throw SolverError("Newton failed at the target amplitude without continuation", history);
    }
  }

  StaticTriple t = bg;
  std::vector<double> ladder;
  for (int k = config.continuation_steps; k >= 0; --k) {
    SolverConfig stage = config;
    stage.epsilon = std::ldexp(config.epsilon, -k);
    ladder.push_back(stage.epsilon);
    try {
      t = newton_stage(stage, stage.boundary(), t, fz, stage.epsilon, history);
    } catch (const SolverError& e) {
      std::ostringstream msg;
      msg << "continuation failed at amplitude " << stage.epsilon << ": " << e.what();
      throw SolverError(msg.str(), history);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "continuation failed at amplitude " << stage.epsilon << ": " << e.what();
      throw SolverError(msg.str(), history);
    }
  }
  return finish(config, std::move(t), std::move(history), std::move(ladder));
}

Solution make_solution(const SolverConfig& config, StaticTriple t) {
  config.validate();
  if (t.grid->n() != config.n) throw ConfigError("stored triple does not match the configured dimension");
  return finish(config, std::move(t), {}, {config.epsilon});
}

double metric_perturbation_sup(const StaticTriple& t) {
  double m = 0;
  for (int q = 0; q < t.grid->size(); ++q)
    if (!t.grid->is_boundary(q)) m = std::max(m, frame_norm(t.hbar, q));
  return m;
}

ResidualReport verify_solution(const Solution& sol) {
  const StaticTriple& t = sol.triple;
  const Grid& g = *t.grid;
  const int n = g.n();
  ResidualReport r;
  r.static_V = sol.stat.sup_V;
  r.static_g = sol.stat.sup_g;
  r.static_U = sol.stat.sup_U;
  r.static_sup = std::max({r.static_V, r.static_g, r.static_U});
  r.static_cond = std::max({sol.stat.cond_V, sol.stat.cond_g, sol.stat.cond_U});
  r.modified_sup = std::max(sol.modified.sup_V, sol.modified.sup_g);
  r.modified_cond = std::max(sol.modified.cond_V, sol.modified.cond_g);
  r.omega_sup = sol.gauge.sup;
  r.omega_weighted = sol.gauge.weighted;
  r.omega_cond = sol.gauge.conditioned;
  const Field bo = apply_B(sol.gauge.Omega, t);
  r.B_omega_sup = bo.sup_norm(true);
  r.B_omega_cond = conditioned_sup(bo, 3);
  r.vacuum = sol.bd.U_hat_constant();

  const StressBlock sb = maxwell_stress(t);
  const SourcePair sp = source_pair(sb, n);
  const Field b1 = beta(t, sp.a, sp.A), b2 = beta_expanded(t, sp.a, sp.A);
  r.beta_sup = b1.sup_norm(true);
  r.beta_cond = conditioned_sup(b1, 2);
  for (int c = 0; c < b1.num_components(); ++c)
    for (int q = 0; q < g.size(); ++q)
      if (!g.is_boundary(q)) r.beta_paths = std::max(r.beta_paths, std::abs(b1.comps[c](q) - b2.comps[c](q)));
  r.TNN_sup = sb.TNN.sup_norm(true);

  Field dv = t.wbar;
  dv.name = "V - V0";
  Field du = t.U;
  du.name = "U - U_hat";
  du.comps[0] -= sol.bd.U_hat_nodal(g);
  for (int q = 0; q < g.size(); ++q) {
    const double rho = g.rho_at(q);
    dv.comps[0](q) = g.is_boundary(q) ? 0.0 : dv.comps[0](q) * (1.0 + 0.25 * rho * rho) / rho;
  }
  Field h = t.hbar;
  h.name = "h";
  Field tnn = sb.TNN;
  tnn.name = "T_NN";

  auto add_fit = [&](const Field& f, DecayModel model) {
    try {
      r.fits.push_back(fit_decay(f, model));
    } catch (const std::exception& e) {
      r.notes.push_back("no decay fit for " + f.name + ": " + e.what());
    }
  };
  add_fit(dv, DecayModel::pure_power);
  add_fit(h, DecayModel::pure_power);
  add_fit(du, DecayModel::pure_power);
  if (n == 4) add_fit(du, DecayModel::power_plus_log);
  add_fit(tnn, DecayModel::pure_power);

  if (n == 4 && g.axisymmetric()) {
    try {
      r.uln_extracted = extract_log_coefficient(t.U, sol.bd);
      r.uln_predicted = predicted_log_coefficient(sol.bd, g);
      const double diff = (r.uln_extracted->value - r.uln_predicted->value).cwiseAbs().maxCoeff();
      const double ref = r.uln_predicted->sup();
      r.uln_error = ref > 0.0 ? diff / ref : diff;
    } catch (const std::exception& e) {
      r.notes.push_back(std::string("no log coefficient: ") + e.what());
    }
  }
  return r;
}

}  // namespace ahem
