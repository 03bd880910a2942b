#ifndef AHEM_EINSTEIN_HPP
#define AHEM_EINSTEIN_HPP

// The gauge-fixed static Einstein–Maxwell map at the hyperbolic background,
//   F(Û; w̄, ĥ) = modified residual of (V̊(1 + w̄), g̊ + h, U(Û, V, g)),
// with U re-solved from the current (V, g) at every evaluation, and its
// Newton solution from the background.

#include <optional>
#include <vector>

#include "ahem/asymptotics.hpp"
#include "ahem/fieldeq.hpp"
#include "ahem/maxwell.hpp"

namespace ahem {

enum class JacobianMode {
  frozen,     // (l, L) at the background, factored once
  refreshed,  // (l, L) at the current iterate, every step
};

struct SolverConfig {
  int n = 4;
  Symmetry symmetry = Symmetry::axisymmetric;
  int n_rho = 48, n_theta = 24;
  // Û = ε Σ amplitude·Z_l
  std::vector<Mode> modes{{1, 1.0}};
  double epsilon = 0.01;
  // On the stored modified residual (lapse and metric parts), conditioned
  // sup: each node divided by chart_conditioning(·, 2).
  double tol = 1e-10;
  int max_iterations = 30;
  JacobianMode jacobian = JacobianMode::frozen;
  // Geometric ramp ε·2^{−k}, k = steps … 0, tried when direct Newton fails.
  int continuation_steps = 4;
  int max_step_halvings = 6;

  void validate() const;
  BoundaryData boundary() const;
  GridPtr grid() const;
};

struct MapValue {
  Field R_V, R_g;  // stored modified residual; ρ = 0 rows carry the unknowns
  Field U;
  double maxwell_residual = 0;  // conditioned
  // Over interior nodes of R_V and R_g: conditioned and plain.
  double sup = 0;
  double raw = 0;
};

// Throws NumericalError on positivity loss or an inner Maxwell failure.
MapValue assemble_F(const BoundaryData& bd, const StaticTriple& t, double inner_tol = 1e-12);

struct IterationRecord {
  double epsilon = 0;
  int iteration = 0;
  double residual = 0;    // conditioned sup of the modified residual before the step
  double raw = 0;         // plain sup
  double step = 0;        // sup of the Newton update taken
  double damping = 1.0;   // fraction of the update taken
};

class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, std::vector<IterationRecord> history)
      : NumericalError(what), history(std::move(history)) {}
  std::vector<IterationRecord> history;
};

struct Solution {
  SolverConfig config;
  BoundaryData bd;
  StaticTriple triple;
  std::vector<IterationRecord> history;
  std::vector<double> ladder;  // ε values solved in order; last is the target
  ResidualTriple modified, stat;
  GaugeVector gauge;
  double maxwell_residual = 0;
};

// Throws SolverError (with history) on divergence, positivity loss or the
// iteration limit at every continuation stage.
Solution newton_solve(const SolverConfig& config);
// From a given first iterate on the configured grid.
Solution newton_solve(const SolverConfig& config, const StaticTriple& initial);
// A Solution around a stored triple (no iteration history); U is re-solved.
Solution make_solution(const SolverConfig& config, StaticTriple t);

// Plain sups over interior nodes, and conditioned ones dividing each node by
// chart_conditioning with the number of derivatives the quantity takes of the
// stored fields: 1 for Ω, 2 for residuals and β, 3 for 𝓑(Ω).
struct ResidualReport {
  double static_sup = 0, static_V = 0, static_g = 0, static_U = 0;
  double static_cond = 0;
  double modified_sup = 0, modified_cond = 0;
  double omega_sup = 0, omega_weighted = 0, omega_cond = 0;
  double B_omega_sup = 0, B_omega_cond = 0;
  double beta_sup = 0, beta_cond = 0;
  double beta_paths = 0;  // sup |β − β_expanded|
  double TNN_sup = 0;
  bool vacuum = false;    // Û constant
  // (V − V̊, ĥ, U − Û, T_NN); a fit that could not be made is absent and noted.
  std::vector<DecayFit> fits;
  std::optional<LogCoefficient> uln_extracted, uln_predicted;
  double uln_error = 0;  // sup |extracted − predicted| / sup |predicted|
  std::vector<std::string> notes;
};

ResidualReport verify_solution(const Solution& sol);

// Sup over interior nodes of the frame norm of ĥ.
double metric_perturbation_sup(const StaticTriple& t);

}  // namespace ahem

#endif  // AHEM_EINSTEIN_HPP
