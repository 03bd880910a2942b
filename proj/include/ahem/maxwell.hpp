#ifndef AHEM_MAXWELL_HPP
#define AHEM_MAXWELL_HPP

// The electric potential: ∇_i(V⁻¹∇^iU) = 0 on (M, g) with U = Û at ρ = 0,
// and the ρ²lnρ coefficient of its expansion near the boundary.

#include "ahem/boundary.hpp"
#include "ahem/geometry.hpp"

namespace ahem {

struct MaxwellSolution {
  Field U;
  // Sup over interior nodes of V̊·|∇_i(V⁻¹∇^iU)| for the discrete solution, and
  // the same with each node divided by chart_conditioning.
  double residual = 0;
  double residual_conditioned = 0;
  // Reciprocal condition estimate of the collocation matrix.
  double rcond = 0;
};

// (V, g) are taken from the triple; its U is ignored. Throws NumericalError
// when the system is singular to working precision or the conditioned
// residual exceeds tol.
MaxwellSolution solve_maxwell(const BoundaryData& bd, const StaticTriple& t, double tol = 1e-10);

enum class LogStatus {
  absent,       // n = 3: no ρ ln ρ term
  formula,      // n = 4: U_ln = −½ V̆ ∇̆_A(V̆⁻¹∇̆^AÛ)
  conjectural,  // n ≥ 5: reported as 0 at order ρ², a ρ^{n−2}lnρ term is only expected
  fitted,       // extracted from a solution
};

// U_ln sampled at boundary angles.
struct LogCoefficient {
  int n = 4;
  LogStatus status = LogStatus::formula;
  Eigen::VectorXd theta;
  Eigen::VectorXd value;
  // Coefficient of ρ² in the same fit (fitted only).
  Eigen::VectorXd rho2;
  // Largest least-squares residual over the angles (fitted only).
  double fit_residual = 0;

  double sup() const { return value.size() ? value.cwiseAbs().maxCoeff() : 0.0; }
};

double predicted_log_coefficient_at(const BoundaryData& bd, double theta);
LogCoefficient predicted_log_coefficient(const BoundaryData& bd, const Eigen::VectorXd& theta);
// On the θ nodes of a grid.
LogCoefficient predicted_log_coefficient(const BoundaryData& bd, const Grid& grid);

struct LogIdentity {
  double lhs = 0;  // 2∫V̆⁻¹ Û U_ln
  double rhs = 0;  // ∫V̆⁻¹|∇̆Û|²
  double residual = 0;  // |lhs − rhs| / |rhs|, or |lhs| when rhs = 0
};

// Boundary quadrature on the grid's θ nodes; U_ln must be sampled there. n = 4 only.
LogIdentity logterm_identity_check(const BoundaryData& bd, const LogCoefficient& uln, const Grid& grid);

struct LogFitWindow {
  double rho_min = 0;  // 0: first interior node
  double rho_max = 0.3;
  // Basis {ρ^{2k}, ρ^{2k} ln ρ : k = 1 … orders}. With orders = 1 the neglected
  // ρ⁴lnρ term biases U_ln by 10–15% on [ρ₁, 0.3].
  int orders = 2;
};

// Least-squares fit of U − Û on each radial line over the window; U_ln is the
// ρ²lnρ coefficient. Throws ConfigError for n ≠ 4 or too few nodes in the
// window, NumericalError if the basis is ill-conditioned there.
LogCoefficient extract_log_coefficient(const Field& U, const BoundaryData& bd, LogFitWindow window = {});

}  // namespace ahem

#endif  // AHEM_MAXWELL_HPP
