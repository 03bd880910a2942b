#ifndef AHEM_ASYMPTOTICS_HPP
#define AHEM_ASYMPTOTICS_HPP

// Decay rates at ρ = 0 and the conformal-boundary data of a triple.

#include <limits>
#include <string>
#include <vector>

#include "ahem/geometry.hpp"

namespace ahem {

enum class DecayModel {
  pure_power,      // c ρ^p
  power_plus_log,  // ρ^p (a ln ρ + b)
};

struct DecayWindow {
  int first_node = 3;  // radial index of the innermost node used
  double rho_max = 0.3;
};

struct DecayFit {
  std::string name;
  DecayModel model = DecayModel::pure_power;
  double rho_lo = 0, rho_hi = 0;
  // At the dominant boundary angle (largest |f| on the window's outer node).
  double theta = 0;
  double exponent = std::numeric_limits<double>::infinity();  // +∞: the field vanishes on the window
  double coefficient = 0;      // c, or b for power_plus_log
  double log_coefficient = 0;  // a (power_plus_log)
  // Weighted relative residual ‖w(f − model)‖/‖w f‖ with w = ρ^{−p_ref}.
  double residual = 0;
  // |exponent − exponent on the half window [ρ_lo, ρ_hi/2]|.
  double half_width = 0;
  // Exponent on every boundary angle carrying at least 1e−3 of the peak.
  Eigen::VectorXd thetas, exponents;

  bool vanishes() const { return exponent == std::numeric_limits<double>::infinity(); }
};

// Scalar fields are fitted as they are; covectors and symmetric tensors
// through the frame norm. Throws ConfigError if the window holds fewer than
// 6 nodes, NumericalError if the field is not finite there.
DecayFit fit_decay(const Field& f, DecayModel model, DecayWindow window = {});

// Fit of one radial profile (ρ_i, f_i); the building block of fit_decay.
DecayFit fit_profile(const Eigen::VectorXd& rho, const Eigen::VectorXd& f, DecayModel model);

struct FGData {
  Eigen::VectorXd theta;
  Eigen::VectorXd V_breve;  // lim ρV
  // lim ρ²g per frame component, with the round factors divided out:
  // 1 + ĥ_ρ̂ρ̂, s ĥ_ρ̂θ̂, s²(1 + ĥ_θ̂θ̂), s²(1 + ĥ_f̂f̂) (radial grids: first and last).
  std::vector<Eigen::VectorXd> h_breve;
  // ρ² coefficient of the last of these, −½ on the background.
  Eigen::VectorXd rho2_coefficient;
  // Largest |ρ¹ coefficient| over ρV and all of the above.
  double odd_residual = 0;
};

// Quartic least squares in ρ over the interior nodes with ρ ≤ rho_max, on each
// boundary angle. Throws ConfigError if fewer than 6 nodes are available.
FGData fg_check(const StaticTriple& t, double rho_max = 0.3);

}  // namespace ahem

#endif  // AHEM_ASYMPTOTICS_HPP
