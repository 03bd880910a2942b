#ifndef AHEM_BOUNDARY_HPP
#define AHEM_BOUNDARY_HPP

// Axisymmetric conformal-infinity data on the round S^{n−1}: the electric
// potential Û and the boundary lapse V̆, each a finite sum of zonal
// harmonics.

#include <vector>

#include "ahem/grid.hpp"
#include "ahem/jet.hpp"

namespace ahem {

struct Mode {
  int l = 0;
  double amplitude = 0.0;
};

// Z_l(θ) as a jet, Z_l(0) = 1.
Jet zonal_harmonic(int n, int l, const Jet& theta);

struct BoundaryData {
  int n = 3;
  std::vector<Mode> U_hat;
  std::vector<Mode> V_breve{{0, 1.0}};

  // Jets in θ (single variable, index 0).
  Jet U_hat_jet(double theta) const;
  Jet V_breve_jet(double theta) const;
  double U_hat_at(double theta) const { return U_hat_jet(theta).v; }
  double V_breve_at(double theta) const { return V_breve_jet(theta).v; }

  bool U_hat_constant() const;
  void validate() const;
  // Û sampled at every grid node (constant along ρ).
  Eigen::VectorXd U_hat_nodal(const Grid& grid) const;
};

// Fit zonal-harmonic coefficients l ≤ lmax to samples (θ_i, f_i) by least squares.
std::vector<Mode> fit_zonal_modes(int n, const std::vector<double>& theta, const std::vector<double>& values, int lmax);

}  // namespace ahem

#endif  // AHEM_BOUNDARY_HPP
