#ifndef AHEM_FRAME_HPP
#define AHEM_FRAME_HPP

// Pointwise coordinate jets at a grid node.
//
// Around a node (ρ, θ) the manifold is charted by (ρ, θ, y¹ … y^k): y are
// Riemann normal coordinates centred on a point of the orbit sphere S^k,
// so invariant tensors are known to second order there from their frame
// components and the round metric γ(y) = δ − ⅓(|y|²δ − y⊗y) + O(|y|³).
// Radial-only grids use (ρ, y¹ … y^{n−1}). An optional last coordinate φ
// carries the circle of V²dφ² + g.
//
// Frame components refer to e_ρ̂ = ρ∂_ρ, e_θ̂ = ρ s⁻¹∂_θ (s = 1 − ρ²/4) and
// unit vectors along the orbits.

#include <array>
#include <vector>

#include "ahem/grid.hpp"
#include "ahem/jet.hpp"
#include "ahem/tensor.hpp"

namespace ahem {

// Stored value and base-coordinate derivatives of one component at a node.
struct Slots {
  double v = 0, r = 0, t = 0, rr = 0, rt = 0, tt = 0;
};

inline constexpr int kSlotCount = 6;

// Nodal first and second derivatives of one component array.
struct NodalDerivatives {
  Eigen::VectorXd v, r, t, rr, rt, tt;
  Slots at(int q) const;
};

NodalDerivatives nodal_derivatives(const Grid& grid, const Eigen::VectorXd& f);
std::vector<NodalDerivatives> nodal_derivatives(const Field& f);

class LocalChart {
 public:
  LocalChart(const Grid& grid, int q, bool with_circle = false);

  int n() const { return n_; }
  int dim() const { return dim_; }
  int base() const { return base_; }
  int fiber() const { return k_; }
  bool has_circle() const { return circle_ >= 0; }
  int circle() const { return circle_; }
  // First orbit coordinate; its diagonal entry carries the f̂f̂ component.
  int fiber_index() const { return base_; }

  double rho() const { return rho_; }
  double theta() const { return theta_; }
  double s() const { return s_; }

  Jet constant(double c) const { return Jet(c, dim_); }
  // Jet of a function of the base coordinates.
  Jet scalar(const Slots& sl) const;

  // Background lapse ρ⁻¹(1 + ρ²/4) and metric on M, analytic.
  const Jet& V0() const { return v0_; }
  const JetTensor& g0() const { return g0_; }
  // Orbit coefficient s² sin²θ / ρ² (s²/ρ² on radial grids).
  const Jet& orbit_factor() const { return psi0_; }

  // Coordinate tensors on M from frame-component jets. Sym2 inputs are
  // (ρ̂ρ̂, ρ̂θ̂, θ̂θ̂, f̂f̂) or (ρ̂ρ̂, f̂f̂); covectors (ρ̂, θ̂) or (ρ̂).
  JetTensor sym2_from_frame(const std::vector<Jet>& hat) const;
  JetTensor covector_from_frame(const std::vector<Jet>& hat) const;

  // Frame components of coordinate values at the node (inverse of the above).
  std::vector<double> frame_of_sym2(const std::vector<double>& t) const;
  std::vector<double> frame_of_covector(const std::vector<double>& w) const;
  std::vector<double> frame_of_sym2(const JetTensor& t) const;
  std::vector<double> frame_of_covector(const JetTensor& w) const;

  // V²dφ² + g (ε = +1) or −V²dt² + g (ε = −1) on the extended chart.
  JetTensor spacetime_metric(const Jet& V, const JetTensor& g, int epsilon = 1) const;
  // The same metric minus its background, from V = V̊(1 + w̄) and h = g − g̊.
  JetTensor spacetime_perturbation(const Jet& wbar, const JetTensor& h, int epsilon = 1) const;

 private:
  int n_ = 0, dim_ = 0, base_ = 0, k_ = 0, circle_ = -1;
  double rho_ = 0, theta_ = 0, s_ = 0;
  Jet rho_j_, s_j_, v0_, psi0_, inv_rho_, inv_rho2_;
  JetTensor gamma_;  // round metric of the orbit, k×k in y
  JetTensor g0_;
};

// Evaluate a pointwise kernel at interior nodes and fill ρ = 0 by
// extrapolation. `kinds` lists the output tensors; the kernel returns their
// frame components concatenated.
template <class Kernel>
std::vector<Field> evaluate_pointwise(const GridPtr& grid, const std::vector<TensorKind>& kinds, Kernel&& kernel,
                                      bool with_circle = false);

void extrapolate_to_boundary(const Grid& grid, Eigen::VectorXd& f);

// κ^{m/2} with κ = max(1, ρ²/(s² sin²θ)) at node q: how much the chart
// amplifies rounding in a frame quantity built from m derivatives of stored
// fields, near the centre and the axis.
double chart_conditioning(const Grid& grid, int q, int derivatives = 2);

// Background frame norm of a field at node q (|f| for scalars); orbit
// components count with their multiplicity.
double frame_norm(const Field& f, int q);

}  // namespace ahem

#include "ahem/frame_impl.hpp"

#endif  // AHEM_FRAME_HPP
