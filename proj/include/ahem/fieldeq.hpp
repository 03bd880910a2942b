#ifndef AHEM_FIELDEQ_HPP
#define AHEM_FIELDEQ_HPP

// Residuals of the static Einstein–Maxwell system (Λ = −n(n−1)/2)
//   V(∇*∇V + nV) + (n−2)/(n−1)|dU|² = 0
//   Ric + n g − V⁻¹Hess V − V⁻²(−dU⊗dU + |dU|²g/(n−1)) = 0
//   div(V⁻¹∇U) = 0
// its gauge-fixed form with the one-form Ω, and the β one-form built from a
// source pair (a, A).
//
// Residual fields are stored bounded: the lapse equation divided by V̊²,
// the metric equation in frame components, the Maxwell equation times V̊.

#include "ahem/stress.hpp"

namespace ahem {

struct ResidualTriple {
  Field R_V, R_g, R_U;
  // Sup norms over collocation (interior) nodes, and the same weighted by ρ⁻².
  double sup_V = 0, sup_g = 0, sup_U = 0;
  double weighted_V = 0, weighted_g = 0, weighted_U = 0;
  // Sup with each node divided by chart_conditioning(·, 2).
  double cond_V = 0, cond_g = 0, cond_U = 0;

  double sup() const;
  void update_norms();
};

ResidualTriple static_residual(const StaticTriple& t);
// Adds V⟨Ω, dV⟩ to the lapse equation and div*Ω to the metric equation.
ResidualTriple modified_residual(const StaticTriple& t);

struct GaugeVector {
  Field Omega;  // frame components
  double sup = 0;
  double weighted = 0;  // sup of ρ⁻²|Ω̂|
  double conditioned = 0;  // sup with each node divided by chart_conditioning(·, 1)
};

// −Ω_j = g^{lm}(∇̊_m g_jl − ½∇̊_j g_lm) + V⁻²g_jk(V̊∇̊^kV̊ − V∇^kV), relative
// to the hyperbolic background (V̊, g̊).
GaugeVector gauge_vector(const StaticTriple& t);
// −Ω_j = 𝔊_jμ 𝔊^{αβ}(Γ(𝔊) − Γ(𝔊̊))^μ_αβ on S¹×M, 𝔊 = V²dφ² + g.
Field gauge_vector_spacetime(const StaticTriple& t);

// β = V⁻¹d(Va) − V⁻¹A(∇V, ·) + div(grav A + ½a g).
Field beta(const StaticTriple& t, const Field& a, const Field& A);
// −β_j = ∇_i(A^i_j − ½(A^k_k + a)δ^i_j) + V⁻¹(A_ij − a g_ij)∇^iV.
Field beta_expanded(const StaticTriple& t, const Field& a, const Field& A);

// ∇̃^αT_αj of the static tensor T_00 dt² + T_ij dx^i dx^j on εV²dt² + g, with
// T_00 = V² T_NN:  ∇^iT_ij + V⁻¹∇^iV T_ij − εV⁻¹T_NN ∇_jV.
Field matter_divergence(const StaticTriple& t, const Field& T, const Field& TNN, int epsilon = -1);

// Sup over interior nodes of ρ^{−δ}|f| across components.
double weighted_sup(const Field& f, double delta);
// Sup over interior nodes of |f|/chart_conditioning(q, derivatives) across components.
double conditioned_sup(const Field& f, int derivatives);

namespace point {

struct Residual {
  double RV = 0;
  std::vector<double> Rg;
  double RU = 0;
};

Residual static_residual(const NodeState& ns);
// Ω as coordinate jets of order one.
JetTensor gauge_vector(const NodeState& ns);
// Static residual plus the gauge terms.
Residual modified_residual(const NodeState& ns);

}  // namespace point

}  // namespace ahem

#endif  // AHEM_FIELDEQ_HPP
