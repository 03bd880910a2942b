#ifndef AHEM_LINOPS_HPP
#define AHEM_LINOPS_HPP

// Linear operators of the static problem at a background (V, g):
//   (l, L)      the gauge-fixed linearisation,
//   (p, P), w   the plain linearisation and the one-form relating the two,
//   𝓑           the operator acting on the gauge one-form,
//   𝓣_s, T_s    the scalar operators V^{−s}∇^i(V^s∇_iσ) and their conjugate,
// plus weight arithmetic, the Poincaré ratio and the non-degeneracy probe.
//
// Field conventions: W enters as Ŵ = W/V̊, h and w in frame components;
// scalar outputs l, p are divided by V̊², matching the stored residuals.

#include <boost/rational.hpp>
#include <functional>
#include <memory>
#include <optional>

#include "ahem/geometry.hpp"

namespace ahem {

// A pointwise linear kernel: slots of every input component at node q,
// concatenated in input order, to concatenated frame outputs.
using SlotKernel = std::function<std::vector<double>(int q, const std::vector<Slots>& in)>;

// Dense collocation matrix on stacked component-major unknowns (index c·N + q).
// Interior rows are found by seeding the kernel with unit slots; rows at ρ = 0
// are the identity.
Eigen::MatrixXd assemble_linear(const Grid& grid, int components, const SlotKernel& kernel);

// The same kernel applied to fields; ρ = 0 values are extrapolated.
std::vector<Field> apply_linear(const GridPtr& grid, const std::vector<const Field*>& inputs,
                                const std::vector<TensorKind>& outputs, const SlotKernel& kernel);

using NodeStates = std::shared_ptr<const std::vector<std::optional<NodeState>>>;
NodeStates make_node_states(const StaticTriple& t);

SlotKernel lL_kernel(NodeStates states);
SlotKernel Ts_kernel(NodeStates states, double s);
// V̊·V⁻¹·𝓣_{−1}U, the stored Maxwell residual.
SlotKernel maxwell_kernel(NodeStates states);

struct LinearPair {
  Field l;
  Field L;
};
LinearPair apply_lL(const Field& W, const Field& h, const StaticTriple& bg);
// Unknowns (Ŵ, ĥ) stacked; square.
Eigen::MatrixXd assemble_lL(const StaticTriple& bg);

struct RewrittenPair {
  Field p;
  Field P;
  Field w;
};
RewrittenPair apply_pP(const Field& W, const Field& h, const StaticTriple& at);

// Sup over interior nodes of |p − l − V⟨w, dV⟩|/V̊² and |P − L − div*w| (frame),
// evaluated pointwise. The conditioned values divide each node's defect by
// κ = max(1, ρ²/(s² sin²θ)), the amplification of rounding near the centre
// and the axis; κ = 1 away from them.
struct RewriteDefect {
  double p = 0;
  double P = 0;
  double p_conditioned = 0;
  double P_conditioned = 0;
};
RewriteDefect rewrite_defect(const Field& W, const Field& h, const StaticTriple& at);

Field apply_B(const Field& omega, const StaticTriple& bg);
// Largest eigenvalue of Ric(V²dφ² + g) relative to the metric, over interior nodes.
double spacetime_ricci_max(const StaticTriple& bg);

Field apply_Ts(const Field& sigma, double s, const StaticTriple& bg);
// T_s f = Δf − (s/2)((s/2 − 1)V⁻²|dV|² + V⁻¹ΔV) f.
Field apply_Ts_conjugate(const Field& f, double s, const StaticTriple& bg);
Eigen::MatrixXd assemble_Ts(double s, const StaticTriple& bg);
// Sup over interior nodes of |𝓣_sσ − V^{−s/2}T_s(V^{s/2}σ)| / (1 + |𝓣_sσ|), with
// the product V^{s/2}σ formed as a jet.
double conjugation_defect(const Field& sigma, double s, const StaticTriple& bg);

using Rational = boost::rational<long long>;

struct WeightSpec {
  int n = 3;
  Rational s;
  // 𝓣_s is Fredholm on C_δ for lower < δ < upper.
  Rational lower, upper;
  // Indicial roots of T_s, root_minus ≤ root_plus.
  Rational root_minus, root_plus;
  // s = 1 − n, where the statement does not apply.
  bool excluded = false;
  // s < −(n−1)/2: constants are in the kernel, the range is ∫V^sσ = 0.
  bool kernel_constants = false;

  bool admissible(const Rational& delta) const { return !excluded && lower < delta && delta < upper; }
};

WeightSpec weight_spec(int n, const Rational& s);

struct PoincareResult {
  double ratio = 0;    // ∫|du|² / ∫u²
  double bound = 0;    // ((n−1)/2)²
  double rho_max = 0;  // largest ρ on the support
};
// u must vanish on the ρ = 0 nodes and not be identically zero.
PoincareResult poincare_check(const Field& u, const StaticTriple& bg);

// (Δ_L + 2n) on φ-independent symmetric tensors of V²dφ² + g. Unknowns are the
// orthonormal-frame components (Ĥ_φφ, Ĥ_φρ̂[, Ĥ_φθ̂], ĥ…).
Eigen::MatrixXd assemble_spacetime_lichnerowicz(const StaticTriple& bg);
int spacetime_components(const Chart& chart);

struct OperatorProbe {
  int n_rho = 0, n_theta = 0;
  double smallest = 0;
  double largest = 0;
  double condition = 0;
  std::vector<double> singular_values;  // ascending; full spectrum only for small matrices
};

OperatorProbe probe_operator(const Eigen::MatrixXd& a, int n_rho, int n_theta);

struct NondegeneracyReport {
  std::vector<OperatorProbe> ladder;
  double floor = 1e-3;
  // Smallest singular values stay above the floor and consecutive ones agree within a factor 2.
  bool nondegenerate = false;
};

NondegeneracyReport nondegeneracy_probe(const Chart& chart, const std::vector<std::pair<int, int>>& ladder,
                                        double floor = 1e-3);

namespace point {

struct LinearOut {
  double l = 0;
  std::vector<double> L;
};
LinearOut lL(const NodeState& ns, const Jet& W, const JetTensor& h);

struct RewriteOut {
  double p = 0;
  std::vector<double> P;
  JetTensor w;  // first-order jets
};
RewriteOut pP(const NodeState& ns, const Jet& W, const JetTensor& h);

std::vector<double> B(const NodeState& ns, const JetTensor& omega);
double Ts(const NodeState& ns, const Jet& sigma, double s);
double Ts_conjugate(const NodeState& ns, const Jet& f, double s);

}  // namespace point

}  // namespace ahem

#endif  // AHEM_LINOPS_HPP
