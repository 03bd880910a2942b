#ifndef AHEM_GEOMETRY_HPP
#define AHEM_GEOMETRY_HPP

// Static fields (V, g, U) on the compactified chart and the tensor calculus
// acting on them. Λ = −n(n−1)/2 throughout, so the background
//   V̊ = ρ⁻¹(1 + ρ²/4),  g̊ = ρ⁻²(dρ² + (1 − ρ²/4)² dΩ²)
// solves Ric(g̊) + n g̊ − V̊⁻¹ Hess V̊ = 0, Δ V̊ = n V̊.

#include <optional>
#include <utility>
#include <vector>

#include "ahem/boundary.hpp"
#include "ahem/frame.hpp"

namespace ahem {

// Component sampler: nodal derivatives of a field, turned into coordinate jets.
class FieldSampler {
 public:
  FieldSampler() = default;
  explicit FieldSampler(const Field& f);

  TensorKind kind() const { return kind_; }
  std::vector<Jet> frame(const LocalChart& c, int q) const;
  Jet scalar(const LocalChart& c, int q) const;
  JetTensor covector(const LocalChart& c, int q) const;
  JetTensor sym2(const LocalChart& c, int q) const;

 private:
  TensorKind kind_ = TensorKind::scalar;
  std::vector<NodalDerivatives> d_;
};

// g = g̊ + h with h given by frame components.
struct Metric {
  GridPtr grid;
  Field h;

  static Metric background(GridPtr grid);
  Metric(GridPtr g, Field perturbation);

  // Smallest eigenvalue of the frame matrix δ + ĥ over interior nodes.
  double min_frame_eigenvalue() const;
};

class MetricSampler {
 public:
  explicit MetricSampler(const Metric& m) : h_(m.h) {}
  JetTensor at(const LocalChart& c, int q) const;
  JetTensor perturbation(const LocalChart& c, int q) const { return h_.sym2(c, q); }
  PointGeometry geometry(const LocalChart& c, int q) const;

 private:
  FieldSampler h_;
};

// Stored unknowns: w̄ = (V − V̊)/V̊, frame components of h = g − g̊, and U.
struct StaticTriple {
  GridPtr grid;
  Field wbar;
  Field hbar;
  Field U;

  static StaticTriple background(GridPtr grid);
  Metric metric() const { return Metric(grid, hbar); }
  // Throws NumericalError if V ≤ 0 or g is not positive definite somewhere.
  void check() const;
};

struct PointState {
  Jet V;
  JetTensor g;
  Jet U;
  Jet wbar;
  JetTensor h;
};

class TripleSampler {
 public:
  explicit TripleSampler(const StaticTriple& t) : w_(t.wbar), h_(t.hbar), u_(t.U) {}
  PointState at(const LocalChart& c, int q) const;

 private:
  FieldSampler w_, h_, u_;
};

// Everything the pointwise equation kernels need at one interior node.
struct NodeState {
  LocalChart chart;
  PointState p;
  PointGeometry pg;
};

// Node states of a triple; entries at ρ = 0 nodes are empty.
std::vector<std::optional<NodeState>> node_states(const StaticTriple& t);

// Christoffel symbols Γ^k_ij of g in the node chart, per node, at interior nodes.
std::vector<std::vector<double>> christoffel(const Metric& g);

Field ricci(const Metric& g);
// (Hess f, Δf) for a bounded scalar field.
std::pair<Field, Field> hessian_laplacian(const Metric& g, const Field& f);
Field lichnerowicz(const Metric& g, const Field& h);

// Curvature of εV²dt² + g: frame components of R̃_ik, the (structurally
// zero) mixed block R̃_0k, R̃_00/(εV²) = −V⁻¹ΔV and the scalar R̃.
struct WarpedCurvature {
  Field spatial;
  Field mixed;
  Field normal;
  Field scalar;
};
WarpedCurvature warped_curvature(const StaticTriple& t, int epsilon);
// The same blocks computed directly from the (n+1)-metric.
WarpedCurvature warped_curvature_direct(const StaticTriple& t, int epsilon);

std::pair<StaticTriple, BoundaryData> ads_background(int n, GridPtr grid);

// Pointwise building blocks shared by the equation modules.
namespace point {

// Geometry of g = g̊ + h at a node, curvature taken relative to g̊.
PointGeometry geometry(const LocalChart& c, const JetTensor& h);
// Geometry of εV²dt² + g relative to εV̊²dt² + g̊ (chart with circle).
PointGeometry spacetime_geometry(const LocalChart& c, const PointState& p, int epsilon);

// Ric + n g − V⁻¹ Hess V (coordinate values).
std::vector<double> static_einstein_operator(const PointGeometry& pg, const Jet& V);
// V(∇*∇V + nV) = V(−ΔV + nV).
double lapse_operator(const PointGeometry& pg, const Jet& V);

}  // namespace point

}  // namespace ahem

#endif  // AHEM_GEOMETRY_HPP
