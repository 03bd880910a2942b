#ifndef AHEM_GRID_HPP
#define AHEM_GRID_HPP

// Collocation grid on the compactified chart
//
//   g̊ = ρ⁻² (dρ² + (1 − ρ²/4)² dΩ²_{n−1}),   ρ ∈ (0, 2],
//
// with ρ = 0 the conformal boundary and ρ = 2 the centre. In axisymmetric
// mode dΩ²_{n−1} = dθ² + sin²θ dΩ²_{n−2} and fields depend on (ρ, θ); in
// radial-only mode they depend on ρ alone.
//
// Radial nodes are Chebyshev–Gauss–Radau points containing ρ = 0 (the only
// Dirichlet node) and open at the centre; angular nodes are Chebyshev–Gauss
// points in θ ∈ (0, π). Node q = i·N_θ + j (ρ-major, θ-minor).

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ahem {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Symmetry { radial, axisymmetric };

struct Chart {
  int n = 3;
  Symmetry symmetry = Symmetry::axisymmetric;
  double rho_max = 2.0;

  // Number of coordinates the fields depend on (1 or 2).
  int base_dim() const { return symmetry == Symmetry::radial ? 1 : 2; }
  // Dimension of the round sphere orbits carried analytically.
  int fiber_dim() const { return n - base_dim(); }
};

struct GridBudget {
  std::size_t max_nodes = 16384;
};

enum class Direction { rho, theta };

class Grid {
 public:
  static std::shared_ptr<const Grid> build(const Chart& chart, int n_rho, int n_theta, GridBudget budget = {});

  const Chart& chart() const { return chart_; }
  int n() const { return chart_.n; }
  bool axisymmetric() const { return chart_.symmetry == Symmetry::axisymmetric; }

  int n_rho() const { return n_rho_; }
  // Declared angular count (0 in radial-only mode).
  int n_theta() const { return n_theta_; }
  // Angular points per radial line used for storage (1 in radial-only mode).
  int n_ang() const { return n_ang_; }
  int size() const { return n_rho_ * n_ang_; }
  int node(int i, int j) const { return i * n_ang_ + j; }
  int rho_index(int q) const { return q / n_ang_; }
  int theta_index(int q) const { return q % n_ang_; }
  bool is_boundary(int q) const { return rho_index(q) == 0; }

  const Eigen::VectorXd& rho() const { return rho_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  double rho_at(int q) const { return rho_(rho_index(q)); }
  double theta_at(int q) const { return axisymmetric() ? theta_(theta_index(q)) : 0.5 * 3.141592653589793; }

  const Eigen::MatrixXd& d_rho() const { return d_rho_; }
  const Eigen::MatrixXd& d2_rho() const { return d2_rho_; }
  const Eigen::MatrixXd& d_theta() const;
  const Eigen::MatrixXd& d2_theta() const;

  // ∫_0^2 f dρ on the radial nodes.
  const Eigen::VectorXd& rho_weights() const { return rho_weights_; }
  // ∫_{S^{n−1}} f dvol_round for axisymmetric f sampled on the θ nodes
  // (one weight equal to |S^{n−1}| in radial-only mode). The weights are
  // interpolatory in cos θ, so zonal harmonics of degree < N_θ integrate exactly.
  const Eigen::VectorXd& boundary_weights() const { return boundary_weights_; }
  // Node weights for ∫_M f dvol_g̊; zero on the boundary nodes. Meant for
  // integrands that vanish near ρ = 0.
  const Eigen::VectorXd& bulk_weights() const { return bulk_weights_; }

  // Value of the radial interpolant through the interior nodes at ρ = 0.
  const Eigen::RowVectorXd& boundary_extrapolation() const { return extrapolation_; }

  // Apply a 1-D operator along one direction of a nodal array.
  Eigen::VectorXd apply_rho(const Eigen::MatrixXd& op, const Eigen::VectorXd& f) const;
  Eigen::VectorXd apply_theta(const Eigen::MatrixXd& op, const Eigen::VectorXd& f) const;

 private:
  Chart chart_;
  int n_rho_ = 0, n_theta_ = 0, n_ang_ = 1;
  Eigen::VectorXd rho_, theta_;
  Eigen::MatrixXd d_rho_, d2_rho_, d_theta_, d2_theta_;
  Eigen::VectorXd rho_weights_, boundary_weights_, bulk_weights_;
  Eigen::RowVectorXd extrapolation_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Area of the unit round sphere S^k.
double sphere_area(int k);

// Zonal harmonic of degree l on S^{n−1} (axis θ = 0), normalised to 1 at θ = 0.
double zonal_harmonic(int n, int l, double theta);
// Its eigenvalue under the round Laplacian: −l(l + n − 2).
double zonal_eigenvalue(int n, int l);

enum class TensorKind { scalar = 0, covector = 1, sym2 = 2 };

int component_count(TensorKind kind, const Chart& chart);
std::vector<std::string> component_names(TensorKind kind, const Chart& chart);

// Nodal field in the g̊-orthonormal frame
//   e_ρ̂ = ρ∂_ρ,  e_θ̂ = ρ(1 − ρ²/4)⁻¹∂_θ,  e_f̂ = unit vectors along the orbits.
// Covectors have components (ρ̂[, θ̂]); symmetric 2-tensors (ρ̂ρ̂[, ρ̂θ̂, θ̂θ̂], f̂f̂),
// where f̂f̂ is the common diagonal entry along the orbits.
struct Field {
  GridPtr grid;
  TensorKind kind = TensorKind::scalar;
  std::vector<Eigen::VectorXd> comps;
  double weight = 0.0;
  std::string name;

  static Field zeros(GridPtr grid, TensorKind kind, std::string name = {}, double weight = 0.0);
  static Field scalar(GridPtr grid, Eigen::VectorXd values, std::string name = {}, double weight = 0.0);

  int rank() const { return static_cast<int>(kind); }
  int num_components() const { return static_cast<int>(comps.size()); }
  bool all_finite() const;
  // Largest magnitude over all components and nodes (interior nodes only if asked).
  double sup_norm(bool interior_only = false) const;
  // Stacked components.
  Eigen::VectorXd flat() const;
  void set_flat(const Eigen::VectorXd& v);
};

// Componentwise nodal derivative along a direction.
Field differentiate(const Field& field, Direction direction);

enum class Domain { bulk, boundary };

// Integral of a scalar field. Bulk integrals use dvol_g (g = g̊ + h when a
// metric perturbation in frame components is given, else g̊) and require the
// declared weight to exceed n − 1. Boundary integrals use the round metric
// on S^{n−1} and the ρ = 0 values.
double integrate(const Field& field, Domain domain, const Field* metric_perturbation = nullptr);

}  // namespace ahem

#endif  // AHEM_GRID_HPP
