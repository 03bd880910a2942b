#include "ahem/grid.hpp"

#include <cmath>
#include <numbers>

#include "ahem/spectral.hpp"

namespace ahem {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Weights w_j with Σ_j cos(mθ_j) w_j = ∫_0^π cos(mθ) sin^kθ dθ for m < N.
VectorXd cosine_weights(const VectorXd& theta, int k) {
  const int n = static_cast<int>(theta.size());
  const auto [t, tw] = spectral::gauss_legendre(4 * n + 64, 0.0, std::numbers::pi);
  VectorXd moments(n);
  MatrixXd basis(n, n);
  for (int m = 0; m < n; ++m) {
    double s = 0.0;
    for (int q = 0; q < t.size(); ++q) s += tw(q) * std::cos(m * t(q)) * std::pow(std::sin(t(q)), k);
    moments(m) = s;
    for (int j = 0; j < n; ++j) basis(m, j) = std::cos(m * theta(j));
  }
  return basis.partialPivLu().solve(moments);
}

}  // namespace

double sphere_area(int k) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

double zonal_harmonic(int n, int l, double theta) {
  // Gegenbauer C_l^λ(x) with λ = (n − 2)/2, normalised by its value at x = 1.
  const double lambda = 0.5 * (n - 2);
  const double x = std::cos(theta);
  auto gegenbauer = [&](double z) {
    double c0 = 1.0, c1 = 2.0 * lambda * z;
    if (l == 0) return c0;
    for (int k = 2; k <= l; ++k) {
      const double c2 = (2.0 * z * (k + lambda - 1.0) * c1 - (k + 2.0 * lambda - 2.0) * c0) / k;
      c0 = c1;
      c1 = c2;
    }
    return c1;
  };
  return gegenbauer(x) / gegenbauer(1.0);
}

double zonal_eigenvalue(int n, int l) { return -static_cast<double>(l) * (l + n - 2); }

std::shared_ptr<const Grid> Grid::build(const Chart& chart, int n_rho, int n_theta, GridBudget budget) {
  if (chart.n < 3) throw ConfigError("dimension n must be at least 3");
  if (chart.rho_max != 2.0) throw ConfigError("only the chart with rho_max = 2 is supported");
  if (n_rho < 8) throw ConfigError("N_rho must be at least 8");
  if (n_theta < 0) throw ConfigError("N_theta must be non-negative");
  const bool axi = chart.symmetry == Symmetry::axisymmetric;
  if (axi && n_theta == 0) throw ConfigError("N_theta = 0 requires radial-only symmetry");
  if (!axi && n_theta != 0) throw ConfigError("radial-only grids take N_theta = 0");
  if (axi && n_theta < 2) throw ConfigError("N_theta must be at least 2");
  const std::size_t nodes = static_cast<std::size_t>(n_rho) * static_cast<std::size_t>(axi ? n_theta : 1);
  if (nodes > budget.max_nodes)
    throw ConfigError("grid of " + std::to_string(nodes) + " nodes exceeds the budget of " +
                      std::to_string(budget.max_nodes));

  auto g = std::make_shared<Grid>();
  g->chart_ = chart;
  g->n_rho_ = n_rho;
  g->n_theta_ = n_theta;
  g->n_ang_ = axi ? n_theta : 1;

  g->rho_ = spectral::radau_nodes(n_rho, 0.0, chart.rho_max);
  std::tie(g->d_rho_, g->d2_rho_) = spectral::differentiation_matrices(g->rho_);
  g->rho_weights_ = spectral::interpolatory_weights(g->rho_, 0.0, chart.rho_max, [](double) { return 1.0; });

  const int n = chart.n;
  if (axi) {
    g->theta_ = spectral::gauss_nodes(n_theta, 0.0, std::numbers::pi);
    std::tie(g->d_theta_, g->d2_theta_) = spectral::differentiation_matrices(g->theta_);
    g->boundary_weights_ = cosine_weights(g->theta_, n - 2) * sphere_area(n - 2);
  } else {
    g->boundary_weights_ = VectorXd::Constant(1, sphere_area(n - 1));
  }

  g->bulk_weights_ = VectorXd::Zero(g->size());
  for (int i = 1; i < n_rho; ++i) {
    const double r = g->rho_(i);
    const double s = 1.0 - 0.25 * r * r;
    const double density = std::pow(r, -n) * std::pow(s, n - 1);
    for (int j = 0; j < g->n_ang_; ++j) g->bulk_weights_(g->node(i, j)) = g->rho_weights_(i) * density * g->boundary_weights_(j);
  }

  const VectorXd interior = g->rho_.tail(n_rho - 1);
  const MatrixXd row = spectral::interpolation_matrix(interior, VectorXd::Zero(1));
  g->extrapolation_ = Eigen::RowVectorXd::Zero(n_rho);
  g->extrapolation_.tail(n_rho - 1) = row.row(0);
  return g;
}

const MatrixXd& Grid::d_theta() const {
  if (!axisymmetric()) throw ConfigError("no theta direction in radial-only mode");
  return d_theta_;
}

const MatrixXd& Grid::d2_theta() const {
  if (!axisymmetric()) throw ConfigError("no theta direction in radial-only mode");
  return d2_theta_;
}

VectorXd Grid::apply_rho(const MatrixXd& op, const VectorXd& f) const {
  Eigen::Map<const RowMajor> fm(f.data(), n_rho_, n_ang_);
  RowMajor out = op * fm;
  return Eigen::Map<const VectorXd>(out.data(), out.size());
}

VectorXd Grid::apply_theta(const MatrixXd& op, const VectorXd& f) const {
  if (!axisymmetric()) throw ConfigError("no theta direction in radial-only mode");
  Eigen::Map<const RowMajor> fm(f.data(), n_rho_, n_ang_);
  RowMajor out = fm * op.transpose();
  return Eigen::Map<const VectorXd>(out.data(), out.size());
}

int component_count(TensorKind kind, const Chart& chart) {
  const bool axi = chart.symmetry == Symmetry::axisymmetric;
  switch (kind) {
    case TensorKind::scalar:
      return 1;
    case TensorKind::covector:
      return axi ? 2 : 1;
    case TensorKind::sym2:
      return axi ? 4 : 2;
  }
  return 0;
}

std::vector<std::string> component_names(TensorKind kind, const Chart& chart) {
  const bool axi = chart.symmetry == Symmetry::axisymmetric;
  switch (kind) {
    case TensorKind::scalar:
      return {""};
    case TensorKind::covector:
      return axi ? std::vector<std::string>{"r", "t"} : std::vector<std::string>{"r"};
    case TensorKind::sym2:
      return axi ? std::vector<std::string>{"rr", "rt", "tt", "ff"} : std::vector<std::string>{"rr", "ff"};
  }
  return {};
}

Field Field::zeros(GridPtr grid, TensorKind kind, std::string name, double weight) {
  Field f;
  f.kind = kind;
  f.comps.assign(component_count(kind, grid->chart()), VectorXd::Zero(grid->size()));
  f.grid = std::move(grid);
  f.weight = weight;
  f.name = std::move(name);
  return f;
}

Field Field::scalar(GridPtr grid, VectorXd values, std::string name, double weight) {
  if (values.size() != grid->size()) throw ConfigError("scalar field size does not match the grid");
  Field f;
  f.kind = TensorKind::scalar;
  f.comps = {std::move(values)};
  f.grid = std::move(grid);
  f.weight = weight;
  f.name = std::move(name);
  return f;
}

bool Field::all_finite() const {
  for (const auto& c : comps)
    if (!c.allFinite()) return false;
  return true;
}

double Field::sup_norm(bool interior_only) const {
  double m = 0.0;
  const int skip = interior_only ? grid->n_ang() : 0;
  for (const auto& c : comps)
    if (c.size() > skip) m = std::max(m, c.tail(c.size() - skip).cwiseAbs().maxCoeff());
  return m;
}

VectorXd Field::flat() const {
  const int np = grid->size();
  VectorXd v(np * num_components());
  for (int c = 0; c < num_components(); ++c) v.segment(c * np, np) = comps[c];
  return v;
}

void Field::set_flat(const VectorXd& v) {
  const int np = grid->size();
  if (v.size() != np * num_components()) throw ConfigError("flat vector size mismatch");
  for (int c = 0; c < num_components(); ++c) comps[c] = v.segment(c * np, np);
}

Field differentiate(const Field& field, Direction direction) {
  const Grid& g = *field.grid;
  if (direction == Direction::theta && !g.axisymmetric())
    throw ConfigError("theta derivative requested on a radial-only grid");
  Field out = field;
  out.name = field.name + (direction == Direction::rho ? "_r" : "_t");
  for (auto& c : out.comps) c = direction == Direction::rho ? g.apply_rho(g.d_rho(), c) : g.apply_theta(g.d_theta(), c);
  return out;
}

double integrate(const Field& field, Domain domain, const Field* metric_perturbation) {
  if (field.kind != TensorKind::scalar) throw ConfigError("only scalar fields can be integrated");
  const Grid& g = *field.grid;
  const VectorXd& f = field.comps[0];
  if (domain == Domain::boundary) {
    double s = 0.0;
    for (int j = 0; j < g.n_ang(); ++j) s += g.boundary_weights()(j) * f(g.node(0, j));
    return s;
  }
  if (!(field.weight > g.n() - 1))
    throw ConfigError("bulk integral of '" + field.name + "' needs a declared weight above n - 1");
  if (metric_perturbation == nullptr) return g.bulk_weights().dot(f);
  const Field& h = *metric_perturbation;
  if (h.kind != TensorKind::sym2 || h.grid.get() != field.grid.get())
    throw ConfigError("measure perturbation must be a symmetric 2-tensor on the same grid");
  const int k = g.axisymmetric() ? g.n() - 2 : g.n() - 1;
  double s = 0.0;
  for (int q = 0; q < g.size(); ++q) {
    const double w = g.bulk_weights()(q);
    if (w == 0.0) continue;
    double det_base;
    double ff;
    if (g.axisymmetric()) {
      det_base = (1.0 + h.comps[0](q)) * (1.0 + h.comps[2](q)) - h.comps[1](q) * h.comps[1](q);
      ff = h.comps[3](q);
    } else {
      det_base = 1.0 + h.comps[0](q);
      ff = h.comps[1](q);
    }
    s += w * f(q) * std::sqrt(det_base * std::pow(1.0 + ff, k));
  }
  return s;
}

}  // namespace ahem
