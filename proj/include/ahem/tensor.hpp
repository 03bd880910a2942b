#ifndef AHEM_TENSOR_HPP
#define AHEM_TENSOR_HPP

// Pointwise tensor calculus on coordinate components carried as jets.
//
// All tensors here are covariant (lower indices) unless the name says
// otherwise. Index layout is row-major: T[i0][i1]...[ir-1].

#include <vector>

#include "ahem/jet.hpp"

namespace ahem {

class JetTensor {
 public:
  JetTensor() = default;
  JetTensor(int rank, int dim, int order = 2);

  int rank() const { return rank_; }
  int dim() const { return dim_; }
  std::size_t size() const { return data_.size(); }

  Jet& operator[](std::size_t k) { return data_[k]; }
  const Jet& operator[](std::size_t k) const { return data_[k]; }

  Jet& at(int i) { return data_[i]; }
  const Jet& at(int i) const { return data_[i]; }
  Jet& at(int i, int j) { return data_[i * dim_ + j]; }
  const Jet& at(int i, int j) const { return data_[i * dim_ + j]; }
  Jet& at(int i, int j, int k) { return data_[(i * dim_ + j) * dim_ + k]; }
  const Jet& at(int i, int j, int k) const { return data_[(i * dim_ + j) * dim_ + k]; }
  Jet& at(int i, int j, int k, int l) { return data_[((i * dim_ + j) * dim_ + k) * dim_ + l]; }
  const Jet& at(int i, int j, int k, int l) const {
    return data_[((i * dim_ + j) * dim_ + k) * dim_ + l];
  }

  int order() const;

 private:
  int rank_ = 0;
  int dim_ = 0;
  std::vector<Jet> data_;
};

// Inverse of a symmetric metric given as jets; derivatives follow from
// d(g^-1) = -g^-1 dg g^-1.
JetTensor inverse_metric(const JetTensor& g);

// Christoffel symbols of the second kind, Gamma[k][i][j] = Γ^k_ij.
JetTensor christoffel_symbols(const JetTensor& g, const JetTensor& ginv);

// ∇_m T_{i1..ir}, returned with the derivative index first.
JetTensor covariant_derivative(const JetTensor& t, const JetTensor& gamma);

// Riemann tensor R^p_{kjl} = ∂_j Γ^p_lk − ∂_l Γ^p_jk + Γ^p_jm Γ^m_lk − Γ^p_lm Γ^m_jk
// (values only), stored as [p][k][j][l].
std::vector<double> riemann_up(const JetTensor& gamma);

// Values of R_{ikjl} = g_ip R^p_{kjl}.
std::vector<double> riemann_down(const JetTensor& g, const std::vector<double>& r_up, int dim);

// Ric_kl = R^p_{kpl}.
std::vector<double> ricci_from_riemann(const std::vector<double>& r_up, int dim);

// Everything needed to differentiate tensors at one point.
struct PointGeometry {
  int dim = 0;
  JetTensor g;
  JetTensor ginv;
  JetTensor gamma;
  std::vector<double> riemann;  // R_{ikjl}
  std::vector<double> ricci;    // R_kl
  double scalar = 0.0;

  // Curvature straight from the Christoffel symbols of g.
  static PointGeometry from_metric(const JetTensor& g, bool with_curvature = true);
  // Curvature of g = g0 + h for a background g0 of constant sectional
  // curvature K: R(g) = R(g0) + ∇̊C − ∇̊C + C·C with C = Γ(g) − Γ(g0). Near
  // coordinate singularities the large Γ·Γ terms of g0 then never cancel
  // numerically; roundoff scales with h, which must be passed as given.
  static PointGeometry relative_to(const JetTensor& g0, const JetTensor& h, double K);

  double g_val(int i, int j) const { return g.at(i, j).v; }
  double ginv_val(int i, int j) const { return ginv.at(i, j).v; }
  double ricci_val(int i, int j) const { return ricci[i * dim + j]; }
  // R_{ikjl}
  double riemann_at(int i, int k, int j, int l) const;
};

// Pointwise operators built on PointGeometry. Inputs carry jets of the
// required order; outputs are values.

// Hess_ij f = ∂_i∂_j f − Γ^k_ij ∂_k f (values).
std::vector<double> hessian(const PointGeometry& pg, const Jet& f);
// Δf = g^{ij} Hess_ij f.
double laplacian(const PointGeometry& pg, const Jet& f);
// <df, dh>_g
double grad_dot(const PointGeometry& pg, const Jet& f, const Jet& h);
// Rough Laplacian g^{mk}∇_m∇_k h_ij of a symmetric 2-tensor (values).
std::vector<double> rough_laplacian(const PointGeometry& pg, const JetTensor& h);
// Δ_L h_ij = −∇^k∇_k h_ij + R_ik h^k_j + R_jk h^k_i − 2 R_ikjl h^{kl}.
std::vector<double> lichnerowicz(const PointGeometry& pg, const JetTensor& h);
// Geometers' divergence (div h)_i = −∇^k h_ik as jets one order below h.
JetTensor divergence_sym2(const PointGeometry& pg, const JetTensor& h);
// (div* w)_ij = ½(∇_i w_j + ∇_j w_i), values.
std::vector<double> div_star(const PointGeometry& pg, const JetTensor& w);
// g^{ij} h_ij as a jet.
Jet trace(const PointGeometry& pg, const JetTensor& h);

}  // namespace ahem

#endif  // AHEM_TENSOR_HPP
