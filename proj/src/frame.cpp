#include "ahem/frame.hpp"

#include <algorithm>
#include <cmath>

namespace ahem {

Slots NodalDerivatives::at(int q) const {
  Slots s;
  s.v = v(q);
  s.r = r(q);
  s.rr = rr(q);
  if (t.size() > 0) {
    s.t = t(q);
    s.rt = rt(q);
    s.tt = tt(q);
  }
  return s;
}

NodalDerivatives nodal_derivatives(const Grid& grid, const Eigen::VectorXd& f) {
  NodalDerivatives d;
  d.v = f;
  d.r = grid.apply_rho(grid.d_rho(), f);
  d.rr = grid.apply_rho(grid.d2_rho(), f);
  if (grid.axisymmetric()) {
    d.t = grid.apply_theta(grid.d_theta(), f);
    d.tt = grid.apply_theta(grid.d2_theta(), f);
    d.rt = grid.apply_theta(grid.d_theta(), d.r);
  }
  return d;
}

std::vector<NodalDerivatives> nodal_derivatives(const Field& f) {
  std::vector<NodalDerivatives> out;
  for (const auto& c : f.comps) out.push_back(nodal_derivatives(*f.grid, c));
  return out;
}

LocalChart::LocalChart(const Grid& grid, int q, bool with_circle) {
  n_ = grid.n();
  base_ = grid.axisymmetric() ? 2 : 1;
  k_ = n_ - base_;
  dim_ = n_ + (with_circle ? 1 : 0);
  circle_ = with_circle ? n_ : -1;
  if (dim_ > kMaxDim) throw ConfigError("dimension too large for the pointwise engine");
  rho_ = grid.rho_at(q);
  theta_ = grid.theta_at(q);
  s_ = 1.0 - 0.25 * rho_ * rho_;

  rho_j_ = Jet::variable(rho_, 0, dim_);
  s_j_ = 1.0 - 0.25 * rho_j_ * rho_j_;
  inv_rho_ = inverse(rho_j_);
  inv_rho2_ = inv_rho_ * inv_rho_;
  v0_ = inv_rho_ * (1.0 + 0.25 * rho_j_ * rho_j_);
  psi0_ = s_j_ * s_j_ * inv_rho2_;
  if (base_ == 2) {
    const Jet sn = sin(Jet::variable(theta_, 1, dim_));
    psi0_ = psi0_ * sn * sn;
  }

  gamma_ = JetTensor(2, k_);
  for (int a = 0; a < k_; ++a)
    for (int b = 0; b < k_; ++b) {
      Jet e(a == b ? 1.0 : 0.0, dim_);
      for (int m = 0; m < k_; ++m)
        for (int v = m; v < k_; ++v) {
          const double c = 2.0 * (a == b) * (m == v) - (a == m) * (b == v) - (a == v) * (b == m);
          e.hess(base_ + m, base_ + v) = -c / 3.0;
        }
      gamma_.at(a, b) = e;
    }

  g0_ = JetTensor(2, dim_);
  for (auto i = 0u; i < g0_.size(); ++i) g0_[i] = constant(0.0);
  g0_.at(0, 0) = inv_rho2_;
  if (base_ == 2) g0_.at(1, 1) = s_j_ * s_j_ * inv_rho2_;
  for (int a = 0; a < k_; ++a)
    for (int b = 0; b < k_; ++b) g0_.at(base_ + a, base_ + b) = psi0_ * gamma_.at(a, b);
}

Jet LocalChart::scalar(const Slots& sl) const {
  Jet j(sl.v, dim_);
  j.d[0] = sl.r;
  j.hess(0, 0) = sl.rr;
  if (base_ == 2) {
    j.d[1] = sl.t;
    j.hess(0, 1) = sl.rt;
    j.hess(1, 1) = sl.tt;
  }
  return j;
}

JetTensor LocalChart::sym2_from_frame(const std::vector<Jet>& hat) const {
  JetTensor t(2, dim_);
  for (auto i = 0u; i < t.size(); ++i) t[i] = constant(0.0);
  t.at(0, 0) = inv_rho2_ * hat[0];
  Jet ff;
  if (base_ == 2) {
    const Jet rt = s_j_ * inv_rho2_ * hat[1];
    t.at(0, 1) = rt;
    t.at(1, 0) = rt;
    t.at(1, 1) = s_j_ * s_j_ * inv_rho2_ * hat[2];
    ff = psi0_ * hat[3];
  } else {
    ff = psi0_ * hat[1];
  }
  for (int a = 0; a < k_; ++a)
    for (int b = 0; b < k_; ++b) t.at(base_ + a, base_ + b) = ff * gamma_.at(a, b);
  return t;
}

JetTensor LocalChart::covector_from_frame(const std::vector<Jet>& hat) const {
  JetTensor w(1, dim_);
  for (auto i = 0u; i < w.size(); ++i) w[i] = constant(0.0);
  w.at(0) = inv_rho_ * hat[0];
  if (base_ == 2) w.at(1) = s_j_ * inv_rho_ * hat[1];
  return w;
}

std::vector<double> LocalChart::frame_of_sym2(const std::vector<double>& t) const {
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(t.size()))));
  const double r2 = rho_ * rho_;
  const int f = base_;
  if (base_ == 2)
    return {r2 * t[0], r2 / s_ * t[1], r2 / (s_ * s_) * t[d + 1], t[f * d + f] / psi0_.v};
  return {r2 * t[0], t[f * d + f] / psi0_.v};
}

std::vector<double> LocalChart::frame_of_covector(const std::vector<double>& w) const {
  if (base_ == 2) return {rho_ * w[0], rho_ / s_ * w[1]};
  return {rho_ * w[0]};
}

std::vector<double> LocalChart::frame_of_sym2(const JetTensor& t) const {
  std::vector<double> v(t.size());
  for (auto i = 0u; i < t.size(); ++i) v[i] = t[i].v;
  return frame_of_sym2(v);
}

std::vector<double> LocalChart::frame_of_covector(const JetTensor& w) const {
  std::vector<double> v(w.size());
  for (auto i = 0u; i < w.size(); ++i) v[i] = w[i].v;
  return frame_of_covector(v);
}

JetTensor LocalChart::spacetime_metric(const Jet& V, const JetTensor& g, int epsilon) const {
  if (!has_circle()) throw ConfigError("chart has no circle coordinate");
  JetTensor G(2, dim_);
  for (auto i = 0u; i < G.size(); ++i) G[i] = constant(0.0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) G.at(i, j) = g.at(i, j);
  G.at(circle_, circle_) = static_cast<double>(epsilon) * V * V;
  return G;
}

JetTensor LocalChart::spacetime_perturbation(const Jet& wbar, const JetTensor& h, int epsilon) const {
  JetTensor G = spacetime_metric(v0_, h, epsilon);
  G.at(circle_, circle_) = static_cast<double>(epsilon) * v0_ * v0_ * wbar * (2.0 + wbar);
  return G;
}

void extrapolate_to_boundary(const Grid& grid, Eigen::VectorXd& f) {
  const auto& e = grid.boundary_extrapolation();
  for (int j = 0; j < grid.n_ang(); ++j) {
    double s = 0.0;
    for (int i = 1; i < grid.n_rho(); ++i) s += e(i) * f(grid.node(i, j));
    f(grid.node(0, j)) = s;
  }
}

double chart_conditioning(const Grid& grid, int q, int derivatives) {
  const double r = grid.rho_at(q), s = 1.0 - 0.25 * r * r;
  double f = s * s / (r * r);
  if (grid.axisymmetric()) f *= std::pow(std::sin(grid.theta_at(q)), 2);
  const double k = std::max(1.0, 1.0 / f);
  return derivatives == 2 ? k : std::pow(k, 0.5 * derivatives);
}

double frame_norm(const Field& f, int q) {
  if (f.kind == TensorKind::scalar) return std::abs(f.comps[0](q));
  double sum = 0;
  for (int c = 0; c < f.num_components(); ++c) {
    double mult = 1.0;
    if (f.kind == TensorKind::sym2) {
      const bool last = c == f.num_components() - 1;
      if (f.grid->axisymmetric())
        mult = c == 1 ? 2.0 : last ? f.grid->n() - 2.0 : 1.0;
      else
        mult = last ? f.grid->n() - 1.0 : 1.0;
    }
    sum += mult * f.comps[c](q) * f.comps[c](q);
  }
  return std::sqrt(sum);
}

}  // namespace ahem
