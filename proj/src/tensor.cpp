#include "ahem/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

namespace ahem {

namespace {

int ipow(int base, int e) {
  int r = 1;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

}  // namespace

JetTensor::JetTensor(int rank, int dim, int order)
    : rank_(rank), dim_(dim), data_(static_cast<std::size_t>(ipow(dim, rank)), Jet(0.0, dim, order)) {}

int JetTensor::order() const {
  int o = 2;
  for (const auto& j : data_) o = std::min(o, j.order);
  return o;
}

JetTensor inverse_metric(const JetTensor& g) {
  const int n = g.dim();
  const int ord = g.order();
  Eigen::MatrixXd g0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g0(i, j) = g.at(i, j).v;
  const Eigen::MatrixXd gi = g0.inverse();

  std::vector<Eigen::MatrixXd> dg(n, Eigen::MatrixXd::Zero(n, n));
  std::vector<Eigen::MatrixXd> dgi(n, Eigen::MatrixXd::Zero(n, n));
  if (ord >= 1) {
    for (int a = 0; a < n; ++a) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dg[a](i, j) = g.at(i, j).d[a];
      dgi[a] = -gi * dg[a] * gi;
    }
  }

  JetTensor r(2, n, ord);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Jet& e = r.at(i, j);
      e.v = gi(i, j);
      if (ord >= 1)
        for (int a = 0; a < n; ++a) e.d[a] = dgi[a](i, j);
    }
  }
  if (ord >= 2) {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        Eigen::MatrixXd ddg(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) ddg(i, j) = g.at(i, j).hess(a, b);
        const Eigen::MatrixXd h = gi * dg[b] * gi * dg[a] * gi + gi * dg[a] * gi * dg[b] * gi - gi * ddg * gi;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) r.at(i, j).hess(a, b) = h(i, j);
      }
    }
  }
  return r;
}

JetTensor christoffel_symbols(const JetTensor& g, const JetTensor& ginv) {
  const int n = g.dim();
  // first-kind symbols Γ_lij = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
  JetTensor first(3, n, g.order() - 1);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet s = g.at(j, l).derivative(i) + g.at(i, l).derivative(j) - g.at(i, j).derivative(l);
        s *= 0.5;
        first.at(l, i, j) = s;
        first.at(l, j, i) = s;
      }
  JetTensor gamma(3, n, g.order() - 1);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet s(0.0, n, 2);
        for (int l = 0; l < n; ++l) s += ginv.at(k, l) * first.at(l, i, j);
        gamma.at(k, i, j) = s;
        gamma.at(k, j, i) = s;
      }
  return gamma;
}

JetTensor covariant_derivative(const JetTensor& t, const JetTensor& gamma) {
  const int n = t.dim();
  const int r = t.rank();
  JetTensor out(r + 1, n, t.order() - 1);
  const int block = ipow(n, r);
  std::vector<int> idx(r);
  for (int m = 0; m < n; ++m) {
    for (int flat = 0; flat < block; ++flat) {
      int rem = flat;
      for (int s = r - 1; s >= 0; --s) {
        idx[s] = rem % n;
        rem /= n;
      }
      Jet acc = t[flat].derivative(m);
      for (int s = 0; s < r; ++s) {
        int stride = ipow(n, r - 1 - s);
        const int base = flat - idx[s] * stride;
        for (int p = 0; p < n; ++p) {
          const Jet& gmp = gamma.at(p, m, idx[s]);
          if (gmp.v == 0.0 && gmp.order == 0) continue;
          acc -= gmp * t[base + p * stride];
        }
      }
      out[m * block + flat] = acc;
    }
  }
  return out;
}

std::vector<double> riemann_up(const JetTensor& gamma) {
  const int n = gamma.dim();
  std::vector<double> r(static_cast<std::size_t>(n) * n * n * n, 0.0);
  for (int p = 0; p < n; ++p)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          double s = gamma.at(p, l, k).d[j] - gamma.at(p, j, k).d[l];
          for (int m = 0; m < n; ++m) s += gamma.at(p, j, m).v * gamma.at(m, l, k).v - gamma.at(p, l, m).v * gamma.at(m, j, k).v;
          r[((p * n + k) * n + j) * n + l] = s;
        }
  return r;
}

std::vector<double> riemann_down(const JetTensor& g, const std::vector<double>& r_up, int n) {
  std::vector<double> r(r_up.size(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int p = 0; p < n; ++p) s += g.at(i, p).v * r_up[((p * n + k) * n + j) * n + l];
          r[((i * n + k) * n + j) * n + l] = s;
        }
  return r;
}

std::vector<double> ricci_from_riemann(const std::vector<double>& r_up, int n) {
  std::vector<double> ric(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int p = 0; p < n; ++p) s += r_up[((p * n + k) * n + p) * n + l];
      ric[k * n + l] = s;
    }
  return ric;
}

PointGeometry PointGeometry::from_metric(const JetTensor& g, bool with_curvature) {
  PointGeometry pg;
  pg.dim = g.dim();
  pg.g = g;
  pg.ginv = inverse_metric(g);
  pg.gamma = christoffel_symbols(g, pg.ginv);
  if (with_curvature) {
    if (g.order() < 2) throw std::invalid_argument("curvature needs second-order metric jets");
    const std::vector<double> rup = riemann_up(pg.gamma);
    pg.riemann = riemann_down(g, rup, pg.dim);
    pg.ricci = ricci_from_riemann(rup, pg.dim);
    double s = 0.0;
    for (int i = 0; i < pg.dim; ++i)
      for (int j = 0; j < pg.dim; ++j) s += pg.ginv.at(i, j).v * pg.ricci[i * pg.dim + j];
    pg.scalar = s;
  }
  return pg;
}

PointGeometry PointGeometry::relative_to(const JetTensor& g0, const JetTensor& h, double K) {
  if (h.order() < 2 || g0.order() < 2) throw std::invalid_argument("curvature needs second-order metric jets");
  const int n = g0.dim();
  JetTensor g = g0;
  for (auto i = 0u; i < g.size(); ++i) g[i] += h[i];
  PointGeometry pg;
  pg.dim = n;
  pg.g = g;
  pg.ginv = inverse_metric(g);
  pg.gamma = christoffel_symbols(g, pg.ginv);

  const JetTensor gamma0 = christoffel_symbols(g0, inverse_metric(g0));
  const JetTensor dh = covariant_derivative(h, gamma0);  // ∇̊_m h_ij

  // C^k_ij = ½ g^{kl}(∇̊_i h_jl + ∇̊_j h_il − ∇̊_l h_ij), first-order jets
  JetTensor c(3, n, 1);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet s(0.0, n, 1);
        for (int l = 0; l < n; ++l) {
          Jet t = dh.at(i, j, l) + dh.at(j, i, l) - dh.at(l, i, j);
          s += pg.ginv.at(k, l) * t;
        }
        s *= 0.5;
        c.at(k, i, j) = s;
        c.at(k, j, i) = s;
      }

  // ∇̊_j C^p_lk, values, stored [j][p][l][k]
  std::vector<double> dc(static_cast<std::size_t>(n) * n * n * n);
  for (int j = 0; j < n; ++j)
    for (int p = 0; p < n; ++p)
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          double s = c.at(p, l, k).d[j];
          for (int m = 0; m < n; ++m)
            s += gamma0.at(p, j, m).v * c.at(m, l, k).v - gamma0.at(m, j, l).v * c.at(p, m, k).v -
                 gamma0.at(m, j, k).v * c.at(p, l, m).v;
          dc[((j * n + p) * n + l) * n + k] = s;
        }

  std::vector<double> rup(static_cast<std::size_t>(n) * n * n * n, 0.0);
  for (int p = 0; p < n; ++p)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          double s = K * ((p == j) * g0.at(k, l).v - (p == l) * g0.at(k, j).v);
          s += dc[((j * n + p) * n + l) * n + k] - dc[((l * n + p) * n + j) * n + k];
          for (int m = 0; m < n; ++m) s += c.at(p, j, m).v * c.at(m, l, k).v - c.at(p, l, m).v * c.at(m, j, k).v;
          rup[((p * n + k) * n + j) * n + l] = s;
        }
  pg.riemann = riemann_down(g, rup, n);
  pg.ricci = ricci_from_riemann(rup, n);
  double sc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sc += pg.ginv.at(i, j).v * pg.ricci[i * n + j];
  pg.scalar = sc;
  return pg;
}

double PointGeometry::riemann_at(int i, int k, int j, int l) const {
  return riemann[((i * dim + k) * dim + j) * dim + l];
}

std::vector<double> hessian(const PointGeometry& pg, const Jet& f) {
  const int n = pg.dim;
  std::vector<double> h(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = f.hess(i, j);
      for (int k = 0; k < n; ++k) s -= pg.gamma.at(k, i, j).v * f.d[k];
      h[i * n + j] = s;
      h[j * n + i] = s;
    }
  return h;
}

double laplacian(const PointGeometry& pg, const Jet& f) {
  const auto h = hessian(pg, f);
  double s = 0.0;
  for (int i = 0; i < pg.dim; ++i)
    for (int j = 0; j < pg.dim; ++j) s += pg.ginv_val(i, j) * h[i * pg.dim + j];
  return s;
}

double grad_dot(const PointGeometry& pg, const Jet& f, const Jet& h) {
  double s = 0.0;
  for (int i = 0; i < pg.dim; ++i)
    for (int j = 0; j < pg.dim; ++j) s += pg.ginv_val(i, j) * f.d[i] * h.d[j];
  return s;
}

std::vector<double> rough_laplacian(const PointGeometry& pg, const JetTensor& h) {
  const int n = pg.dim;
  const JetTensor dh = covariant_derivative(h, pg.gamma);
  const JetTensor ddh = covariant_derivative(dh, pg.gamma);
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) s += pg.ginv_val(m, k) * ddh.at(m, k, i, j).v;
      out[i * n + j] = s;
    }
  return out;
}

std::vector<double> lichnerowicz(const PointGeometry& pg, const JetTensor& h) {
  const int n = pg.dim;
  std::vector<double> out = rough_laplacian(pg, h);
  for (auto& x : out) x = -x;
  // h^k_j and h^{kl}
  std::vector<double> mixed(static_cast<std::size_t>(n) * n, 0.0), up(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s += pg.ginv_val(k, a) * h.at(a, j).v;
      mixed[k * n + j] = s;
    }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int b = 0; b < n; ++b) s += mixed[k * n + b] * pg.ginv_val(b, l);
      up[k * n + l] = s;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += pg.ricci_val(i, k) * mixed[k * n + j] + pg.ricci_val(j, k) * mixed[k * n + i];
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s -= 2.0 * pg.riemann_at(i, k, j, l) * up[k * n + l];
      out[i * n + j] += s;
    }
  return out;
}

JetTensor divergence_sym2(const PointGeometry& pg, const JetTensor& h) {
  const int n = pg.dim;
  const JetTensor dh = covariant_derivative(h, pg.gamma);
  JetTensor out(1, n, dh.order());
  for (int i = 0; i < n; ++i) {
    Jet s(0.0, n, 2);
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) s += pg.ginv.at(m, k) * dh.at(m, k, i);
    out.at(i) = -s;
  }
  return out;
}

std::vector<double> div_star(const PointGeometry& pg, const JetTensor& w) {
  const int n = pg.dim;
  const JetTensor dw = covariant_derivative(w, pg.gamma);
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i * n + j] = 0.5 * (dw.at(i, j).v + dw.at(j, i).v);
  return out;
}

Jet trace(const PointGeometry& pg, const JetTensor& h) {
  Jet s(0.0, pg.dim, 2);
  for (int i = 0; i < pg.dim; ++i)
    for (int j = 0; j < pg.dim; ++j) s += pg.ginv.at(i, j) * h.at(i, j);
  return s;
}

}  // namespace ahem
