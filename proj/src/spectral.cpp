#include "ahem/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ahem::spectral {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd radau_nodes(int n, double a, double b) {
  VectorXd x(n);
  for (int j = 0; j < n; ++j) {
    const double t = -std::cos(2.0 * std::numbers::pi * j / (2.0 * n - 1.0));
    x(j) = a + 0.5 * (b - a) * (1.0 + t);
  }
  x(0) = a;
  return x;
}

VectorXd gauss_nodes(int n, double a, double b) {
  VectorXd x(n);
  for (int j = 0; j < n; ++j) {
    const double t = -std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * n));
    x(j) = a + 0.5 * (b - a) * (1.0 + t);
  }
  return x;
}

std::pair<VectorXd, VectorXd> gauss_legendre(int n, double a, double b) {
  VectorXd x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x(n - 1 - i) = a + 0.5 * (b - a) * (1.0 + z);
    w(n - 1 - i) = (b - a) / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

VectorXd barycentric_weights(const VectorXd& x) {
  const int n = static_cast<int>(x.size());
  const double scale = 4.0 / (x.maxCoeff() - x.minCoeff() + 1e-300);
  VectorXd w(n);
  for (int j = 0; j < n; ++j) {
    double p = 1.0;
    for (int k = 0; k < n; ++k)
      if (k != j) p *= scale * (x(j) - x(k));
    w(j) = 1.0 / p;
  }
  return w;
}

MatrixXd interpolation_matrix(const VectorXd& x, const VectorXd& targets) {
  const VectorXd w = barycentric_weights(x);
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(targets.size());
  MatrixXd p = MatrixXd::Zero(m, n);
  for (int i = 0; i < m; ++i) {
    int exact = -1;
    for (int j = 0; j < n; ++j)
      if (targets(i) == x(j)) exact = j;
    if (exact >= 0) {
      p(i, exact) = 1.0;
      continue;
    }
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = w(j) / (targets(i) - x(j));
      p(i, j) = t;
      denom += t;
    }
    p.row(i) /= denom;
  }
  return p;
}

std::pair<MatrixXd, MatrixXd> differentiation_matrices(const VectorXd& x) {
  const int n = static_cast<int>(x.size());
  const VectorXd w = barycentric_weights(x);
  MatrixXd d1 = MatrixXd::Zero(n, n), d2 = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (i != j) d1(i, j) = (w(j) / w(i)) / (x(i) - x(j));
    d1(i, i) = -d1.row(i).sum();
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (i != j) d2(i, j) = 2.0 * d1(i, j) * (d1(i, i) - 1.0 / (x(i) - x(j)));
    d2(i, i) = -d2.row(i).sum();
  }
  return {d1, d2};
}

VectorXd interpolatory_weights(const VectorXd& x, double a, double b, const std::function<double(double)>& weight) {
  const int n = static_cast<int>(x.size());
  const auto [gx, gw] = gauss_legendre(4 * n + 64, a, b);
  // Chebyshev basis T_k(t), t mapped from [a, b]
  auto cheb = [&](double s, int k) { return std::cos(k * std::acos(std::clamp(2.0 * (s - a) / (b - a) - 1.0, -1.0, 1.0))); };
  VectorXd moments(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int q = 0; q < gx.size(); ++q) s += gw(q) * weight(gx(q)) * cheb(gx(q), k);
    moments(k) = s;
  }
  MatrixXd basis(n, n);  // basis(k, j) = T_k(x_j)
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) basis(k, j) = cheb(x(j), k);
  return basis.partialPivLu().solve(moments);
}

}  // namespace ahem::spectral
