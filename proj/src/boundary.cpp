#include "ahem/boundary.hpp"

#include <cmath>

namespace ahem {

namespace {

template <class T>
T gegenbauer(int l, double lambda, const T& x) {
  T c0 = x * 0.0 + 1.0;
  if (l == 0) return c0;
  T c1 = 2.0 * lambda * x;
  for (int k = 2; k <= l; ++k) {
    T c2 = (2.0 * (k + lambda - 1.0) * x * c1 - (k + 2.0 * lambda - 2.0) * c0) / static_cast<double>(k);
    c0 = c1;
    c1 = c2;
  }
  return c1;
}

Jet mode_sum(int n, const std::vector<Mode>& modes, double theta) {
  const Jet t = Jet::variable(theta, 0, 1);
  Jet s(0.0, 1);
  for (const auto& m : modes) s += m.amplitude * zonal_harmonic(n, m.l, t);
  return s;
}

}  // namespace

Jet zonal_harmonic(int n, int l, const Jet& theta) {
  const double lambda = 0.5 * (n - 2);
  const Jet x = cos(theta);
  return gegenbauer(l, lambda, x) / gegenbauer(l, lambda, 1.0);
}

Jet BoundaryData::U_hat_jet(double theta) const { return mode_sum(n, U_hat, theta); }
Jet BoundaryData::V_breve_jet(double theta) const { return mode_sum(n, V_breve, theta); }

bool BoundaryData::U_hat_constant() const {
  for (const auto& m : U_hat)
    if (m.l != 0 && m.amplitude != 0.0) return false;
  return true;
}

void BoundaryData::validate() const {
  if (n < 3) throw ConfigError("boundary data needs n >= 3");
  for (const auto* list : {&U_hat, &V_breve})
    for (const auto& m : *list) {
      if (m.l < 0) throw ConfigError("harmonic degree must be non-negative");
      if (!std::isfinite(m.amplitude)) throw ConfigError("harmonic amplitude must be finite");
    }
  for (int i = 0; i <= 64; ++i) {
    const double t = 3.141592653589793 * i / 64.0;
    if (!(V_breve_at(t) > 0.0)) throw ConfigError("boundary lapse must be positive");
  }
}

Eigen::VectorXd BoundaryData::U_hat_nodal(const Grid& grid) const {
  Eigen::VectorXd v(grid.size());
  for (int q = 0; q < grid.size(); ++q) v(q) = U_hat_at(grid.theta_at(q));
  return v;
}

std::vector<Mode> fit_zonal_modes(int n, const std::vector<double>& theta, const std::vector<double>& values,
                                  int lmax) {
  const int m = static_cast<int>(theta.size());
  if (m != static_cast<int>(values.size()) || m <= lmax) throw ConfigError("not enough boundary samples for the fit");
  Eigen::MatrixXd a(m, lmax + 1);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l <= lmax; ++l) a(i, l) = zonal_harmonic(n, l, theta[i]);
    b(i) = values[i];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  std::vector<Mode> out;
  for (int l = 0; l <= lmax; ++l)
    if (c(l) != 0.0) out.push_back({l, c(l)});
  return out;
}

}  // namespace ahem
