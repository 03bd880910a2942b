#ifndef AHEM_TEST_MODE_ODE_HPP
#define AHEM_TEST_MODE_ODE_HPP

// Radial profile of a harmonic mode of ∇(V̊⁻¹∇U) = 0 on hyperbolic space,
//   f'' + ((n−1)coth r − tanh r) f' − l(l+n−2) f / sinh²r = 0,
// integrated in r = ln(2/ρ) from the regular centre series and normalised to
// f → 1 at r = 40 (ρ ≈ 1e−17).

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <utility>
#include <vector>

namespace oracle {

inline std::vector<double> mode_profile(int n, int l, const std::vector<double>& rhos) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;
  const double L = l * (l + n - 2.0);
  const double r0 = 1e-5;
  // f = r^l (1 + a r²) near r = 0
  const double a = l * (6.0 - 2.0 * n - l) / (3.0 * (4.0 * l + 2.0 * n));
  State x{std::pow(r0, l) * (1 + a * r0 * r0), l * std::pow(r0, l - 1) + a * (l + 2) * std::pow(r0, l + 1)};
  auto rhs = [&](const State& y, State& dy, double r) {
    dy[0] = y[1];
    dy[1] = -((n - 1) / std::tanh(r) - std::tanh(r)) * y[1] + L * y[0] / std::pow(std::sinh(r), 2);
  };
  std::vector<std::pair<double, std::size_t>> rs;
  for (std::size_t k = 0; k < rhos.size(); ++k) rs.push_back({std::log(2.0 / rhos[k]), k});
  std::sort(rs.begin(), rs.end());
  std::vector<double> times{r0};
  for (const auto& p : rs) times.push_back(p.first);
  times.push_back(40.0);
  std::vector<double> vals;
  ode::integrate_times(ode::make_dense_output(1e-14, 1e-14, ode::runge_kutta_dopri5<State>()), rhs, x, times.begin(),
                       times.end(), 1e-4, [&](const State& y, double) { vals.push_back(y[0]); });
  std::vector<double> out(rhos.size());
  for (std::size_t k = 0; k < rs.size(); ++k) out[rs[k].second] = vals[k + 1] / vals.back();
  return out;
}

}  // namespace oracle

#endif
