#include "ahem/maxwell.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "ahem/linops.hpp"

namespace ahem {

MaxwellSolution solve_maxwell(const BoundaryData& bd, const StaticTriple& t, double tol) {
  bd.validate();
  const Grid& g = *t.grid;
  if (bd.n != g.n()) throw ConfigError("boundary data and grid have different dimensions");
  if (!g.axisymmetric() && !bd.U_hat_constant()) throw ConfigError("a radial grid needs a constant boundary potential");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");

  const Eigen::MatrixXd a = assemble_linear(g, 1, maxwell_kernel(make_node_states(t)));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(g.size());
  for (int j = 0; j < g.n_ang(); ++j) b(g.node(0, j)) = bd.U_hat_at(g.theta_at(g.node(0, j)));

  // rows equilibrated, one step of iterative refinement
  const Eigen::VectorXd rs = a.rowwise().lpNorm<Eigen::Infinity>().cwiseInverse();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(rs.asDiagonal() * a);
  MaxwellSolution out;
  out.rcond = lu.rcond();
  if (!(out.rcond > 1e-15)) {
    std::ostringstream msg;
    msg << "Maxwell system is singular to working precision (rcond " << out.rcond << ")";
    throw NumericalError(msg.str());
  }
  Eigen::VectorXd u = lu.solve(rs.cwiseProduct(b));
  u += lu.solve(rs.cwiseProduct(b - a * u));
  const Eigen::VectorXd r = a * u - b;
  for (int q = g.n_ang(); q < g.size(); ++q) {
    out.residual = std::max(out.residual, std::abs(r(q)));
    out.residual_conditioned = std::max(out.residual_conditioned, std::abs(r(q)) / chart_conditioning(g, q));
  }
  if (!(out.residual_conditioned <= tol)) {
    std::ostringstream msg;
    msg << "Maxwell residual " << out.residual << " above " << tol << " (rcond " << out.rcond << ")";
    throw NumericalError(msg.str());
  }
  out.U = Field::scalar(t.grid, u, "U", 0.0);
  return out;
}

double predicted_log_coefficient_at(const BoundaryData& bd, double theta) {
  if (bd.n != 4) return 0.0;
  const Jet u = bd.U_hat_jet(theta);
  const Jet vb = bd.V_breve_jet(theta);
  const Jet a = inverse(vb);
  const double du = u.d[0], d2u = u.hess(0, 0);
  const double st = std::sin(theta);
  // (n−2) cot θ · a Û', with its axis limit (n−2) a Û''
  const double polar = std::abs(st) < 1e-8 ? (bd.n - 2) * a.v * d2u : (bd.n - 2) * std::cos(theta) / st * a.v * du;
  return -0.5 * vb.v * (a.v * d2u + a.d[0] * du + polar);
}

LogCoefficient predicted_log_coefficient(const BoundaryData& bd, const Eigen::VectorXd& theta) {
  bd.validate();
  LogCoefficient c;
  c.n = bd.n;
  c.status = bd.n == 3 ? LogStatus::absent : bd.n == 4 ? LogStatus::formula : LogStatus::conjectural;
  c.theta = theta;
  c.value = Eigen::VectorXd::Zero(theta.size());
  if (bd.n == 4)
    for (Eigen::Index k = 0; k < theta.size(); ++k) c.value(k) = predicted_log_coefficient_at(bd, theta(k));
  return c;
}

LogCoefficient predicted_log_coefficient(const BoundaryData& bd, const Grid& grid) {
  Eigen::VectorXd th(grid.n_ang());
  for (int j = 0; j < grid.n_ang(); ++j) th(j) = grid.theta_at(grid.node(0, j));
  return predicted_log_coefficient(bd, th);
}

LogIdentity logterm_identity_check(const BoundaryData& bd, const LogCoefficient& uln, const Grid& grid) {
  if (bd.n != 4 || grid.n() != 4) throw ConfigError("the log-term identity is stated for n = 4");
  if (uln.value.size() != grid.n_ang()) throw ConfigError("U_ln is not sampled on the grid's boundary nodes");
  const Eigen::VectorXd& w = grid.boundary_weights();
  LogIdentity r;
  for (int j = 0; j < grid.n_ang(); ++j) {
    const double th = grid.theta_at(grid.node(0, j));
    const Jet u = bd.U_hat_jet(th);
    const double vi = 1.0 / bd.V_breve_at(th);
    r.lhs += w(j) * 2.0 * vi * u.v * uln.value(j);
    r.rhs += w(j) * vi * u.d[0] * u.d[0];
  }
  r.residual = r.rhs != 0.0 ? std::abs(r.lhs - r.rhs) / std::abs(r.rhs) : std::abs(r.lhs);
  return r;
}

LogCoefficient extract_log_coefficient(const Field& U, const BoundaryData& bd, LogFitWindow window) {
  if (U.kind != TensorKind::scalar) throw ConfigError("log extraction needs a scalar field");
  const Grid& g = *U.grid;
  if (bd.n != 4 || g.n() != 4) throw ConfigError("log extraction is done for n = 4 only");
  if (window.orders < 1) throw ConfigError("log fit needs at least one order");
  const double lo = window.rho_min > 0.0 ? window.rho_min : g.rho()(1);
  std::vector<int> rows;
  for (int i = 1; i < g.n_rho(); ++i)
    if (g.rho()(i) >= lo && g.rho()(i) <= window.rho_max) rows.push_back(i);
  const int cols = 2 * window.orders;
  if (static_cast<int>(rows.size()) <= cols) throw ConfigError("log fit window holds too few radial nodes");

  const int m = static_cast<int>(rows.size());
  Eigen::MatrixXd basis(m, cols);
  for (int k = 0; k < m; ++k) {
    const double r = g.rho()(rows[k]);
    for (int o = 0; o < window.orders; ++o) {
      const double p = std::pow(r, 2 * (o + 1));
      basis(k, 2 * o) = p;
      basis(k, 2 * o + 1) = p * std::log(r);
    }
  }
  const Eigen::VectorXd scale = basis.colwise().norm().cwiseInverse();
  const Eigen::MatrixXd scaled = basis * scale.asDiagonal();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const double cond = svd.singularValues()(0) / svd.singularValues()(cols - 1);
  if (!(cond < 1e10)) throw NumericalError("log fit basis is ill-conditioned on the window");
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);

  LogCoefficient c;
  c.n = 4;
  c.status = LogStatus::fitted;
  c.theta.resize(g.n_ang());
  c.value.resize(g.n_ang());
  c.rho2.resize(g.n_ang());
  for (int j = 0; j < g.n_ang(); ++j) {
    const double th = g.theta_at(g.node(0, j));
    const double uh = bd.U_hat_at(th);
    Eigen::VectorXd y(m);
    for (int k = 0; k < m; ++k) y(k) = U.comps[0](g.node(rows[k], j)) - uh;
    const Eigen::VectorXd x = scale.cwiseProduct(qr.solve(y));
    c.theta(j) = th;
    c.rho2(j) = x(0);
    c.value(j) = x(1);
    c.fit_residual = std::max(c.fit_residual, (basis * x - y).norm());
  }
  return c;
}

}  // namespace ahem
