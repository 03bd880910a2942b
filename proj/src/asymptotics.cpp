#include "ahem/asymptotics.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>

#include "ahem/frame.hpp"

namespace ahem {

namespace {

// Scalars keep their sign; tensors enter through the frame norm.
double pointwise(const Field& f, int q) { return f.kind == TensorKind::scalar ? f.comps[0](q) : frame_norm(f, q); }

struct LogFit {
  double a = 0, b = 0, J = 0, G = 0;
};

// Best (a, b) for fixed p; J the normalised squared residual, G = dJ/dp.
LogFit log_fit(const Eigen::VectorXd& rho, const Eigen::VectorXd& wf, const Eigen::VectorXd& w, double p) {
  const Eigen::Index m = rho.size();
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd lr(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    lr(i) = std::log(rho(i));
    const double base = w(i) * std::pow(rho(i), p);
    A(i, 0) = base * lr(i);
    A(i, 1) = base;
  }
  const Eigen::Vector2d x = A.colPivHouseholderQr().solve(wf);
  const Eigen::VectorXd r = wf - A * x;
  const double nf = wf.squaredNorm();
  LogFit out{x(0), x(1), r.squaredNorm() / nf, 0.0};
  for (Eigen::Index i = 0; i < m; ++i) out.G -= 2.0 * r(i) * lr(i) * (A(i, 0) * x(0) + A(i, 1) * x(1)) / nf;
  return out;
}

}  // namespace

DecayFit fit_profile(const Eigen::VectorXd& rho, const Eigen::VectorXd& f, DecayModel model) {
  if (rho.size() != f.size() || rho.size() < 4) throw ConfigError("a decay fit needs at least 4 samples");
  if ((rho.array() <= 0.0).any()) throw ConfigError("decay fits need ρ > 0");
  if (!f.allFinite()) throw NumericalError("non-finite values in the fit window");
  DecayFit out;
  out.model = model;
  out.rho_lo = rho.minCoeff();
  out.rho_hi = rho.maxCoeff();
  Eigen::Index peak;
  const double fmax = f.cwiseAbs().maxCoeff(&peak);
  if (fmax == 0.0) return out;

  // pure power in log variables, over the nonzero samples
  std::vector<Eigen::Index> nz;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (f(i) != 0.0) nz.push_back(i);
  if (nz.size() < 2) throw NumericalError("too few nonzero samples in the fit window");
  Eigen::MatrixXd X(nz.size(), 2);
  Eigen::VectorXd y(nz.size());
  for (std::size_t k = 0; k < nz.size(); ++k) {
    X(k, 0) = 1.0;
    X(k, 1) = std::log(rho(nz[k]));
    y(k) = std::log(std::abs(f(nz[k])));
  }
  const Eigen::Vector2d cp = X.colPivHouseholderQr().solve(y);
  const double p_ref = cp(1);
  const Eigen::VectorXd w = rho.array().pow(-p_ref).matrix();
  const Eigen::VectorXd wf = w.cwiseProduct(f);

  if (model == DecayModel::pure_power) {
    out.exponent = p_ref;
    out.coefficient = std::copysign(std::exp(cp(0)), f(peak));
    const Eigen::VectorXd m = out.coefficient * rho.array().pow(p_ref).matrix();
    out.residual = w.cwiseProduct(f - m).norm() / wf.norm();
    return out;
  }

  auto J = [&](double p) { return log_fit(rho, wf, w, p).J; };
  const auto [p0, J0] = boost::math::tools::brent_find_minima(J, p_ref - 1.5, p_ref + 1.5, 40);
  (void)J0;
  // polish on the gradient so the exponent is accurate to rounding, not to √ε
  double p = p0;
  const double lo = p0 - 1e-3, hi = p0 + 1e-3;
  const double glo = log_fit(rho, wf, w, lo).G, ghi = log_fit(rho, wf, w, hi).G;
  if (glo < 0.0 && ghi > 0.0) {
    std::uintmax_t iters = 200;
    const auto br = boost::math::tools::toms748_solve([&](double t) { return log_fit(rho, wf, w, t).G; }, lo, hi, glo,
                                                      ghi, boost::math::tools::eps_tolerance<double>(52), iters);
    p = 0.5 * (br.first + br.second);
  }
  const LogFit lf = log_fit(rho, wf, w, p);
  out.exponent = p;
  out.log_coefficient = lf.a;
  out.coefficient = lf.b;
  out.residual = std::sqrt(lf.J);
  return out;
}

DecayFit fit_decay(const Field& f, DecayModel model, DecayWindow window) {
  const Grid& g = *f.grid;
  std::vector<int> rows;
  for (int i = std::max(1, window.first_node); i < g.n_rho(); ++i)
    if (g.rho()(i) <= window.rho_max) rows.push_back(i);
  if (rows.size() < 6) throw ConfigError("decay fit window holds fewer than 6 radial nodes");
  const int m = static_cast<int>(rows.size());

  Eigen::VectorXd rho(m);
  for (int k = 0; k < m; ++k) rho(k) = g.rho()(rows[k]);
  Eigen::MatrixXd prof(m, g.n_ang());
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < g.n_ang(); ++j) prof(k, j) = pointwise(f, g.node(rows[k], j));
  if (!prof.allFinite()) throw NumericalError("non-finite values in the fit window");

  int dom = 0;
  prof.row(m - 1).cwiseAbs().maxCoeff(&dom);
  const double peak = prof.cwiseAbs().maxCoeff();

  DecayFit out = fit_profile(rho, prof.col(dom), model);
  out.name = f.name;
  out.theta = g.theta_at(g.node(0, dom));
  out.thetas.resize(g.n_ang());
  out.exponents.resize(g.n_ang());
  for (int j = 0; j < g.n_ang(); ++j) {
    out.thetas(j) = g.theta_at(g.node(0, j));
    const bool carries = peak > 0.0 && prof.col(j).cwiseAbs().maxCoeff() >= 1e-3 * peak;
    out.exponents(j) = carries ? fit_profile(rho, prof.col(j), model).exponent : std::nan("");
  }
  if (out.vanishes()) return out;

  int half = 0;
  while (half < m && rho(half) <= 0.5 * rho(m - 1)) ++half;
  out.half_width = half >= 4 ? std::abs(out.exponent - fit_profile(rho.head(half), prof.col(dom).head(half), model).exponent)
                             : std::numeric_limits<double>::infinity();
  return out;
}

FGData fg_check(const StaticTriple& t, double rho_max) {
  const Grid& g = *t.grid;
  std::vector<int> rows;
  for (int i = 1; i < g.n_rho(); ++i)
    if (g.rho()(i) <= rho_max) rows.push_back(i);
  if (rows.size() < 6) throw ConfigError("boundary fit window holds fewer than 6 radial nodes");
  const int m = static_cast<int>(rows.size());
  const bool axi = g.axisymmetric();

  Eigen::MatrixXd basis(m, 5);
  for (int k = 0; k < m; ++k) {
    const double r = g.rho()(rows[k]);
    basis.row(k) << 1.0, r, r * r, r * r * r, r * r * r * r;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);

  const int nc = t.hbar.num_components();
  FGData out;
  out.theta.resize(g.n_ang());
  out.V_breve.resize(g.n_ang());
  out.rho2_coefficient.resize(g.n_ang());
  out.h_breve.assign(nc, Eigen::VectorXd(g.n_ang()));
  for (int j = 0; j < g.n_ang(); ++j) {
    out.theta(j) = g.theta_at(g.node(0, j));
    Eigen::VectorXd y(m);
    for (int k = 0; k < m; ++k) {
      const double r = g.rho()(rows[k]);
      y(k) = (1.0 + 0.25 * r * r) * (1.0 + t.wbar.comps[0](g.node(rows[k], j)));
    }
    Eigen::VectorXd c = qr.solve(y);
    out.V_breve(j) = c(0);
    out.odd_residual = std::max(out.odd_residual, std::abs(c(1)));
    for (int comp = 0; comp < nc; ++comp) {
      // ρ̂ρ̂ carries no s factor, ρ̂θ̂ one, the tangential block two
      const int spow = comp == 0 ? 0 : (axi && comp == 1) ? 1 : 2;
      const bool diag = !(axi && comp == 1);
      for (int k = 0; k < m; ++k) {
        const double r = g.rho()(rows[k]);
        const double s = 1.0 - 0.25 * r * r;
        y(k) = std::pow(s, spow) * ((diag ? 1.0 : 0.0) + t.hbar.comps[comp](g.node(rows[k], j)));
      }
      c = qr.solve(y);
      out.h_breve[comp](j) = c(0);
      out.odd_residual = std::max(out.odd_residual, std::abs(c(1)));
      if (comp == nc - 1) out.rho2_coefficient(j) = c(2);
    }
  }
  return out;
}

}  // namespace ahem
