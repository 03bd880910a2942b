#include "ahem/linops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <iostream>

namespace ahem {

namespace {

enum SlotId { kV, kR, kRR, kT, kRT, kTT };

void set_slot(Slots& s, int id, double x) {
  switch (id) {
    case kV: s.v = x; break;
    case kR: s.r = x; break;
    case kRR: s.rr = x; break;
    case kT: s.t = x; break;
    case kRT: s.rt = x; break;
    case kTT: s.tt = x; break;
  }
}

std::vector<Jet> frame_jets(const LocalChart& c, const std::vector<Slots>& in, int off, int count) {
  std::vector<Jet> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) out.push_back(c.scalar(in[off + k]));
  return out;
}

int sym2_count(const Grid& g) { return g.axisymmetric() ? 4 : 2; }

void require(const Field& f, TensorKind kind, const StaticTriple& bg, const char* what) {
  if (f.kind != kind) throw ConfigError(std::string(what) + " has the wrong tensor rank");
  if (f.grid.get() != bg.grid.get()) throw ConfigError(std::string(what) + " lives on another grid");
}

// ∇^k V as values.
std::vector<double> raised_gradient(const PointGeometry& pg, const Jet& f) {
  const int n = pg.dim;
  std::vector<double> up(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) up[k] += pg.ginv_val(k, l) * f.d[l];
  return up;
}

// h^{ij} as values.
std::vector<double> raised_sym2(const PointGeometry& pg, const JetTensor& h) {
  const int n = pg.dim;
  std::vector<double> mixed(n * n, 0.0), up(n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a) mixed[k * n + j] += pg.ginv_val(k, a) * h.at(a, j).v;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int b = 0; b < n; ++b) up[k * n + l] += mixed[k * n + b] * pg.ginv_val(b, l);
  return up;
}

// Hess V with the first index raised: H^k_i.
std::vector<double> mixed_hessian(const PointGeometry& pg, const std::vector<double>& hv) {
  const int n = pg.dim;
  std::vector<double> m(n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) m[k * n + i] += pg.ginv_val(k, a) * hv[a * n + i];
  return m;
}

const NodeState& state_at(const NodeStates& s, int q) { return *(*s)[q]; }

}  // namespace

Eigen::MatrixXd assemble_linear(const Grid& grid, int components, const SlotKernel& kernel) {
  const int np = grid.size();
  const int m = components;
  const bool axi = grid.axisymmetric();
  const int nslots = axi ? 6 : 3;
  const Eigen::MatrixXd& dr = grid.d_rho();
  const Eigen::MatrixXd& d2r = grid.d2_rho();
  const Eigen::MatrixXd* dt = axi ? &grid.d_theta() : nullptr;
  const Eigen::MatrixXd* d2t = axi ? &grid.d2_theta() : nullptr;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m) * np, static_cast<Eigen::Index>(m) * np);
  std::vector<Slots> in(m);
  for (int q = 0; q < np; ++q) {
    if (grid.is_boundary(q)) {
      for (int k = 0; k < m; ++k) a(k * np + q, k * np + q) = 1.0;
      continue;
    }
    const int i = grid.rho_index(q), j = grid.theta_index(q);
    for (int c = 0; c < m; ++c) {
      const int col0 = c * np;
      for (int sl = 0; sl < nslots; ++sl) {
        std::fill(in.begin(), in.end(), Slots{});
        set_slot(in[c], sl, 1.0);
        const std::vector<double> out = kernel(q, in);
        for (int k = 0; k < m; ++k) {
          const double coef = out[k];
          if (coef == 0.0) continue;
          auto row = a.row(k * np + q);
          switch (sl) {
            case kV: row(col0 + q) += coef; break;
            case kR:
              for (int i2 = 0; i2 < grid.n_rho(); ++i2) row(col0 + grid.node(i2, j)) += coef * dr(i, i2);
              break;
            case kRR:
              for (int i2 = 0; i2 < grid.n_rho(); ++i2) row(col0 + grid.node(i2, j)) += coef * d2r(i, i2);
              break;
            case kT:
              for (int j2 = 0; j2 < grid.n_ang(); ++j2) row(col0 + grid.node(i, j2)) += coef * (*dt)(j, j2);
              break;
            case kTT:
              for (int j2 = 0; j2 < grid.n_ang(); ++j2) row(col0 + grid.node(i, j2)) += coef * (*d2t)(j, j2);
              break;
            case kRT:
              for (int i2 = 0; i2 < grid.n_rho(); ++i2)
                for (int j2 = 0; j2 < grid.n_ang(); ++j2)
                  row(col0 + grid.node(i2, j2)) += coef * dr(i, i2) * (*dt)(j, j2);
              break;
          }
        }
      }
    }
  }
  return a;
}

std::vector<Field> apply_linear(const GridPtr& grid, const std::vector<const Field*>& inputs,
                                const std::vector<TensorKind>& outputs, const SlotKernel& kernel) {
  std::vector<NodalDerivatives> d;
  for (const Field* f : inputs)
    for (const auto& c : f->comps) d.push_back(nodal_derivatives(*grid, c));
  std::vector<Field> out;
  for (TensorKind k : outputs) out.push_back(Field::zeros(grid, k));
  std::vector<Slots> in(d.size());
  for (int q = 0; q < grid->size(); ++q) {
    if (grid->is_boundary(q)) continue;
    for (std::size_t c = 0; c < d.size(); ++c) in[c] = d[c].at(q);
    const std::vector<double> vals = kernel(q, in);
    std::size_t off = 0;
    for (auto& f : out)
      for (auto& c : f.comps) c(q) = vals.at(off++);
  }
  for (auto& f : out)
    for (auto& c : f.comps) extrapolate_to_boundary(*grid, c);
  return out;
}

NodeStates make_node_states(const StaticTriple& t) {
  t.check();
  return std::make_shared<const std::vector<std::optional<NodeState>>>(node_states(t));
}

namespace point {

LinearOut lL(const NodeState& ns, const Jet& W, const JetTensor& h) {
  const PointGeometry& pg = ns.pg;
  const int n = pg.dim;
  const Jet& V = ns.p.V;
  const double vi = 1.0 / V.v;
  const std::vector<double> dv = raised_gradient(pg, V);
  const std::vector<double> hv = hessian(pg, V);
  const std::vector<double> hm = mixed_hessian(pg, hv);
  const std::vector<double> hup = raised_sym2(pg, h);
  double dv2 = 0.0, hvv = 0.0, hess_h = 0.0;
  for (int k = 0; k < n; ++k) dv2 += dv[k] * V.d[k];
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      hvv += dv[k] * dv[j] * h.at(k, j).v;
      hess_h += hv[k * n + j] * hup[k * n + j];
    }
  const double w = W.v;
  LinearOut out;
  out.l = V.v * (-laplacian(pg, W) + 2.0 * n * w - vi * laplacian(pg, V) * w + vi * vi * dv2 * w +
                 vi * grad_dot(pg, V, W) - vi * hvv + hess_h);

  const std::vector<double> lich = lichnerowicz(pg, h);
  const JetTensor dh = covariant_derivative(h, pg.gamma);
  std::vector<double> hdv(n, 0.0);  // h(∇V, ·)
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) hdv[j] += dv[k] * h.at(k, j).v;
  out.L.resize(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.5 * lich[i * n + j] + n * h.at(i, j).v;
      for (int k = 0; k < n; ++k) s -= 0.5 * vi * dv[k] * dh.at(k, i, j).v;
      s += 0.5 * vi * vi * (V.d[i] * hdv[j] + V.d[j] * hdv[i]);
      for (int k = 0; k < n; ++k) s -= 0.5 * vi * (hm[k * n + i] * h.at(k, j).v + hm[k * n + j] * h.at(k, i).v);
      s += 2.0 * vi * vi * w * hv[i * n + j] - 2.0 * vi * vi * vi * V.d[i] * V.d[j] * w;
      out.L[i * n + j] = s;
    }
  return out;
}

RewriteOut pP(const NodeState& ns, const Jet& W, const JetTensor& h) {
  const PointGeometry& pg = ns.pg;
  const int n = pg.dim;
  const Jet& V = ns.p.V;
  const double vi = 1.0 / V.v;
  const std::vector<double> dv = raised_gradient(pg, V);
  const std::vector<double> hv = hessian(pg, V);
  const std::vector<double> hup = raised_sym2(pg, h);
  const Jet trh = trace(pg, h);
  JetTensor grav(2, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) grav.at(i, j) = h.at(i, j) - 0.5 * trh * pg.g.at(i, j);
  const JetTensor divgrav = divergence_sym2(pg, grav);
  double hess_h = 0.0, div_dv = 0.0;
  for (int k = 0; k < n; ++k) {
    div_dv += divgrav.at(k).v * dv[k];
    for (int j = 0; j < n; ++j) hess_h += hv[k * n + j] * hup[k * n + j];
  }
  RewriteOut out;
  out.p = V.v * (-laplacian(pg, W) + 2.0 * n * W.v - vi * laplacian(pg, V) * W.v + hess_h - div_dv);

  const std::vector<double> lich = lichnerowicz(pg, h);
  const JetTensor dh = covariant_derivative(h, pg.gamma);
  const std::vector<double> dsd = div_star(pg, divgrav);
  const std::vector<double> hw = hessian(pg, W);
  out.P.resize(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.5 * lich[i * n + j] + n * h.at(i, j).v;
      for (int k = 0; k < n; ++k)
        s += 0.5 * vi * dv[k] * (dh.at(i, k, j).v + dh.at(j, k, i).v - dh.at(k, i, j).v);
      s += -dsd[i * n + j] + vi * vi * W.v * hv[i * n + j] - vi * hw[i * n + j];
      out.P[i * n + j] = s;
    }

  // w_j = V⁻¹∇^kV h_kj + ∇^k h_kj − ½∇_j Tr h − V⁻¹∇_jW − V⁻²∇_jV W
  const Jet vinv = inverse(V);
  std::vector<Jet> dvj;
  for (int k = 0; k < n; ++k) {
    Jet s(0.0, n, 1);
    for (int l = 0; l < n; ++l) s += pg.ginv.at(k, l) * V.derivative(l);
    dvj.push_back(s);
  }
  out.w = JetTensor(1, n, 1);
  for (int j = 0; j < n; ++j) {
    Jet s(0.0, n, 1);
    for (int k = 0; k < n; ++k) {
      s += vinv * dvj[k] * h.at(k, j);
      for (int m = 0; m < n; ++m) s += pg.ginv.at(k, m) * dh.at(m, k, j);
    }
    s -= 0.5 * trh.derivative(j);
    s -= vinv * W.derivative(j);
    s -= vinv * vinv * V.derivative(j) * W;
    out.w.at(j) = s;
  }
  return out;
}

std::vector<double> B(const NodeState& ns, const JetTensor& omega) {
  const PointGeometry& pg = ns.pg;
  const int n = pg.dim;
  const Jet& V = ns.p.V;
  const double vi = 1.0 / V.v;
  const std::vector<double> dv = raised_gradient(pg, V);
  const std::vector<double> hm = mixed_hessian(pg, hessian(pg, V));
  const JetTensor d1 = covariant_derivative(omega, pg.gamma);
  const JetTensor d2 = covariant_derivative(d1, pg.gamma);
  std::vector<double> up(n, 0.0);
  double dv_om = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) up[k] += pg.ginv_val(k, l) * omega.at(l).v;
    dv_om += dv[k] * omega.at(k).v;
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) s += pg.ginv_val(m, k) * d2.at(m, k, i).v;
    for (int k = 0; k < n; ++k) s += vi * dv[k] * d1.at(k, i).v;
    s -= vi * vi * V.d[i] * dv_om;
    for (int j = 0; j < n; ++j) s += pg.ricci_val(i, j) * up[j] - vi * hm[j * n + i] * omega.at(j).v;
    out[i] = s;
  }
  return out;
}

double Ts(const NodeState& ns, const Jet& sigma, double s) {
  return laplacian(ns.pg, sigma) + s / ns.p.V.v * grad_dot(ns.pg, ns.p.V, sigma);
}

double Ts_conjugate(const NodeState& ns, const Jet& f, double s) {
  const Jet& V = ns.p.V;
  const double vi = 1.0 / V.v;
  const double pot = 0.5 * s * ((0.5 * s - 1.0) * vi * vi * grad_dot(ns.pg, V, V) + vi * laplacian(ns.pg, V));
  return laplacian(ns.pg, f) - pot * f.v;
}

}  // namespace point

SlotKernel lL_kernel(NodeStates states) {
  return [states](int q, const std::vector<Slots>& in) {
    const NodeState& ns = state_at(states, q);
    const LocalChart& c = ns.chart;
    const Jet W = c.V0() * c.scalar(in[0]);
    const JetTensor h = c.sym2_from_frame(frame_jets(c, in, 1, static_cast<int>(in.size()) - 1));
    const point::LinearOut r = point::lL(ns, W, h);
    const double v0 = c.V0().v;
    std::vector<double> out{r.l / (v0 * v0)};
    for (double x : c.frame_of_sym2(r.L)) out.push_back(x);
    return out;
  };
}

SlotKernel Ts_kernel(NodeStates states, double s) {
  return [states, s](int q, const std::vector<Slots>& in) {
    const NodeState& ns = state_at(states, q);
    return std::vector<double>{point::Ts(ns, ns.chart.scalar(in[0]), s)};
  };
}

SlotKernel maxwell_kernel(NodeStates states) {
  return [states](int q, const std::vector<Slots>& in) {
    const NodeState& ns = state_at(states, q);
    const double scale = ns.chart.V0().v / ns.p.V.v;
    return std::vector<double>{scale * point::Ts(ns, ns.chart.scalar(in[0]), -1.0)};
  };
}

LinearPair apply_lL(const Field& W, const Field& h, const StaticTriple& bg) {
  require(W, TensorKind::scalar, bg, "W");
  require(h, TensorKind::sym2, bg, "h");
  auto out = apply_linear(bg.grid, {&W, &h}, {TensorKind::scalar, TensorKind::sym2}, lL_kernel(make_node_states(bg)));
  out[0].name = "l";
  out[1].name = "L";
  return {out[0], out[1]};
}

Eigen::MatrixXd assemble_lL(const StaticTriple& bg) {
  return assemble_linear(*bg.grid, 1 + sym2_count(*bg.grid), lL_kernel(make_node_states(bg)));
}

RewrittenPair apply_pP(const Field& W, const Field& h, const StaticTriple& at) {
  require(W, TensorKind::scalar, at, "W");
  require(h, TensorKind::sym2, at, "h");
  const NodeStates states = make_node_states(at);
  const int m = sym2_count(*at.grid);
  auto out = apply_linear(at.grid, {&W, &h}, {TensorKind::scalar, TensorKind::sym2, TensorKind::covector},
                          [&](int q, const std::vector<Slots>& in) {
                            const NodeState& ns = state_at(states, q);
                            const LocalChart& c = ns.chart;
                            const Jet Wj = c.V0() * c.scalar(in[0]);
                            const JetTensor hj = c.sym2_from_frame(frame_jets(c, in, 1, m));
                            const point::RewriteOut r = point::pP(ns, Wj, hj);
                            const double v0 = c.V0().v;
                            std::vector<double> v{r.p / (v0 * v0)};
                            for (double x : c.frame_of_sym2(r.P)) v.push_back(x);
                            for (double x : c.frame_of_covector(r.w)) v.push_back(x);
                            return v;
                          });
  out[0].name = "p";
  out[1].name = "P";
  out[2].name = "w";
  return {out[0], out[1], out[2]};
}

RewriteDefect rewrite_defect(const Field& W, const Field& h, const StaticTriple& at) {
  require(W, TensorKind::scalar, at, "W");
  require(h, TensorKind::sym2, at, "h");
  const NodeStates states = make_node_states(at);
  const FieldSampler ws(W), hs(h);
  RewriteDefect d;
  for (int q = 0; q < at.grid->size(); ++q) {
    if (at.grid->is_boundary(q)) continue;
    const NodeState& ns = state_at(states, q);
    const LocalChart& c = ns.chart;
    const PointGeometry& pg = ns.pg;
    const int n = pg.dim;
    const Jet Wj = c.V0() * ws.scalar(c, q);
    const JetTensor hj = hs.sym2(c, q);
    const point::LinearOut a = point::lL(ns, Wj, hj);
    const point::RewriteOut b = point::pP(ns, Wj, hj);
    double wdv = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) wdv += pg.ginv_val(i, j) * b.w.at(i).v * ns.p.V.d[j];
    const double v0 = c.V0().v;
    const double kappa = chart_conditioning(*at.grid, q);
    const double dp = std::abs(b.p - a.l - ns.p.V.v * wdv) / (v0 * v0);
    d.p = std::max(d.p, dp);
    d.p_conditioned = std::max(d.p_conditioned, dp / kappa);
    const std::vector<double> ds = div_star(pg, b.w);
    std::vector<double> diff(n * n);
    for (int i = 0; i < n * n; ++i) diff[i] = b.P[i] - a.L[i] - ds[i];
    for (double x : c.frame_of_sym2(diff)) {
      d.P = std::max(d.P, std::abs(x));
      d.P_conditioned = std::max(d.P_conditioned, std::abs(x) / kappa);
    }
  }
  return d;
}

double spacetime_ricci_max(const StaticTriple& bg) {
  bg.check();
  const TripleSampler ts(bg);
  double m = -1e300;
  for (int q = 0; q < bg.grid->size(); ++q) {
    if (bg.grid->is_boundary(q)) continue;
    const LocalChart c(*bg.grid, q, true);
    const PointGeometry pg = point::spacetime_geometry(c, ts.at(c, q), 1);
    const int d = pg.dim;
    Eigen::MatrixXd ric(d, d), g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        ric(i, j) = pg.ricci_val(i, j);
        g(i, j) = pg.g_val(i, j);
      }
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ric, g, Eigen::EigenvaluesOnly);
    m = std::max(m, es.eigenvalues().maxCoeff());
  }
  return m;
}

Field apply_B(const Field& omega, const StaticTriple& bg) {
  require(omega, TensorKind::covector, bg, "Omega");
  if (const double r = spacetime_ricci_max(bg); r >= 0.0)
    std::clog << "warning: Ric(V^2 dphi^2 + g) is not negative (max eigenvalue " << r << ")\n";
  const NodeStates states = make_node_states(bg);
  const int m = bg.grid->axisymmetric() ? 2 : 1;
  Field out = apply_linear(bg.grid, {&omega}, {TensorKind::covector}, [&](int q, const std::vector<Slots>& in) {
    const NodeState& ns = state_at(states, q);
    const LocalChart& c = ns.chart;
    return c.frame_of_covector(point::B(ns, c.covector_from_frame(frame_jets(c, in, 0, m))));
  })[0];
  out.name = "B";
  return out;
}

Field apply_Ts(const Field& sigma, double s, const StaticTriple& bg) {
  require(sigma, TensorKind::scalar, bg, "sigma");
  Field out = apply_linear(bg.grid, {&sigma}, {TensorKind::scalar}, Ts_kernel(make_node_states(bg), s))[0];
  out.name = "Ts";
  return out;
}

Field apply_Ts_conjugate(const Field& f, double s, const StaticTriple& bg) {
  require(f, TensorKind::scalar, bg, "f");
  const NodeStates states = make_node_states(bg);
  Field out = apply_linear(bg.grid, {&f}, {TensorKind::scalar}, [&](int q, const std::vector<Slots>& in) {
    const NodeState& ns = state_at(states, q);
    return std::vector<double>{point::Ts_conjugate(ns, ns.chart.scalar(in[0]), s)};
  })[0];
  out.name = "Ts_conj";
  return out;
}

Eigen::MatrixXd assemble_Ts(double s, const StaticTriple& bg) {
  return assemble_linear(*bg.grid, 1, Ts_kernel(make_node_states(bg), s));
}

double conjugation_defect(const Field& sigma, double s, const StaticTriple& bg) {
  require(sigma, TensorKind::scalar, bg, "sigma");
  const NodeStates states = make_node_states(bg);
  const FieldSampler ss(sigma);
  double d = 0.0;
  for (int q = 0; q < bg.grid->size(); ++q) {
    if (bg.grid->is_boundary(q)) continue;
    const NodeState& ns = state_at(states, q);
    const Jet sj = ss.scalar(ns.chart, q);
    const double lhs = point::Ts(ns, sj, s);
    const Jet f = pow(ns.p.V, 0.5 * s) * sj;
    const double rhs = std::pow(ns.p.V.v, -0.5 * s) * point::Ts_conjugate(ns, f, s);
    d = std::max(d, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
  }
  return d;
}

WeightSpec weight_spec(int n, const Rational& s) {
  if (n < 2) throw ConfigError("weight_spec needs n >= 2");
  WeightSpec w;
  w.n = n;
  w.s = s;
  const Rational m = s + Rational(n - 1);
  const Rational a = boost::abs(m);
  w.lower = (m - a) / 2;
  w.upper = (m + a) / 2;
  w.root_minus = (Rational(n - 1) - a) / 2;
  w.root_plus = (Rational(n - 1) + a) / 2;
  w.excluded = m.numerator() == 0;
  w.kernel_constants = s < Rational(-(n - 1), 2);
  return w;
}

PoincareResult poincare_check(const Field& u, const StaticTriple& bg) {
  require(u, TensorKind::scalar, bg, "u");
  const Grid& g = *bg.grid;
  const double umax = u.sup_norm();
  if (umax == 0.0) throw ConfigError("poincare_check needs a nonzero function");
  for (int q = 0; q < g.size(); ++q)
    if (g.is_boundary(q) && u.comps[0](q) != 0.0) throw ConfigError("poincare_check needs u = 0 at the boundary");

  const NodeStates states = make_node_states(bg);
  const FieldSampler us(u);
  const int n = g.n();
  Field grad2 = Field::zeros(bg.grid, TensorKind::scalar, "du2", n);
  Field sq = Field::zeros(bg.grid, TensorKind::scalar, "u2", n);
  PoincareResult r;
  for (int q = 0; q < g.size(); ++q) {
    if (g.is_boundary(q)) continue;
    const NodeState& ns = state_at(states, q);
    const Jet uj = us.scalar(ns.chart, q);
    grad2.comps[0](q) = grad_dot(ns.pg, uj, uj);
    sq.comps[0](q) = uj.v * uj.v;
    if (std::abs(uj.v) > 1e-12 * umax) r.rho_max = std::max(r.rho_max, g.rho_at(q));
  }
  r.ratio = integrate(grad2, Domain::bulk, &bg.hbar) / integrate(sq, Domain::bulk, &bg.hbar);
  r.bound = 0.25 * (n - 1.0) * (n - 1.0);
  return r;
}

int spacetime_components(const Chart& chart) {
  return chart.symmetry == Symmetry::axisymmetric ? 1 + 2 + 4 : 1 + 1 + 2;
}

Eigen::MatrixXd assemble_spacetime_lichnerowicz(const StaticTriple& bg) {
  bg.check();
  const Grid& g = *bg.grid;
  const TripleSampler ts(bg);
  struct SpacetimeNode {
    LocalChart chart;
    PointGeometry pg;
  };
  std::vector<std::optional<SpacetimeNode>> nodes(g.size());
  for (int q = 0; q < g.size(); ++q) {
    if (g.is_boundary(q)) continue;
    LocalChart c(g, q, true);
    PointGeometry pg = point::spacetime_geometry(c, ts.at(c, q), 1);
    nodes[q].emplace(SpacetimeNode{std::move(c), std::move(pg)});
  }
  const int base = g.axisymmetric() ? 2 : 1;
  const int m = spacetime_components(g.chart());
  const int n = g.n();
  return assemble_linear(g, m, [&](int q, const std::vector<Slots>& in) {
    const SpacetimeNode& sn = *nodes[q];
    const LocalChart& c = sn.chart;
    const int phi = c.circle();
    const Jet& v0 = c.V0();
    JetTensor H = c.sym2_from_frame(frame_jets(c, in, 1 + base, m - 1 - base));
    const JetTensor mixed = c.covector_from_frame(frame_jets(c, in, 1, base));
    H.at(phi, phi) = v0 * v0 * c.scalar(in[0]);
    for (int i = 0; i < n; ++i) {
      H.at(phi, i) = v0 * mixed.at(i);
      H.at(i, phi) = H.at(phi, i);
    }
    std::vector<double> out = lichnerowicz(sn.pg, H);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += 2.0 * n * H[k].v;
    const int d = c.dim();
    std::vector<double> r{out[phi * d + phi] / (v0.v * v0.v)};
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = out[phi * d + i] / v0.v;
    for (double x : c.frame_of_covector(w)) r.push_back(x);
    for (double x : c.frame_of_sym2(out)) r.push_back(x);
    return r;
  });
}

OperatorProbe probe_operator(const Eigen::MatrixXd& a, int n_rho, int n_theta) {
  OperatorProbe p;
  p.n_rho = n_rho;
  p.n_theta = n_theta;
  if (a.rows() <= 2000) {
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const Eigen::VectorXd s = svd.singularValues();
    p.singular_values.assign(s.data(), s.data() + s.size());
    std::reverse(p.singular_values.begin(), p.singular_values.end());
    p.smallest = p.singular_values.front();
    p.largest = p.singular_values.back();
  } else {
    // Inverse and direct power iteration on AᵀA.
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a), lut(a.transpose());
    Eigen::VectorXd x = Eigen::VectorXd::Ones(a.cols()).normalized();
    double lam = 0.0;
    for (int it = 0; it < 500; ++it) {
      Eigen::VectorXd y = lu.solve(lut.solve(x));
      const double next = y.norm();
      x = y / next;
      if (std::abs(next - lam) < 1e-12 * next) break;
      lam = next;
    }
    p.smallest = 1.0 / std::sqrt(lam);
    x = Eigen::VectorXd::Ones(a.cols()).normalized();
    double mu = 0.0;
    for (int it = 0; it < 500; ++it) {
      Eigen::VectorXd y = a.transpose() * (a * x);
      const double next = y.norm();
      x = y / next;
      if (std::abs(next - mu) < 1e-12 * next) break;
      mu = next;
    }
    p.largest = std::sqrt(mu);
    p.singular_values = {p.smallest, p.largest};
  }
  p.condition = p.largest / p.smallest;
  return p;
}

NondegeneracyReport nondegeneracy_probe(const Chart& chart, const std::vector<std::pair<int, int>>& ladder,
                                        double floor) {
  if (ladder.size() < 2) throw ConfigError("nondegeneracy probe needs at least two resolutions");
  NondegeneracyReport r;
  r.floor = floor;
  for (const auto& [nr, nt] : ladder) {
    const GridPtr g = Grid::build(chart, nr, nt);
    const auto [bg, bd] = ads_background(chart.n, g);
    r.ladder.push_back(probe_operator(assemble_spacetime_lichnerowicz(bg), nr, nt));
  }
  r.nondegenerate = true;
  for (std::size_t k = 0; k < r.ladder.size(); ++k) {
    if (!(r.ladder[k].smallest > floor)) r.nondegenerate = false;
    if (k > 0) {
      const double ratio = r.ladder[k].smallest / r.ladder[k - 1].smallest;
      if (ratio < 0.5 || ratio > 2.0) r.nondegenerate = false;
    }
  }
  return r;
}

}  // namespace ahem
