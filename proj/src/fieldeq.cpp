#include "ahem/fieldeq.hpp"

#include <algorithm>
#include <cmath>

namespace ahem {

double ResidualTriple::sup() const { return std::max({sup_V, sup_g, sup_U}); }

void ResidualTriple::update_norms() {
  sup_V = R_V.sup_norm(true);
  sup_g = R_g.sup_norm(true);
  sup_U = R_U.sup_norm(true);
  weighted_V = weighted_sup(R_V, 2.0);
  weighted_g = weighted_sup(R_g, 2.0);
  weighted_U = weighted_sup(R_U, 2.0);
  cond_V = conditioned_sup(R_V, 2);
  cond_g = conditioned_sup(R_g, 2);
  cond_U = conditioned_sup(R_U, 2);
}

double conditioned_sup(const Field& f, int derivatives) {
  double m = 0.0;
  for (int q = 0; q < f.grid->size(); ++q) {
    if (f.grid->is_boundary(q)) continue;
    const double k = chart_conditioning(*f.grid, q, derivatives);
    for (const auto& c : f.comps) m = std::max(m, std::abs(c(q)) / k);
  }
  return m;
}

double weighted_sup(const Field& f, double delta) {
  double m = 0.0;
  for (int q = 0; q < f.grid->size(); ++q) {
    if (f.grid->is_boundary(q)) continue;
    const double w = std::pow(f.grid->rho_at(q), -delta);
    for (const auto& c : f.comps) m = std::max(m, w * std::abs(c(q)));
  }
  return m;
}

namespace point {

Residual static_residual(const NodeState& ns) {
  const PointGeometry& pg = ns.pg;
  const Jet& V = ns.p.V;
  const Jet& U = ns.p.U;
  const int n = pg.dim;
  const double du2 = grad_dot(pg, U, U);
  const double vi = 1.0 / V.v;
  Residual r;
  r.RV = V.v * (-laplacian(pg, V) + n * V.v) + (n - 2.0) / (n - 1.0) * du2;
  const std::vector<double> hv = hessian(pg, V);
  r.Rg.resize(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double gij = pg.g_val(i, j);
      const double src = vi * vi * (-U.d[i] * U.d[j] + du2 * gij / (n - 1.0));
      r.Rg[i * n + j] = pg.ricci_val(i, j) + n * gij - vi * hv[i * n + j] - src;
    }
  r.RU = vi * (laplacian(pg, U) - vi * grad_dot(pg, V, U));
  return r;
}

JetTensor gauge_vector(const NodeState& ns) {
  const LocalChart& c = ns.chart;
  const PointGeometry& pg = ns.pg;
  const int n = pg.dim;
  const JetTensor& g0 = c.g0();
  const JetTensor g0inv = inverse_metric(g0);
  const JetTensor dh = covariant_derivative(ns.p.h, christoffel_symbols(g0, g0inv));  // ∇̊_m h_ij
  const Jet& V = ns.p.V;
  const Jet& V0 = c.V0();
  const Jet vi2 = inverse(V * V);

  JetTensor omega(1, n, 1);
  for (int j = 0; j < n; ++j) {
    Jet s(0.0, n, 1);
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) s += pg.ginv.at(l, m) * (dh.at(m, j, l) - 0.5 * dh.at(j, l, m));
    Jet bracket_sum(0.0, n, 1);
    for (int k = 0; k < n; ++k) {
      Jet bracket(0.0, n, 1);
      for (int l = 0; l < n; ++l) bracket += V0 * g0inv.at(k, l) * V0.derivative(l) - V * pg.ginv.at(k, l) * V.derivative(l);
      bracket_sum += pg.g.at(j, k) * bracket;
    }
    s += vi2 * bracket_sum;
    omega.at(j) = -s;
  }
  return omega;
}

Residual modified_residual(const NodeState& ns) {
  Residual r = static_residual(ns);
  const PointGeometry& pg = ns.pg;
  const int n = pg.dim;
  const JetTensor omega = gauge_vector(ns);
  const Jet& V = ns.p.V;
  double od = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) od += pg.ginv_val(i, j) * omega.at(i).v * V.d[j];
  r.RV += V.v * od;
  const std::vector<double> ds = div_star(pg, omega);
  for (int i = 0; i < n * n; ++i) r.Rg[i] += ds[i];
  return r;
}

}  // namespace point

namespace {

ResidualTriple residual_fields(const StaticTriple& t, bool modified) {
  t.check();
  const auto states = node_states(t);
  auto out = evaluate_pointwise(t.grid, {TensorKind::scalar, TensorKind::sym2, TensorKind::scalar},
                                [&](int q, const LocalChart& c) {
                                  const NodeState& ns = *states[q];
                                  const point::Residual r =
                                      modified ? point::modified_residual(ns) : point::static_residual(ns);
                                  const double v0 = c.V0().v;
                                  std::vector<double> v{r.RV / (v0 * v0)};
                                  for (double x : c.frame_of_sym2(r.Rg)) v.push_back(x);
                                  v.push_back(v0 * r.RU);
                                  return v;
                                });
  ResidualTriple rt{out[0], out[1], out[2]};
  rt.R_V.name = "R_V";
  rt.R_g.name = "R_g";
  rt.R_U.name = "R_U";
  rt.update_norms();
  return rt;
}

}  // namespace

ResidualTriple static_residual(const StaticTriple& t) { return residual_fields(t, false); }
ResidualTriple modified_residual(const StaticTriple& t) { return residual_fields(t, true); }

GaugeVector gauge_vector(const StaticTriple& t) {
  t.check();
  const auto states = node_states(t);
  GaugeVector gv;
  gv.Omega = evaluate_pointwise(t.grid, {TensorKind::covector}, [&](int q, const LocalChart& c) {
    return c.frame_of_covector(point::gauge_vector(*states[q]));
  })[0];
  gv.Omega.name = "Omega";
  gv.Omega.weight = 2.0;
  gv.sup = gv.Omega.sup_norm(true);
  gv.weighted = weighted_sup(gv.Omega, 2.0);
  gv.conditioned = conditioned_sup(gv.Omega, 1);
  return gv;
}

Field gauge_vector_spacetime(const StaticTriple& t) {
  t.check();
  const TripleSampler ts(t);
  Field f = evaluate_pointwise(
      t.grid, {TensorKind::covector},
      [&](int q, const LocalChart& c) {
        const PointState p = ts.at(c, q);
        const JetTensor G = c.spacetime_metric(p.V, p.g, 1);
        const JetTensor G0 = c.spacetime_metric(c.V0(), c.g0(), 1);
        const JetTensor Gi = inverse_metric(G);
        const JetTensor gam = christoffel_symbols(G, Gi);
        const JetTensor gam0 = christoffel_symbols(G0, inverse_metric(G0));
        const int d = c.dim(), n = c.n();
        std::vector<double> contracted(d, 0.0);  // 𝔊^{αβ}ΔΓ^μ_αβ
        for (int mu = 0; mu < d; ++mu)
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) contracted[mu] += Gi.at(a, b).v * (gam.at(mu, a, b).v - gam0.at(mu, a, b).v);
        std::vector<double> omega(n, 0.0);
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int mu = 0; mu < d; ++mu) s += G.at(j, mu).v * contracted[mu];
          omega[j] = -s;
        }
        return c.frame_of_covector(omega);
      },
      true)[0];
  f.name = "Omega";
  return f;
}

Field beta(const StaticTriple& t, const Field& a, const Field& A) {
  if (a.kind != TensorKind::scalar || A.kind != TensorKind::sym2) throw ConfigError("beta needs a scalar a and a symmetric A");
  t.check();
  const auto states = node_states(t);
  const FieldSampler as(a), As(A);
  Field f = evaluate_pointwise(t.grid, {TensorKind::covector}, [&](int q, const LocalChart& c) {
    const NodeState& ns = *states[q];
    const PointGeometry& pg = ns.pg;
    const int n = pg.dim;
    const Jet& V = ns.p.V;
    const Jet aj = as.scalar(c, q);
    const JetTensor Aj = As.sym2(c, q);
    const Jet va = V * aj;
    const Jet trA = trace(pg, Aj);
    JetTensor x(2, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x.at(i, j) = Aj.at(i, j) + 0.5 * (aj - trA) * pg.g.at(i, j);
    const JetTensor divx = divergence_sym2(pg, x);
    std::vector<double> b(n);
    for (int j = 0; j < n; ++j) {
      double agv = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) agv += Aj.at(j, k).v * pg.ginv_val(k, l) * V.d[l];
      b[j] = va.d[j] / V.v - agv / V.v + divx.at(j).v;
    }
    return c.frame_of_covector(b);
  })[0];
  f.name = "beta";
  return f;
}

Field beta_expanded(const StaticTriple& t, const Field& a, const Field& A) {
  if (a.kind != TensorKind::scalar || A.kind != TensorKind::sym2) throw ConfigError("beta needs a scalar a and a symmetric A");
  t.check();
  const auto states = node_states(t);
  const FieldSampler as(a), As(A);
  Field f = evaluate_pointwise(t.grid, {TensorKind::covector}, [&](int q, const LocalChart& c) {
    const NodeState& ns = *states[q];
    const PointGeometry& pg = ns.pg;
    const int n = pg.dim;
    const Jet& V = ns.p.V;
    const Jet aj = as.scalar(c, q);
    const JetTensor Aj = As.sym2(c, q);
    // mixed tensor M^i_j = A^i_j − ½(A^k_k + a)δ^i_j
    std::vector<Jet> mixed(n * n, Jet(0.0, n, 2));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) mixed[i * n + j] += pg.ginv.at(i, k) * Aj.at(k, j);
    Jet tr(0.0, n, 2);
    for (int k = 0; k < n; ++k) tr += mixed[k * n + k];
    const Jet half = 0.5 * (tr + aj);
    for (int i = 0; i < n; ++i) mixed[i * n + i] -= half;
    std::vector<double> b(n);
    for (int j = 0; j < n; ++j) {
      double div = 0.0;
      for (int i = 0; i < n; ++i) {
        div += mixed[i * n + j].d[i];
        for (int k = 0; k < n; ++k)
          div += pg.gamma.at(i, i, k).v * mixed[k * n + j].v - pg.gamma.at(k, i, j).v * mixed[i * n + k].v;
      }
      double lower = 0.0;
      for (int i = 0; i < n; ++i) {
        double up = 0.0;
        for (int l = 0; l < n; ++l) up += pg.ginv_val(i, l) * V.d[l];
        lower += (Aj.at(i, j).v - aj.v * pg.g_val(i, j)) * up;
      }
      b[j] = -(div + lower / V.v);
    }
    return c.frame_of_covector(b);
  })[0];
  f.name = "beta";
  return f;
}

Field matter_divergence(const StaticTriple& t, const Field& T, const Field& TNN, int epsilon) {
  if (T.kind != TensorKind::sym2 || TNN.kind != TensorKind::scalar) throw ConfigError("matter divergence needs T_ij and T_NN");
  if (epsilon != 1 && epsilon != -1) throw ConfigError("epsilon must be +1 or -1");
  t.check();
  const auto states = node_states(t);
  const FieldSampler Ts(T), Ns(TNN);
  Field f = evaluate_pointwise(t.grid, {TensorKind::covector}, [&](int q, const LocalChart& c) {
    const NodeState& ns = *states[q];
    const PointGeometry& pg = ns.pg;
    const int n = pg.dim;
    const Jet& V = ns.p.V;
    const JetTensor Tj = Ts.sym2(c, q);
    const double tnn = Ns.scalar(c, q).v;
    const JetTensor divT = divergence_sym2(pg, Tj);  // −∇^iT_ij
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) {
      double s = -divT.at(j).v;
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) s += pg.ginv_val(i, l) * V.d[l] * Tj.at(i, j).v / V.v;
      s -= epsilon * tnn * V.d[j] / V.v;
      out[j] = s;
    }
    return c.frame_of_covector(out);
  })[0];
  f.name = "divT";
  return f;
}

}  // namespace ahem
