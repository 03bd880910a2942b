#include "ahem/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace ahem {

FieldSampler::FieldSampler(const Field& f) : kind_(f.kind), d_(nodal_derivatives(f)) {}

std::vector<Jet> FieldSampler::frame(const LocalChart& c, int q) const {
  std::vector<Jet> out;
  out.reserve(d_.size());
  for (const auto& d : d_) out.push_back(c.scalar(d.at(q)));
  return out;
}

Jet FieldSampler::scalar(const LocalChart& c, int q) const { return c.scalar(d_.at(0).at(q)); }

JetTensor FieldSampler::covector(const LocalChart& c, int q) const { return c.covector_from_frame(frame(c, q)); }

JetTensor FieldSampler::sym2(const LocalChart& c, int q) const { return c.sym2_from_frame(frame(c, q)); }

Metric::Metric(GridPtr g, Field perturbation) : grid(std::move(g)), h(std::move(perturbation)) {
  if (h.kind != TensorKind::sym2) throw ConfigError("metric perturbation must be a symmetric 2-tensor");
  if (h.grid.get() != grid.get()) throw ConfigError("metric perturbation lives on another grid");
}

Metric Metric::background(GridPtr grid) {
  Field h = Field::zeros(grid, TensorKind::sym2, "h", 2.0);
  return Metric(std::move(grid), std::move(h));
}

double Metric::min_frame_eigenvalue() const {
  double m = 1e300;
  for (int q = 0; q < grid->size(); ++q) {
    if (grid->is_boundary(q)) continue;
    if (grid->axisymmetric()) {
      Eigen::Matrix2d b;
      b << 1 + h.comps[0](q), h.comps[1](q), h.comps[1](q), 1 + h.comps[2](q);
      m = std::min({m, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(b).eigenvalues()(0), 1 + h.comps[3](q)});
    } else {
      m = std::min({m, 1 + h.comps[0](q), 1 + h.comps[1](q)});
    }
  }
  return m;
}

JetTensor MetricSampler::at(const LocalChart& c, int q) const {
  JetTensor g = c.g0();
  const JetTensor h = h_.sym2(c, q);
  for (auto i = 0u; i < h.size(); ++i) g[i] += h[i];
  return g;
}

StaticTriple StaticTriple::background(GridPtr grid) {
  StaticTriple t;
  t.wbar = Field::zeros(grid, TensorKind::scalar, "wbar", 2.0);
  t.hbar = Field::zeros(grid, TensorKind::sym2, "hbar", 2.0);
  t.U = Field::zeros(grid, TensorKind::scalar, "U", 0.0);
  t.grid = std::move(grid);
  return t;
}

void StaticTriple::check() const {
  if (!wbar.all_finite() || !hbar.all_finite() || !U.all_finite()) throw NumericalError("non-finite field values");
  if ((wbar.comps[0].array() <= -1.0).any()) throw NumericalError("lapse is not positive");
  if (!(metric().min_frame_eigenvalue() > 0.0)) throw NumericalError("metric is not positive definite");
}

PointGeometry MetricSampler::geometry(const LocalChart& c, int q) const { return point::geometry(c, h_.sym2(c, q)); }

PointState TripleSampler::at(const LocalChart& c, int q) const {
  PointState p;
  p.wbar = w_.scalar(c, q);
  p.V = c.V0() * (1.0 + p.wbar);
  p.h = h_.sym2(c, q);
  p.g = c.g0();
  for (auto i = 0u; i < p.h.size(); ++i) p.g[i] += p.h[i];
  p.U = u_.scalar(c, q);
  return p;
}

std::vector<std::optional<NodeState>> node_states(const StaticTriple& t) {
  const TripleSampler ts(t);
  std::vector<std::optional<NodeState>> out(t.grid->size());
  for (int q = 0; q < t.grid->size(); ++q) {
    if (t.grid->is_boundary(q)) continue;
    LocalChart c(*t.grid, q);
    PointState p = ts.at(c, q);
    PointGeometry pg = point::geometry(c, p.h);
    out[q].emplace(NodeState{std::move(c), std::move(p), std::move(pg)});
  }
  return out;
}

std::vector<std::vector<double>> christoffel(const Metric& g) {
  const MetricSampler ms(g);
  std::vector<std::vector<double>> out(g.grid->size());
  for (int q = 0; q < g.grid->size(); ++q) {
    if (g.grid->is_boundary(q)) continue;
    const LocalChart c(*g.grid, q);
    const PointGeometry pg = PointGeometry::from_metric(ms.at(c, q), false);
    out[q].resize(pg.gamma.size());
    for (auto i = 0u; i < pg.gamma.size(); ++i) out[q][i] = pg.gamma[i].v;
  }
  return out;
}

Field ricci(const Metric& g) {
  const MetricSampler ms(g);
  return evaluate_pointwise(g.grid, {TensorKind::sym2}, [&](int q, const LocalChart& c) {
    const PointGeometry pg = ms.geometry(c, q);
    return c.frame_of_sym2(pg.ricci);
  })[0];
}

std::pair<Field, Field> hessian_laplacian(const Metric& g, const Field& f) {
  if (f.kind != TensorKind::scalar) throw ConfigError("hessian needs a scalar field");
  const MetricSampler ms(g);
  const FieldSampler fs(f);
  auto out = evaluate_pointwise(g.grid, {TensorKind::sym2, TensorKind::scalar}, [&](int q, const LocalChart& c) {
    const PointGeometry pg = PointGeometry::from_metric(ms.at(c, q), false);
    const Jet fj = fs.scalar(c, q);
    std::vector<double> v = c.frame_of_sym2(hessian(pg, fj));
    v.push_back(laplacian(pg, fj));
    return v;
  });
  return {std::move(out[0]), std::move(out[1])};
}

Field lichnerowicz(const Metric& g, const Field& h) {
  if (h.kind != TensorKind::sym2) throw ConfigError("lichnerowicz needs a symmetric 2-tensor");
  const MetricSampler ms(g);
  const FieldSampler hs(h);
  return evaluate_pointwise(g.grid, {TensorKind::sym2}, [&](int q, const LocalChart& c) {
    const PointGeometry pg = ms.geometry(c, q);
    return c.frame_of_sym2(lichnerowicz(pg, hs.sym2(c, q)));
  })[0];
}

WarpedCurvature warped_curvature(const StaticTriple& t, int epsilon) {
  if (epsilon != 1 && epsilon != -1) throw ConfigError("epsilon must be +1 or -1");
  t.check();
  const TripleSampler ts(t);
  auto out = evaluate_pointwise(
      t.grid, {TensorKind::sym2, TensorKind::covector, TensorKind::scalar, TensorKind::scalar},
      [&](int q, const LocalChart& c) {
        const PointState p = ts.at(c, q);
        const PointGeometry pg = point::geometry(c, p.h);
        const int n = pg.dim;
        const std::vector<double> hv = hessian(pg, p.V);
        std::vector<double> rik(n * n);
        for (int i = 0; i < n * n; ++i) rik[i] = pg.ricci[i] - hv[i] / p.V.v;
        const double lap = laplacian(pg, p.V);
        std::vector<double> v = c.frame_of_sym2(rik);
        for (int i = 0; i < c.base(); ++i) v.push_back(0.0);
        v.push_back(-lap / p.V.v);
        v.push_back(pg.scalar - 2.0 * lap / p.V.v);
        return v;
      });
  return {std::move(out[0]), std::move(out[1]), std::move(out[2]), std::move(out[3])};
}

WarpedCurvature warped_curvature_direct(const StaticTriple& t, int epsilon) {
  if (epsilon != 1 && epsilon != -1) throw ConfigError("epsilon must be +1 or -1");
  t.check();
  const TripleSampler ts(t);
  auto out = evaluate_pointwise(
      t.grid, {TensorKind::sym2, TensorKind::covector, TensorKind::scalar, TensorKind::scalar},
      [&](int q, const LocalChart& c) {
        const PointState p = ts.at(c, q);
        const PointGeometry pg = point::spacetime_geometry(c, p, epsilon);
        const int n = c.n(), d = pg.dim, k = c.circle();
        std::vector<double> rik(n * n), r0k(n);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) rik[i * n + j] = pg.ricci[i * d + j];
          r0k[i] = pg.ricci[k * d + i] / p.V.v;
        }
        std::vector<double> v = c.frame_of_sym2(rik);
        for (double x : c.frame_of_covector(r0k)) v.push_back(x);
        v.push_back(pg.ricci[k * d + k] / (epsilon * p.V.v * p.V.v));
        v.push_back(pg.scalar);
        return v;
      },
      true);
  return {std::move(out[0]), std::move(out[1]), std::move(out[2]), std::move(out[3])};
}

std::pair<StaticTriple, BoundaryData> ads_background(int n, GridPtr grid) {
  if (grid->n() != n) throw ConfigError("grid dimension does not match n");
  BoundaryData bd;
  bd.n = n;
  return {StaticTriple::background(std::move(grid)), bd};
}

namespace point {

PointGeometry geometry(const LocalChart& c, const JetTensor& h) { return PointGeometry::relative_to(c.g0(), h, -1.0); }

PointGeometry spacetime_geometry(const LocalChart& c, const PointState& p, int epsilon) {
  // V̊²dφ² + g̊ and −V̊²dt² + g̊ are both locally of constant curvature −1.
  return PointGeometry::relative_to(c.spacetime_metric(c.V0(), c.g0(), epsilon),
                                    c.spacetime_perturbation(p.wbar, p.h, epsilon), -1.0);
}

std::vector<double> static_einstein_operator(const PointGeometry& pg, const Jet& V) {
  const int n = pg.dim;
  const std::vector<double> hv = hessian(pg, V);
  std::vector<double> out(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[i * n + j] = pg.ricci[i * n + j] + n * pg.g_val(i, j) - hv[i * n + j] / V.v;
  return out;
}

double lapse_operator(const PointGeometry& pg, const Jet& V) {
  return V.v * (-laplacian(pg, V) + pg.dim * V.v);
}

}  // namespace point

}  // namespace ahem
