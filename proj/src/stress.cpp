#include "ahem/stress.hpp"

#include <Eigen/Dense>

namespace ahem {

namespace point {

Stress maxwell_stress(const PointGeometry& pg, const Jet& V, const Jet& U) {
  const int n = pg.dim;
  const double vi2 = 1.0 / (V.v * V.v);
  const double x = vi2 * grad_dot(pg, U, U);
  Stress s;
  s.F2 = -2.0 * x;
  s.trace = 0.5 * (n - 3) * x;
  s.gtrace = 0.5 * (n - 2) * x;
  s.TNN = 0.5 * x;
  s.T.resize(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.T[i * n + j] = -vi2 * U.d[i] * U.d[j] + 0.5 * x * pg.g_val(i, j);
  return s;
}

}  // namespace point

StressBlock maxwell_stress(const StaticTriple& t) {
  t.check();
  const auto states = node_states(t);
  auto out = evaluate_pointwise(
      t.grid, {TensorKind::scalar, TensorKind::scalar, TensorKind::sym2, TensorKind::scalar, TensorKind::scalar},
      [&](int q, const LocalChart& c) {
        const NodeState& ns = *states[q];
        const point::Stress s = point::maxwell_stress(ns.pg, ns.p.V, ns.p.U);
        std::vector<double> v{s.F2, s.trace};
        for (double x : c.frame_of_sym2(s.T)) v.push_back(x);
        v.push_back(s.gtrace);
        v.push_back(s.TNN);
        return v;
      });
  const char* names[] = {"F2", "trace", "T", "gtrace", "TNN"};
  for (int i = 0; i < 5; ++i) {
    out[i].name = names[i];
    out[i].weight = 4.0;
  }
  return {out[0], out[1], out[2], out[3], out[4], t.hbar};
}

double frame_trace(const Field& A, const Field& h, int q) {
  const auto& a = A.comps;
  const auto& e = h.comps;
  if (!A.grid->axisymmetric()) {
    const int k = A.grid->n() - 1;
    return a[0](q) / (1.0 + e[0](q)) + k * a[1](q) / (1.0 + e[1](q));
  }
  const int k = A.grid->n() - 2;
  Eigen::Matrix2d g, m;
  g << 1.0 + e[0](q), e[1](q), e[1](q), 1.0 + e[2](q);
  m << a[0](q), a[1](q), a[1](q), a[2](q);
  return (g.inverse() * m).trace() + k * a[3](q) / (1.0 + e[3](q));
}

SourcePair source_pair(const StressBlock& b, int n) {
  SourcePair s{Field::zeros(b.T.grid, TensorKind::scalar, "a", b.TNN.weight),
               Field::zeros(b.T.grid, TensorKind::sym2, "A", b.T.weight)};
  const double c = 1.0 / (n - 1);
  s.a.comps[0] = -b.TNN.comps[0] - c * b.trace.comps[0];
  const bool axi = b.T.grid->axisymmetric();
  // frame metric δ + ĥ: diagonal slots get the 1
  const std::vector<int> diag = axi ? std::vector<int>{0, 2, 3} : std::vector<int>{0, 1};
  for (int k = 0; k < b.T.num_components(); ++k) {
    Eigen::VectorXd g = b.h.comps[k];
    for (int d : diag)
      if (d == k) g.array() += 1.0;
    s.A.comps[k] = b.T.comps[k] - c * (b.trace.comps[0].array() * g.array()).matrix();
  }
  return s;
}

Field source_trace_defect(const StressBlock& b, const SourcePair& s, int n) {
  Field d = Field::zeros(b.T.grid, TensorKind::scalar, "trace_defect");
  for (int q = 0; q < b.T.grid->size(); ++q)
    d.comps[0](q) = 2.0 * b.trace.comps[0](q) / (n - 1) + frame_trace(s.A, b.h, q) + s.a.comps[0](q);
  return d;
}

}  // namespace ahem
