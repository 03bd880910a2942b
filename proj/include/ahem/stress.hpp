#ifndef AHEM_STRESS_HPP
#define AHEM_STRESS_HPP

// Stress-energy of a static electric field F = d(U dt) on −V²dt² + g, and
// the source pair (a, A) that enters the static equations.
//
// With X = V⁻²|dU|²_g:
//   |F|² = −2X,  Tr T = (n−3)X/2,  T_ij = −V⁻²∂_iU∂_jU + ½X g_ij,
//   g^{ij}T_ij = (n−2)X/2,  T_NN = ½X.

#include "ahem/geometry.hpp"

namespace ahem {

struct StressBlock {
  Field F2;      // |F|²
  Field trace;   // spacetime trace
  Field T;       // spatial block, frame components
  Field gtrace;  // g^{ij}T_ij
  Field TNN;     // T(N, N)
  Field h;       // metric perturbation the frame refers to
};

StressBlock maxwell_stress(const StaticTriple& t);

struct SourcePair {
  Field a;
  Field A;
};

// a = −T_NN − Tr T/(n−1),  A = T − Tr T/(n−1) g.
SourcePair source_pair(const StressBlock& b, int n);

// 2 Tr T/(n−1) + g^{ij}A_ij + a, which vanishes identically.
Field source_trace_defect(const StressBlock& b, const SourcePair& s, int n);

// g^{ij}A_ij for frame components A and metric perturbation ĥ at node q.
double frame_trace(const Field& A, const Field& h, int q);

namespace point {

struct Stress {
  double F2 = 0, trace = 0, gtrace = 0, TNN = 0;
  std::vector<double> T;  // coordinate components
};

Stress maxwell_stress(const PointGeometry& pg, const Jet& V, const Jet& U);

}  // namespace point

}  // namespace ahem

#endif  // AHEM_STRESS_HPP
