#ifndef AHEM_SPECTRAL_HPP
#define AHEM_SPECTRAL_HPP

// One-dimensional collocation building blocks: node sets, barycentric
// interpolation, differentiation matrices and interpolatory quadrature.

#include <Eigen/Dense>
#include <functional>
#include <utility>

namespace ahem::spectral {

// Chebyshev–Gauss–Radau nodes on [a, b], including a, excluding b, increasing.
Eigen::VectorXd radau_nodes(int n, double a, double b);
// Chebyshev–Gauss nodes on (a, b), increasing.
Eigen::VectorXd gauss_nodes(int n, double a, double b);
// Gauss–Legendre nodes and weights on [a, b].
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n, double a, double b);

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& x);
// Rows evaluate the interpolating polynomial through (x, ·) at the targets.
Eigen::MatrixXd interpolation_matrix(const Eigen::VectorXd& x, const Eigen::VectorXd& targets);
// First and second differentiation matrices for the polynomial interpolant.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> differentiation_matrices(const Eigen::VectorXd& x);

// Interpolatory weights for ∫_a^b f(t) w(t) dt on the given nodes. The moments
// of the Chebyshev basis against w are computed with Gauss–Legendre.
Eigen::VectorXd interpolatory_weights(const Eigen::VectorXd& x, double a, double b,
                                      const std::function<double(double)>& weight);

}  // namespace ahem::spectral

#endif  // AHEM_SPECTRAL_HPP
