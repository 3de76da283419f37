#pragma once

#include <Eigen/Dense>

namespace saw {

/// Principal inverse square root R of a diagonalizable matrix, R·R·M = I.
///
/// Symmetric inputs go through the self-adjoint solver. General inputs use a
/// complex eigendecomposition M = V diag(λ) V⁻¹ with the principal branch of
/// λ^{-1/2}; complex-conjugate eigenpairs produce a real result. Throws
/// SingularMatrix when min |λ| < eps_rank and NonRealResult when the
/// reconstructed R has an imaginary part above 1e-8.
Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& m, double eps_rank = 1e-10);

/// Smallest eigenvalue modulus.
double min_abs_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace saw
