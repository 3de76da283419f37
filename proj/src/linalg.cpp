#include "saw/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <sstream>

#include "saw/errors.hpp"

namespace saw {
namespace {

bool is_symmetric(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale;
}

[[noreturn]] void singular(double modulus, double eps_rank) {
  std::ostringstream os;
  os << "smallest eigenvalue modulus " << modulus << " below eps_rank " << eps_rank;
  fail(ErrorCode::SingularMatrix, os.str());
}

}  // namespace

double min_abs_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (is_symmetric(m)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().minCoeff();
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().minCoeff();
}

Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& m, double eps_rank) {
  if (m.rows() != m.cols() || m.size() == 0) {
    fail(ErrorCode::ShapeMismatch, "inv_sqrt needs a non-empty square matrix");
  }

  if (is_symmetric(m)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const Eigen::VectorXd& lambda = es.eigenvalues();
    const double modulus = lambda.cwiseAbs().minCoeff();
    if (!(modulus >= eps_rank)) singular(modulus, eps_rank);
    if (lambda.minCoeff() < 0.0) {
      // A negative eigenvalue of a symmetric matrix has an imaginary principal root.
      fail(ErrorCode::NonRealResult, "symmetric matrix with a negative eigenvalue");
    }
    return es.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) fail(ErrorCode::SingularMatrix, "eigendecomposition failed");
  const Eigen::VectorXcd lambda = es.eigenvalues();
  const double modulus = lambda.cwiseAbs().minCoeff();
  if (!(modulus >= eps_rank)) singular(modulus, eps_rank);

  const Eigen::MatrixXcd vecs = es.eigenvectors();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(vecs);
  if (!lu.isInvertible()) {
    fail(ErrorCode::SingularMatrix, "matrix is not diagonalizable");
  }
  Eigen::VectorXcd root(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) root(i) = 1.0 / std::sqrt(lambda(i));
  const Eigen::MatrixXcd r = vecs * root.asDiagonal() * lu.inverse();

  const double scale = std::max(1.0, r.real().cwiseAbs().maxCoeff());
  if (r.imag().cwiseAbs().maxCoeff() > 1e-8 * scale) {
    fail(ErrorCode::NonRealResult, "inverse square root has a non-negligible imaginary part");
  }
  const Eigen::MatrixXd real = r.real();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  if ((real * real * m - eye).norm() > 1e-7 * static_cast<double>(m.rows())) {
    fail(ErrorCode::SingularMatrix, "matrix is not diagonalizable to working precision");
  }
  return real;
}

}  // namespace saw
