#ifndef NBC_SPARSE_HPP
#define NBC_SPARSE_HPP

#include "nbc/errors.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <string>

namespace nbc {

/// Compressed-row storage; column indices are sorted and unique once
/// makeCompressed() has run (assembly always does).
template <typename Scalar>
using SparseMatrixT = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;
using SparseMatrix = SparseMatrixT<double>;

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
/// Stops once the true residual satisfies ||A x - b|| <= tol ||b||; throws
/// ConvergenceError after 10 n iterations.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1>
solve_spd(const SparseMatrixT<Scalar>& A, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
          Scalar tol, SolveStats* stats = nullptr) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n) throw ConfigError("solve_spd: dimension mismatch");
  if (!(tol > Scalar(0))) throw ConfigError("solve_spd: tolerance must be positive");

  Vec x = Vec::Zero(n);
  const Scalar bnorm = b.norm();
  if (stats) *stats = {};
  if (bnorm == Scalar(0)) return x;

  Vec inv_diag = A.diagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(inv_diag(i) > Scalar(0))) throw ConfigError("solve_spd: non-positive diagonal entry");
    inv_diag(i) = Scalar(1) / inv_diag(i);
  }

  const long max_iter = 10 * static_cast<long>(n);
  long iter = 0;
  Vec r = b;
  Scalar true_res = Scalar(1);
  // Outer loop restarts from the true residual if the recurrence drifted.
  while (true) {
    Vec z = inv_diag.cwiseProduct(r);
    Vec p = z;
    Scalar rz = r.dot(z);
    while (r.norm() > tol * bnorm && iter < max_iter) {
      const Vec Ap = A * p;
      const Scalar alpha = rz / p.dot(Ap);
      x += alpha * p;
      r -= alpha * Ap;
      z = inv_diag.cwiseProduct(r);
      const Scalar rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
      ++iter;
    }
    r = b - A * x;
    true_res = r.norm() / bnorm;
    if (true_res <= tol) break;
    if (iter >= max_iter)
      throw ConvergenceError("solve_spd: no convergence after " + std::to_string(iter) +
                                 " iterations, relative residual " + std::to_string(double(true_res)),
                             static_cast<double>(true_res), static_cast<int>(iter));
  }
  if (stats) *stats = {static_cast<int>(iter), static_cast<double>(true_res)};
  return x;
}

} // namespace nbc

#endif // NBC_SPARSE_HPP
