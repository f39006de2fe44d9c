#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>
#include <Eigen/Sparse>

#include "porecouple/core/error.hpp"
#include "porecouple/core/types.hpp"

namespace porecouple::numerics {

/// Compressed-row sparse matrix.
template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;

template <typename Scalar>
using Triplet = Eigen::Triplet<Scalar, int>;

/// Systems up to this size are factorised densely.
inline constexpr Index kDenseSolveLimit = 64;

/// BiCGSTAB restarts allowed when the true residual misses the tolerance.
inline constexpr int kMaxRestarts = 3;

/// Checks the CSR invariants: monotone offsets, in-range and strictly increasing
/// column indices per row.
template <typename Scalar>
bool is_valid_csr(const SparseMatrix<Scalar>& A) {
  if (!A.isCompressed()) return false;
  const int* offsets = A.outerIndexPtr();
  const int* columns = A.innerIndexPtr();
  for (Index r = 0; r < A.rows(); ++r) {
    if (offsets[r + 1] < offsets[r]) return false;
    for (int k = offsets[r]; k < offsets[r + 1]; ++k) {
      if (columns[k] < 0 || columns[k] >= A.cols()) return false;
      if (k > offsets[r] && columns[k] <= columns[k - 1]) return false;
    }
  }
  return true;
}

/// Solves A x = b to ||Ax - b||_2 <= tol ||b||_2 with Jacobi-preconditioned BiCGSTAB
/// (dense LU for n <= 64). Throws NoConvergence carrying the last residual norm.
template <typename Scalar>
Vector<Scalar> solve_sparse(const SparseMatrix<Scalar>& A, const Vector<Scalar>& b, Scalar tol,
                            int max_iter) {
  if (A.rows() != A.cols()) {
    throw InvalidArgument("solve_sparse: matrix is not square");
  }
  if (b.size() != A.rows()) {
    throw InvalidArgument("solve_sparse: right-hand side has length " + std::to_string(b.size()) +
                          ", expected " + std::to_string(A.rows()));
  }
  if (!(tol > Scalar(0))) {
    throw InvalidArgument("solve_sparse: tolerance must be positive");
  }
  const Scalar b_norm = b.norm();
  if (b_norm == Scalar(0)) {
    return Vector<Scalar>::Zero(b.size());
  }

  Vector<Scalar> x;
  int iterations = 0;
  if (A.rows() <= kDenseSolveLimit) {
    const Matrix<Scalar> dense(A);
    x = dense.partialPivLu().solve(b);
    iterations = 1;
  } else {
    Eigen::BiCGSTAB<SparseMatrix<Scalar>, Eigen::DiagonalPreconditioner<Scalar>> solver;
    solver.setTolerance(tol);
    solver.setMaxIterations(max_iter);
    solver.compute(A);
    x = solver.solve(b);
    iterations = static_cast<int>(solver.iterations());
    // BiCGSTAB tracks a recursive residual; restart from x when the true one lags.
    for (int restart = 0; restart < kMaxRestarts && x.allFinite() && !((A * x - b).norm() <= tol * b_norm);
         ++restart) {
      x = solver.solveWithGuess(b, x);
      iterations += static_cast<int>(solver.iterations());
    }
  }

  const Scalar residual = (A * x - b).norm();
  if (!x.allFinite() || !(residual <= tol * b_norm)) {
    std::ostringstream msg;
    msg << "solve_sparse: relative residual " << static_cast<double>(residual / b_norm)
        << " above tolerance " << static_cast<double>(tol);
    throw NoConvergence(msg.str(),
                        static_cast<double>(residual), iterations);
  }
  return x;
}

}  // namespace porecouple::numerics
