#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "porecouple/core/error.hpp"
#include "porecouple/numerics/newton.hpp"
#include "porecouple/numerics/sparse.hpp"

using namespace porecouple;
using namespace porecouple::numerics;

namespace {

SparseMatrix<double> from_dense(const MatrixXd& d) { return d.sparseView(); }

}  // namespace

TEST(SolveSparse, Identity) {
  const VectorXd b = (VectorXd(3) << 1, 2, 3).finished();
  const auto x = solve_sparse<double>(from_dense(MatrixXd::Identity(3, 3)), b, 1e-12, 100);
  EXPECT_TRUE(x.isApprox(b, 1e-15));
}

TEST(SolveSparse, Diagonal) {
  const auto A = from_dense((VectorXd(2) << 2, 4).finished().asDiagonal().toDenseMatrix());
  const auto x = solve_sparse<double>(A, (VectorXd(2) << 2, 8).finished(), 1e-12, 100);
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 2.0, 1e-15);
}

TEST(SolveSparse, Laplacian) {
  MatrixXd A = MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    A(i, i) = 2.0;
    if (i > 0) A(i, i - 1) = -1.0;
    if (i < 3) A(i, i + 1) = -1.0;
  }
  const auto x = solve_sparse<double>(from_dense(A), (VectorXd(4) << 1, 0, 0, 1).finished(), 1e-12, 100);
  EXPECT_TRUE(x.isApprox(VectorXd::Ones(4), 1e-13));
}

TEST(SolveSparse, ZeroRightHandSide) {
  const auto x = solve_sparse<double>(from_dense(MatrixXd::Identity(3, 3)), VectorXd::Zero(3), 1e-12, 10);
  EXPECT_TRUE(x.isZero(0.0));
}

TEST(SolveSparse, RejectsBadShapes) {
  EXPECT_THROW(solve_sparse<double>(SparseMatrix<double>(2, 3), VectorXd::Ones(2), 1e-12, 10), InvalidArgument);
  EXPECT_THROW(solve_sparse<double>(from_dense(MatrixXd::Identity(2, 2)), VectorXd::Ones(3), 1e-12, 10), InvalidArgument);
  EXPECT_THROW(solve_sparse<double>(from_dense(MatrixXd::Identity(2, 2)), VectorXd::Ones(2), 0.0, 10), InvalidArgument);
}

TEST(SolveSparse, IterationLimitReportsNoConvergence) {
  const int n = 200;
  std::vector<Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.0);
  }
  SparseMatrix<double> A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  EXPECT_THROW(solve_sparse<double>(A, VectorXd::Ones(n), 1e-14, 1), NoConvergence);
}

TEST(SolveSparse, RandomDiagonallyDominant) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(2, 400);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = size(rng);
    std::vector<Triplet<double>> t;
    VectorXd row_sum = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < 4; ++k) {
        const int j = std::uniform_int_distribution<int>(0, n - 1)(rng);
        if (j == i) continue;
        const double v = u(rng);
        t.emplace_back(i, j, v);
        row_sum[i] += std::abs(v);
      }
    }
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, row_sum[i] + 1.0 + std::abs(u(rng)));
    SparseMatrix<double> A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    ASSERT_TRUE(is_valid_csr(A));
    VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = u(rng);
    const double tol = 1e-10;
    const auto x = solve_sparse<double>(A, b, tol, 5000);
    ASSERT_LE((A * x - b).norm(), tol * b.norm());
  }
}

TEST(Newton, LinearScalar) {
  auto res = newton_solve<double>([](const VectorXd& x) { return VectorXd::Constant(1, x[0] - 3.0); },
                                  [](const VectorXd&) { return MatrixXd::Identity(1, 1); }, VectorXd::Zero(1),
                                  1e-12, 20);
  EXPECT_EQ(res.report.iterations, 1);
  EXPECT_TRUE(res.report.converged);
  EXPECT_DOUBLE_EQ(res.x[0], 3.0);
}

TEST(Newton, QuadraticRootConvergesQuadratically) {
  auto res = newton_solve<double>([](const VectorXd& x) { return VectorXd::Constant(1, x[0] * x[0] - 4.0); },
                                  [](const VectorXd& x) { return MatrixXd::Constant(1, 1, 2.0 * x[0]); },
                                  VectorXd::Constant(1, 3.0), 1e-12, 50);
  EXPECT_NEAR(res.x[0], 2.0, 1e-12);
  const auto& h = res.report.residual_history;
  ASSERT_GE(h.size(), 3u);
  for (std::size_t k = 1; k < h.size(); ++k) EXPECT_LT(h[k], h[k - 1]);
  // Once in the asymptotic regime the residual behaves like r_{k+1} = C r_k^2 with C ~ 1/(2*2).
  for (std::size_t k = 1; k + 1 < h.size(); ++k) {
    if (h[k] < 1e-3 && h[k + 1] > 0.0) EXPECT_LE(h[k + 1], 1.0 * h[k] * h[k]);
  }
}

TEST(Newton, AlreadyAtRoot) {
  auto res = newton_solve<double>([](const VectorXd& x) { return x; },
                                  [](const VectorXd&) { return MatrixXd::Identity(1, 1); }, VectorXd::Zero(1),
                                  1e-12, 10);
  EXPECT_EQ(res.report.iterations, 0);
  EXPECT_TRUE(res.report.converged);
}

TEST(Newton, IterationLimitCarriesReport) {
  try {
    newton_solve<double>([](const VectorXd& x) { return VectorXd::Constant(1, std::atan(x[0]) + 0.0 * x[0]); },
                         [](const VectorXd& x) { return MatrixXd::Constant(1, 1, 1.0 / (1.0 + x[0] * x[0])); },
                         VectorXd::Constant(1, 1.0), 1e-300, 3);
    FAIL() << "expected NewtonFailure";
  } catch (const NewtonFailure<double>& e) {
    EXPECT_FALSE(e.report().converged);
    EXPECT_EQ(e.report().iterations, 3);
  }
}

TEST(Newton, ResultEnforcesTolerance) {
  auto res = newton_solve<double>(
      [](const VectorXd& x) {
        VectorXd r(2);
        r << x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1];
        return r;
      },
      [](const VectorXd& x) {
        MatrixXd J(2, 2);
        J << 2 * x[0], 2 * x[1], 1, -1;
        return J;
      },
      (VectorXd(2) << 3.0, 1.0).finished(), 1e-13, 50);
  EXPECT_TRUE(res.report.converged);
  EXPECT_LE(res.report.final_residual_norm, 1e-13);
  EXPECT_NEAR(res.x[0], std::sqrt(2.0), 1e-12);
}

TEST(Newton, WorksInLongDouble) {
  using V = Vector<long double>;
  using M = Matrix<long double>;
  auto res = newton_solve<long double>([](const V& x) { return V::Constant(1, x[0] * x[0] - 2.0L); },
                                       [](const V& x) { return M::Constant(1, 1, 2.0L * x[0]); },
                                       V::Constant(1, 1.0L), 1e-18L, 50);
  EXPECT_NEAR(static_cast<double>(res.x[0]), std::sqrt(2.0), 1e-15);
}
