#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "porecouple/core/error.hpp"
#include "porecouple/core/types.hpp"

namespace porecouple::numerics {

template <typename Scalar>
struct NewtonReport {
  int iterations = 0;
  Scalar final_residual_norm = 0;
  bool converged = false;
  /// Infinity norm of the residual at the start and after every iteration.
  std::vector<Scalar> residual_history;
};

template <typename Scalar>
struct NewtonResult {
  Vector<Scalar> x;
  NewtonReport<Scalar> report;
};

/// Raised when Newton exhausts its iterations or its step damping.
template <typename Scalar>
class NewtonFailure : public NoConvergence {
 public:
  NewtonFailure(const std::string& what, NewtonReport<Scalar> report, Vector<Scalar> last)
      : NoConvergence(what, static_cast<double>(report.final_residual_norm), report.iterations),
        report_(std::move(report)),
        last_(std::move(last)) {}
  const NewtonReport<Scalar>& report() const { return report_; }
  const Vector<Scalar>& last_iterate() const { return last_; }

 private:
  NewtonReport<Scalar> report_;
  Vector<Scalar> last_;
};

inline constexpr int kMaxStepHalvings = 20;

struct Identity {
  template <typename V>
  void operator()(V&) const {}
};

/// Damped Newton: stops once ||residual(x)||_inf <= tol. Each full step is halved (up to
/// 20 times) while the 2-norm of the residual does not decrease. `project` may clamp an
/// iterate in place after each update.
template <typename Scalar, typename ResidualFn, typename JacobianFn, typename ProjectFn = Identity>
NewtonResult<Scalar> newton_solve(ResidualFn&& residual, JacobianFn&& jacobian, Vector<Scalar> x0,
                                  Scalar tol, int max_iter, ProjectFn&& project = {}) {
  if (!(tol > Scalar(0))) {
    throw InvalidArgument("newton_solve: tolerance must be positive");
  }
  NewtonReport<Scalar> report;
  Vector<Scalar> x = std::move(x0);
  Vector<Scalar> r = residual(x);
  if (r.size() != x.size()) {
    throw InvalidArgument("newton_solve: residual and unknown dimensions differ");
  }
  auto inf_norm = [](const Vector<Scalar>& v) {
    return v.size() == 0 ? Scalar(0) : v.cwiseAbs().maxCoeff();
  };
  Scalar r_inf = inf_norm(r);
  report.residual_history.push_back(r_inf);

  auto fail = [&](const std::string& why) {
    report.final_residual_norm = r_inf;
    report.converged = false;
    throw NewtonFailure<Scalar>("newton_solve: " + why, report, x);
  };

  while (true) {
    if (!std::isfinite(static_cast<double>(r_inf))) fail("non-finite residual");
    if (r_inf <= tol) break;
    if (report.iterations >= max_iter) fail("iteration limit reached");

    const Matrix<Scalar> J = jacobian(x);
    if (J.rows() != x.size() || J.cols() != x.size()) {
      throw InvalidArgument("newton_solve: jacobian has wrong dimensions");
    }
    const Vector<Scalar> step = -J.partialPivLu().solve(r);
    if (!step.allFinite()) fail("singular jacobian");

    const Scalar r_norm = r.norm();
    Scalar lambda = 1;
    Vector<Scalar> trial;
    Vector<Scalar> r_trial;
    int halvings = 0;
    while (true) {
      trial = x + lambda * step;
      project(trial);
      r_trial = residual(trial);
      if (r_trial.allFinite() && r_trial.norm() < r_norm) break;
      if (halvings == kMaxStepHalvings) fail("step damping exhausted");
      lambda /= 2;
      ++halvings;
    }
    x = std::move(trial);
    r = std::move(r_trial);
    r_inf = inf_norm(r);
    ++report.iterations;
    report.residual_history.push_back(r_inf);
  }

  report.final_residual_norm = r_inf;
  report.converged = true;
  return {std::move(x), std::move(report)};
}

}  // namespace porecouple::numerics
