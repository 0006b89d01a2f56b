#include "ctnet/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

Tensor numeric_gradient(const ScalarFunction& f, const Tensor& x, double h) {
  if (!(h > 0.0)) throw NumericError("numeric_gradient: step must be positive");
  Tensor grad(x.shape());
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double original = probe[i];
    probe[i] = original + h;
    const double plus = f(probe);
    probe[i] = original - h;
    const double minus = f(probe);
    probe[i] = original;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw NumericError("numeric_gradient: non-finite function value at element " +
                         std::to_string(i));
    }
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

GradientError compare_gradients(const Tensor& analytic, const Tensor& numeric,
                                const GradCheckTolerance& tol) {
  if (analytic.shape() != numeric.shape()) {
    throw ShapeError("compare_gradients: shape mismatch " + shape_to_string(analytic.shape()) +
                     " vs " + shape_to_string(numeric.shape()));
  }
  GradientError err;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i], n = numeric[i];
    if (!std::isfinite(a)) {
      err.max_abs = err.max_rel = std::numeric_limits<double>::infinity();
      return err;
    }
    const double diff = std::abs(a - n);
    err.max_abs = std::max(err.max_abs, diff);
    if (diff > tol.absolute_floor) {
      err.max_rel = std::max(err.max_rel, diff / std::max(std::abs(a), std::abs(n)));
    }
  }
  return err;
}

void GradCheckReport::record(const std::string& name, const GradientError& error) {
  per_parameter_errors[name] = error.max_rel;
  max_abs_error = std::max(max_abs_error, error.max_abs);
  max_rel_error = std::max(max_rel_error, error.max_rel);
  passed = max_rel_error <= tolerance;
}

GradCheckReport check_gradients(const std::function<double()>& loss,
                                std::vector<GradCheckTarget> targets,
                                const GradCheckTolerance& tol, double h) {
  GradCheckReport report;
  report.tolerance = tol.relative;
  for (auto& target : targets) {
    Tensor& slot = *target.value;
    const Tensor original = slot;
    const ScalarFunction probe = [&](const Tensor& candidate) {
      slot = candidate;
      return loss();
    };
    Tensor numeric = numeric_gradient(probe, original, h);
    slot = original;
    report.record(target.name, compare_gradients(target.analytic, numeric, tol));
  }
  return report;
}

}  // namespace ctnet
