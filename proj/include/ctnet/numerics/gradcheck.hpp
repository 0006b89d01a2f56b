#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ctnet/numerics/tensor.hpp"

namespace ctnet {

using ScalarFunction = std::function<double(const Tensor&)>;

/// Central differences (f(x+h e_i) - f(x-h e_i)) / 2h for every element of x.
/// Throws NumericError if any evaluation of f is non-finite.
Tensor numeric_gradient(const ScalarFunction& f, const Tensor& x, double h = 1e-5);

struct GradCheckTolerance {
  double relative = 1e-4;
  /// Element differences at or below this are treated as exact agreement,
  /// so near-zero gradients are not judged by a meaningless ratio.
  double absolute_floor = 1e-7;
};

/// Element-wise error of an analytic gradient against a numeric one.
/// Relative error is |a-n| / max(|a|,|n|) for elements whose absolute
/// difference exceeds the floor, and zero otherwise.
struct GradientError {
  double max_abs = 0.0;
  double max_rel = 0.0;
};

GradientError compare_gradients(const Tensor& analytic, const Tensor& numeric,
                                const GradCheckTolerance& tol = {});

struct GradCheckReport {
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  std::map<std::string, double> per_parameter_errors;
  double tolerance = 1e-4;
  bool passed = true;

  void record(const std::string& name, const GradientError& error);
};

/// A tensor participating in a gradient check, mutated in place while the
/// loss is probed. `analytic` is the gradient the backward pass produced.
struct GradCheckTarget {
  std::string name;
  Tensor* value;
  Tensor analytic;
};

/// Probes `loss` by perturbing every target in turn and compares against
/// the supplied analytic gradients. Targets are restored afterwards.
GradCheckReport check_gradients(const std::function<double()>& loss,
                                std::vector<GradCheckTarget> targets,
                                const GradCheckTolerance& tol = {}, double h = 1e-5);

}  // namespace ctnet
