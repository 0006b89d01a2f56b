#pragma once

#include <cstddef>
#include <span>

#include "ctnet/numerics/tensor.hpp"

namespace ctnet {

enum class Activation { relu, sigmoid, tanh };

double sigmoid(double v) noexcept;
double apply_activation(Activation fn, double v) noexcept;
/// Derivative expressed through the activation's output y = fn(v).
/// ReLU uses the convention d/dv at 0 equals 0.
double activation_grad_from_output(Activation fn, double y) noexcept;

/// Rank-2 matrix product. Throws ShapeError naming both shapes on mismatch.
Tensor matmul(const Tensor& a, const Tensor& b);

/// Row-major GEMM kernel: c = op(a) * op(b) + beta * c, where op transposes
/// when requested. `m x k` is op(a), `k x n` is op(b), `c` is `m x n`.
void gemm(bool transpose_a, bool transpose_b, std::size_t m, std::size_t n, std::size_t k,
          std::span<const double> a, std::span<const double> b, std::span<double> c,
          double beta = 0.0);

Tensor transpose(const Tensor& a);

/// Softmax over the last axis with max subtraction.
Tensor softmax_last_axis(const Tensor& x);

Tensor elementwise(const Tensor& x, Activation fn);

/// Mean over `axis`; the axis is removed from the result shape.
Tensor reduce_mean(const Tensor& x, std::size_t axis);

Tensor add(const Tensor& a, const Tensor& b);
Tensor subtract(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
double sum(const Tensor& a);
/// Sum of element-wise products of two equally shaped tensors.
double dot(const Tensor& a, const Tensor& b);

}  // namespace ctnet
