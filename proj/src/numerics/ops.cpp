#include "ctnet/numerics/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) +
                     " vs " + shape_to_string(b.shape()));
  }
}

}  // namespace

double sigmoid(double v) noexcept {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

double apply_activation(Activation fn, double v) noexcept {
  switch (fn) {
    case Activation::relu:
      return v > 0.0 ? v : 0.0;
    case Activation::sigmoid:
      return sigmoid(v);
    case Activation::tanh:
      return std::tanh(v);
  }
  return v;
}

double activation_grad_from_output(Activation fn, double y) noexcept {
  switch (fn) {
    case Activation::relu:
      return y > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid:
      return y * (1.0 - y);
    case Activation::tanh:
      return 1.0 - y * y;
  }
  return 1.0;
}

void gemm(bool transpose_a, bool transpose_b, std::size_t m, std::size_t n, std::size_t k,
          std::span<const double> a, std::span<const double> b, std::span<double> c,
          double beta) {
  if (a.size() != m * k || b.size() != k * n || c.size() != m * n) {
    throw ShapeError("gemm: buffer sizes do not match (" + std::to_string(m) + "x" +
                     std::to_string(k) + ")*(" + std::to_string(k) + "x" +
                     std::to_string(n) + ")");
  }
  const auto mi = static_cast<Eigen::Index>(m);
  const auto ni = static_cast<Eigen::Index>(n);
  const auto ki = static_cast<Eigen::Index>(k);
  MutMap out(c.data(), mi, ni);
  if (beta == 0.0) {
    out.setZero();
  } else if (beta != 1.0) {
    out *= beta;
  }
  // Transposed operands are stored with swapped extents.
  const ConstMap lhs(a.data(), transpose_a ? ki : mi, transpose_a ? mi : ki);
  const ConstMap rhs(b.data(), transpose_b ? ni : ki, transpose_b ? ki : ni);
  if (!transpose_a && !transpose_b) {
    out.noalias() += lhs * rhs;
  } else if (transpose_a && !transpose_b) {
    out.noalias() += lhs.transpose() * rhs;
  } else if (!transpose_a && transpose_b) {
    out.noalias() += lhs * rhs.transpose();
  } else {
    out.noalias() += lhs.transpose() * rhs.transpose();
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: incompatible shapes " + shape_to_string(a.shape()) + " and " +
                     shape_to_string(b.shape()));
  }
  Tensor out({a.dim(0), b.dim(1)});
  gemm(false, false, a.dim(0), b.dim(1), a.dim(1), a.data(), b.data(), out.data());
  return out;
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) throw ShapeError("transpose: expected rank 2, got " + shape_to_string(a.shape()));
  const std::size_t r = a.dim(0), c = a.dim(1);
  Tensor out({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(j, i) = a.at(i, j);
  return out;
}

Tensor softmax_last_axis(const Tensor& x) {
  Tensor out = x;
  const std::size_t width = x.rank() ? x.shape().back() : 1;
  const std::size_t rows = x.size() / width;
  auto d = out.data();
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = d.subspan(r * width, width);
    const double peak = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (auto& v : row) {
      v = std::exp(v - peak);
      total += v;
    }
    for (auto& v : row) v /= total;
  }
  return out;
}

Tensor elementwise(const Tensor& x, Activation fn) {
  Tensor out = x;
  for (auto& v : out.data()) v = apply_activation(fn, v);
  return out;
}

Tensor reduce_mean(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank()) {
    throw ShapeError("reduce_mean: axis " + std::to_string(axis) + " out of range for shape " +
                     shape_to_string(x.shape()));
  }
  const auto& shape = x.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const std::size_t extent = shape[axis];

  Shape out_shape;
  for (std::size_t i = 0; i < shape.size(); ++i)
    if (i != axis) out_shape.push_back(shape[i]);
  Tensor out(out_shape);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t a = 0; a < extent; ++a) {
      const double* src = x.raw() + (o * extent + a) * inner;
      double* dst = out.raw() + o * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
  }
  for (auto& v : out.data()) v /= static_cast<double>(extent);
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Tensor subtract(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "subtract");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "hadamard");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

Tensor scale(const Tensor& a, double factor) {
  Tensor out = a;
  for (auto& v : out.data()) v *= factor;
  return out;
}

double sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.data()) total += v;
  return total;
}

double dot(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "dot");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

}  // namespace ctnet
