#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "colgnn/errors.hpp"

namespace colgnn {

// Dense row-major tensor of 64-bit floats. Rank 1 and 2 cover everything this
// library needs; every public operation leaves only finite values behind.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape)
      : shape_(std::move(shape)), data_(count(shape_), 0.0) {}

  Tensor(std::vector<std::size_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != count(shape_)) {
      throw InvalidInputError("tensor data length does not match shape");
    }
  }

  static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<std::size_t> shape, double value) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
  }

  static Tensor vector(std::vector<double> values) {
    std::size_t n = values.size();
    return Tensor({n}, std::move(values));
  }

  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor({rows, cols}, std::move(values));
  }

  static Tensor identity(std::size_t n) {
    Tensor t({n, n});
    for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
    return t;
  }

  std::size_t size() const { return data_.size(); }
  std::size_t rank() const { return shape_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }

  std::size_t rows() const { return rank() == 2 ? shape_[0] : (rank() == 1 ? 1 : 0); }
  std::size_t cols() const { return rank() == 2 ? shape_[1] : (rank() == 1 ? shape_[0] : 0); }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  double operator()(std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t i) { return data_[i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool is_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

 private:
  static std::size_t count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) {
      if (d == 0) throw InvalidInputError("tensor dimensions must be positive");
      n *= d;
    }
    return shape.empty() ? 0 : n;
  }

  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

inline void ensure_finite(const Tensor& t, const char* what) {
  if (!t.is_finite()) {
    throw InternalError(std::string("non-finite value produced by ") + what);
  }
}

inline std::string shape_string(const Tensor& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.rank(); ++i) {
    if (i) s += "x";
    s += std::to_string(t.shape()[i]);
  }
  return s + ")";
}

// Sums the scratch buffer after sorting it by value. The result depends only
// on the multiset of summands, so reductions over graph neighborhoods stay
// bitwise identical under any relabeling of the nodes.
inline double stable_sum(std::vector<double>& scratch) {
  std::sort(scratch.begin(), scratch.end());
  double acc = 0.0;
  for (double v : scratch) acc += v;
  return acc;
}

inline void require_matrix(const Tensor& t, const char* what) {
  if (t.rank() != 2) throw InvalidInputError(std::string(what) + ": expected a matrix");
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  if (a.cols() != b.rows()) {
    throw InvalidInputError("matmul: inner dimensions disagree " + shape_string(a) + " * " +
                            shape_string(b));
  }
  Tensor out({a.rows(), b.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < a.cols(); ++t) acc += a(i, t) * b(t, j);
      out(i, j) = acc;
    }
  }
  ensure_finite(out, "matmul");
  return out;
}

// a * b^T without materializing the transpose.
inline Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul_nt");
  require_matrix(b, "matmul_nt");
  if (a.cols() != b.cols()) {
    throw InvalidInputError("matmul_nt: inner dimensions disagree " + shape_string(a) + " * " +
                            shape_string(b) + "^T");
  }
  Tensor out({a.rows(), b.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < a.cols(); ++t) acc += a(i, t) * b(j, t);
      out(i, j) = acc;
    }
  }
  ensure_finite(out, "matmul_nt");
  return out;
}

inline Tensor transpose(const Tensor& a) {
  require_matrix(a, "transpose");
  Tensor out({a.cols(), a.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

inline Tensor matvec(const Tensor& a, const Tensor& x) {
  require_matrix(a, "matvec");
  if (x.rank() != 1 || a.cols() != x.size()) {
    throw InvalidInputError("matvec: dimensions disagree");
  }
  Tensor out({a.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x(j);
    out(i) = acc;
  }
  ensure_finite(out, "matvec");
  return out;
}

// Max-subtracted softmax of a rank-1 tensor.
inline Tensor softmax(const Tensor& v) {
  if (v.rank() != 1 || v.size() == 0) {
    throw InvalidInputError("softmax: expected a nonempty vector");
  }
  double mx = v(0);
  for (std::size_t i = 1; i < v.size(); ++i) mx = std::max(mx, v(i));
  Tensor out({v.size()});
  double denom = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(i) = std::exp(v(i) - mx);
    denom += out(i);
  }
  for (std::size_t i = 0; i < v.size(); ++i) out(i) /= denom;
  ensure_finite(out, "softmax");
  return out;
}

inline Tensor relu(const Tensor& a) {
  Tensor out = a;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

inline Tensor sigmoid(const Tensor& a) {
  Tensor out = a;
  for (double& v : out.data()) v = 1.0 / (1.0 + std::exp(-v));
  ensure_finite(out, "sigmoid");
  return out;
}

inline Tensor tanh(const Tensor& a) {
  Tensor out = a;
  for (double& v : out.data()) v = std::tanh(v);
  return out;
}

// Argmax with ties resolved to the lowest index.
inline std::size_t argmax(const Tensor& v) {
  if (v.size() == 0) throw InvalidInputError("argmax: empty tensor");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

}  // namespace colgnn
