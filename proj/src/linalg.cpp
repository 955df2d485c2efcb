#include "celltide/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "celltide/error.hpp"

namespace celltide::linalg {

namespace {

void require_same_length(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size()) {
    fail(ErrorCode::InvalidArgument, std::string(op) + ": length mismatch " + std::to_string(a.size()) +
                                         " vs " + std::to_string(b.size()));
  }
}

// Four interleaved partial sums; fixed order, so results stay deterministic.
double dot(std::span<const double> a, std::span<const double> b) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t j = 0;
  for (; j + 4 <= a.size(); j += 4) {
    s0 += a[j] * b[j];
    s1 += a[j + 1] * b[j + 1];
    s2 += a[j + 2] * b[j + 2];
    s3 += a[j + 3] * b[j + 3];
  }
  for (; j < a.size(); ++j) s0 += a[j] * b[j];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    fail(ErrorCode::InvalidArgument, "matrix " + shape() + " given " + std::to_string(data_.size()) + " values");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) fail(ErrorCode::InvalidArgument, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string Matrix::shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    fail(ErrorCode::InvalidArgument, "matmul: cannot multiply " + a.shape() + " by " + b.shape());
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) {
    fail(ErrorCode::InvalidArgument,
         "matvec: cannot multiply " + a.shape() + " by vector of length " + std::to_string(x.size()));
  }
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    out[i] = dot(a.row(i), x.span());
  }
  return out;
}

Vector matvec_transposed(const Matrix& a, const Vector& x) {
  if (a.rows() != x.size()) {
    fail(ErrorCode::InvalidArgument, "matvec_transposed: cannot multiply transpose of " + a.shape() +
                                         " by vector of length " + std::to_string(x.size()));
  }
  Vector out(a.cols());
  auto o = out.span();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    const auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) o[j] += r[j] * xi;
  }
  return out;
}

void add_outer(Matrix& a, const Vector& u, const Vector& v) {
  if (a.rows() != u.size() || a.cols() != v.size()) {
    fail(ErrorCode::InvalidArgument, "add_outer: " + a.shape() + " does not match " + std::to_string(u.size()) +
                                         "x" + std::to_string(v.size()));
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double ui = u[i];
    auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += ui * v[j];
  }
}

namespace {
// Largest double below 1; keeps saturated outputs inside the open interval.
constexpr double kBelowOne = 1.0 - 0x1.0p-53;
}  // namespace

double sigmoid(double x) noexcept {
  if (x >= 0.0) return std::min(1.0 / (1.0 + std::exp(-x)), kBelowOne);
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector sigmoid(const Vector& x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sigmoid(x[i]);
  return out;
}

Vector tanh_act(const Vector& x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::clamp(std::tanh(x[i]), -kBelowOne, kBelowOne);
  return out;
}

Vector relu(const Vector& x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
  return out;
}

Vector hadamard(const Vector& a, const Vector& b) {
  require_same_length(a, b, "hadamard");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Vector vec_add(const Vector& a, const Vector& b) {
  require_same_length(a, b, "vec_add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector concat(const Vector& a, const Vector& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return Vector(std::move(out));
}

}  // namespace celltide::linalg
