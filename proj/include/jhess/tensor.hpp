#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace jhess {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dense cubic tensor of arbitrary rank over a space of dimension `dim`.
/// Storage is row-major: the last index varies fastest.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, int rank) : dim_(dim), rank_(rank) {
    if (dim < 0 || rank < 0) throw std::invalid_argument("Tensor: negative dim or rank");
    std::size_t n = 1;
    for (int r = 0; r < rank; ++r) n *= static_cast<std::size_t>(dim);
    data_.assign(n, 0.0);
  }

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  template <typename... Idx>
  double& operator()(Idx... idx) {
    return data_[offset(idx...)];
  }
  template <typename... Idx>
  double operator()(Idx... idx) const {
    return data_[offset(idx...)];
  }

  /// Flat offset of a multi-index given as a span of ints (size == rank).
  std::size_t flat(const int* idx) const {
    std::size_t k = 0;
    for (int r = 0; r < rank_; ++r) k = k * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[r]);
    return k;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  Tensor& operator+=(const Tensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Tensor& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator*(Tensor a, double s) { return a *= s; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }

  /// Average over all permutations of the indices.
  Tensor symmetrized() const;

  /// Largest deviation from full index symmetry.
  double asymmetry() const;

  static Tensor from_matrix(const Mat& m);
  Mat to_matrix() const;

 private:
  template <typename... Idx>
  std::size_t offset(Idx... idx) const {
    static_assert(sizeof...(Idx) > 0);
    std::array<int, sizeof...(Idx)> a{static_cast<int>(idx)...};
    return flat(a.data());
  }
  void check_same(const Tensor& o) const {
    if (o.dim_ != dim_ || o.rank_ != rank_) throw std::invalid_argument("Tensor: shape mismatch");
  }

  int dim_ = 0;
  int rank_ = 0;
  std::vector<double> data_;
};

/// max_i |a_i - b_i|
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace jhess
