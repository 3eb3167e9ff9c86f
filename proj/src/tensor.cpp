#include "jhess/tensor.hpp"

#include <algorithm>

#include <numeric>

namespace jhess {

namespace {

void decode(std::size_t k, int dim, int rank, int* idx) {
  for (int r = rank - 1; r >= 0; --r) {
    idx[r] = static_cast<int>(k % static_cast<std::size_t>(dim));
    k /= static_cast<std::size_t>(dim);
  }
}

}  // namespace

Tensor Tensor::symmetrized() const {
  Tensor out(dim_, rank_);
  if (rank_ <= 1) {
    out.data_ = data_;
    return out;
  }
  // Sum over the orbit of the sorted index tuple so that every permutation of
  // an index receives a bit-identical value; constant orbits are copied as is.
  std::vector<int> idx(rank_), perm(rank_), pidx(rank_);
  for (std::size_t k = 0; k < data_.size(); ++k) {
    decode(k, dim_, rank_, idx.data());
    std::sort(idx.begin(), idx.end());
    std::iota(perm.begin(), perm.end(), 0);
    const double first = data_[flat(idx.data())];
    double sum = 0.0;
    int count = 0;
    bool constant = true;
    do {
      for (int r = 0; r < rank_; ++r) pidx[r] = idx[perm[r]];
      const double v = data_[flat(pidx.data())];
      constant = constant && v == first;
      sum += v;
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.data_[k] = constant ? first : sum / count;
  }
  return out;
}

double Tensor::asymmetry() const { return max_abs_diff(*this, symmetrized()); }

Tensor Tensor::from_matrix(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("Tensor::from_matrix: matrix must be square");
  Tensor t(static_cast<int>(m.rows()), 2);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t(i, j) = m(i, j);
  return t;
}

Mat Tensor::to_matrix() const {
  if (rank_ != 2) throw std::invalid_argument("Tensor::to_matrix: rank must be 2");
  Mat m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.dim() != b.dim() || a.rank() != b.rank()) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace jhess
