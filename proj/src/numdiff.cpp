#include "jhess/numdiff.hpp"

#include "jhess/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace jhess {

namespace {

struct Tap {
  int offset;
  double weight;
};

// Second-order-accurate central stencils; truncation error is even in h.
const std::vector<Tap>& stencil(int k) {
  static const std::vector<Tap> s1{{-1, -0.5}, {1, 0.5}};
  static const std::vector<Tap> s2{{-1, 1.0}, {0, -2.0}, {1, 1.0}};
  static const std::vector<Tap> s3{{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
  static const std::vector<Tap> s4{{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}};
  switch (k) {
    case 1:
      return s1;
    case 2:
      return s2;
    case 3:
      return s3;
    case 4:
      return s4;
    default:
      throw InputError("stencil order out of range");
  }
}

using OffsetKey = std::vector<std::pair<int, int>>;  // (coordinate, multiple of h), sorted

// All non-decreasing index tuples of the given length over [0, dim).
std::vector<std::vector<int>> sorted_tuples(int dim, int order) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(order, 0);
  while (true) {
    out.push_back(t);
    int pos = order - 1;
    while (pos >= 0 && t[pos] == dim - 1) --pos;
    if (pos < 0) break;
    ++t[pos];
    for (int q = pos + 1; q < order; ++q) t[q] = t[pos];
  }
  return out;
}

class Evaluator {
 public:
  Evaluator(const TensorFn& f, const Vec& x, double h, const DomainFn& domain)
      : f_(f), x_(x), h_(h), domain_(domain) {}

  const Tensor& at(const OffsetKey& key) {
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Vec p = x_;
    for (const auto& [coord, mult] : key) p(coord) += mult * h_;
    if (domain_ && !domain_(p)) throw DomainError("finite-difference stencil leaves the domain");
    Tensor v = f_(p);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!std::isfinite(v[i])) throw NumericalError("non-finite evaluation inside finite-difference stencil");
    return cache_.emplace(key, std::move(v)).first->second;
  }

 private:
  const TensorFn& f_;
  const Vec& x_;
  double h_;
  const DomainFn& domain_;
  std::map<OffsetKey, Tensor> cache_;
};

// Mixed central difference for one sorted index tuple at step h.
Tensor tuple_difference(Evaluator& ev, const std::vector<int>& tuple, double h) {
  // Group by distinct coordinate.
  std::vector<std::pair<int, int>> groups;  // (coordinate, multiplicity)
  for (int c : tuple) {
    if (!groups.empty() && groups.back().first == c)
      ++groups.back().second;
    else
      groups.emplace_back(c, 1);
  }
  Tensor acc;
  bool first = true;
  std::vector<std::size_t> tap(groups.size(), 0);
  while (true) {
    OffsetKey key;
    double w = 1.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const Tap& t = stencil(groups[g].second)[tap[g]];
      w *= t.weight;
      if (t.offset != 0) key.emplace_back(groups[g].first, t.offset);
    }
    const Tensor& v = ev.at(key);
    if (first) {
      acc = v * w;
      first = false;
    } else {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * v[i];
    }
    std::size_t g = 0;
    while (g < groups.size() && ++tap[g] == stencil(groups[g].second).size()) tap[g++] = 0;
    if (g == groups.size()) break;
  }
  acc *= 1.0 / std::pow(h, static_cast<double>(tuple.size()));
  return acc;
}

}  // namespace

Tensor fd_tensor_derivative(const TensorFn& f, const Vec& x, int order, const StencilConfig& cfg,
                            const DomainFn& domain, bool symmetrize) {
  if (order < 1 || order > 4) throw InputError("fd_derivative: order must be in 1..4");
  if (!(cfg.base_step > 0.0)) throw InputError("fd_derivative: base_step must be positive");
  if (cfg.richardson_levels < 1) throw InputError("fd_derivative: richardson_levels must be >= 1");
  const int dim = static_cast<int>(x.size());
  if (dim < 1) throw InputError("fd_derivative: empty point");

  const double h0 = cfg.base_step * (1.0 + x.norm());
  const auto tuples = sorted_tuples(dim, order);
  const int levels = cfg.richardson_levels;

  // table[t][level] for Richardson extrapolation per tuple.
  std::vector<std::vector<Tensor>> table(tuples.size());
  for (int l = 0; l < levels; ++l) {
    const double h = h0 / std::pow(2.0, l);
    Evaluator ev(f, x, h, domain);
    for (std::size_t t = 0; t < tuples.size(); ++t) table[t].push_back(tuple_difference(ev, tuples[t], h));
  }
  for (auto& row : table) {
    for (int k = 1; k < levels; ++k) {
      const double p = std::pow(4.0, k);
      for (int l = levels - 1; l >= k; --l) {
        Tensor r = row[l] * p;
        r -= row[l - 1];
        row[l] = r * (1.0 / (p - 1.0));
      }
    }
  }

  const Tensor& sample = table.front().back();
  const int out_rank = sample.rank();
  if (sample.size() > 0 && out_rank > 0 && sample.dim() != dim)
    throw InputError("fd_tensor_derivative: output tensor dimension differs from point dimension");
  const int rank = out_rank + order;
  if (rank == 4 && dim > cfg.max_order4_dim)
    throw InputError("fd_derivative: order-4 tensors limited to dim <= " + std::to_string(cfg.max_order4_dim));

  Tensor result(dim, rank);
  std::vector<int> idx(rank);
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    const Tensor& val = table[t].back();
    std::vector<int> perm = tuples[t];
    do {
      for (std::size_t o = 0; o < val.size(); ++o) {
        std::size_t rem = o;
        for (int r = out_rank - 1; r >= 0; --r) {
          idx[r] = static_cast<int>(rem % static_cast<std::size_t>(dim));
          rem /= static_cast<std::size_t>(dim);
        }
        for (int q = 0; q < order; ++q) idx[out_rank + q] = perm[q];
        result[result.flat(idx.data())] = val[o];
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return symmetrize && out_rank > 0 ? result.symmetrized() : result;
}

Tensor fd_derivative(const ScalarFn& f, const Vec& x, int order, const StencilConfig& cfg, const DomainFn& domain) {
  TensorFn wrapped = [&f](const Vec& p) {
    Tensor t(1, 0);
    t[0] = f(p);
    return t;
  };
  return fd_tensor_derivative(wrapped, x, order, cfg, domain, false);
}

double fd_consistency(const ScalarFn& f, const Tensor& exact, const Vec& x, int order, const StencilConfig& cfg,
                      const DomainFn& domain) {
  const Tensor fd = fd_derivative(f, x, order, cfg, domain);
  return max_abs_diff(fd, exact) / std::max(exact.max_abs(), 1e-10);
}

}  // namespace jhess
