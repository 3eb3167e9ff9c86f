#pragma once

#include "jhess/tensor.hpp"

#include <functional>

namespace jhess {

using ScalarFn = std::function<double(const Vec&)>;
using TensorFn = std::function<Tensor(const Vec&)>;
using DomainFn = std::function<bool(const Vec&)>;

/// Central-difference stencil settings. The actual step at level ℓ is
/// base_step·(1 + ‖x‖)/2^ℓ; `richardson_levels` step sizes are combined by
/// Richardson extrapolation (1 = plain central differences).
struct StencilConfig {
  double base_step = 1e-2;
  int richardson_levels = 3;
  int max_order4_dim = 12;
};

/// Symmetric derivative tensor of order 1..4 of a scalar field by mixed central
/// differences over non-decreasing index tuples.
Tensor fd_derivative(const ScalarFn& f, const Vec& x, int order, const StencilConfig& cfg = {},
                     const DomainFn& domain = {});

/// Derivatives of a tensor-valued field: result index layout is
/// (output indices..., derivative indices...). With `symmetrize` the result is
/// averaged over all index permutations, which is exact when `f` itself returns
/// a derivative tensor of a smooth scalar.
Tensor fd_tensor_derivative(const TensorFn& f, const Vec& x, int order, const StencilConfig& cfg = {},
                            const DomainFn& domain = {}, bool symmetrize = true);

/// max|fd − exact| / max(‖exact‖∞, 1e-10)
double fd_consistency(const ScalarFn& f, const Tensor& exact, const Vec& x, int order,
                      const StencilConfig& cfg = {}, const DomainFn& domain = {});

}  // namespace jhess
