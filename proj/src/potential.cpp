#include "jhess/potential.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <memory>
#include <sstream>

namespace jhess {

const char* to_string(DerivativeSource s) {
  return s == DerivativeSource::exact ? "exact" : "finite-difference";
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::series:
      return "series";
    case Provenance::logdet_closed:
      return "logdet_closed";
    case Provenance::canonical_barrier:
      return "canonical_barrier";
    case Provenance::user_expression:
      return "user_expression";
  }
  return "unknown";
}

namespace {

Tensor vec_tensor(const Vec& v) {
  Tensor t(static_cast<int>(v.size()), 1);
  for (int i = 0; i < v.size(); ++i) t(i) = v(i);
  return t;
}

Vec tensor_vec(const Tensor& t) {
  Vec v(t.dim());
  for (int i = 0; i < t.dim(); ++i) v(i) = t(i);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// PotentialField

PotentialField::PotentialField(int dim, FieldEvaluators ev, Provenance provenance, std::string label,
                               StencilConfig stencil)
    : dim_(dim), ev_(std::move(ev)), provenance_(provenance), label_(std::move(label)), stencil_(stencil) {
  if (dim < 1) throw InputError("PotentialField: dimension must be positive");
  if (!ev_.value) throw InputError("PotentialField: value evaluator required");
  fill_gaps();
}

void PotentialField::fill_gaps() {
  // Highest exact-or-provided order below k, as a tensor-valued function.
  std::array<TensorFn, 4> provided;
  if (ev_.gradient) provided[0] = [g = ev_.gradient](const Vec& x) { return vec_tensor(g(x)); };
  if (ev_.hessian) provided[1] = [h = ev_.hessian](const Vec& x) { return Tensor::from_matrix(h(x)); };
  if (ev_.third) provided[2] = ev_.third;
  if (ev_.fourth) provided[3] = ev_.fourth;

  const StencilConfig cfg = stencil_;
  const DomainFn domain = ev_.domain;
  const ScalarFn value = ev_.value;

  auto filled = [&](int order) -> TensorFn {
    for (int j = order - 1; j >= 1; --j) {
      if (provided[j - 1]) {
        TensorFn lower = provided[j - 1];
        return [lower, cfg, domain, k = order - j](const Vec& x) {
          return fd_tensor_derivative(lower, x, k, cfg, domain, true);
        };
      }
    }
    return [value, cfg, domain, order](const Vec& x) { return fd_derivative(value, x, order, cfg, domain); };
  };

  for (int order = 1; order <= 4; ++order) {
    if (provided[order - 1]) continue;
    ev_.sources[order - 1] = DerivativeSource::finite_difference;
    TensorFn fn = filled(order);
    provided[order - 1] = fn;
    switch (order) {
      case 1:
        ev_.gradient = [fn](const Vec& x) { return tensor_vec(fn(x)); };
        break;
      case 2:
        ev_.hessian = [fn](const Vec& x) { return fn(x).to_matrix(); };
        break;
      case 3:
        ev_.third = fn;
        break;
      case 4:
        ev_.fourth = fn;
        break;
    }
  }
}

bool PotentialField::contains(const Vec& x) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  if (!ev_.domain) return true;
  try {
    return ev_.domain(x);
  } catch (const std::exception&) {
    return false;
  }
}

void PotentialField::require(const Vec& x) const {
  if (x.size() != dim_) throw InputError("point has wrong dimension for field " + label_);
  if (!contains(x)) throw DomainError("point outside the domain of field " + label_);
}

double PotentialField::value(const Vec& x) const {
  require(x);
  return ev_.value(x);
}
Vec PotentialField::gradient(const Vec& x) const {
  require(x);
  return ev_.gradient(x);
}
Mat PotentialField::hessian(const Vec& x) const {
  require(x);
  return ev_.hessian(x);
}
Tensor PotentialField::third(const Vec& x) const {
  require(x);
  return ev_.third(x);
}
Tensor PotentialField::fourth(const Vec& x) const {
  require(x);
  return ev_.fourth(x);
}

DerivativeSource PotentialField::source(int order) const {
  if (order < 1 || order > 4) throw InputError("derivative order must be in 1..4");
  return ev_.sources[order - 1];
}

// ---------------------------------------------------------------------------
// Series potential

namespace {

void check_point(const MetrisedAlgebra& m, const Vec& x) {
  if (x.size() != m.dim()) throw InputError("point dimension does not match algebra");
}

// LU of I + L_x; throws when singular.
Eigen::FullPivLU<Mat> shifted_lu(const JordanAlgebra& a, const Vec& x) {
  Mat op = Mat::Identity(a.dim(), a.dim()) + a.left_mult(x);
  Eigen::FullPivLU<Mat> lu(op);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) throw NumericalError("I + L_x is singular");
  return lu;
}

// Covector u ↦ ∇_v²∇_uF.
Vec second_directional(const MetrisedAlgebra& m, const Eigen::FullPivLU<Mat>& lu, const Vec& y, const Vec& v) {
  const JordanAlgebra& a = m.algebra();
  const Mat lv = a.left_mult(v);
  const Vec t1 = lu.solve(lv * lu.solve(v));
  const Vec t2 = lu.solve(lv * lu.solve(lv * y));
  return m.form().matrix() * (-2.0 * t1 + 2.0 * t2);
}

}  // namespace

double spectral_radius(const JordanAlgebra& a, const Vec& x) {
  const Mat l = a.left_mult(x);
  Eigen::EigenSolver<Mat> es(l, false);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_radius: eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double series_potential(const MetrisedAlgebra& m, const Vec& x, SeriesOptions opt) {
  check_point(m, x);
  const JordanAlgebra& a = m.algebra();
  const double rho = spectral_radius(a, x);
  if (!(rho < 1.0)) {
    std::ostringstream os;
    os << "series diverges: spectral radius of L_x is " << rho;
    throw DomainError(os.str());
  }
  const Mat l = a.left_mult(x);
  Vec p = x;  // x^{k-1}
  double sum = 0.0;
  int small = 0;
  for (int k = 2; k <= opt.max_terms; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double term = sign / k * m.form()(x, p);
    sum += term;
    if (std::abs(term) < opt.rel_tol * (1.0 + std::abs(sum))) {
      if (++small == 3) return sum;
    } else {
      small = 0;
    }
    p = l * p;
  }
  throw NumericalError("series potential: term cap reached without convergence");
}

Vec series_gradient(const MetrisedAlgebra& m, const Vec& x) {
  check_point(m, x);
  const auto lu = shifted_lu(m.algebra(), x);
  return m.form().matrix() * lu.solve(x);
}

Mat series_hessian(const MetrisedAlgebra& m, const Vec& x) {
  check_point(m, x);
  const JordanAlgebra& a = m.algebra();
  const auto lu = shifted_lu(a, x);
  const Vec y = lu.solve(x);
  const int d = a.dim();
  Mat h(d, d);
  for (int j = 0; j < d; ++j) {
    const Vec v = a.basis(j);
    h.col(j) = m.form().matrix() * (lu.solve(v) - lu.solve(a.multiply(v, y)));
  }
  return h;
}

Tensor series_third(const MetrisedAlgebra& m, const Vec& x) {
  check_point(m, x);
  const JordanAlgebra& a = m.algebra();
  const auto lu = shifted_lu(a, x);
  const Vec y = lu.solve(x);
  const int d = a.dim();
  Tensor t(d, 3);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Vec col;
      if (i == j) {
        col = second_directional(m, lu, y, a.basis(i));
      } else {
        const Vec plus = second_directional(m, lu, y, a.basis(i) + a.basis(j));
        const Vec minus = second_directional(m, lu, y, a.basis(i) - a.basis(j));
        col = 0.25 * (plus - minus);
      }
      for (int u = 0; u < d; ++u) t(u, i, j) = t(u, j, i) = col(u);
    }
  return t;
}

Vec series_fourth_directional(const MetrisedAlgebra& m, const Vec& x, const Vec& v) {
  check_point(m, x);
  check_point(m, v);
  const JordanAlgebra& a = m.algebra();
  const auto lu = shifted_lu(a, x);
  const Mat lv = a.left_mult(v);
  auto step = [&](const Vec& w) -> Vec { return lu.solve(lv * w); };  // (I+L_x)⁻¹L_v
  const Vec first = step(step(lu.solve(v)));
  const Vec second = step(step(step(lu.solve(x))));
  return m.form().matrix() * (6.0 * first - 6.0 * second);
}

PotentialField series_field(const MetrisedAlgebra& m, StencilConfig stencil) {
  auto alg = std::make_shared<const MetrisedAlgebra>(m);
  const JordanAlgebra& a = alg->algebra();
  const double jres = a.dim() <= 8 ? jordan_residual_exhaustive(a) : jordan_residual(a, {256, 0});
  const double scale = std::max(1.0, std::pow(a.structure_tensor().max_abs(), 3));
  const bool jordan = commutativity_residual(a) <= 1e-12 * scale && jres <= 1e-9 * scale;

  FieldEvaluators ev;
  ev.value = [alg](const Vec& x) { return series_potential(*alg, x); };
  ev.domain = [alg](const Vec& x) { return spectral_radius(alg->algebra(), x) < 1.0; };
  if (jordan) {
    ev.gradient = [alg](const Vec& x) { return series_gradient(*alg, x); };
    ev.hessian = [alg](const Vec& x) { return series_hessian(*alg, x); };
    ev.third = [alg](const Vec& x) { return series_third(*alg, x); };
  }
  return PotentialField(a.dim(), std::move(ev), Provenance::series,
                        std::string("series[") + a.family().describe() + "]", stencil);
}

// ---------------------------------------------------------------------------
// Log-determinant potential

namespace {

Vec unit_of(const JordanAlgebra& a) {
  auto e = find_unit(a);
  if (!e) throw UnsupportedError("algebra has no unit element");
  return *e;
}

// u ↦ −tr L_{w⁻¹•u} with w in the algebra.
Vec neg_trace_of_inverse(const JordanAlgebra& a, const Vec& w) {
  const Vec inv = inverse(a, w);
  return -(a.left_mult(inv).transpose() * a.trace_vector());
}

}  // namespace

double logdet_potential(const JordanAlgebra& a, const Vec& x) {
  if (x.size() != a.dim()) throw InputError("logdet_potential: dimension mismatch");
  const auto sd = spectral(a, x);
  double v = 0.0;
  for (std::size_t j = 0; j < sd.eigenvalues.size(); ++j) {
    if (!(sd.eigenvalues[j] > -1.0)) throw DomainError("logdet_potential: eigenvalue <= -1");
    v -= sd.multiplicities[j] * std::log1p(sd.eigenvalues[j]);
  }
  return v;
}

Vec logdet_gradient(const JordanAlgebra& a, const Vec& x) {
  if (x.size() != a.dim()) throw InputError("logdet_gradient: dimension mismatch");
  return neg_trace_of_inverse(a, unit_of(a) + x);
}

Mat logdet_hessian(const JordanAlgebra& a, const Vec& x, const StencilConfig& stencil) {
  const Vec e = unit_of(a);
  TensorFn grad = [&a, &e](const Vec& p) { return vec_tensor(neg_trace_of_inverse(a, e + p)); };
  DomainFn dom = [&a](const Vec& p) {
    const auto sd = spectral(a, p);
    for (double l : sd.eigenvalues)
      if (!(l > -1.0)) return false;
    return true;
  };
  return fd_tensor_derivative(grad, x, 1, stencil, dom, true).to_matrix();
}

PotentialField logdet_field(const JordanAlgebra& a, StencilConfig stencil) {
  auto alg = std::make_shared<const JordanAlgebra>(a);
  auto e = std::make_shared<const Vec>(unit_of(a));
  FieldEvaluators ev;
  ev.value = [alg](const Vec& x) { return logdet_potential(*alg, x); };
  ev.gradient = [alg, e](const Vec& x) { return neg_trace_of_inverse(*alg, *e + x); };
  ev.domain = [alg](const Vec& x) {
    const auto sd = spectral(*alg, x);
    for (double l : sd.eigenvalues)
      if (!(l > -1.0)) return false;
    return true;
  };
  return PotentialField(a.dim(), std::move(ev), Provenance::logdet_closed,
                        std::string("logdet[") + a.family().describe() + "]", stencil);
}

// ---------------------------------------------------------------------------
// Canonical barriers

int BarrierSpec::dim() const {
  int d = 0;
  for (const auto& f : factors) d += f.algebra.dim();
  return d;
}

void BarrierSpec::validate() const {
  if (factors.empty()) throw InputError("barrier: no factors");
  for (const auto& f : factors) {
    if (!(f.weight > 0.0) || !std::isfinite(f.weight)) throw InputError("barrier: weights must be positive");
    if (!f.algebra.family().euclidean()) throw InputError("barrier: factor algebras must carry a Euclidean family tag");
  }
  if (center.size() != dim()) throw InputError("barrier: center has wrong dimension");
  if (!center.allFinite() || !std::isfinite(offset)) throw InputError("barrier: non-finite center or offset");
}

BarrierSpec barrier_from_algebra(const MetrisedAlgebra& m, Vec center, double offset) {
  BarrierSpec spec;
  const auto parts = declared_factors(m.algebra());
  const auto& w = m.weights();
  for (std::size_t k = 0; k < parts.size(); ++k)
    spec.factors.push_back({parts[k], w.size() == parts.size() ? w[k] : 1.0});
  spec.center = std::move(center);
  spec.offset = offset;
  spec.validate();
  return spec;
}

double homogeneity_parameter(const BarrierSpec& spec) {
  double nu = 0.0;
  for (const auto& f : spec.factors) nu -= f.weight * f.algebra.dim();
  return nu;
}

Vec barrier_anchor(const BarrierSpec& spec) {
  spec.validate();
  Vec x = spec.center;
  int off = 0;
  for (const auto& f : spec.factors) {
    x.segment(off, f.algebra.dim()) += unit_of(f.algebra);
    off += f.algebra.dim();
  }
  return x;
}

namespace {

double min_eigenvalue(const JordanAlgebra& a, const Vec& delta) {
  const auto sd = spectral(a, delta);
  return sd.eigenvalues.front();
}

struct BarrierData {
  BarrierSpec spec;
  std::vector<int> offsets;
};

bool barrier_contains(const BarrierData& b, const Vec& x) {
  const Vec delta = x - b.spec.center;
  const double margin = 1e-12 * delta.norm();
  for (std::size_t k = 0; k < b.spec.factors.size(); ++k) {
    const auto& a = b.spec.factors[k].algebra;
    if (!(min_eigenvalue(a, delta.segment(b.offsets[k], a.dim())) > margin)) return false;
  }
  return true;
}

}  // namespace

double barrier_boundary_distance(const BarrierSpec& spec, const Vec& x) {
  spec.validate();
  const Vec delta = x - spec.center;
  double d = std::numeric_limits<double>::infinity();
  int off = 0;
  for (const auto& f : spec.factors) {
    d = std::min(d, min_eigenvalue(f.algebra, delta.segment(off, f.algebra.dim())) / std::sqrt(2.0));
    off += f.algebra.dim();
  }
  return std::max(d, 0.0);
}

PotentialField canonical_barrier(const BarrierSpec& spec, StencilConfig stencil) {
  spec.validate();
  auto data = std::make_shared<BarrierData>();
  data->spec = spec;
  int off = 0;
  std::string label = "barrier[";
  for (std::size_t k = 0; k < spec.factors.size(); ++k) {
    data->offsets.push_back(off);
    off += spec.factors[k].algebra.dim();
    std::ostringstream os;
    os << (k ? " + " : "") << spec.factors[k].weight << "*" << spec.factors[k].algebra.family().describe();
    label += os.str();
  }
  label += "]";
  const int dim = off;

  FieldEvaluators ev;
  ev.domain = [data](const Vec& x) { return barrier_contains(*data, x); };
  ev.value = [data](const Vec& x) {
    const Vec delta = x - data->spec.center;
    double f = data->spec.offset;
    for (std::size_t k = 0; k < data->spec.factors.size(); ++k) {
      const auto& fac = data->spec.factors[k];
      f -= fac.weight * logdet(fac.algebra, delta.segment(data->offsets[k], fac.algebra.dim()));
    }
    return f;
  };
  ev.gradient = [data, dim](const Vec& x) {
    const Vec delta = x - data->spec.center;
    Vec g(dim);
    for (std::size_t k = 0; k < data->spec.factors.size(); ++k) {
      const auto& fac = data->spec.factors[k];
      const int n = fac.algebra.dim();
      g.segment(data->offsets[k], n) = fac.weight * neg_trace_of_inverse(fac.algebra, delta.segment(data->offsets[k], n));
    }
    return g;
  };

  // Per factor with y = δ⁻¹: Hessian τ·P(y), P(y) = 2L_y² − L_{y²}; the third
  // derivative differentiates P(y) along j using dy = −P(y)j. Cross-factor
  // blocks vanish.
  auto forms = std::make_shared<std::vector<Mat>>();
  for (const auto& f : spec.factors) forms->push_back(trace_form(f.algebra).matrix());
  ev.hessian = [data, forms, dim](const Vec& x) {
    const Vec delta = x - data->spec.center;
    Mat h = Mat::Zero(dim, dim);
    for (std::size_t k = 0; k < data->spec.factors.size(); ++k) {
      const auto& fac = data->spec.factors[k];
      const int n = fac.algebra.dim(), o = data->offsets[k];
      const Vec y = inverse(fac.algebra, delta.segment(o, n));
      const Mat ly = fac.algebra.left_mult(y);
      const Mat p = 2.0 * ly * ly - fac.algebra.left_mult(fac.algebra.multiply(y, y));
      h.block(o, o, n, n) = fac.weight * (*forms)[k] * p;
    }
    return Mat(0.5 * (h + h.transpose()));
  };
  ev.third = [data, forms, dim](const Vec& x) {
    const Vec delta = x - data->spec.center;
    Tensor t(dim, 3);
    for (std::size_t k = 0; k < data->spec.factors.size(); ++k) {
      const auto& fac = data->spec.factors[k];
      const JordanAlgebra& a = fac.algebra;
      const int n = a.dim(), o = data->offsets[k];
      const Vec y = inverse(a, delta.segment(o, n));
      const Mat ly = a.left_mult(y);
      const Mat p = 2.0 * ly * ly - a.left_mult(a.multiply(y, y));
      for (int c = 0; c < n; ++c) {
        const Vec dy = -p.col(c);
        const Mat ldy = a.left_mult(dy);
        const Mat dp = 2.0 * (ldy * ly + ly * ldy - a.left_mult(a.multiply(y, dy)));
        const Mat slice = fac.weight * (*forms)[k] * dp;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) t(o + i, o + j, o + c) = slice(i, j);
      }
    }
    return t.symmetrized();
  };
  ev.fourth = [third = ev.third, data, dim, stencil](const Vec& x) {
    const Vec delta = x - data->spec.center;
    Tensor out(dim, 4);
    for (std::size_t k = 0; k < data->spec.factors.size(); ++k) {
      const auto& fac = data->spec.factors[k];
      const JordanAlgebra& a = fac.algebra;
      const int n = a.dim(), o = data->offsets[k];
      // differentiate only this factor's block, holding the others at x
      TensorFn block3 = [&](const Vec& p) {
        Vec z = x;
        z.segment(o, n) = p + data->spec.center.segment(o, n);
        const Tensor full = third(z);
        Tensor b(n, 3);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) b(i, j, l) = full(o + i, o + j, o + l);
        return b;
      };
      DomainFn dom = [&a](const Vec& p) { return min_eigenvalue(a, p) > 1e-12 * p.norm(); };
      const Tensor block = fd_tensor_derivative(block3, delta.segment(o, n), 1, stencil, dom, true);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m) out(o + i, o + j, o + l, o + m) = block(i, j, l, m);
    }
    return out;
  };
  ev.sources = {DerivativeSource::exact, DerivativeSource::exact, DerivativeSource::exact,
                DerivativeSource::finite_difference};
  return PotentialField(dim, std::move(ev), Provenance::canonical_barrier, label, stencil);
}

// ---------------------------------------------------------------------------
// User fields

PotentialField quadratic_field(const Mat& q) {
  const BilinearForm form(q);  // validates symmetry
  const Mat qq = form.matrix();
  const int d = static_cast<int>(qq.rows());
  FieldEvaluators ev;
  ev.value = [qq](const Vec& x) { return 0.5 * x.dot(qq * x); };
  ev.gradient = [qq](const Vec& x) { return Vec(qq * x); };
  ev.hessian = [qq](const Vec&) { return qq; };
  ev.third = [d](const Vec&) { return Tensor(d, 3); };
  ev.fourth = [d](const Vec&) { return Tensor(d, 4); };
  return PotentialField(d, std::move(ev), Provenance::user_expression, "quadratic");
}

PotentialField user_field(int dim, ScalarFn value, DomainFn domain, std::string label, StencilConfig stencil) {
  FieldEvaluators ev;
  ev.value = std::move(value);
  ev.domain = std::move(domain);
  return PotentialField(dim, std::move(ev), Provenance::user_expression, std::move(label), stencil);
}

}  // namespace jhess
