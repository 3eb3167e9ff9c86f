#include "jhess/geometry.hpp"

#include "jhess/random.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace jhess {

TensorSample sample_tensors(const PotentialField& p, const Vec& x, bool with_fourth, double degeneracy) {
  if (!p.contains(x)) throw DomainError("sample_tensors: point outside the domain of " + p.label());
  TensorSample s;
  s.point = x;
  s.value = p.value(x);
  s.gradient = p.gradient(x);
  s.g = p.hessian(x);
  const int d = p.dim();
  const double norm = s.g.cwiseAbs().maxCoeff();
  Eigen::FullPivLU<Mat> lu(s.g);
  if (norm == 0.0 || std::abs(lu.determinant()) < degeneracy * std::pow(norm, d))
    throw NumericalError("degenerate Hessian at sample point");
  s.g_inv = lu.inverse();
  s.t3 = p.third(x);
  if (with_fourth) {
    s.t4 = p.fourth(x);
    s.has_fourth = true;
  }
  for (int k = 1; k <= 4; ++k) s.sources[k - 1] = p.source(k);
  return s;
}

Vec DifferenceTensor::apply(const Vec& u, const Vec& v) const { return contract(u) * v; }

Mat DifferenceTensor::contract(const Vec& u) const {
  const int d = k.dim();
  Mat l = Mat::Zero(d, d);
  for (int g = 0; g < d; ++g)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) l(g, b) += k(g, a, b) * u(a);
  return l;
}

DifferenceTensor difference_tensor(const TensorSample& s) {
  const int d = static_cast<int>(s.g.rows());
  DifferenceTensor out{Tensor(d, 3)};
  for (int g = 0; g < d; ++g)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double v = 0.0;
        for (int e = 0; e < d; ++e) v += s.t3(a, b, e) * s.g_inv(g, e);
        out.k(g, a, b) = -0.5 * v;
      }
  return out;
}

Residual residual_third_parallel(const TensorSample& s) {
  if (!s.has_fourth) throw InputError("residual_third_parallel: sample lacks the fourth derivative");
  const int d = static_cast<int>(s.g.rows());
  // raised(a,b,σ) = F_{,abρ} F^{,ρσ}
  Tensor raised(d, 3);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int sg = 0; sg < d; ++sg) {
        double v = 0.0;
        for (int r = 0; r < d; ++r) v += s.t3(a, b, r) * s.g_inv(r, sg);
        raised(a, b, sg) = v;
      }
  auto pair = [&](int a, int b, int c, int e) {
    double v = 0.0;
    for (int sg = 0; sg < d; ++sg) v += raised(a, b, sg) * s.t3(c, e, sg);
    return v;
  };
  double raw = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          const double rhs = 0.5 * (pair(a, b, c, e) + pair(a, c, b, e) + pair(a, e, b, c));
          raw = std::max(raw, std::abs(s.t4(a, b, c, e) - rhs));
        }
  return {raw, raw / (1.0 + s.t4.max_abs())};
}

Residual residual_third_parallel(const PotentialField& p, const Vec& x) {
  return residual_third_parallel(sample_tensors(p, x, true));
}

Residual residual_first_parallel(const TensorSample& s) {
  const int d = static_cast<int>(s.g.rows());
  const Vec raised = s.g_inv * s.gradient;  // F_{,δ}F^{,γδ}
  double raw = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double lhs = 0.0;
      for (int c = 0; c < d; ++c) lhs += raised(c) * s.t3(a, b, c);
      raw = std::max(raw, std::abs(lhs - 2.0 * s.g(a, b)));
    }
  return {raw, raw / s.g.cwiseAbs().maxCoeff()};
}

Residual residual_first_parallel(const PotentialField& p, const Vec& x) {
  return residual_first_parallel(sample_tensors(p, x, false));
}

Vec recover_unit(const TensorSample& s) { return -(s.g_inv * s.gradient); }

Vec recover_center(const PotentialField& p, const Vec& x) { return x - recover_unit(sample_tensors(p, x, false)); }

double recover_nu(const PotentialField& p, const Vec& x) {
  const TensorSample s = sample_tensors(p, x, false);
  return s.gradient.dot(recover_unit(s));
}

MetrisedAlgebra reconstruct_algebra(const PotentialField& p, const Vec& x, const VerificationConfig& cfg) {
  const TensorSample s = sample_tensors(p, x, true, cfg.degeneracy);
  const Residual r = residual_third_parallel(s);
  if (r.normalized > cfg.reconstruct_gate) {
    std::ostringstream os;
    os << "reconstruct_algebra: third-parallel residual " << r.normalized << " exceeds gate " << cfg.reconstruct_gate;
    throw NumericalError(os.str());
  }
  const DifferenceTensor k = difference_tensor(s);
  std::vector<double> c(k.k.data(), k.k.data() + k.k.size());
  return MetrisedAlgebra(JordanAlgebra(p.dim(), std::move(c)), BilinearForm(0.5 * (s.g + s.g.transpose())));
}

Mat parallel_transport(const PotentialField& p, const std::vector<Vec>& path, int steps) {
  if (path.empty()) throw InputError("parallel_transport: empty path");
  if (steps < 1) throw InputError("parallel_transport: steps must be >= 1");
  const int d = p.dim();
  for (const auto& q : path) {
    if (q.size() != d) throw InputError("parallel_transport: path point has wrong dimension");
    if (!p.contains(q)) throw DomainError("parallel_transport: path exits the domain");
  }
  Mat j = Mat::Identity(d, d);
  for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
    const Vec a = path[seg];
    const Vec velocity = path[seg + 1] - a;
    if (velocity.norm() == 0.0) continue;
    // dJ/dt = K(ẋ)·J with (K(ẋ))^γ_β = K^γ_{αβ} ẋ^α = −Γ^γ_{αβ} ẋ^α
    auto rhs = [&](double t, const Mat& state) -> Mat {
      const Vec x = a + t * velocity;
      if (!p.contains(x)) throw DomainError("parallel_transport: path exits the domain");
      const TensorSample s = sample_tensors(p, x, false);
      return difference_tensor(s).contract(velocity) * state;
    };
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
      const double t = i * h;
      const Mat k1 = rhs(t, j);
      const Mat k2 = rhs(t + 0.5 * h, j + 0.5 * h * k1);
      const Mat k3 = rhs(t + 0.5 * h, j + 0.5 * h * k2);
      const Mat k4 = rhs(t + h, j + h * k3);
      j += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return j;
}

double isomorphism_residual(const Mat& j, const MetrisedAlgebra& m1, const MetrisedAlgebra& m2, Sampling s) {
  const int d = m1.dim();
  if (m2.dim() != d || j.rows() != d || j.cols() != d) throw InputError("isomorphism_residual: dimension mismatch");
  if (s.samples < 1) throw InputError("samples must be >= 1");
  Rng rng(s.seed);
  double r = 0.0;
  for (int i = 0; i < s.samples; ++i) {
    const Vec u = random_unit(rng, d);
    const Vec v = random_unit(rng, d);
    const Vec ju = j * u, jv = j * v;
    const double prod = (j * m1.algebra().multiply(u, v) - m2.algebra().multiply(ju, jv)).norm();
    const double form = std::abs(m2.form()(ju, jv) - m1.form()(u, v));
    r = std::max(r, prod + form);
  }
  return r;
}

double metric_preservation_residual(const PotentialField& p, const std::vector<Vec>& path, const Mat& j) {
  if (path.empty()) throw InputError("metric_preservation_residual: empty path");
  const Mat g0 = p.hessian(path.front());
  const Mat g1 = p.hessian(path.back());
  return (j.transpose() * g1 * j - g0).cwiseAbs().maxCoeff();
}

VerificationReport verify_points(const PotentialField& p, const std::vector<Vec>& points, const VerificationConfig& cfg) {
  VerificationReport rep;
  rep.field = p.label();
  rep.third.tolerance = cfg.tol_third;
  rep.first.tolerance = cfg.tol_first;
  double sum3 = 0.0, sum1 = 0.0;
  int n = 0;
  for (const auto& x : points) {
    PointRecord rec;
    rec.point = x;
    try {
      if (!p.contains(x)) throw DomainError("point outside the domain");
      const TensorSample s = sample_tensors(p, x, true, cfg.degeneracy);
      rec.third = residual_third_parallel(s);
      rec.first = residual_first_parallel(s);
      rec.sources = s.sources;
      if (rec.first.normalized <= cfg.tol_first) {
        const Vec e = recover_unit(s);
        rec.unit = e;
        rec.center = Vec(x - e);
        rec.nu = s.gradient.dot(e);
      }
      rec.evaluated = true;
    } catch (const DomainError& e) {
      rec.error = e.what();
      ++rep.skipped;
    }
    if (rec.evaluated) {
      rep.third.max = std::max(rep.third.max, rec.third.normalized);
      rep.first.max = std::max(rep.first.max, rec.first.normalized);
      sum3 += rec.third.normalized;
      sum1 += rec.first.normalized;
      ++n;
    }
    rep.points.push_back(std::move(rec));
  }
  if (n > 0) {
    rep.third.mean = sum3 / n;
    rep.first.mean = sum1 / n;
  }
  rep.third.pass = n > 0 && rep.third.max <= cfg.tol_third;
  rep.first.pass = n > 0 && rep.first.max <= cfg.tol_first;
  return rep;
}

}  // namespace jhess
