#include "jhess/algebra.hpp"

#include "jhess/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace jhess {

// ---------------------------------------------------------------------------
// Family

bool Family::euclidean() const {
  switch (kind) {
    case Kind::raw:
      return false;
    case Kind::direct_sum:
      return !factors.empty() &&
             std::all_of(factors.begin(), factors.end(), [](const Family& f) { return f.euclidean(); });
    default:
      return true;
  }
}

std::string Family::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::raw:
      os << "raw";
      break;
    case Kind::componentwise:
      os << "componentwise(" << n << ")";
      break;
    case Kind::spin:
      os << "spin(" << n << ")";
      break;
    case Kind::sym:
      os << "sym(" << n << ")";
      break;
    case Kind::direct_sum:
      for (std::size_t i = 0; i < factors.size(); ++i) os << (i ? " + " : "") << factors[i].describe();
      break;
  }
  return os.str();
}

int sym_dim(int n) { return n * (n + 1) / 2; }

// ---------------------------------------------------------------------------
// JordanAlgebra

JordanAlgebra::JordanAlgebra(int dim, std::vector<double> structure, Family family)
    : dim_(dim), c_(std::move(structure)), family_(std::move(family)) {
  if (dim < 1) throw InputError("algebra dimension must be positive");
  if (c_.size() != static_cast<std::size_t>(dim) * dim * dim)
    throw InputError("structure constants must have dim^3 entries");
  double cmax = 0.0;
  for (double v : c_) {
    if (!std::isfinite(v)) throw InputError("structure constants must be finite");
    cmax = std::max(cmax, std::abs(v));
  }
  for (int g = 0; g < dim_; ++g)
    for (int a = 0; a < dim_; ++a)
      for (int b = a + 1; b < dim_; ++b)
        if (std::abs(this->structure(g, a, b) - this->structure(g, b, a)) > 1e-10 * std::max(1.0, cmax))
          throw InputError("structure constants must be symmetric in the lower indices (commutative product)");
  trace_ = Vec::Zero(dim_);
  for (int a = 0; a < dim_; ++a)
    for (int g = 0; g < dim_; ++g) trace_(a) += this->structure(g, a, g);
}

JordanAlgebra JordanAlgebra::componentwise(int n) {
  if (n < 1) throw InputError("componentwise(n) requires n >= 1");
  std::vector<double> c(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i) c[(static_cast<std::size_t>(i) * n + i) * n + i] = 1.0;
  Family f;
  f.kind = Family::Kind::componentwise;
  f.n = n;
  return JordanAlgebra(n, std::move(c), f);
}

JordanAlgebra JordanAlgebra::spin(int n) {
  if (n < 2) throw InputError("spin(n) requires n >= 2");
  std::vector<double> c(static_cast<std::size_t>(n) * n * n, 0.0);
  auto at = [&](int g, int a, int b) -> double& { return c[(static_cast<std::size_t>(g) * n + a) * n + b]; };
  at(0, 0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    at(0, i, i) = 1.0;
    at(i, 0, i) = 1.0;
    at(i, i, 0) = 1.0;
  }
  Family f;
  f.kind = Family::Kind::spin;
  f.n = n;
  return JordanAlgebra(n, std::move(c), f);
}

Vec sym_coordinates(const Mat& m) {
  if (m.rows() != m.cols()) throw InputError("sym: matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw InputError("sym: matrix is not symmetric");
  const int n = static_cast<int>(m.rows());
  Vec x(sym_dim(n));
  int k = 0;
  for (int i = 0; i < n; ++i) x(k++) = m(i, i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) x(k++) = std::sqrt(2.0) * 0.5 * (m(i, j) + m(j, i));
  return x;
}

Mat sym_matrix(const Vec& x, int n) {
  if (x.size() != sym_dim(n)) throw InputError("sym: coordinate vector has wrong length");
  Mat m = Mat::Zero(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) m(i, i) = x(k++);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = m(j, i) = x(k) / std::sqrt(2.0);
      ++k;
    }
  return m;
}

JordanAlgebra JordanAlgebra::sym(int n) {
  if (n < 1) throw InputError("sym(n) requires n >= 1");
  const int d = sym_dim(n);
  std::vector<Mat> b;
  b.reserve(d);
  for (int k = 0; k < d; ++k) b.push_back(sym_matrix(Vec::Unit(d, k), n));
  std::vector<double> c(static_cast<std::size_t>(d) * d * d, 0.0);
  for (int a = 0; a < d; ++a)
    for (int bb = 0; bb < d; ++bb) {
      Mat prod = 0.5 * (b[a] * b[bb] + b[bb] * b[a]);
      Vec coords = sym_coordinates(0.5 * (prod + prod.transpose()));
      for (int g = 0; g < d; ++g) c[(static_cast<std::size_t>(g) * d + a) * d + bb] = coords(g);
    }
  Family f;
  f.kind = Family::Kind::sym;
  f.n = n;
  return JordanAlgebra(d, std::move(c), f);
}

Tensor JordanAlgebra::structure_tensor() const {
  Tensor t(dim_, 3);
  std::copy(c_.begin(), c_.end(), t.data());
  return t;
}

void JordanAlgebra::check_dim(const Vec& u, const char* what) const {
  if (u.size() != dim_) {
    std::ostringstream os;
    os << what << ": expected vector of dimension " << dim_ << ", got " << u.size();
    throw InputError(os.str());
  }
}

Vec JordanAlgebra::multiply(const Vec& u, const Vec& v) const {
  check_dim(u, "multiply");
  check_dim(v, "multiply");
  return left_mult(u) * v;
}

Mat JordanAlgebra::left_mult(const Vec& u) const {
  check_dim(u, "left_mult");
  Mat l = Mat::Zero(dim_, dim_);
  for (int g = 0; g < dim_; ++g)
    for (int a = 0; a < dim_; ++a) {
      if (u(a) == 0.0) continue;
      const double* row = &c_[(static_cast<std::size_t>(g) * dim_ + a) * dim_];
      for (int b = 0; b < dim_; ++b) l(g, b) += row[b] * u(a);
    }
  return l;
}

Vec JordanAlgebra::power(const Vec& u, int k) const {
  check_dim(u, "power");
  if (k < 0) throw InputError("power: exponent must be nonnegative");
  if (k == 0) {
    auto e = find_unit(*this);
    if (!e) throw InputError("power: u^0 requires a unital algebra");
    return *e;
  }
  Mat l = left_mult(u);
  Vec p = u;
  for (int i = 1; i < k; ++i) p = l * p;
  return p;
}

double JordanAlgebra::trace(const Vec& u) const {
  check_dim(u, "trace");
  return trace_.dot(u);
}

Vec JordanAlgebra::basis(int i) const { return Vec::Unit(dim_, i); }

// ---------------------------------------------------------------------------
// BilinearForm / MetrisedAlgebra

BilinearForm::BilinearForm(Mat matrix) : m_(std::move(matrix)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) throw InputError("bilinear form must be a nonempty square matrix");
  if (!m_.allFinite()) throw InputError("bilinear form must be finite");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw InputError("bilinear form is not symmetric");
  m_ = 0.5 * (m_ + m_.transpose());
}

bool BilinearForm::degenerate() const {
  const double norm = m_.cwiseAbs().maxCoeff();
  if (norm == 0.0) return true;
  return std::abs(m_.determinant()) < 1e-12 * std::pow(norm, dim());
}

MetrisedAlgebra::MetrisedAlgebra(JordanAlgebra algebra, BilinearForm form, std::vector<double> weights)
    : algebra_(std::move(algebra)), form_(std::move(form)), weights_(std::move(weights)) {
  if (form_.dim() != algebra_.dim()) throw InputError("form and algebra dimensions differ");
  if (form_.degenerate()) throw InputError("degenerate form");
}

MetrisedAlgebra MetrisedAlgebra::checked(JordanAlgebra algebra, BilinearForm form, double tol) {
  MetrisedAlgebra m(std::move(algebra), std::move(form));
  const double res = m.dim() <= 8 ? invariance_residual_exhaustive(m.algebra(), m.form())
                                  : invariance_residual(m.algebra(), m.form(), {256, 0});
  const double scale = 1.0 + m.form().matrix().cwiseAbs().maxCoeff() * m.algebra().structure_tensor().max_abs();
  if (res > tol * scale) throw InputError("form is not invariant (residual " + std::to_string(res) + ")");
  return m;
}

// ---------------------------------------------------------------------------
// Identity residuals

double commutativity_residual(const JordanAlgebra& a) {
  double r = 0.0;
  const int d = a.dim();
  for (int g = 0; g < d; ++g)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) r = std::max(r, std::abs(a.structure(g, i, j) - a.structure(g, j, i)));
  return r;
}

namespace {

// u•(u²•v) − u²•(u•v)
Vec jordan_defect(const JordanAlgebra& a, const Vec& u, const Vec& v) {
  const Vec u2 = a.multiply(u, u);
  return a.multiply(u, a.multiply(u2, v)) - a.multiply(u2, a.multiply(u, v));
}

// K(K(K(u,u),v),u) − K(K(u,v),K(u,u))
Vec integrability_defect(const JordanAlgebra& a, const Vec& u, const Vec& v) {
  const Vec uu = a.multiply(u, u);
  return a.multiply(a.multiply(uu, v), u) - a.multiply(a.multiply(u, v), uu);
}

// Linearizations in u of the two cubic identities above.
Vec jordan_defect_linear(const JordanAlgebra& a, const Vec& u1, const Vec& u2, const Vec& u3, const Vec& v) {
  const std::array<const Vec*, 3> u{&u1, &u2, &u3};
  std::array<int, 3> p{0, 1, 2};
  Vec sum = Vec::Zero(a.dim());
  do {
    const Vec& x = *u[p[0]];
    const Vec yz = a.multiply(*u[p[1]], *u[p[2]]);
    sum += a.multiply(x, a.multiply(yz, v)) - a.multiply(yz, a.multiply(x, v));
  } while (std::next_permutation(p.begin(), p.end()));
  return sum;
}

Vec integrability_defect_linear(const JordanAlgebra& a, const Vec& u1, const Vec& u2, const Vec& u3, const Vec& v) {
  const std::array<const Vec*, 3> u{&u1, &u2, &u3};
  std::array<int, 3> p{0, 1, 2};
  Vec sum = Vec::Zero(a.dim());
  do {
    const Vec xy = a.multiply(*u[p[0]], *u[p[1]]);
    const Vec& z = *u[p[2]];
    sum += a.multiply(a.multiply(xy, v), z) - a.multiply(a.multiply(z, v), xy);
  } while (std::next_permutation(p.begin(), p.end()));
  return sum;
}

template <typename Defect>
double sampled_max(const JordanAlgebra& a, Sampling s, Defect defect) {
  if (s.samples < 1) throw InputError("samples must be >= 1");
  Rng rng(s.seed);
  double r = 0.0;
  for (int i = 0; i < s.samples; ++i) {
    const Vec u = random_unit(rng, a.dim());
    const Vec v = random_unit(rng, a.dim());
    r = std::max(r, defect(a, u, v).norm());
  }
  return r;
}

template <typename Defect>
double exhaustive_max(const JordanAlgebra& a, Defect defect) {
  const int d = a.dim();
  double r = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      for (int k = j; k < d; ++k)
        for (int l = 0; l < d; ++l)
          r = std::max(r, defect(a, a.basis(i), a.basis(j), a.basis(k), a.basis(l)).norm());
  return r;
}

}  // namespace

double jordan_residual(const JordanAlgebra& a, Sampling s) { return sampled_max(a, s, jordan_defect); }

double jordan_residual_exhaustive(const JordanAlgebra& a) { return exhaustive_max(a, jordan_defect_linear); }

double integrability_residual(const JordanAlgebra& a, Sampling s) {
  return sampled_max(a, s, integrability_defect);
}

double integrability_residual_exhaustive(const JordanAlgebra& a) {
  return exhaustive_max(a, integrability_defect_linear);
}

double invariance_residual(const JordanAlgebra& a, const BilinearForm& form, Sampling s) {
  if (form.dim() != a.dim()) throw InputError("invariance_residual: dimension mismatch");
  if (s.samples < 1) throw InputError("samples must be >= 1");
  Rng rng(s.seed);
  double r = 0.0;
  for (int i = 0; i < s.samples; ++i) {
    const Vec u = random_unit(rng, a.dim());
    const Vec v = random_unit(rng, a.dim());
    const Vec w = random_unit(rng, a.dim());
    r = std::max(r, std::abs(form(u, a.multiply(v, w)) - form(a.multiply(u, v), w)));
  }
  return r;
}

double invariance_residual_exhaustive(const JordanAlgebra& a, const BilinearForm& form) {
  if (form.dim() != a.dim()) throw InputError("invariance_residual: dimension mismatch");
  const int d = a.dim();
  double r = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        const Vec u = a.basis(i), v = a.basis(j), w = a.basis(k);
        r = std::max(r, std::abs(form(u, a.multiply(v, w)) - form(a.multiply(u, v), w)));
      }
  return r;
}

// ---------------------------------------------------------------------------
// Unit, trace form, direct sums

std::optional<Vec> find_unit(const JordanAlgebra& a) {
  const int d = a.dim();
  Mat sys(d * d, d);
  Vec rhs = Vec::Zero(d * d);
  for (int g = 0; g < d; ++g)
    for (int b = 0; b < d; ++b) {
      for (int al = 0; al < d; ++al) sys(g * d + b, al) = a.structure(g, al, b);
      rhs(g * d + b) = g == b ? 1.0 : 0.0;
    }
  Vec e = sys.completeOrthogonalDecomposition().solve(rhs);
  if ((sys * e - rhs).norm() > 1e-8 * d) return std::nullopt;
  return e;
}

BilinearForm trace_form(const JordanAlgebra& a) {
  const int d = a.dim();
  Mat t(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) t(i, j) = t(j, i) = a.trace(a.multiply(a.basis(i), a.basis(j)));
  return BilinearForm(t);
}

MetrisedAlgebra direct_sum(const std::vector<MetrisedAlgebra>& parts, const std::vector<double>& weights) {
  if (parts.empty()) throw InputError("direct_sum: no factors");
  if (weights.size() != parts.size()) throw InputError("direct_sum: one weight per factor required");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("direct_sum: weights must be positive");
  if (parts.size() == 1 && weights[0] == 1.0) return parts[0];

  int d = 0;
  for (const auto& p : parts) d += p.dim();
  std::vector<double> c(static_cast<std::size_t>(d) * d * d, 0.0);
  Mat form = Mat::Zero(d, d);
  Family fam;
  fam.kind = Family::Kind::direct_sum;
  int off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const JordanAlgebra& pa = parts[k].algebra();
    const int n = pa.dim();
    for (int g = 0; g < n; ++g)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          c[(static_cast<std::size_t>(off + g) * d + off + i) * d + off + j] = pa.structure(g, i, j);
    form.block(off, off, n, n) = weights[k] * parts[k].form().matrix();
    fam.factors.push_back(pa.family());
    fam.offsets.push_back(off);
    fam.dims.push_back(n);
    off += n;
  }
  return MetrisedAlgebra(JordanAlgebra(d, std::move(c), std::move(fam)), BilinearForm(form), weights);
}

std::vector<JordanAlgebra> declared_factors(const JordanAlgebra& a) {
  const Family& f = a.family();
  if (f.kind != Family::Kind::direct_sum) return {a};
  std::vector<JordanAlgebra> out;
  for (std::size_t k = 0; k < f.factors.size(); ++k) {
    const int off = f.offsets[k];
    const int n = f.dims[k];
    std::vector<double> c(static_cast<std::size_t>(n) * n * n);
    for (int g = 0; g < n; ++g)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c[(static_cast<std::size_t>(g) * n + i) * n + j] = a.structure(off + g, off + i, off + j);
    out.emplace_back(n, std::move(c), f.factors[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral calculus

namespace {

struct Piece {
  double lambda;
  Vec e;
};

void collect_pieces(const Family& f, const Vec& x, int offset, int full_dim, std::vector<Piece>& out) {
  auto embed = [&](const Vec& local) {
    Vec v = Vec::Zero(full_dim);
    v.segment(offset, local.size()) = local;
    return v;
  };
  switch (f.kind) {
    case Family::Kind::raw:
      throw UnsupportedError("spectral calculus requires a Euclidean family tag");
    case Family::Kind::componentwise:
      for (int i = 0; i < f.n; ++i) out.push_back({x(offset + i), Vec::Unit(full_dim, offset + i)});
      break;
    case Family::Kind::spin: {
      const double x0 = x(offset);
      const Vec xbar = x.segment(offset + 1, f.n - 1);
      const double r = xbar.norm();
      const Vec dir = r > 0.0 ? Vec(xbar / r) : Vec(Vec::Unit(f.n - 1, 0));
      Vec ep(f.n), em(f.n);
      ep << 0.5, 0.5 * dir;
      em << 0.5, -0.5 * dir;
      out.push_back({x0 + r, embed(ep)});
      out.push_back({x0 - r, embed(em)});
      break;
    }
    case Family::Kind::sym: {
      const Mat m = sym_matrix(x.segment(offset, sym_dim(f.n)), f.n);
      Eigen::SelfAdjointEigenSolver<Mat> es(m);
      if (es.info() != Eigen::Success) throw NumericalError("spectral: eigensolver failed");
      for (int i = 0; i < f.n; ++i) {
        const Vec q = es.eigenvectors().col(i);
        out.push_back({es.eigenvalues()(i), embed(sym_coordinates(q * q.transpose()))});
      }
      break;
    }
    case Family::Kind::direct_sum:
      for (std::size_t k = 0; k < f.factors.size(); ++k)
        collect_pieces(f.factors[k], x, offset + f.offsets[k], full_dim, out);
      break;
  }
}

}  // namespace

Vec SpectralDecomposition::reconstruct() const {
  if (idempotents.empty()) return Vec();
  Vec x = Vec::Zero(idempotents.front().size());
  for (std::size_t j = 0; j < idempotents.size(); ++j) x += eigenvalues[j] * idempotents[j];
  return x;
}

SpectralDecomposition spectral(const JordanAlgebra& a, const Vec& x) {
  if (x.size() != a.dim()) throw InputError("spectral: dimension mismatch");
  if (!a.family().euclidean()) throw UnsupportedError("spectral calculus requires a Euclidean family tag");
  std::vector<Piece> pieces;
  collect_pieces(a.family(), x, 0, a.dim(), pieces);
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& p, const Piece& q) { return p.lambda < q.lambda; });

  double scale = 0.0;
  for (const auto& p : pieces) scale = std::max(scale, std::abs(p.lambda));
  const double gap = 1e-8 * scale;

  SpectralDecomposition out;
  std::size_t i = 0;
  while (i < pieces.size()) {
    std::size_t j = i + 1;
    while (j < pieces.size() && pieces[j].lambda - pieces[j - 1].lambda <= gap) ++j;
    Vec e = Vec::Zero(a.dim());
    double lam = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      e += pieces[k].e;
      lam += pieces[k].lambda;
    }
    out.idempotents.push_back(e);
    out.eigenvalues.push_back(lam / static_cast<double>(j - i));
    out.multiplicities.push_back(a.trace(e));
    i = j;
  }
  return out;
}

double determinant(const JordanAlgebra& a, const Vec& x) {
  const auto sd = spectral(a, x);
  double log_abs = 0.0;
  double sign = 1.0;
  for (std::size_t j = 0; j < sd.eigenvalues.size(); ++j) {
    const double lam = sd.eigenvalues[j];
    const double d = sd.multiplicities[j];
    if (lam == 0.0) return 0.0;
    if (lam < 0.0) {
      const double rd = std::round(d);
      if (std::abs(d - rd) > 1e-9) throw DomainError("determinant: negative eigenvalue with fractional multiplicity");
      if (static_cast<long long>(rd) % 2 != 0) sign = -sign;
    }
    log_abs += d * std::log(std::abs(lam));
  }
  return sign * std::exp(log_abs);
}

double logdet(const JordanAlgebra& a, const Vec& x) {
  const auto sd = spectral(a, x);
  double s = 0.0;
  for (std::size_t j = 0; j < sd.eigenvalues.size(); ++j) {
    if (!(sd.eigenvalues[j] > 0.0)) throw DomainError("logdet: nonpositive eigenvalue");
    s += sd.multiplicities[j] * std::log(sd.eigenvalues[j]);
  }
  return s;
}

Vec inverse(const JordanAlgebra& a, const Vec& x) {
  const auto sd = spectral(a, x);
  Vec inv = Vec::Zero(a.dim());
  for (std::size_t j = 0; j < sd.eigenvalues.size(); ++j) {
    if (sd.eigenvalues[j] == 0.0) throw DomainError("inverse: zero eigenvalue");
    inv += sd.idempotents[j] / sd.eigenvalues[j];
  }
  return inv;
}

}  // namespace jhess
