#include "msys/system.hpp"

#include "msys/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace msys {

namespace {

std::string shape_str(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

std::string dims_str(Index r, Index c) { return std::to_string(r) + "x" + std::to_string(c); }

void check_list(const std::vector<ComplexMatrix>& list, char name, std::size_t n_params,
                Index rows, Index cols) {
  if (list.size() != n_params) {
    throw ShapeError(std::string("list ") + name + " has length " + std::to_string(list.size()) +
                     ", expected n_params = " + std::to_string(n_params));
  }
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string label = std::string(1, static_cast<char>(std::toupper(name))) + "_" +
                              std::to_string(k + 1);
    if (list[k].rows() != rows || list[k].cols() != cols) {
      throw ShapeError("block " + label + " is " + shape_str(list[k]) + ", expected " +
                       dims_str(rows, cols));
    }
    require_finite(list[k], "block " + label);
  }
}

void check_point(const MultiSystem& s, const ComplexVector& z) {
  if (static_cast<std::size_t>(z.size()) != s.n_params) {
    throw ShapeError("point has " + std::to_string(z.size()) + " coordinates, system has " +
                     std::to_string(s.n_params) + " parameters");
  }
}

MultiIndex unit_index(std::size_t n, std::size_t k) {
  MultiIndex t(n, 0);
  t[k] = 1;
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// MultiSystem

MultiSystem MultiSystem::zero(std::size_t n_params, Index dim_x, Index dim_u, Index dim_y) {
  MultiSystem s;
  s.n_params = n_params;
  s.dim_x = dim_x;
  s.dim_u = dim_u;
  s.dim_y = dim_y;
  s.a.assign(n_params, ComplexMatrix::Zero(dim_x, dim_x));
  s.b.assign(n_params, ComplexMatrix::Zero(dim_x, dim_u));
  s.c.assign(n_params, ComplexMatrix::Zero(dim_y, dim_x));
  s.d.assign(n_params, ComplexMatrix::Zero(dim_y, dim_u));
  return s;
}

ComplexMatrix MultiSystem::block(std::size_t k) const {
  ComplexMatrix g(dim_x + dim_y, dim_x + dim_u);
  g.topLeftCorner(dim_x, dim_x) = a[k];
  g.topRightCorner(dim_x, dim_u) = b[k];
  g.bottomLeftCorner(dim_y, dim_x) = c[k];
  g.bottomRightCorner(dim_y, dim_u) = d[k];
  return g;
}

void MultiSystem::set_block(std::size_t k, const ComplexMatrix& g) {
  a[k] = g.topLeftCorner(dim_x, dim_x);
  b[k] = g.topRightCorner(dim_x, dim_u);
  c[k] = g.bottomLeftCorner(dim_y, dim_x);
  d[k] = g.bottomRightCorner(dim_y, dim_u);
}

void validate(const MultiSystem& s) {
  if (s.n_params < 1) throw ShapeError("n_params must be at least 1");
  if (s.dim_x < 0 || s.dim_u < 0 || s.dim_y < 0) throw ShapeError("negative dimension");
  check_list(s.a, 'a', s.n_params, s.dim_x, s.dim_x);
  check_list(s.b, 'b', s.n_params, s.dim_x, s.dim_u);
  check_list(s.c, 'c', s.n_params, s.dim_y, s.dim_x);
  check_list(s.d, 'd', s.n_params, s.dim_y, s.dim_u);
}

ComplexMatrix linear_combination(const std::vector<ComplexMatrix>& mats, const ComplexVector& z) {
  ComplexMatrix out = ComplexMatrix::Zero(mats.front().rows(), mats.front().cols());
  for (std::size_t k = 0; k < mats.size(); ++k) out += z(static_cast<Index>(k)) * mats[k];
  return out;
}

ComplexMatrix pencil(const MultiSystem& s, const ComplexVector& z) {
  check_point(s, z);
  ComplexMatrix g = ComplexMatrix::Zero(s.dim_x + s.dim_y, s.dim_x + s.dim_u);
  for (std::size_t k = 0; k < s.n_params; ++k) g += z(static_cast<Index>(k)) * s.block(k);
  return g;
}

ComplexMatrix transfer_eval(const MultiSystem& s, const ComplexVector& z) {
  check_point(s, z);
  ComplexMatrix out = linear_combination(s.d, z);
  if (s.dim_x == 0) return out;
  const ComplexMatrix resolvent =
      ComplexMatrix::Identity(s.dim_x, s.dim_x) - linear_combination(s.a, z);
  Eigen::JacobiSVD<ComplexMatrix> svd(resolvent);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  const double cond = smin > 0.0 ? sv(0) / smin : INFINITY;
  if (!(cond <= kMaxResolventCondition)) {
    throw NumericalError("I - zA is near-singular (condition estimate " + std::to_string(cond) +
                         ")");
  }
  const ComplexMatrix zb = linear_combination(s.b, z);
  out += linear_combination(s.c, z) * resolvent.partialPivLu().solve(zb);
  return out;
}

MultiSystem adjoint_system(const MultiSystem& s) {
  MultiSystem t = MultiSystem::zero(s.n_params, s.dim_x, s.dim_y, s.dim_u);
  for (std::size_t k = 0; k < s.n_params; ++k) {
    t.a[k] = s.a[k].adjoint();
    t.b[k] = s.c[k].adjoint();
    t.c[k] = s.b[k].adjoint();
    t.d[k] = s.d[k].adjoint();
  }
  return t;
}

MultiSystem scale_transfer(const MultiSystem& s, Complex factor) {
  MultiSystem t = s;
  for (std::size_t k = 0; k < s.n_params; ++k) {
    t.c[k] *= factor;
    t.d[k] *= factor;
  }
  return t;
}

// ---------------------------------------------------------------------------
// PolyGerm

unsigned total_degree(const MultiIndex& t) {
  unsigned sum = 0;
  for (auto v : t) sum += v;
  return sum;
}

PolyGerm::PolyGerm(std::size_t n_params, Index dim_u, Index dim_y)
    : n_params_(n_params), dim_u_(dim_u), dim_y_(dim_y) {
  if (n_params < 1) throw ShapeError("germ needs at least one parameter");
}

void PolyGerm::check_index(const MultiIndex& t) const {
  if (t.size() != n_params_) {
    throw ShapeError("multi-index of length " + std::to_string(t.size()) + " for a germ in " +
                     std::to_string(n_params_) + " variables");
  }
}

void PolyGerm::set(const MultiIndex& t, const ComplexMatrix& m, double drop_tol) {
  check_index(t);
  if (m.rows() != dim_y_ || m.cols() != dim_u_) {
    throw ShapeError("germ coefficient is " + shape_str(m) + ", expected " +
                     dims_str(dim_y_, dim_u_));
  }
  require_finite(m, "germ coefficient");
  if (m.size() == 0 || m.norm() <= drop_tol) {
    coeffs_.erase(t);
  } else {
    coeffs_[t] = m;
  }
}

void PolyGerm::add(const MultiIndex& t, const ComplexMatrix& m) {
  set(t, coefficient(t) + m);
}

ComplexMatrix PolyGerm::coefficient(const MultiIndex& t) const {
  check_index(t);
  auto it = coeffs_.find(t);
  if (it == coeffs_.end()) return ComplexMatrix::Zero(dim_y_, dim_u_);
  return it->second;
}

std::optional<unsigned> PolyGerm::min_degree() const {
  std::optional<unsigned> best;
  for (const auto& [t, m] : coeffs_) {
    const unsigned deg = total_degree(t);
    if (!best || deg < *best) best = deg;
  }
  return best;
}

std::optional<unsigned> PolyGerm::max_degree() const {
  std::optional<unsigned> best;
  for (const auto& [t, m] : coeffs_) {
    const unsigned deg = total_degree(t);
    if (!best || deg > *best) best = deg;
  }
  return best;
}

PolyGerm PolyGerm::homogeneous_part(unsigned degree) const {
  PolyGerm out(n_params_, dim_u_, dim_y_);
  for (const auto& [t, m] : coeffs_) {
    if (total_degree(t) == degree) out.coeffs_.emplace(t, m);
  }
  return out;
}

ComplexMatrix PolyGerm::eval(const ComplexVector& z) const {
  if (static_cast<std::size_t>(z.size()) != n_params_) {
    throw ShapeError("germ evaluated at a point with " + std::to_string(z.size()) +
                     " coordinates, expected " + std::to_string(n_params_));
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_y_, dim_u_);
  for (const auto& [t, m] : coeffs_) {
    Complex mono = 1.0;
    for (std::size_t k = 0; k < n_params_; ++k) {
      for (std::uint32_t p = 0; p < t[k]; ++p) mono *= z(static_cast<Index>(k));
    }
    out += mono * m;
  }
  return out;
}

double germ_distance(const PolyGerm& a, const PolyGerm& b) {
  if (a.n_params() != b.n_params() || a.dim_u() != b.dim_u() || a.dim_y() != b.dim_y()) {
    throw ShapeError("germ_distance: germs of different shapes");
  }
  double worst = 0.0;
  for (const auto& [t, m] : a.coefficients()) {
    worst = std::max(worst, (m - b.coefficient(t)).norm());
  }
  for (const auto& [t, m] : b.coefficients()) {
    if (!a.coefficients().contains(t)) worst = std::max(worst, m.norm());
  }
  return worst;
}

PolyGerm taylor_coefficients(const MultiSystem& s, unsigned max_total_degree) {
  validate(s);
  if (max_total_degree < 1) throw PreconditionError("max_total_degree must be at least 1");
  const std::size_t n = s.n_params;
  PolyGerm germ(n, s.dim_u, s.dim_y);
  for (std::size_t k = 0; k < n; ++k) germ.set(unit_index(n, k), s.d[k], kCoefficientDropTol);

  // tails[t] = sum over words with abelianisation t of A_{w1} ... A_{w_{l-1}} B_{w_l}
  std::map<MultiIndex, ComplexMatrix> tails;
  for (std::size_t k = 0; k < n; ++k) tails.emplace(unit_index(n, k), s.b[k]);

  std::map<MultiIndex, ComplexMatrix> coeffs;
  for (unsigned degree = 2; degree <= max_total_degree; ++degree) {
    coeffs.clear();
    std::map<MultiIndex, ComplexMatrix> next;
    const bool need_next = degree < max_total_degree;
    for (const auto& [t, tail] : tails) {
      for (std::size_t k = 0; k < n; ++k) {
        MultiIndex up = t;
        ++up[k];
        auto [it, fresh] = coeffs.try_emplace(up, s.c[k] * tail);
        if (!fresh) it->second += s.c[k] * tail;
        if (need_next) {
          auto [jt, fresh2] = next.try_emplace(up, s.a[k] * tail);
          if (!fresh2) jt->second += s.a[k] * tail;
        }
      }
    }
    for (const auto& [t, m] : coeffs) germ.set(t, m, kCoefficientDropTol);
    tails = std::move(next);
  }
  return germ;
}

// ---------------------------------------------------------------------------
// Conservativity

ConservativityReport is_conservative(const MultiSystem& s, double tol) {
  validate(s);
  ConservativityReport report;
  report.tol = tol;
  const std::size_t n = s.n_params;
  std::vector<ComplexMatrix> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = s.block(k);

  const Index in_dim = s.dim_x + s.dim_u;
  const Index out_dim = s.dim_x + s.dim_y;
  ComplexMatrix iso = -ComplexMatrix::Identity(in_dim, in_dim);
  ComplexMatrix coiso = -ComplexMatrix::Identity(out_dim, out_dim);
  for (std::size_t k = 0; k < n; ++k) {
    iso += g[k].adjoint() * g[k];
    coiso += g[k] * g[k].adjoint();
  }
  double iso_res = op_norm(iso);
  double coiso_res = op_norm(coiso);
  double worst_cross = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> worst_pair;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (j == k) continue;
      const double r1 = op_norm(g[j].adjoint() * g[k]);
      const double r2 = op_norm(g[j] * g[k].adjoint());
      iso_res = std::max(iso_res, r1);
      coiso_res = std::max(coiso_res, r2);
      if (std::max(r1, r2) > worst_cross) {
        worst_cross = std::max(r1, r2);
        worst_pair = std::make_pair(j, k);
      }
    }
  }
  report.is_isometric_family = iso_res <= tol;
  report.is_coisometric_family = coiso_res <= tol;
  report.worst_residual = std::max(iso_res, coiso_res);
  if (worst_pair && worst_cross > tol && worst_cross >= report.worst_residual) {
    report.failing_pair = worst_pair;
  }
  return report;
}

ComplexVector torus_point(std::size_t n_params, std::size_t i) {
  // Generalised golden ratio: the root of x^(N+1) = x + 1.
  double phi = 2.0;
  for (int it = 0; it < 60; ++it) {
    const double f = std::pow(phi, static_cast<double>(n_params + 1)) - phi - 1.0;
    const double df = static_cast<double>(n_params + 1) * std::pow(phi, static_cast<double>(n_params)) - 1.0;
    phi -= f / df;
  }
  ComplexVector z(static_cast<Index>(n_params));
  for (std::size_t k = 0; k < n_params; ++k) {
    const double alpha = std::pow(1.0 / phi, static_cast<double>(k + 1));
    double frac = 0.5 + alpha * static_cast<double>(i + 1);
    frac -= std::floor(frac);
    z(static_cast<Index>(k)) = std::polar(1.0, 2.0 * std::numbers::pi * frac);
  }
  return z;
}

DissipativityVerdict is_dissipative_sampled(const MultiSystem& s, std::size_t n_samples,
                                            double tol) {
  validate(s);
  DissipativityVerdict verdict;
  verdict.n_samples = n_samples;
  verdict.tol = tol;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const ComplexVector zeta = torus_point(s.n_params, i);
    const double norm = op_norm(pencil(s, zeta));
    if (norm > verdict.max_norm) {
      verdict.max_norm = norm;
      if (norm > 1.0 + tol) verdict.witness = zeta;
    }
  }
  verdict.passed = !verdict.witness.has_value();
  return verdict;
}

// ---------------------------------------------------------------------------
// Closely connected part, unitary part

Subspace closely_connected_subspace(const MultiSystem& s, double tol) {
  validate(s);
  const std::size_t n = s.n_params;
  ComplexMatrix seeds(s.dim_x, static_cast<Index>(n) * (s.dim_u + s.dim_y));
  Index col = 0;
  for (std::size_t k = 0; k < n; ++k) {
    seeds.middleCols(col, s.dim_u) = s.b[k];
    col += s.dim_u;
    seeds.middleCols(col, s.dim_y) = s.c[k].adjoint();
    col += s.dim_y;
  }
  Subspace current = orthonormal_basis(seeds, tol);
  for (Index step = 0; step <= s.dim_x; ++step) {
    if (current.is_whole() || current.is_zero()) break;
    const Index r = current.dim();
    ComplexMatrix grown(s.dim_x, r * static_cast<Index>(2 * n + 1));
    grown.leftCols(r) = current.basis();
    for (std::size_t k = 0; k < n; ++k) {
      grown.middleCols(r * static_cast<Index>(2 * k + 1), r) = s.a[k] * current.basis();
      grown.middleCols(r * static_cast<Index>(2 * k + 2), r) = s.a[k].adjoint() * current.basis();
    }
    Subspace next = orthonormal_basis(grown, tol);
    if (next.dim() == r) break;
    current = std::move(next);
  }
  return current;
}

bool is_closely_connected(const MultiSystem& s, double tol) {
  return closely_connected_subspace(s, tol).dim() == s.dim_x;
}

CcRestriction restrict_to_cc_with_basis(const MultiSystem& s, double tol) {
  const ConservativityReport report = is_conservative(s, tol);
  if (!report.conservative()) {
    throw PreconditionError("restrict_to_cc: system is not conservative (residual " +
                            std::to_string(report.worst_residual) + ")");
  }
  Subspace cc = closely_connected_subspace(s);
  const ComplexMatrix& q = cc.basis();
  MultiSystem out = MultiSystem::zero(s.n_params, cc.dim(), s.dim_u, s.dim_y);
  for (std::size_t k = 0; k < s.n_params; ++k) {
    out.a[k] = q.adjoint() * s.a[k] * q;
    out.b[k] = q.adjoint() * s.b[k];
    out.c[k] = s.c[k] * q;
    out.d[k] = s.d[k];
  }
  return {std::move(out), std::move(cc)};
}

MultiSystem restrict_to_cc(const MultiSystem& s, double tol) {
  return restrict_to_cc_with_basis(s, tol).system;
}

Subspace unitary_part(const MultiSystem& s, double tol) {
  validate(s);
  const std::size_t n = s.n_params;
  const Index dx = s.dim_x;
  const ComplexMatrix id = ComplexMatrix::Identity(dx, dx);
  ComplexMatrix defect_iso = id;
  ComplexMatrix defect_coiso = id;
  for (std::size_t k = 0; k < n; ++k) {
    defect_iso -= s.a[k].adjoint() * s.a[k];
    defect_coiso -= s.a[k] * s.a[k].adjoint();
  }
  // Fixed operators whose kernels must contain the unitary part.
  std::vector<ComplexMatrix> conditions{defect_iso, defect_coiso};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (j == k) continue;
      conditions.push_back(s.a[j].adjoint() * s.a[k]);
      conditions.push_back(s.a[j] * s.a[k].adjoint());
    }
  }

  Subspace m = Subspace::whole(dx);
  for (Index step = 0; step <= dx + 1 && !m.is_zero(); ++step) {
    const ComplexMatrix& q = m.basis();
    const ComplexMatrix leave = id - m.projector();
    const Index r = m.dim();
    const Index blocks = static_cast<Index>(conditions.size() + 2 * n);
    ComplexMatrix stacked(dx * blocks, r);
    Index row = 0;
    for (const auto& cond : conditions) {
      stacked.middleRows(row, dx) = cond * q;
      row += dx;
    }
    for (std::size_t k = 0; k < n; ++k) {
      stacked.middleRows(row, dx) = leave * s.a[k] * q;
      row += dx;
      stacked.middleRows(row, dx) = leave * s.a[k].adjoint() * q;
      row += dx;
    }
    const ComplexMatrix kernel = null_space(stacked, tol);
    if (kernel.cols() == r) break;
    m = orthonormal_basis(q * kernel, tol);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Constructors

namespace {

// Random orthogonal resolution of the identity on C^n into `parts` projectors.
std::vector<ComplexMatrix> random_resolution(Index n, std::size_t parts, Rng& rng) {
  const ComplexMatrix v = haar_unitary(n, rng);
  std::vector<Index> sizes(parts, 0);
  Index remaining = n;
  if (n >= static_cast<Index>(parts)) {
    for (auto& size : sizes) size = 1;
    remaining -= static_cast<Index>(parts);
  }
  std::uniform_int_distribution<std::size_t> pick(0, parts - 1);
  for (Index i = 0; i < remaining; ++i) ++sizes[pick(rng)];
  std::vector<ComplexMatrix> out;
  Index offset = 0;
  for (auto size : sizes) {
    const ComplexMatrix cols = v.middleCols(offset, size);
    out.push_back(cols * cols.adjoint());
    offset += size;
  }
  return out;
}

ComplexMatrix block_diag(const ComplexMatrix& p, const ComplexMatrix& q) {
  ComplexMatrix out = ComplexMatrix::Zero(p.rows() + q.rows(), p.cols() + q.cols());
  out.topLeftCorner(p.rows(), p.cols()) = p;
  out.bottomRightCorner(q.rows(), q.cols()) = q;
  return out;
}

}  // namespace

MultiSystem random_conservative(std::size_t n_params, Index dim_x, Index dim_u, Index dim_y,
                                std::uint64_t seed, ConservativeOptions options) {
  if (n_params < 1) throw ShapeError("n_params must be at least 1");
  if (dim_x < 0 || dim_u < 0 || dim_y < 0) throw ShapeError("negative dimension");
  if (dim_u != dim_y) {
    throw ShapeError("random_conservative needs dim_u == dim_y (got " + std::to_string(dim_u) +
                     " and " + std::to_string(dim_y) + ")");
  }
  Rng rng(seed);
  MultiSystem s = MultiSystem::zero(n_params, dim_x, dim_u, dim_y);
  ComplexMatrix w;
  std::vector<ComplexMatrix> projectors;
  if (!options.zero_feedthrough) {
    w = haar_unitary(dim_x + dim_u, rng);
    projectors = random_resolution(dim_x + dim_y, n_params, rng);
  } else {
    if (dim_x < dim_u) {
      throw ShapeError("zero feedthrough needs dim_x >= dim_u (got " + std::to_string(dim_x) +
                       " < " + std::to_string(dim_u) + ")");
    }
    // U goes isometrically into X; X goes onto the rest of X plus all of Y.
    const ComplexMatrix q = haar_unitary(dim_x, rng);
    const ComplexMatrix z = haar_unitary(dim_x, rng);
    w = ComplexMatrix::Zero(dim_x + dim_y, dim_x + dim_u);
    w.topRightCorner(dim_x, dim_u) = q.leftCols(dim_u);
    ComplexMatrix range = ComplexMatrix::Zero(dim_x + dim_y, dim_x);
    range.topLeftCorner(dim_x, dim_x - dim_u) = q.rightCols(dim_x - dim_u);
    range.bottomRightCorner(dim_y, dim_y) = ComplexMatrix::Identity(dim_y, dim_y);
    w.leftCols(dim_x) = range * z;
    const auto px = random_resolution(dim_x, n_params, rng);
    const auto py = random_resolution(dim_y, n_params, rng);
    for (std::size_t k = 0; k < n_params; ++k) projectors.push_back(block_diag(px[k], py[k]));
  }
  for (std::size_t k = 0; k < n_params; ++k) s.set_block(k, projectors[k] * w);
  return s;
}

MultiSystem realize_germ(const PolyGerm& g) {
  const std::size_t n = g.n_params();
  for (const auto& [t, m] : g.coefficients()) {
    if (total_degree(t) == 0) {
      throw PreconditionError("realize_germ: germ has a constant term");
    }
  }
  const unsigned top = g.max_degree().value_or(1);
  const Index du = g.dim_u();

  // Words of length 1 .. top-1, ordered by length then lexicographically.
  std::vector<Index> level_offset(top + 1, 0);
  Index n_words = 0;
  Index level_size = 1;
  for (unsigned len = 1; len < top; ++len) {
    level_size *= static_cast<Index>(n);
    level_offset[len] = n_words;
    n_words += level_size;
  }
  MultiSystem s = MultiSystem::zero(n, n_words * du, du, g.dim_y());
  for (std::size_t k = 0; k < n; ++k) s.d[k] = g.coefficient(unit_index(n, k));
  if (top < 2) return s;

  const ComplexMatrix id = ComplexMatrix::Identity(du, du);
  auto block_of = [&](unsigned len, Index rank) { return (level_offset[len] + rank) * du; };

  for (std::size_t k = 0; k < n; ++k) {
    s.b[k].middleRows(block_of(1, static_cast<Index>(k)), du) = id;
  }

  Index power = 1;  // n^len
  for (unsigned len = 1; len < top; ++len) {
    power *= static_cast<Index>(n);
    for (Index rank = 0; rank < power; ++rank) {
      // Decode the word (most significant letter first).
      MultiIndex abel(n, 0);
      Index code = rank;
      for (unsigned p = 0; p < len; ++p) {
        ++abel[static_cast<std::size_t>(code % static_cast<Index>(n))];
        code /= static_cast<Index>(n);
      }
      for (std::size_t k = 0; k < n; ++k) {
        const Index prefixed = static_cast<Index>(k) * power + rank;
        if (len + 1 < top) {
          s.a[k].block(block_of(len + 1, prefixed), block_of(len, rank), du, du) = id;
        }
        MultiIndex t = abel;
        ++t[k];
        const unsigned deg = len + 1;
        double share = 1.0;  // t! / |t|!
        for (unsigned i = 2; i <= deg; ++i) share /= static_cast<double>(i);
        for (auto tk : t) {
          for (unsigned i = 2; i <= tk; ++i) share *= static_cast<double>(i);
        }
        s.c[k].middleCols(block_of(len, rank), du) = share * g.coefficient(t);
      }
    }
  }
  return s;
}

}  // namespace msys
