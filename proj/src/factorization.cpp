#include "msys/factorization.hpp"

#include "msys/error.hpp"

#include <algorithm>
#include <string>

namespace msys {

// ---------------------------------------------------------------------------
// LinearFactorChain

LinearFactorChain::LinearFactorChain(std::size_t n_params,
                                     std::vector<std::vector<ComplexMatrix>> factors)
    : n_params_(n_params), factors_(std::move(factors)) {
  if (factors_.empty()) throw ShapeError("factor chain must have at least one factor");
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    const auto& f = factors_[j];
    if (f.size() != n_params_) {
      throw ShapeError("factor " + std::to_string(j + 1) + " has " + std::to_string(f.size()) +
                       " components, expected " + std::to_string(n_params_));
    }
    for (const auto& m : f) {
      if (m.rows() != f.front().rows() || m.cols() != f.front().cols()) {
        throw ShapeError("factor " + std::to_string(j + 1) + " has components of unequal shape");
      }
      require_finite(m, "chain factor");
    }
    if (j > 0 && factors_[j - 1].front().cols() != f.front().rows()) {
      throw ShapeError("factors " + std::to_string(j) + " and " + std::to_string(j + 1) +
                       " do not compose");
    }
  }
}

std::vector<Index> LinearFactorChain::space_dims() const {
  std::vector<Index> dims{factors_.front().front().rows()};
  for (const auto& f : factors_) dims.push_back(f.front().cols());
  return dims;
}

ComplexMatrix LinearFactorChain::eval(const ComplexVector& z) const {
  if (static_cast<std::size_t>(z.size()) != n_params_) {
    throw ShapeError("chain evaluated at a point of the wrong length");
  }
  ComplexMatrix out = linear_combination(factors_.front(), z);
  for (std::size_t j = 1; j < factors_.size(); ++j) out = out * linear_combination(factors_[j], z);
  return out;
}

PolyGerm LinearFactorChain::expand() const {
  const auto dims = space_dims();
  std::map<MultiIndex, ComplexMatrix> partial;
  partial.emplace(MultiIndex(n_params_, 0), ComplexMatrix::Identity(dims.front(), dims.front()));
  for (const auto& f : factors_) {
    std::map<MultiIndex, ComplexMatrix> next;
    for (const auto& [t, m] : partial) {
      for (std::size_t k = 0; k < n_params_; ++k) {
        MultiIndex up = t;
        ++up[k];
        auto [it, fresh] = next.try_emplace(up, m * f[k]);
        if (!fresh) it->second += m * f[k];
      }
    }
    partial = std::move(next);
  }
  PolyGerm germ(n_params_, dims.back(), dims.front());
  for (const auto& [t, m] : partial) germ.set(t, m, kCoefficientDropTol);
  return germ;
}

std::vector<double> LinearFactorChain::torus_norms(std::size_t n_samples) const {
  std::vector<double> worst(factors_.size(), 0.0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const ComplexVector zeta = torus_point(n_params_, i);
    for (std::size_t j = 0; j < factors_.size(); ++j) {
      worst[j] = std::max(worst[j], op_norm(linear_combination(factors_[j], zeta)));
    }
  }
  return worst;
}

ComplexMatrix TailFunction::eval(const ComplexVector& z) const {
  return constant + transfer_eval(vanishing_part, z);
}

ComplexMatrix LeftFactorization::eval(const ComplexVector& z) const {
  return chain.eval(z) * tail.eval(z);
}

ComplexMatrix RightFactorization::eval(const ComplexVector& z) const {
  return tail.eval(z) * chain.eval(z);
}

// ---------------------------------------------------------------------------
// Multiplicity and linear-factor constructions

std::optional<unsigned> multiplicity(const MultiSystem& s, unsigned degree_cap) {
  if (degree_cap < 1) throw PreconditionError("degree_cap must be at least 1");
  return taylor_coefficients(s, degree_cap).min_degree();
}

unsigned default_degree_cap(const MultiSystem& s) { return static_cast<unsigned>(s.dim_x) + 2; }

namespace {

void require_multiplicity(const MultiSystem& s, unsigned m, const char* op) {
  if (m < 1) throw PreconditionError(std::string(op) + ": multiplicity must be at least 1");
  const auto actual = multiplicity(s, m);
  if (!actual || *actual != m) {
    throw PreconditionError(std::string(op) + ": transfer function does not have a zero of "
                            "multiplicity " + std::to_string(m) +
                            (actual ? " (found " + std::to_string(*actual) + ")"
                                    : " (vanishes up to that degree)"));
  }
  if (m > 1) {
    for (std::size_t k = 0; k < s.n_params; ++k) {
      if (s.d[k].size() > 0 && s.d[k].norm() > kCoefficientDropTol) {
        throw PreconditionError(std::string(op) + ": multiplicity > 1 requires D = 0, but D_" +
                                std::to_string(k + 1) + " is nonzero");
      }
    }
  }
}

ComplexMatrix hstack(const ComplexMatrix& left, const ComplexMatrix& right) {
  ComplexMatrix out(left.rows(), left.cols() + right.cols());
  out << left, right;
  return out;
}

ComplexMatrix vstack_zero(const ComplexMatrix& top, Index zero_rows) {
  ComplexMatrix out = ComplexMatrix::Zero(top.rows() + zero_rows, top.cols());
  out.topRows(top.rows()) = top;
  return out;
}

}  // namespace

LeftFactorization factor_left(const MultiSystem& s, unsigned m) {
  validate(s);
  require_multiplicity(s, m, "factor_left");
  const std::size_t n = s.n_params;
  const Index dx = s.dim_x;
  const Index du = s.dim_u;

  std::vector<std::vector<ComplexMatrix>> factors;
  if (m == 1) {
    std::vector<ComplexMatrix> first;
    for (std::size_t k = 0; k < n; ++k) first.push_back(hstack(s.c[k], s.d[k]));
    factors.push_back(std::move(first));
  } else {
    factors.push_back(s.c);
    for (unsigned j = 2; j < m; ++j) factors.push_back(s.a);
    std::vector<ComplexMatrix> last;
    for (std::size_t k = 0; k < n; ++k) last.push_back(hstack(s.a[k], s.b[k]));
    factors.push_back(std::move(last));
  }

  // phi(z) = col((I - zA)^{-1} zB, I_U) = col(0, I) + theta of (A, B, [A; 0], [B; 0]).
  TailFunction tail;
  tail.constant = ComplexMatrix::Zero(dx + du, du);
  tail.constant.bottomRows(du).setIdentity();
  tail.vanishing_part = MultiSystem::zero(n, dx, du, dx + du);
  for (std::size_t k = 0; k < n; ++k) {
    tail.vanishing_part.a[k] = s.a[k];
    tail.vanishing_part.b[k] = s.b[k];
    tail.vanishing_part.c[k] = vstack_zero(s.a[k], du);
    tail.vanishing_part.d[k] = vstack_zero(s.b[k], du);
  }
  return {LinearFactorChain(n, std::move(factors)), std::move(tail)};
}

RightFactorization factor_right(const MultiSystem& s, unsigned m) {
  validate(s);
  require_multiplicity(s, m, "factor_right");
  const LeftFactorization left = factor_left(adjoint_system(s), m);
  std::vector<std::vector<ComplexMatrix>> factors;
  for (std::size_t j = left.chain.length(); j-- > 0;) {
    std::vector<ComplexMatrix> f;
    for (const auto& l : left.chain.factor(j)) f.push_back(l.adjoint());
    factors.push_back(std::move(f));
  }
  TailFunction tail;
  tail.constant = left.tail.constant.adjoint();
  tail.vanishing_part = adjoint_system(left.tail.vanishing_part);
  return {std::move(tail), LinearFactorChain(s.n_params, std::move(factors))};
}

LinearFactorChain factor_homogeneous(const MultiSystem& s, unsigned m, unsigned degree_cap) {
  validate(s);
  if (m < 1) throw PreconditionError("factor_homogeneous: degree must be at least 1");
  const unsigned cap = degree_cap == 0 ? m + static_cast<unsigned>(s.dim_x) + 1 : degree_cap;
  if (cap < m) throw PreconditionError("factor_homogeneous: degree cap below the degree");
  const PolyGerm germ = taylor_coefficients(s, cap);
  if (germ.empty() || germ.min_degree() != m || germ.max_degree() != m) {
    throw PreconditionError("factor_homogeneous: transfer function is not a homogeneous "
                            "polynomial of degree " + std::to_string(m) +
                            " (checked up to degree " + std::to_string(cap) + ")");
  }
  std::vector<std::vector<ComplexMatrix>> factors;
  if (m == 1) {
    factors.push_back(s.d);
  } else {
    factors.push_back(s.c);
    for (unsigned j = 2; j < m; ++j) factors.push_back(s.a);
    factors.push_back(s.b);
  }
  return LinearFactorChain(s.n_params, std::move(factors));
}

// ---------------------------------------------------------------------------
// Invariant subspaces and the cascade search

Subspace invariant_closure(const MultiSystem& s, const ComplexMatrix& vectors, double tol) {
  Subspace current = orthonormal_basis(vectors, tol);
  const auto n = static_cast<Index>(s.n_params);
  for (Index step = 0; step <= s.dim_x; ++step) {
    if (current.is_zero() || current.is_whole()) break;
    const Index r = current.dim();
    ComplexMatrix grown(s.dim_x, r * (n + 1));
    grown.leftCols(r) = current.basis();
    for (Index k = 0; k < n; ++k) {
      grown.middleCols(r * (k + 1), r) = s.a[static_cast<std::size_t>(k)] * current.basis();
    }
    Subspace next = orthonormal_basis(grown, tol);
    if (next.dim() == r) break;
    current = std::move(next);
  }
  return current;
}

std::vector<Subspace> invariant_subspace_candidates(const MultiSystem& s, std::size_t budget,
                                                    std::uint64_t seed) {
  validate(s);
  std::vector<Subspace> found{Subspace::zero(s.dim_x)};
  if (s.dim_x == 0) return found;

  auto offer = [&](const Subspace& candidate) {
    for (const auto& f : found) {
      if (f.dim() == candidate.dim() && projector_distance(f, candidate) < kContainmentTol) return;
    }
    if (check_condition_i(s, candidate)) found.push_back(candidate);
  };

  Rng rng(seed);
  for (std::size_t draw = 0; draw < budget; ++draw) {
    offer(invariant_closure(s, random_gaussian(s.dim_x, 1, rng)));
    const ComplexMatrix coeffs = random_gaussian(static_cast<Index>(s.n_params), 1, rng);
    ComplexMatrix combo = ComplexMatrix::Zero(s.dim_x, s.dim_x);
    for (std::size_t k = 0; k < s.n_params; ++k) combo += coeffs(static_cast<Index>(k), 0) * s.a[k];
    Eigen::ComplexEigenSolver<ComplexMatrix> eig(combo);
    if (eig.info() != Eigen::Success) continue;
    for (Index j = 0; j < s.dim_x; ++j) offer(invariant_closure(s, eig.eigenvectors().col(j)));
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const Subspace& x, const Subspace& y) { return x.dim() < y.dim(); });
  return found;
}

std::optional<FactorizationOutcome> solve_problem2(const MultiSystem& s, std::size_t budget,
                                                   std::uint64_t seed, unsigned degree_cap) {
  validate(s);
  const ConservativityReport report = is_conservative(s);
  if (!report.conservative()) {
    throw PreconditionError("solve_problem2: system is not conservative (residual " +
                            std::to_string(report.worst_residual) + ")");
  }
  const unsigned cap = degree_cap == 0 ? default_degree_cap(s) : degree_cap;
  const auto m = multiplicity(s, cap);
  if (!m) {
    throw PreconditionError("solve_problem2: transfer function vanishes up to degree " +
                            std::to_string(cap));
  }
  if (*m <= 1) {
    throw PreconditionError("solve_problem2: needs a zero of multiplicity > 1, found " +
                            std::to_string(*m));
  }

  const CcRestriction cc = restrict_to_cc_with_basis(s);
  for (const Subspace& x2 : invariant_subspace_candidates(cc.system, budget, seed)) {
    if (x2.dim() == cc.system.dim_x && cc.system.dim_x > 0) continue;
    const ConditionIIResult cond = check_condition_ii(cc.system, x2);
    if (!cond.holds) continue;
    CascadeDecomposition dec;
    try {
      dec = decompose(cc.system, x2);
    } catch (const PreconditionError&) {
      continue;
    }
    if (!is_conservative(dec.alpha2).conservative() || !is_conservative(dec.alpha1).conservative()) {
      continue;
    }
    const double residual = verify_factor_tf(s, dec.alpha2, dec.alpha1, 20, seed);
    if (!(residual < kProductTol)) continue;
    FactorizationOutcome out;
    out.intermediate_dim = dec.intermediate.dim();
    out.theta2 = std::move(dec.alpha2);
    out.theta1 = std::move(dec.alpha1);
    out.witness_x2 = x2;
    out.alpha_cc = cc.system;
    out.product_residual = residual;
    return out;
  }
  return std::nullopt;
}

CascadeRealization from_factorization(const MultiSystem& alpha2, const MultiSystem& alpha1) {
  for (const MultiSystem* f : {&alpha2, &alpha1}) {
    const ConservativityReport report = is_conservative(*f);
    if (!report.conservative()) {
      throw PreconditionError("from_factorization: factor is not conservative (residual " +
                              std::to_string(report.worst_residual) + ")");
    }
  }
  CascadeRealization out;
  out.alpha = cascade(alpha2, alpha1);
  out.cc = restrict_to_cc_with_basis(out.alpha);
  const Subspace x2 = cascade_x2_block(alpha2, alpha1);
  const ComplexMatrix& q = out.cc.subspace.basis();
  out.p_closure = orthonormal_basis(q.adjoint() * x2.basis());
  const Subspace meet = subspace_intersection(out.cc.subspace, x2);
  out.intersection = orthonormal_basis(q.adjoint() * meet.basis());
  return out;
}

}  // namespace msys

namespace msys {

namespace {

template <class Factorization>
double sampled_residual(const MultiSystem& s, const Factorization& f, std::size_t n_points,
                        double radius, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const ComplexVector z = random_polydisk_point(s.n_params, radius, rng);
    worst = std::max(worst, op_norm(transfer_eval(s, z) - f.eval(z)));
  }
  return worst;
}

}  // namespace

double reconstruction_residual(const MultiSystem& s, const LeftFactorization& f,
                               std::size_t n_points, double radius, std::uint64_t seed) {
  return sampled_residual(s, f, n_points, radius, seed);
}

double reconstruction_residual(const MultiSystem& s, const RightFactorization& f,
                               std::size_t n_points, double radius, std::uint64_t seed) {
  return sampled_residual(s, f, n_points, radius, seed);
}

}  // namespace msys
