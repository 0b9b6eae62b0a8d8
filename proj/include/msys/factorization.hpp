#pragma once

// Zeros of multiplicity m at the origin and their factorizations into
// products of linear factors zL = sum_k z_k L_k, plus the search for
// conservative cascade factorizations of Agler-Schur functions.

#include "msys/cascade.hpp"
#include "msys/system.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace msys {

/// Ordered product zL^(1) zL^(2) ... zL^(m) with L^(j)_k : Y^(j) -> Y^(j-1).
class LinearFactorChain {
 public:
  /// factors[j][k] is L^(j+1)_{k+1}. Throws ShapeError when shapes do not
  /// compose or the chain is empty.
  LinearFactorChain(std::size_t n_params, std::vector<std::vector<ComplexMatrix>> factors);

  std::size_t n_params() const { return n_params_; }
  std::size_t length() const { return factors_.size(); }
  const std::vector<ComplexMatrix>& factor(std::size_t j) const { return factors_[j]; }
  const std::vector<std::vector<ComplexMatrix>>& factors() const { return factors_; }
  /// Dimensions of Y^(0), ..., Y^(m).
  std::vector<Index> space_dims() const;

  ComplexMatrix eval(const ComplexVector& z) const;
  /// Coefficients of the product, a homogeneous polynomial of degree m.
  PolyGerm expand() const;
  /// For each factor, max over n_samples torus points of ||zeta L^(j)||.
  std::vector<double> torus_norms(std::size_t n_samples) const;

 private:
  std::size_t n_params_;
  std::vector<std::vector<ComplexMatrix>> factors_;
};

/// phi(z) = constant + theta_{vanishing_part}(z).
struct TailFunction {
  ComplexMatrix constant;
  MultiSystem vanishing_part;

  ComplexMatrix eval(const ComplexVector& z) const;
};

/// theta(z) = zL^(1) ... zL^(m) phi(z).
struct LeftFactorization {
  LinearFactorChain chain;
  TailFunction tail;

  ComplexMatrix eval(const ComplexVector& z) const;
};

/// theta(z) = psi(z) zR^(m) ... zR^(1). `chain` is stored in product order,
/// so chain.factor(0) holds R^(m) and chain.factor(m-1) holds R^(1).
struct RightFactorization {
  TailFunction tail;
  LinearFactorChain chain;

  ComplexMatrix eval(const ComplexVector& z) const;
};

/// Least degree of a nonzero homogeneous part of theta, or nullopt when every
/// part up to degree_cap vanishes.
std::optional<unsigned> multiplicity(const MultiSystem& s, unsigned degree_cap);

/// Default cap used when a multiplicity has to be searched: dim_x + 2.
unsigned default_degree_cap(const MultiSystem& s);

/// Left factorization for a system whose transfer function has a zero of
/// multiplicity exactly m:
///   m = 1: L^(1)_k = [C_k D_k];
///   m > 1: L^(1)_k = C_k, L^(2..m-1)_k = A_k, L^(m)_k = [A_k B_k];
/// tail phi(z) = col((I - zA)^{-1} zB, I_U) in both cases.
/// Throws PreconditionError when m is not the multiplicity or D != 0 for m > 1.
LeftFactorization factor_left(const MultiSystem& s, unsigned m);

/// Left construction applied to the adjoint system, then adjoint-reversed.
RightFactorization factor_right(const MultiSystem& s, unsigned m);

/// For theta a homogeneous polynomial of degree m (checked up to degree_cap,
/// 0 meaning m + dim_x + 1): the chain (D) for m = 1 and (C, A, ..., A, B)
/// for m > 1. Throws PreconditionError for non-homogeneous input.
LinearFactorChain factor_homogeneous(const MultiSystem& s, unsigned m, unsigned degree_cap = 0);

/// Common invariant subspaces of {A_k}: always {0}, plus closures under all
/// A_k of random vectors and of eigenvectors of random combinations
/// sum_k c_k A_k, deduplicated by projector distance and sorted by dimension.
std::vector<Subspace> invariant_subspace_candidates(const MultiSystem& s, std::size_t budget,
                                                    std::uint64_t seed);

/// Smallest subspace containing the columns of `vectors` and invariant under
/// every A_k.
Subspace invariant_closure(const MultiSystem& s, const ComplexMatrix& vectors,
                           double tol = kRankTol);

struct FactorizationOutcome {
  MultiSystem theta2;
  MultiSystem theta1;
  Index intermediate_dim = 0;
  /// The splitting subspace, in the coordinates of alpha_cc.
  Subspace witness_x2;
  MultiSystem alpha_cc;
  double product_residual = 0.0;
};

inline constexpr double kProductTol = 1e-9;

/// Bounded search for theta = theta2 theta1 with both factors realised by
/// conservative systems. nullopt means the budget ran out: it does not show
/// that no factorization exists. Throws PreconditionError unless s is
/// conservative with multiplicity > 1.
std::optional<FactorizationOutcome> solve_problem2(const MultiSystem& s, std::size_t budget,
                                                   std::uint64_t seed, unsigned degree_cap = 0);

struct CascadeRealization {
  MultiSystem alpha;     ///< cascade(alpha2, alpha1)
  CcRestriction cc;      ///< its closely connected part
  Subspace p_closure;    ///< P_{X_cc} X2, in alpha_cc coordinates
  Subspace intersection; ///< X_cc ∩ X2, in alpha_cc coordinates
};

/// Builds a closely connected conservative realization of theta2 theta1 and
/// the two splitting subspaces that correspond to the given factorization.
CascadeRealization from_factorization(const MultiSystem& alpha2, const MultiSystem& alpha1);

}  // namespace msys

namespace msys {

/// max over n_points z sampled uniformly in (radius D)^N of
/// ||theta_s(z) - f.eval(z)||.
double reconstruction_residual(const MultiSystem& s, const LeftFactorization& f,
                               std::size_t n_points = 20, double radius = 0.4,
                               std::uint64_t seed = 0);
double reconstruction_residual(const MultiSystem& s, const RightFactorization& f,
                               std::size_t n_points = 20, double radius = 0.4,
                               std::uint64_t seed = 0);

}  // namespace msys
