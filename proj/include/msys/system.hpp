#pragma once

// N-parametric discrete-time linear systems
//
//   x(t) = sum_k A_k x(t - e_k) + B_k u(t - e_k)
//   y(t) = sum_k C_k x(t - e_k) + D_k u(t - e_k)
//
// with transfer function theta(z) = zD + zC (I - zA)^{-1} zB, where
// zT = sum_k z_k T_k. The block G_k = [[A_k, B_k], [C_k, D_k]] maps
// X ⊕ U into X ⊕ Y.

#include "msys/linalg.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace msys {

struct MultiSystem {
  std::size_t n_params = 1;
  Index dim_x = 0;
  Index dim_u = 0;
  Index dim_y = 0;
  std::vector<ComplexMatrix> a;
  std::vector<ComplexMatrix> b;
  std::vector<ComplexMatrix> c;
  std::vector<ComplexMatrix> d;

  /// All-zero system with the given dimensions.
  static MultiSystem zero(std::size_t n_params, Index dim_x, Index dim_u, Index dim_y);

  /// G_k as a (dim_x + dim_y) x (dim_x + dim_u) matrix.
  ComplexMatrix block(std::size_t k) const;
  /// Splits a block matrix back into A_k, B_k, C_k, D_k.
  void set_block(std::size_t k, const ComplexMatrix& g);
};

/// Throws ShapeError describing the first inconsistent list or block.
void validate(const MultiSystem& s);

/// zG = sum_k z_k G_k.
ComplexMatrix pencil(const MultiSystem& s, const ComplexVector& z);

/// sum_k z_k T_k for a list of equally shaped matrices.
ComplexMatrix linear_combination(const std::vector<ComplexMatrix>& mats, const ComplexVector& z);

inline constexpr double kMaxResolventCondition = 1e12;

/// theta(z). Throws NumericalError when I - zA has condition number above
/// kMaxResolventCondition.
ComplexMatrix transfer_eval(const MultiSystem& s, const ComplexVector& z);

/// The system with blocks (A_k*, C_k*, B_k*, D_k*); its transfer function is
/// z -> theta(conj(z))*.
MultiSystem adjoint_system(const MultiSystem& s);

/// Multiplies C_k and D_k by `factor`, i.e. theta -> factor * theta.
MultiSystem scale_transfer(const MultiSystem& s, Complex factor);

// ---------------------------------------------------------------------------
// Power series germs

using MultiIndex = std::vector<std::uint32_t>;

unsigned total_degree(const MultiIndex& t);

/// Finite map multi-index -> dim_y x dim_u coefficient. Zero coefficients are
/// never stored.
class PolyGerm {
 public:
  PolyGerm() = default;
  PolyGerm(std::size_t n_params, Index dim_u, Index dim_y);

  std::size_t n_params() const { return n_params_; }
  Index dim_u() const { return dim_u_; }
  Index dim_y() const { return dim_y_; }
  const std::map<MultiIndex, ComplexMatrix>& coefficients() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }

  /// Stores m at t; erases the entry when ||m||_F <= drop_tol.
  void set(const MultiIndex& t, const ComplexMatrix& m, double drop_tol = 0.0);
  void add(const MultiIndex& t, const ComplexMatrix& m);
  ComplexMatrix coefficient(const MultiIndex& t) const;

  std::optional<unsigned> min_degree() const;
  std::optional<unsigned> max_degree() const;
  PolyGerm homogeneous_part(unsigned degree) const;

  ComplexMatrix eval(const ComplexVector& z) const;

 private:
  void check_index(const MultiIndex& t) const;

  std::size_t n_params_ = 1;
  Index dim_u_ = 0;
  Index dim_y_ = 0;
  std::map<MultiIndex, ComplexMatrix> coeffs_;
};

/// Largest Frobenius norm of a coefficient difference over the union of
/// supports.
double germ_distance(const PolyGerm& a, const PolyGerm& b);

inline constexpr double kCoefficientDropTol = 1e-12;

/// Taylor coefficients of theta up to total degree max_total_degree.
/// Degree-j coefficients collect C_{k0} A_{k1} ... A_{k_{j-2}} B_{k_{j-1}}
/// over all words with the given abelianisation (plus D_k at e_k);
/// coefficients with Frobenius norm below kCoefficientDropTol are dropped.
PolyGerm taylor_coefficients(const MultiSystem& s, unsigned max_total_degree);

// ---------------------------------------------------------------------------
// Conservativity and dissipativity

struct ConservativityReport {
  bool is_isometric_family = false;
  bool is_coisometric_family = false;
  double worst_residual = 0.0;
  /// Parameter pair (j, k), j != k, of the worst cross-term violation when
  /// that is what failed.
  std::optional<std::pair<std::size_t, std::size_t>> failing_pair;
  double tol = 0.0;

  bool conservative() const { return is_isometric_family && is_coisometric_family; }
};

inline constexpr double kConservativeTol = 1e-9;

/// zG is unitary on the whole torus iff sum_k G_k* G_k = I, G_j* G_k = 0
/// (j != k) and the same with G_k G_k*. Residuals are spectral norms.
ConservativityReport is_conservative(const MultiSystem& s, double tol = kConservativeTol);

/// Deterministic quasi-random point of the N-torus (Kronecker sequence).
ComplexVector torus_point(std::size_t n_params, std::size_t i);

struct DissipativityVerdict {
  bool passed = true;
  std::optional<ComplexVector> witness;
  double max_norm = 0.0;
  std::size_t n_samples = 0;
  double tol = 0.0;
};

/// Samples ||zeta G|| at n_samples torus points; a pass is only a necessary
/// condition for dissipativity.
DissipativityVerdict is_dissipative_sampled(const MultiSystem& s, std::size_t n_samples,
                                            double tol = kConservativeTol);

// ---------------------------------------------------------------------------
// Closely connected part and unitary part

/// Smallest subspace containing every B_k U and C_j* Y that is invariant
/// under all A_k and A_k*.
Subspace closely_connected_subspace(const MultiSystem& s, double tol = kRankTol);

bool is_closely_connected(const MultiSystem& s, double tol = kRankTol);

struct CcRestriction {
  MultiSystem system;
  /// X_cc inside the original state space; its basis fixes the coordinates of
  /// `system`.
  Subspace subspace;
};

/// Compression to X_cc. Throws PreconditionError if s is not conservative.
CcRestriction restrict_to_cc_with_basis(const MultiSystem& s, double tol = kConservativeTol);
MultiSystem restrict_to_cc(const MultiSystem& s, double tol = kConservativeTol);

/// Largest subspace reducing every A_k on which zeta A is unitary for all
/// zeta on the torus.
Subspace unitary_part(const MultiSystem& s, double tol = kRankTol);

// ---------------------------------------------------------------------------
// Constructors

struct ConservativeOptions {
  /// Draw W with a vanishing U -> Y block and block-diagonal P_k so that every
  /// D_k = 0. Needs dim_x >= dim_u.
  bool zero_feedthrough = false;
};

/// G_k = P_k W with W Haar-unitary on X ⊕ U and {P_k} a random orthogonal
/// resolution of the identity on X ⊕ Y. Requires dim_u == dim_y.
MultiSystem random_conservative(std::size_t n_params, Index dim_x, Index dim_u, Index dim_y,
                                std::uint64_t seed, ConservativeOptions options = {});

/// Word-indexed shift realization of a polynomial germ without constant term.
///
/// The state space holds one copy of U for every word over {1..N} of length
/// 1 .. d-1 (d the top degree), ordered by length and then lexicographically.
/// B_k injects into word (k); A_k prepends the letter k and annihilates words
/// of length d-1; C_k reads word w and emits coef(abel(k w)) * t!/|t|!, so the
/// |t|!/t! words sharing an abelianisation split that coefficient equally.
/// D_k is the coefficient at e_k.
MultiSystem realize_germ(const PolyGerm& g);

}  // namespace msys
