#pragma once

// Dense complex matrices and subspaces represented by orthonormal bases.
//
// Every rank decision in the library goes through one relative threshold:
// a direction is kept when its residual norm is at least
// tol * (1 + reference magnitude). The default tol is kRankTol.

#include "msys/error.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace msys {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

inline constexpr double kRankTol = 1e-9;
inline constexpr double kOrthonormalityTol = 1e-10;
inline constexpr double kContainmentTol = 1e-8;

/// Spectral norm (largest singular value); 0 for empty matrices.
double op_norm(const ComplexMatrix& m);

bool all_finite(const ComplexMatrix& m);

/// Throws NumericalError naming `what` if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, std::string_view what);

/// Orthonormal basis of the kernel of m. Singular values below
/// tol * (1 + sigma_max) count as zero.
ComplexMatrix null_space(const ComplexMatrix& m, double tol = kRankTol);

/// Kronecker product a (x) b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Entries drawn i.i.d. from the standard complex Gaussian.
ComplexMatrix random_gaussian(Index rows, Index cols, Rng& rng);

/// Haar-distributed unitary of size n (QR of a Ginibre matrix with the
/// phases of R's diagonal absorbed).
ComplexMatrix haar_unitary(Index n, Rng& rng);

/// A subspace of C^ambient_dim stored by an orthonormal basis
/// (ambient_dim x dim). Immutable once built.
class Subspace {
 public:
  Subspace() = default;

  static Subspace zero(Index ambient_dim);
  static Subspace whole(Index ambient_dim);
  /// span(e_offset, ..., e_{offset+size-1}).
  static Subspace coordinate_block(Index ambient_dim, Index offset, Index size);
  /// Wraps a basis that is already orthonormal; throws ShapeError if
  /// basis* basis differs from the identity by more than tol.
  static Subspace from_orthonormal(ComplexMatrix basis, double tol = kOrthonormalityTol);

  Index ambient_dim() const { return ambient_dim_; }
  Index dim() const { return basis_.cols(); }
  bool is_zero() const { return dim() == 0; }
  bool is_whole() const { return dim() == ambient_dim_; }
  const ComplexMatrix& basis() const { return basis_; }
  ComplexMatrix projector() const;

  /// Largest column norm of (I - P) v.
  double residual(const ComplexMatrix& vectors) const;
  bool contains(const Subspace& other, double tol = kContainmentTol) const;

 private:
  Subspace(Index ambient_dim, ComplexMatrix basis)
      : ambient_dim_(ambient_dim), basis_(std::move(basis)) {}

  Index ambient_dim_ = 0;
  ComplexMatrix basis_ = ComplexMatrix(0, 0);
};

/// Orthonormal basis of the column span of `vectors` by Gram-Schmidt with
/// column pivoting and re-orthogonalisation. Columns whose residual falls
/// below tol * (1 + largest column norm) are discarded.
Subspace orthonormal_basis(const ComplexMatrix& vectors, double tol = kRankTol);

Subspace subspace_sum(const Subspace& a, const Subspace& b, double tol = kRankTol);

/// a ∩ b, computed as the orthogonal complement of a⊥ + b⊥.
Subspace subspace_intersection(const Subspace& a, const Subspace& b,
                               double tol = kRankTol);

/// The b with a ⊕ b = within. Requires a ⊆ within (residual < 1e-8).
Subspace orthogonal_complement(const Subspace& a, const Subspace& within);

/// Orthogonal complement inside the whole ambient space.
Subspace orthogonal_complement(const Subspace& a);

/// True iff ||(I - P_s) m basis_s|| < tol.
bool is_invariant(const ComplexMatrix& m, const Subspace& s, double tol = kContainmentTol);

/// Orthonormal basis of m s.
Subspace image_subspace(const ComplexMatrix& m, const Subspace& s, double tol = kRankTol);

/// ||P_a - P_b||; infinity-like value 2 when ambient dimensions differ.
double projector_distance(const Subspace& a, const Subspace& b);

/// The same subspace with a basis that depends only on the subspace: pivoted
/// Gram-Schmidt over the columns of its projector, ties broken by the lowest
/// coordinate index. A coordinate block gets the coordinate vectors back.
Subspace canonical(const Subspace& s);

/// Embeds s ⊆ C^n as s ⊕ {0} inside C^(n + extra), or {0} ⊕ s when
/// `leading` is false.
Subspace embed(const Subspace& s, Index extra, bool leading = true);

}  // namespace msys
