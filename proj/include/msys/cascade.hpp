#pragma once

// Cascade connection of two systems through an intermediate space V, and the
// inverse operation: splitting a conservative system along an A-invariant
// subspace X2 whose defect space is independent of the torus point.

#include "msys/system.hpp"

#include <cstdint>

namespace msys {

/// alpha = alpha2 alpha1 with state space X2 ⊕ V ⊕ X1, where V is the output
/// space of alpha1 and the input space of alpha2:
///
///   A_k = [[A2_k, B2_k, 0], [0, 0, C1_k], [0, 0, A1_k]]
///   B_k = [0; D1_k; B1_k],  C_k = [C2_k, D2_k, 0],  D_k = 0.
MultiSystem cascade(const MultiSystem& alpha2, const MultiSystem& alpha1);

/// The X2 block of a cascade state space, as a subspace of C^(dim_x).
Subspace cascade_x2_block(const MultiSystem& alpha2, const MultiSystem& alpha1);
/// The V block of a cascade state space.
Subspace cascade_v_block(const MultiSystem& alpha2, const MultiSystem& alpha1);

/// Condition (i): x2 is invariant under every A_k.
bool check_condition_i(const MultiSystem& s, const Subspace& x2, double tol = kContainmentTol);

struct ConditionIIResult {
  bool holds = false;
  /// M = sum_k G_k* (x2 ⊕ Y) inside X ⊕ U.
  Subspace image;
  /// M ⊖ (x2 ⊕ 0) inside X ⊕ U; meaningful only when `holds`.
  Subspace intermediate;
};

/// Condition (ii): the spaces (zeta G)* (x2 ⊕ Y) ⊖ x2 coincide for all zeta on
/// the torus. Every (zeta G)* (x2 ⊕ Y) sits inside M and has dimension
/// dim x2 + dim_y, and M is spanned by their Fourier coefficients, so the
/// condition holds iff dim M = dim x2 + dim_y.
///
/// Throws PreconditionError when s is not conservative or x2 violates (i).
ConditionIIResult check_condition_ii(const MultiSystem& s, const Subspace& x2,
                                     double tol = kRankTol);

struct CascadeDecomposition {
  MultiSystem alpha2;  ///< X2 -> state, V -> input, Y -> output
  MultiSystem alpha1;  ///< X1 -> state, U -> input, V -> output
  Subspace x2;
  Subspace intermediate;
  Subspace x1;

  /// Unitary [x2 | V | x1] taking cascade(alpha2, alpha1) coordinates to the
  /// source state coordinates.
  ComplexMatrix state_basis() const;
};

/// Splits a conservative s along x2. V comes from check_condition_ii and must
/// lie in X ⊕ 0; X1 = X ⊖ (X2 ⊕ V). Bases of the three pieces are canonical
/// (see msys::canonical), so a coordinate-block split of a cascade returns
/// the original blocks. Throws PreconditionError if a condition fails.
CascadeDecomposition decompose(const MultiSystem& s, const Subspace& x2);

/// Largest ||T~* zeta G_s T~ - zeta G_cascade|| over n_points torus points,
/// where T~ applies state_basis() on X.
double reassembly_residual(const MultiSystem& s, const CascadeDecomposition& dec,
                           std::size_t n_points = 20, std::uint64_t seed = 0);

/// max over z sampled uniformly in (0.5 D)^N of
/// ||theta_alpha(z) - theta_alpha2(z) theta_alpha1(z)||.
double verify_factor_tf(const MultiSystem& alpha, const MultiSystem& alpha2,
                        const MultiSystem& alpha1, std::size_t n_points = 20,
                        std::uint64_t seed = 0);

/// Uniform sample of the polydisk of the given radius.
ComplexVector random_polydisk_point(std::size_t n_params, double radius, Rng& rng);

struct ClosConReport {
  bool cascade_closely_connected = false;
  bool alpha2_closely_connected = false;
  bool alpha1_closely_connected = false;
};

/// Checks that a closely connected cascade has closely connected factors.
/// Throws Error if that implication is violated.
ClosConReport closcon_property_check(const MultiSystem& alpha2, const MultiSystem& alpha1);

}  // namespace msys
