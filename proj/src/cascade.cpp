#include "msys/cascade.hpp"

#include "msys/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace msys {

namespace {

ComplexMatrix block_diag(const ComplexMatrix& p, const ComplexMatrix& q) {
  ComplexMatrix out = ComplexMatrix::Zero(p.rows() + q.rows(), p.cols() + q.cols());
  out.topLeftCorner(p.rows(), p.cols()) = p;
  out.bottomRightCorner(q.rows(), q.cols()) = q;
  return out;
}

void require_conservative(const MultiSystem& s, const char* op) {
  const ConservativityReport report = is_conservative(s);
  if (!report.conservative()) {
    throw PreconditionError(std::string(op) + ": system is not conservative (residual " +
                            std::to_string(report.worst_residual) + ")");
  }
}

ComplexVector random_torus_point(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  ComplexVector z(static_cast<Index>(n));
  for (Index k = 0; k < z.size(); ++k) z(k) = std::polar(1.0, angle(rng));
  return z;
}

}  // namespace

MultiSystem cascade(const MultiSystem& alpha2, const MultiSystem& alpha1) {
  validate(alpha2);
  validate(alpha1);
  if (alpha2.n_params != alpha1.n_params) {
    throw ShapeError("cascade: parameter counts differ (" + std::to_string(alpha2.n_params) +
                     " vs " + std::to_string(alpha1.n_params) + ")");
  }
  if (alpha1.dim_y != alpha2.dim_u) {
    throw ShapeError("cascade: output space of alpha1 (dim " + std::to_string(alpha1.dim_y) +
                     ") differs from input space of alpha2 (dim " +
                     std::to_string(alpha2.dim_u) + ")");
  }
  const Index x2 = alpha2.dim_x;
  const Index v = alpha1.dim_y;
  const Index x1 = alpha1.dim_x;
  MultiSystem s = MultiSystem::zero(alpha1.n_params, x2 + v + x1, alpha1.dim_u, alpha2.dim_y);
  for (std::size_t k = 0; k < s.n_params; ++k) {
    s.a[k].block(0, 0, x2, x2) = alpha2.a[k];
    s.a[k].block(0, x2, x2, v) = alpha2.b[k];
    s.a[k].block(x2, x2 + v, v, x1) = alpha1.c[k];
    s.a[k].block(x2 + v, x2 + v, x1, x1) = alpha1.a[k];
    s.b[k].middleRows(x2, v) = alpha1.d[k];
    s.b[k].middleRows(x2 + v, x1) = alpha1.b[k];
    s.c[k].leftCols(x2) = alpha2.c[k];
    s.c[k].middleCols(x2, v) = alpha2.d[k];
  }
  return s;
}

Subspace cascade_x2_block(const MultiSystem& alpha2, const MultiSystem& alpha1) {
  return Subspace::coordinate_block(alpha2.dim_x + alpha1.dim_y + alpha1.dim_x, 0, alpha2.dim_x);
}

Subspace cascade_v_block(const MultiSystem& alpha2, const MultiSystem& alpha1) {
  return Subspace::coordinate_block(alpha2.dim_x + alpha1.dim_y + alpha1.dim_x, alpha2.dim_x,
                                    alpha1.dim_y);
}

bool check_condition_i(const MultiSystem& s, const Subspace& x2, double tol) {
  validate(s);
  if (x2.ambient_dim() != s.dim_x) {
    throw ShapeError("condition (i): subspace lives in C^" + std::to_string(x2.ambient_dim()) +
                     ", state space has dimension " + std::to_string(s.dim_x));
  }
  for (const auto& a : s.a) {
    if (!is_invariant(a, x2, tol)) return false;
  }
  return true;
}

ConditionIIResult check_condition_ii(const MultiSystem& s, const Subspace& x2, double tol) {
  require_conservative(s, "condition (ii)");
  if (!check_condition_i(s, x2)) {
    throw PreconditionError("condition (ii): subspace is not invariant under every A_k");
  }
  // x2 ⊕ Y inside X ⊕ Y
  ComplexMatrix target = ComplexMatrix::Zero(s.dim_x + s.dim_y, x2.dim() + s.dim_y);
  target.topLeftCorner(s.dim_x, x2.dim()) = x2.basis();
  target.bottomRightCorner(s.dim_y, s.dim_y) = ComplexMatrix::Identity(s.dim_y, s.dim_y);

  const Index width = target.cols();
  ComplexMatrix images(s.dim_x + s.dim_u, width * static_cast<Index>(s.n_params));
  for (std::size_t k = 0; k < s.n_params; ++k) {
    images.middleCols(width * static_cast<Index>(k), width) = s.block(k).adjoint() * target;
  }
  ConditionIIResult result;
  result.image = orthonormal_basis(images, tol);
  result.holds = result.image.dim() == x2.dim() + s.dim_y;
  if (result.holds) {
    result.intermediate = orthogonal_complement(embed(x2, s.dim_u), result.image);
  } else {
    result.intermediate = Subspace::zero(s.dim_x + s.dim_u);
  }
  return result;
}

ComplexMatrix CascadeDecomposition::state_basis() const {
  ComplexMatrix t(x2.ambient_dim(), x2.dim() + intermediate.dim() + x1.dim());
  t << x2.basis(), intermediate.basis(), x1.basis();
  return t;
}

CascadeDecomposition decompose(const MultiSystem& s, const Subspace& x2) {
  require_conservative(s, "decompose");
  if (!check_condition_i(s, x2)) {
    double worst = 0.0;
    for (const auto& a : s.a) worst = std::max(worst, x2.residual(a * x2.basis()));
    throw PreconditionError("decompose: condition (i) fails (invariance residual " +
                            std::to_string(worst) + ")");
  }
  const ConditionIIResult cond = check_condition_ii(s, x2);
  if (!cond.holds) {
    throw PreconditionError("decompose: condition (ii) fails (dim of sum_k G_k*(X2 + Y) is " +
                            std::to_string(cond.image.dim()) + ", expected " +
                            std::to_string(x2.dim() + s.dim_y) + ")");
  }
  const ComplexMatrix& vb = cond.intermediate.basis();
  const double leak = vb.bottomRows(s.dim_u).size() == 0 ? 0.0 : op_norm(vb.bottomRows(s.dim_u));
  if (!(leak < kContainmentTol)) {
    throw PreconditionError("decompose: intermediate space is not contained in the state space "
                            "(input-component norm " + std::to_string(leak) + ")");
  }

  CascadeDecomposition dec;
  dec.x2 = canonical(x2);
  dec.intermediate = canonical(orthonormal_basis(vb.topRows(s.dim_x)));
  dec.x1 = canonical(orthogonal_complement(subspace_sum(dec.x2, dec.intermediate)));

  const ComplexMatrix& q2 = dec.x2.basis();
  const ComplexMatrix& qv = dec.intermediate.basis();
  const ComplexMatrix& q1 = dec.x1.basis();
  const Index dv = qv.cols();
  dec.alpha1 = MultiSystem::zero(s.n_params, q1.cols(), s.dim_u, dv);
  dec.alpha2 = MultiSystem::zero(s.n_params, q2.cols(), dv, s.dim_y);
  for (std::size_t k = 0; k < s.n_params; ++k) {
    dec.alpha1.a[k] = q1.adjoint() * s.a[k] * q1;
    dec.alpha1.b[k] = q1.adjoint() * s.b[k];
    dec.alpha1.c[k] = qv.adjoint() * s.a[k] * q1;
    dec.alpha1.d[k] = qv.adjoint() * s.b[k];
    dec.alpha2.a[k] = q2.adjoint() * s.a[k] * q2;
    dec.alpha2.b[k] = q2.adjoint() * s.a[k] * qv;
    dec.alpha2.c[k] = s.c[k] * q2;
    dec.alpha2.d[k] = s.c[k] * qv;
  }
  return dec;
}

double reassembly_residual(const MultiSystem& s, const CascadeDecomposition& dec,
                           std::size_t n_points, std::uint64_t seed) {
  const MultiSystem rebuilt = cascade(dec.alpha2, dec.alpha1);
  if (rebuilt.dim_x != s.dim_x || rebuilt.dim_u != s.dim_u || rebuilt.dim_y != s.dim_y) {
    throw ShapeError("reassembly_residual: reassembled system has different dimensions");
  }
  const ComplexMatrix t = dec.state_basis();
  const ComplexMatrix left = block_diag(t, ComplexMatrix::Identity(s.dim_y, s.dim_y));
  const ComplexMatrix right = block_diag(t, ComplexMatrix::Identity(s.dim_u, s.dim_u));
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const ComplexVector zeta = random_torus_point(s.n_params, rng);
    const ComplexMatrix diff = left.adjoint() * pencil(s, zeta) * right - pencil(rebuilt, zeta);
    worst = std::max(worst, op_norm(diff));
  }
  return worst;
}

ComplexVector random_polydisk_point(std::size_t n_params, double radius, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ComplexVector z(static_cast<Index>(n_params));
  for (Index k = 0; k < z.size(); ++k) {
    const double rho = radius * std::sqrt(unit(rng));
    z(k) = std::polar(rho, 2.0 * std::numbers::pi * unit(rng));
  }
  return z;
}

double verify_factor_tf(const MultiSystem& alpha, const MultiSystem& alpha2,
                        const MultiSystem& alpha1, std::size_t n_points, std::uint64_t seed) {
  validate(alpha);
  validate(alpha2);
  validate(alpha1);
  if (alpha.n_params != alpha2.n_params || alpha.n_params != alpha1.n_params ||
      alpha1.dim_y != alpha2.dim_u || alpha.dim_u != alpha1.dim_u || alpha.dim_y != alpha2.dim_y) {
    throw ShapeError("verify_factor_tf: incompatible spaces");
  }
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const ComplexVector z = random_polydisk_point(alpha.n_params, 0.5, rng);
    const ComplexMatrix diff =
        transfer_eval(alpha, z) - transfer_eval(alpha2, z) * transfer_eval(alpha1, z);
    worst = std::max(worst, op_norm(diff));
  }
  return worst;
}

ClosConReport closcon_property_check(const MultiSystem& alpha2, const MultiSystem& alpha1) {
  require_conservative(alpha2, "closcon_property_check");
  require_conservative(alpha1, "closcon_property_check");
  ClosConReport report;
  report.cascade_closely_connected = is_closely_connected(cascade(alpha2, alpha1));
  report.alpha2_closely_connected = is_closely_connected(alpha2);
  report.alpha1_closely_connected = is_closely_connected(alpha1);
  if (report.cascade_closely_connected &&
      !(report.alpha2_closely_connected && report.alpha1_closely_connected)) {
    throw Error("closely connected cascade with a factor that is not closely connected");
  }
  return report;
}

}  // namespace msys
