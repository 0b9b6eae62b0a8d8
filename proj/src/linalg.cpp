#include "msys/linalg.hpp"

#include "msys/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace msys {

double op_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

bool all_finite(const ComplexMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

void require_finite(const ComplexMatrix& m, std::string_view what) {
  if (!all_finite(m)) {
    throw NumericalError("non-finite entry in " + std::string(what));
  }
}

ComplexMatrix null_space(const ComplexMatrix& m, double tol) {
  const Index n = m.cols();
  if (n == 0) return ComplexMatrix(0, 0);
  if (m.rows() == 0) return ComplexMatrix::Identity(n, n);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double threshold = tol * (1.0 + sv(0));
  Index rank = 0;
  while (rank < sv.size() && sv(rank) >= threshold) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix random_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

ComplexMatrix haar_unitary(Index n, Rng& rng) {
  if (n == 0) return ComplexMatrix(0, 0);
  const ComplexMatrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Subspace

Subspace Subspace::zero(Index ambient_dim) {
  return Subspace(ambient_dim, ComplexMatrix(ambient_dim, 0));
}

Subspace Subspace::whole(Index ambient_dim) {
  return Subspace(ambient_dim, ComplexMatrix::Identity(ambient_dim, ambient_dim));
}

Subspace Subspace::coordinate_block(Index ambient_dim, Index offset, Index size) {
  if (offset < 0 || size < 0 || offset + size > ambient_dim) {
    throw ShapeError("coordinate block [" + std::to_string(offset) + ", " +
                     std::to_string(offset + size) + ") outside C^" +
                     std::to_string(ambient_dim));
  }
  ComplexMatrix basis = ComplexMatrix::Zero(ambient_dim, size);
  for (Index j = 0; j < size; ++j) basis(offset + j, j) = 1.0;
  return Subspace(ambient_dim, std::move(basis));
}

Subspace Subspace::from_orthonormal(ComplexMatrix basis, double tol) {
  require_finite(basis, "subspace basis");
  if (basis.cols() > basis.rows()) {
    throw ShapeError("subspace basis has more columns (" + std::to_string(basis.cols()) +
                     ") than its ambient dimension (" + std::to_string(basis.rows()) + ")");
  }
  const Index r = basis.cols();
  const ComplexMatrix gram = basis.adjoint() * basis;
  const double defect =
      r == 0 ? 0.0 : (gram - ComplexMatrix::Identity(r, r)).cwiseAbs().maxCoeff();
  if (!(defect <= tol)) {
    throw ShapeError("subspace basis is not orthonormal (Gram defect " +
                     std::to_string(defect) + ")");
  }
  const Index ambient = basis.rows();
  return Subspace(ambient, std::move(basis));
}

ComplexMatrix Subspace::projector() const { return basis_ * basis_.adjoint(); }

double Subspace::residual(const ComplexMatrix& vectors) const {
  if (vectors.rows() != ambient_dim_) {
    throw ShapeError("residual: vectors live in C^" + std::to_string(vectors.rows()) +
                     ", subspace in C^" + std::to_string(ambient_dim_));
  }
  if (vectors.cols() == 0) return 0.0;
  const ComplexMatrix rest = vectors - basis_ * (basis_.adjoint() * vectors);
  return rest.colwise().norm().maxCoeff();
}

bool Subspace::contains(const Subspace& other, double tol) const {
  return residual(other.basis()) < tol;
}

// ---------------------------------------------------------------------------
// Subspace arithmetic

Subspace orthonormal_basis(const ComplexMatrix& vectors, double tol) {
  require_finite(vectors, "orthonormal_basis input");
  const Index n = vectors.rows();
  if (vectors.cols() == 0) return Subspace::zero(n);

  ComplexMatrix work = vectors;
  Eigen::VectorXd norms = work.colwise().norm();
  const double threshold = tol * (1.0 + norms.maxCoeff());

  ComplexMatrix q(n, std::min(n, vectors.cols()));
  Index rank = 0;
  std::vector<bool> used(static_cast<std::size_t>(work.cols()), false);
  while (rank < q.cols()) {
    Index pivot = -1;
    double best = threshold;
    for (Index j = 0; j < work.cols(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double r = work.col(j).norm();
      if (r >= best) {
        best = r;
        pivot = j;
      }
    }
    if (pivot < 0) break;
    used[static_cast<std::size_t>(pivot)] = true;

    ComplexVector v = work.col(pivot);
    // second pass against the accepted basis
    v -= q.leftCols(rank) * (q.leftCols(rank).adjoint() * v);
    const double len = v.norm();
    if (len < threshold) continue;
    v /= len;
    q.col(rank) = v;
    ++rank;
    work -= v * (v.adjoint() * work);
  }
  return Subspace::from_orthonormal(q.leftCols(rank), 1e-8);
}

namespace {

void require_same_ambient(const Subspace& a, const Subspace& b, const char* op) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw ShapeError(std::string(op) + ": ambient dimensions differ (" +
                     std::to_string(a.ambient_dim()) + " vs " +
                     std::to_string(b.ambient_dim()) + ")");
  }
}

// Orthonormal completion of the orthonormal columns c inside C^n.
ComplexMatrix complete_columns(const ComplexMatrix& c) {
  const Index n = c.rows();
  const Index r = c.cols();
  if (r == 0) return ComplexMatrix::Identity(n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(c);
  const ComplexMatrix full = qr.householderQ() * ComplexMatrix::Identity(n, n);
  return full.rightCols(n - r);
}

}  // namespace

Subspace subspace_sum(const Subspace& a, const Subspace& b, double tol) {
  require_same_ambient(a, b, "subspace_sum");
  ComplexMatrix joined(a.ambient_dim(), a.dim() + b.dim());
  joined << a.basis(), b.basis();
  return orthonormal_basis(joined, tol);
}

Subspace subspace_intersection(const Subspace& a, const Subspace& b, double tol) {
  require_same_ambient(a, b, "subspace_intersection");
  const Subspace perp = subspace_sum(orthogonal_complement(a), orthogonal_complement(b), tol);
  return orthogonal_complement(perp);
}

Subspace orthogonal_complement(const Subspace& a) {
  return Subspace::from_orthonormal(complete_columns(a.basis()), 1e-8);
}

Subspace orthogonal_complement(const Subspace& a, const Subspace& within) {
  require_same_ambient(a, within, "orthogonal_complement");
  const double res = within.residual(a.basis());
  if (!(res < kContainmentTol)) {
    throw PreconditionError("orthogonal_complement: subspace is not contained in the "
                            "enclosing one (residual " + std::to_string(res) + ")");
  }
  if (a.dim() == 0) return within;
  // Work in the coordinates of `within`, then map back.
  const ComplexMatrix coords = within.basis().adjoint() * a.basis();
  const Subspace in_coords = orthonormal_basis(coords, kRankTol);
  const ComplexMatrix rest = complete_columns(in_coords.basis());
  return Subspace::from_orthonormal(within.basis() * rest, 1e-8);
}

bool is_invariant(const ComplexMatrix& m, const Subspace& s, double tol) {
  if (m.rows() != s.ambient_dim() || m.cols() != s.ambient_dim()) {
    throw ShapeError("is_invariant: matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", subspace lives in C^" +
                     std::to_string(s.ambient_dim()));
  }
  if (s.dim() == 0) return true;
  const ComplexMatrix image = m * s.basis();
  const ComplexMatrix rest = image - s.basis() * (s.basis().adjoint() * image);
  return op_norm(rest) < tol;
}

Subspace image_subspace(const ComplexMatrix& m, const Subspace& s, double tol) {
  if (m.cols() != s.ambient_dim()) {
    throw ShapeError("image_subspace: matrix has " + std::to_string(m.cols()) +
                     " columns, subspace lives in C^" + std::to_string(s.ambient_dim()));
  }
  if (s.dim() == 0) return Subspace::zero(m.rows());
  return orthonormal_basis(m * s.basis(), tol);
}

double projector_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) return 2.0;
  return op_norm(a.projector() - b.projector());
}

Subspace canonical(const Subspace& s) {
  const Index n = s.ambient_dim();
  const Index r = s.dim();
  if (r == 0 || r == n) return r == 0 ? Subspace::zero(n) : Subspace::whole(n);

  ComplexMatrix work = s.projector();
  ComplexMatrix q(n, r);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < r; ++k) {
    Eigen::VectorXd norms = work.colwise().norm();
    double best = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (!used[static_cast<std::size_t>(j)]) best = std::max(best, norms(j));
    }
    Index pivot = -1;
    for (Index j = 0; j < n; ++j) {
      if (!used[static_cast<std::size_t>(j)] && norms(j) >= best * (1.0 - 1e-8)) {
        pivot = j;
        break;
      }
    }
    if (pivot < 0 || best <= 0.0) return s;
    used[static_cast<std::size_t>(pivot)] = true;
    ComplexVector v = work.col(pivot);
    v -= q.leftCols(k) * (q.leftCols(k).adjoint() * v);
    // Pull back into s to undo drift from small pivots.
    v = s.basis() * (s.basis().adjoint() * v);
    v -= q.leftCols(k) * (q.leftCols(k).adjoint() * v);
    v.normalize();
    q.col(k) = v;
    work -= v * (v.adjoint() * work);
  }
  return Subspace::from_orthonormal(std::move(q), 1e-8);
}

Subspace embed(const Subspace& s, Index extra, bool leading) {
  ComplexMatrix basis = ComplexMatrix::Zero(s.ambient_dim() + extra, s.dim());
  if (leading) {
    basis.topRows(s.ambient_dim()) = s.basis();
  } else {
    basis.bottomRows(s.ambient_dim()) = s.basis();
  }
  return Subspace::from_orthonormal(std::move(basis));
}

}  // namespace msys
