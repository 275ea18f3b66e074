#include "specboot/krylov.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "specboot/errors.hpp"
#include "specboot/streams.hpp"

namespace specboot {

namespace {

// Deterministic start/restart vectors in [-1, 1)^dim.
void fixed_random_vector(std::uint64_t salt, Vector& v) {
  std::uint64_t state = 0x5eed5eedULL ^ (salt * 0x9e3779b97f4a7c15ULL);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    state = splitmix64(state);
    v[i] = static_cast<double>(state >> 11) * 0x1.0p-52 - 1.0;
  }
}

// Two passes of classical Gram-Schmidt against the first `cols` basis columns.
void reorthogonalize(const Matrix& basis, Eigen::Index cols, Vector& w) {
  for (int pass = 0; pass < 2; ++pass) {
    const Vector coeff = basis.leftCols(cols).transpose() * w;
    w.noalias() -= basis.leftCols(cols) * coeff;
  }
}

}  // namespace

LanczosResult lanczos_top_eigenvalues(const SymmetricOperator& op, Eigen::Index dim,
                                      Eigen::Index k, const LanczosOptions& options) {
  if (dim < 1) throw DimensionError("lanczos: operator dimension must be >= 1");
  if (k < 1) throw ArgumentError("lanczos: k must be >= 1");

  Matrix basis(dim, dim);
  Vector alpha = Vector::Zero(dim);
  Vector beta = Vector::Zero(dim);
  Vector q(dim), w(dim);

  fixed_random_vector(0, q);
  q.normalize();
  basis.col(0) = q;

  LanczosResult result;
  result.values = Vector::Zero(k);
  const Eigen::Index want = std::min(k, dim);
  Eigen::SelfAdjointEigenSolver<Matrix> tri;
  std::uint64_t restarts = 0;
  double theta_max = 0.0;

  for (Eigen::Index j = 0; j < dim; ++j) {
    op(basis.col(j), w);
    alpha[j] = basis.col(j).dot(w);
    reorthogonalize(basis, j + 1, w);
    double b = w.norm();
    theta_max = std::max({theta_max, std::abs(alpha[j]), b});

    const Eigen::Index m = j + 1;
    const bool last = m == dim;
    const bool invariant = b <= 1e-13 * std::max(theta_max, 1e-300);
    const bool check = last || invariant || (m >= want && (m - want) % options.check_every == 0);

    if (check) {
      Matrix t = Matrix::Zero(m, m);
      t.diagonal() = alpha.head(m);
      for (Eigen::Index i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
      tri.compute(t, last ? Eigen::EigenvaluesOnly : Eigen::ComputeEigenvectors);
      const Vector& theta = tri.eigenvalues();  // ascending
      const Eigen::Index have = std::min(want, m);
      bool converged = last;
      // An invariant subspace gives exact eigenvalues but not necessarily the
      // leading ones (an exact multiplicity hides the other copies), so it
      // never ends the iteration before the space is full.
      if (!last && !invariant && m >= want) {
        converged = true;
        const double scale = std::max(theta[m - 1], 0.0);
        const double resid_b = b;
        for (Eigen::Index i = 0; i < want; ++i) {
          const double resid = resid_b * std::abs(tri.eigenvectors()(m - 1, m - 1 - i));
          if (resid > options.tol * scale) {
            converged = false;
            break;
          }
        }
      }
      if (converged) {
        for (Eigen::Index i = 0; i < have; ++i) result.values[i] = theta[m - 1 - i];
        result.steps = static_cast<int>(m);
        break;
      }
    }
    if (last) break;

    if (invariant) {
      // Krylov space exhausted before convergence: continue from a fresh
      // direction orthogonal to everything found so far.
      fixed_random_vector(++restarts, w);
      reorthogonalize(basis, j + 1, w);
      b = w.norm();
      beta[j] = 0.0;
      if (b == 0.0) break;
      basis.col(j + 1) = w / b;
      continue;
    }
    beta[j] = b;
    basis.col(j + 1) = w / b;
  }

  for (Eigen::Index i = 0; i < k; ++i) result.values[i] = std::max(result.values[i], 0.0);
  return result;
}

}  // namespace specboot
