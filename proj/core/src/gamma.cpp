#include "specboot/gamma.hpp"

#include <Eigen/Eigenvalues>

#include <string>

#include "specboot/errors.hpp"

namespace specboot {

GammaMatrix::GammaMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.size() == 0 || entries_.rows() != entries_.cols()) {
    throw ArgumentError("Gamma must be a non-empty square matrix");
  }
  entries_ = (entries_ + entries_.transpose()) * 0.5;
  const Vector ev = eigenvalues();
  const double top = std::max(ev[0], 0.0);
  if (ev[ev.size() - 1] < -1e-8 * std::max(top, 1e-300)) {
    throw ArgumentError("Gamma is not positive semidefinite (lambda_min = " +
                        std::to_string(ev[ev.size() - 1]) + ")");
  }
}

Vector GammaMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> s(entries_, Eigen::EigenvaluesOnly);
  return s.eigenvalues().reverse();
}

namespace {

void check_k(Eigen::Index k, Eigen::Index p) {
  if (k < 1 || k > p) {
    throw ArgumentError("k=" + std::to_string(k) + " must lie in [1, p=" + std::to_string(p) + "]");
  }
}

}  // namespace

GammaMatrix analytic_gamma_iid(const Vector& kurtoses, const OrthogonalBasis& basis,
                               Eigen::Index k) {
  const Eigen::Index p = basis.dim();
  if (kurtoses.size() != p) {
    throw DimensionError("kurtosis vector has length " + std::to_string(kurtoses.size()) +
                         ", basis has dimension " + std::to_string(p));
  }
  check_k(k, p);
  if (kurtoses.minCoeff() < 1.0) throw ArgumentError("kurtosis must be >= 1");

  const Matrix h = basis.matrix().leftCols(k).array().square().matrix();  // p x k
  const Vector excess = kurtoses.array() - 3.0;
  Matrix g = h.transpose() * excess.asDiagonal() * h;
  g.diagonal().array() += 2.0;
  return GammaMatrix(std::move(g));
}

GammaMatrix analytic_gamma_elliptical(Eigen::Index p, double xi4, Eigen::Index k) {
  if (p < 2) throw ArgumentError("elliptical Gamma needs p >= 2");
  check_k(k, p);
  const double pd = static_cast<double>(p);
  if (!(xi4 >= pd * pd * (1.0 - 1e-12))) {
    throw ArgumentError("E[xi^4] must be >= p^2 (Jensen), got " + std::to_string(xi4));
  }
  const double ratio = xi4 / (pd * (pd + 2.0));
  const double a = 2.0 * ratio;
  const double b = ratio - 1.0;
  Matrix g = Matrix::Constant(k, k, b);
  g.diagonal().array() += a;
  return GammaMatrix(std::move(g));
}

GammaMatrix empirical_gamma(const Matrix& z, const OrthogonalBasis& basis, Eigen::Index k) {
  if (z.rows() < 2) throw DimensionError("empirical Gamma needs n >= 2 draws");
  if (z.cols() != basis.dim()) throw DimensionError("Z columns differ from basis dimension");
  check_k(k, basis.dim());

  Matrix w = z * basis.matrix().leftCols(k);  // n x k projections
  w = w.array().square() - 1.0;
  const Eigen::RowVectorXd mean = w.colwise().mean();
  w.rowwise() -= mean;
  Matrix g = (w.transpose() * w) / static_cast<double>(z.rows());
  return GammaMatrix(std::move(g));
}

}  // namespace specboot
