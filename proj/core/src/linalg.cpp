#include "specboot/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "specboot/errors.hpp"

namespace specboot {

namespace {

// Applies the clamp-or-reject rule to an already sorted descending vector.
void clamp_negative_tail(Vector& v) {
  if (v.size() == 0) return;
  const double scale = std::max(v[0], 0.0);
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (v[j] < 0.0) {
      if (v[j] < -kNegativeEigenTolerance * scale) {
        throw DomainError("eigenvalue " + std::to_string(v[j]) + " at index " +
                              std::to_string(j) + " is materially negative",
                          static_cast<std::size_t>(j));
      }
      v[j] = 0.0;
    }
  }
}

Vector descending(const Vector& ascending) { return ascending.reverse(); }

}  // namespace

CovarianceMatrix::CovarianceMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.size() == 0) throw DimensionError("covariance matrix is empty");
  if (entries_.rows() != entries_.cols()) {
    throw ArgumentError("covariance matrix must be square, got " +
                        std::to_string(entries_.rows()) + "x" +
                        std::to_string(entries_.cols()));
  }
  const double scale = std::max(entries_.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * scale)) {
    throw ArgumentError("covariance matrix is not symmetric (max asymmetry " +
                        std::to_string(asym) + ")");
  }
  entries_.triangularView<Eigen::StrictlyUpper>() =
      entries_.transpose().triangularView<Eigen::StrictlyUpper>();
}

Spectrum::Spectrum(Vector values) : values_(std::move(values)) {
  for (Eigen::Index j = 0; j + 1 < values_.size(); ++j) {
    if (values_[j] < values_[j + 1]) {
      throw ArgumentError("spectrum must be sorted in non-increasing order (index " +
                          std::to_string(j) + ")");
    }
  }
  clamp_negative_tail(values_);
}

Spectrum Spectrum::from_unsorted(Vector values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  return Spectrum(std::move(values));
}

Spectrum Spectrum::head(Eigen::Index k) const {
  if (k < 0 || k > size()) throw ArgumentError("Spectrum::head: k out of range");
  return Spectrum(Vector(values_.head(k)));
}

OrthogonalBasis::OrthogonalBasis(Matrix q) : q_(std::move(q)) {
  if (q_.size() == 0) throw DimensionError("orthogonal basis is empty");
  if (q_.rows() != q_.cols()) throw ArgumentError("orthogonal basis must be square");
  const Matrix gram = q_.transpose() * q_;
  const double err = (gram - Matrix::Identity(q_.rows(), q_.cols())).cwiseAbs().maxCoeff();
  if (!(err <= 1e-10)) {
    throw ArgumentError("matrix is not orthogonal (max |Q^T Q - I| = " +
                        std::to_string(err) + ")");
  }
}

OrthogonalBasis OrthogonalBasis::identity(Eigen::Index p) {
  return OrthogonalBasis(Matrix::Identity(p, p));
}

CovarianceMatrix sample_covariance(const Matrix& data, bool centered) {
  if (data.rows() == 0 || data.cols() == 0) {
    throw DimensionError("sample_covariance: data matrix is empty");
  }
  const double n = static_cast<double>(data.rows());
  Matrix cov = Matrix::Zero(data.cols(), data.cols());
  if (centered) {
    const Matrix dev = data.rowwise() - data.colwise().mean();
    cov.selfadjointView<Eigen::Lower>().rankUpdate(dev.transpose(), 1.0 / n);
  } else {
    cov.selfadjointView<Eigen::Lower>().rankUpdate(data.transpose(), 1.0 / n);
  }
  cov.triangularView<Eigen::StrictlyUpper>() =
      cov.transpose().triangularView<Eigen::StrictlyUpper>();
  return CovarianceMatrix(std::move(cov));
}

Spectrum full_spectrum(const CovarianceMatrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  return Spectrum(descending(solver.eigenvalues()));
}

Spectrum top_eigenvalues(const CovarianceMatrix& cov, Eigen::Index k) {
  if (k < 1 || k > cov.dim()) {
    throw ArgumentError("top_eigenvalues: k=" + std::to_string(k) + " must lie in [1, " +
                        std::to_string(cov.dim()) + "]");
  }
  return full_spectrum(cov).head(k);
}

Spectrum top_eigenvalues(const Matrix& data, Eigen::Index k, bool centered, DataRoute route) {
  if (data.rows() == 0 || data.cols() == 0) {
    throw DimensionError("top_eigenvalues: data matrix is empty");
  }
  const Eigen::Index p = data.cols();
  if (k < 1 || k > p) {
    throw ArgumentError("top_eigenvalues: k=" + std::to_string(k) + " must lie in [1, " +
                        std::to_string(p) + "]");
  }
  if (route == DataRoute::Auto) {
    route = p <= kDenseEigenMaxDim ? DataRoute::Covariance : DataRoute::Svd;
  }
  if (route == DataRoute::Covariance) {
    return top_eigenvalues(sample_covariance(data, centered), k);
  }

  const double n = static_cast<double>(data.rows());
  Matrix dev = centered ? Matrix(data.rowwise() - data.colwise().mean()) : data;
  Eigen::BDCSVD<Matrix> svd(dev);
  const Vector& s = svd.singularValues();  // descending, length min(n, p)
  Vector out = Vector::Zero(k);
  const Eigen::Index have = std::min<Eigen::Index>(k, s.size());
  out.head(have) = s.head(have).array().square() / n;
  return Spectrum(std::move(out));
}

double effective_rank(const Spectrum& full) {
  if (full.size() == 0 || !(full[0] > 0.0)) {
    throw DegenerateInputError("effective_rank: leading eigenvalue must be positive");
  }
  return full.sum() / full[0];
}

OrthogonalBasis haar_orthogonal(Eigen::Index p, Rng& rng) {
  if (p < 1) throw ArgumentError("haar_orthogonal: p must be >= 1");
  std::normal_distribution<double> normal;
  Matrix g(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) g(i, j) = normal(rng);

  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(p, p);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return OrthogonalBasis(std::move(q));
}

WielandtReport wielandt_check(const CovarianceMatrix& a, Eigen::Index k) {
  WielandtReport report;
  const Eigen::Index p = a.dim();
  if (k < 1 || k >= p) return report;

  const Matrix& m = a.matrix();
  const Matrix b = m.topLeftCorner(k, k);
  const Matrix c = m.topRightCorner(k, p - k);
  const Matrix d = m.bottomRightCorner(p - k, p - k);

  auto eig_desc = [](const Matrix& x) {
    Eigen::SelfAdjointEigenSolver<Matrix> s(x, Eigen::EigenvaluesOnly);
    return descending(s.eigenvalues());
  };
  const Vector lam_b = eig_desc(b);
  const Vector lam_d = eig_desc(d);
  if (!(lam_b[k - 1] > lam_d[0])) return report;

  const Vector lam_a = eig_desc(m);
  const double cc = eig_desc(c * c.transpose())[0];
  const double slack = 1e-12 * std::max(1.0, std::abs(lam_a[0]));

  report.applicable = true;
  report.holds = true;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double gap = lam_a[j] - lam_b[j];
    const double bound = std::max(cc, 0.0) / (lam_b[j] - lam_d[0]);
    report.gaps.push_back(gap);
    report.bounds.push_back(bound);
    if (gap < -slack || gap > bound + slack) report.holds = false;
  }
  return report;
}

}  // namespace specboot
