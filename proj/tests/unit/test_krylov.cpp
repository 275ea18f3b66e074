#include <gtest/gtest.h>

#include "specboot/krylov.hpp"

namespace specboot {
namespace {

SymmetricOperator dense(const Matrix& a) {
  return [&a](const Vector& x, Vector& y) { y.noalias() = a * x; };
}

Vector dense_top(const Matrix& a, Eigen::Index k) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  return es.eigenvalues().reverse().head(k).cwiseMax(0.0);
}

TEST(Lanczos, MatchesDenseOnRandomPsd) {
  Rng rng = derive_stream(StreamKey(1));
  std::normal_distribution<double> z;
  for (Eigen::Index dim : {1, 2, 7, 60, 150}) {
    for (Eigen::Index rank : {dim, std::max<Eigen::Index>(1, dim / 3)}) {
      Matrix g(dim, rank);
      for (auto& v : g.reshaped()) v = z(rng);
      const Matrix a = g * g.transpose();
      const Eigen::Index k = std::min<Eigen::Index>(5, dim);
      const LanczosResult r = lanczos_top_eigenvalues(dense(a), dim, k);
      const Vector want = dense_top(a, k);
      EXPECT_LE((r.values - want).cwiseAbs().maxCoeff(), 1e-9 * want[0]) << dim << " rank " << rank;
    }
  }
}

TEST(Lanczos, RepeatedEigenvalues) {
  Vector d(6);
  d << 3, 3, 3, 1, 1, 0.5;
  const Matrix a = d.asDiagonal();
  const LanczosResult r = lanczos_top_eigenvalues(dense(a), 6, 5);
  const Vector want = d.head(5);
  EXPECT_LE((r.values - want).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Lanczos, ZeroOperatorAndPadding) {
  const Matrix zero = Matrix::Zero(4, 4);
  const LanczosResult r = lanczos_top_eigenvalues(dense(zero), 4, 2);
  EXPECT_EQ(r.values, Vector::Zero(2));
}

TEST(Lanczos, DeterministicStart) {
  Matrix a = Matrix::Random(30, 30);
  a = a * a.transpose();
  const LanczosResult r1 = lanczos_top_eigenvalues(dense(a), 30, 3);
  const LanczosResult r2 = lanczos_top_eigenvalues(dense(a), 30, 3);
  EXPECT_EQ(r1.values, r2.values);
  EXPECT_EQ(r1.steps, r2.steps);
}

}  // namespace
}  // namespace specboot
