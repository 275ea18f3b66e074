#include <gtest/gtest.h>

#include <cmath>

#include "specboot/errors.hpp"
#include "specboot/gamma.hpp"
#include "specboot/models.hpp"

namespace specboot {
namespace {

OrthogonalBasis random_basis(Eigen::Index p, std::uint64_t seed) {
  Rng rng = derive_stream(StreamKey(seed).child("basis", 0));
  return haar_orthogonal(p, rng);
}

TEST(AnalyticIid, GaussianIsTwoIdentity) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GammaMatrix g = analytic_gamma_iid(Vector::Constant(6, 3.0), random_basis(6, seed), 4);
    EXPECT_LE((g.matrix() - 2.0 * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(AnalyticIid, IdentityBasisIsDiagonal) {
  Vector kappa(4);
  kappa << 9.0, 2.0, 1.8, 5.0;
  const GammaMatrix g = analytic_gamma_iid(kappa, OrthogonalBasis::identity(4), 3);
  EXPECT_DOUBLE_EQ(g(0, 0), 8.0);
  EXPECT_DOUBLE_EQ(g(1, 1), 1.0);
  EXPECT_NEAR(g(2, 2), 0.8, 1e-15);
  EXPECT_EQ(g(0, 1), 0.0);
  EXPECT_EQ(g(1, 2), 0.0);
}

TEST(AnalyticIid, ScalarFormula) {
  const OrthogonalBasis u = random_basis(5, 7);
  Vector kappa(5);
  kappa << 1.0, 1.8, 3.0, 6.0, 12.0;
  double want = 2.0;
  for (Eigen::Index l = 0; l < 5; ++l) want += (kappa[l] - 3.0) * std::pow(u.matrix()(l, 0), 4);
  EXPECT_NEAR(analytic_gamma_iid(kappa, u, 1)(0, 0), want, 1e-13);
}

TEST(AnalyticIid, Errors) {
  EXPECT_THROW(analytic_gamma_iid(Vector::Constant(3, 3.0), OrthogonalBasis::identity(4), 2),
               DimensionError);
  EXPECT_THROW(analytic_gamma_iid(Vector::Constant(4, 0.5), OrthogonalBasis::identity(4), 2),
               ArgumentError);
  EXPECT_THROW(analytic_gamma_iid(Vector::Constant(4, 3.0), OrthogonalBasis::identity(4), 5),
               ArgumentError);
}

TEST(AnalyticIid, SmallestEigenvalueBound) {
  Rng rng = derive_stream(StreamKey(8));
  std::uniform_real_distribution<double> u(1.0, 3.0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Vector kappa(7);
    for (auto& x : kappa) x = u(rng);
    const GammaMatrix g = analytic_gamma_iid(kappa, random_basis(7, 100 + seed), 4);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(g.matrix());
    EXPECT_GE(es.eigenvalues()[0], kappa.minCoeff() - 1.0 - 1e-12);
  }
}

TEST(AnalyticElliptical, Examples) {
  const GammaMatrix g = analytic_gamma_elliptical(4, 32.0, 2);
  EXPECT_NEAR(g(0, 0), 8.0 / 3.0 + 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(g(0, 1), 1.0 / 3.0, 1e-15);

  for (Eigen::Index p : {2, 5, 9}) {
    const double pd = static_cast<double>(p);
    const GammaMatrix c = analytic_gamma_elliptical(p, pd * pd, 2);
    const double a = 2 * pd / (pd + 2), b = pd / (pd + 2) - 1;
    EXPECT_LT(b, 0.0);
    EXPECT_NEAR(c(0, 0), a + b, 1e-14);
    EXPECT_NEAR(c(1, 0), b, 1e-14);
  }
  const GammaMatrix one = analytic_gamma_elliptical(6, 100.0, 1);
  EXPECT_NEAR(one(0, 0), 2 * 100.0 / 48 + 100.0 / 48 - 1, 1e-14);
}

TEST(AnalyticElliptical, Errors) {
  EXPECT_THROW(analytic_gamma_elliptical(1, 2.0, 1), ArgumentError);
  EXPECT_THROW(analytic_gamma_elliptical(4, 15.0, 2), ArgumentError);
  EXPECT_THROW(analytic_gamma_elliptical(4, 32.0, 5), ArgumentError);
}

TEST(AnalyticElliptical, EigenvalueStructure) {
  for (Eigen::Index p : {3, 6, 10}) {
    for (Eigen::Index k = 1; k <= p; ++k) {
      const double pd = static_cast<double>(p);
      const double xi4 = 2 * pd * pd;
      const double a = 2 * xi4 / (pd * (pd + 2)), b = xi4 / (pd * (pd + 2)) - 1;
      const GammaMatrix g = analytic_gamma_elliptical(p, xi4, k);
      const Eigen::SelfAdjointEigenSolver<Matrix> es(g.matrix());
      const Vector ev = es.eigenvalues().reverse();
      EXPECT_NEAR(ev[0], a + static_cast<double>(k) * b, 1e-12);
      for (Eigen::Index j = 1; j < k; ++j) EXPECT_NEAR(ev[j], a, 1e-12);
      EXPECT_LE((g.eigenvalues() - ev).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Empirical, Examples) {
  Matrix z(2, 1);
  z << 1, -1;
  EXPECT_EQ(empirical_gamma(z, OrthogonalBasis::identity(1), 1)(0, 0), 0.0);
  z << 2, 0;
  EXPECT_DOUBLE_EQ(empirical_gamma(z, OrthogonalBasis::identity(1), 1)(0, 0), 4.0);
  EXPECT_THROW(empirical_gamma(Matrix::Ones(1, 1), OrthogonalBasis::identity(1), 1), DimensionError);
  EXPECT_THROW(empirical_gamma(Matrix::Ones(3, 2), OrthogonalBasis::identity(3), 1), DimensionError);
}

TEST(Empirical, MatchesDirectFormula) {
  Rng rng = derive_stream(StreamKey(9));
  Matrix z(50, 4);
  generate_z_rows(parse_generator("uniform"), rng, z);
  const OrthogonalBasis u = random_basis(4, 10);
  Matrix w(50, 3);
  for (Eigen::Index i = 0; i < 50; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) w(i, j) = std::pow(u.column(j).dot(z.row(i)), 2) - 1;
  const Matrix centered = w.rowwise() - w.colwise().mean();
  const Matrix want = centered.transpose() * centered / 50.0;
  EXPECT_LE((empirical_gamma(z, u, 3).matrix() - want).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(GammaMatrix, RejectsIndefinite) {
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  EXPECT_THROW(GammaMatrix{m}, ArgumentError);
  EXPECT_THROW(GammaMatrix{Matrix(2, 3)}, ArgumentError);
}

struct McCase {
  const char* generator;
  Eigen::Index p;
  Eigen::Index k;
};

TEST(MonteCarlo, EmpiricalConvergesToAnalytic) {
  for (const McCase c : {McCase{"gaussian", 3, 3}, McCase{"gaussian", 5, 3}, McCase{"uniform", 5, 3},
                         McCase{"twopoint", 5, 3}, McCase{"elliptical", 5, 3}}) {
    const GeneratorFamily gen = parse_generator(c.generator);
    const OrthogonalBasis u = random_basis(c.p, 11);
    const double pd = static_cast<double>(c.p);
    const GammaMatrix analytic = gen.independent_entries()
                                     ? analytic_gamma_iid(Vector::Constant(c.p, gen.kurtosis()), u, c.k)
                                     : analytic_gamma_elliptical(c.p, 2 * pd * pd, c.k);
    Rng rng = derive_stream(StreamKey(12).child(c.generator, static_cast<std::uint64_t>(c.p)));
    // (z'u)^4 has a heavy tail under the elliptical law (sd of the Gamma_11
    // estimate is about 21 / sqrt(draws) at p = 5), so it gets more draws.
    Matrix z(gen.independent_entries() ? 200000 : 2000000, c.p);
    generate_z_rows(gen, rng, z);
    const GammaMatrix mc = empirical_gamma(z, u, c.k);
    EXPECT_LE((mc.matrix() - analytic.matrix()).cwiseAbs().maxCoeff(), 0.05) << c.generator << " p=" << c.p;
  }
}

}  // namespace
}  // namespace specboot
