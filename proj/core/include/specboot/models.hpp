#pragma once

// Population covariance models and data generators.
//
// Observations are X_i = U diag(lambda)^{1/2} Z_i with Z_i isotropic
// (E Z = 0, Cov Z = I). Two decay profiles and a gap-sensitivity profile set
// the eigenvalues; U is Haar-random.

#include <string>
#include <variant>
#include <vector>

#include "specboot/linalg.hpp"
#include "specboot/streams.hpp"

namespace specboot {

/// lambda_j = j^{-gamma}
struct PolynomialDecay {
  double gamma = 1.0;
};

/// lambda_j = delta^j
struct ExponentialDecay {
  double delta = 0.8;
};

/// Fixed leading eigenvalues followed by a polynomial tail j^{-tail_gamma}
/// (j is the 1-based position in the full spectrum).
struct CustomLeading {
  std::vector<double> leading;
  double tail_gamma = 1.0;
};

using DecayProfile = std::variant<PolynomialDecay, ExponentialDecay, CustomLeading>;

/// Leading eigenvalues (1+g, 1, 1-g) with a j^{-1} tail. g = 0 gives tied
/// eigenvalues and is allowed; g must lie in [0, 1).
CustomLeading gap_profile(double g);

/// Eigenvalues prescribed by the profile for dimension p. Throws ArgumentError
/// for gamma <= 0, delta outside (0,1), g outside [0,1) or p too small
/// (CustomLeading needs p >= 5 and p >= leading.size()).
Spectrum profile_spectrum(const DecayProfile& profile, Eigen::Index p);

std::string describe(const DecayProfile& profile);

enum class GeneratorKind {
  GaussianIid,     // entries i.i.d. N(0,1)
  EllipticalExp,   // Z = xi V, V uniform on the sphere, xi^2 ~ Exp(mean p)
  TwoPointIid,     // entries i.i.d. +-1, kurtosis 1
  UniformIid,      // entries i.i.d. U(-sqrt 3, sqrt 3), kurtosis 1.8
};

struct GeneratorFamily {
  GeneratorKind kind = GeneratorKind::GaussianIid;

  bool independent_entries() const { return kind != GeneratorKind::EllipticalExp; }
  /// Fourth moment of one entry; only meaningful for independent_entries().
  double kurtosis() const;
  std::string name() const;
};

/// Parses "gaussian", "elliptical", "twopoint", "uniform".
GeneratorFamily parse_generator(const std::string& name);

/// One isotropic vector Z of length p.
Vector generate_z(const GeneratorFamily& generator, Eigen::Index p, Rng& rng);

struct EllipticalDraw {
  double xi = 0.0;
  Vector v;  // unit length
};

/// The (xi, V) pair behind one EllipticalExp draw; generate_z on the same
/// stream returns xi * v.
EllipticalDraw draw_elliptical(Eigen::Index p, Rng& rng);

/// Fills row i of `out` with generate_z, in row order.
void generate_z_rows(const GeneratorFamily& generator, Rng& rng, Matrix& out);

class PopulationModel {
 public:
  PopulationModel(Spectrum spectrum, OrthogonalBasis basis, GeneratorFamily generator);

  const Spectrum& spectrum() const noexcept { return spectrum_; }
  const OrthogonalBasis& basis() const noexcept { return basis_; }
  const GeneratorFamily& generator() const noexcept { return generator_; }
  Eigen::Index dim() const noexcept { return spectrum_.size(); }

  /// Sigma = U Lambda U^T.
  Matrix sigma() const;
  /// (U Lambda^{1/2})^T, so that a row z of Z maps to the row z * root_t().
  const Matrix& root_transposed() const noexcept { return root_t_; }

 private:
  Spectrum spectrum_;
  OrthogonalBasis basis_;
  GeneratorFamily generator_;
  Matrix root_t_;
};

PopulationModel build_population(const DecayProfile& profile, Eigen::Index p,
                                 const GeneratorFamily& generator, Rng& rng);

struct Dataset {
  Matrix x;  // n x p, one observation per row
  std::string provenance;

  Eigen::Index n() const noexcept { return x.rows(); }
  Eigen::Index p() const noexcept { return x.cols(); }
};

/// n i.i.d. rows X_i = U Lambda^{1/2} Z_i. When `z_out` is non-null it
/// receives the underlying Z draws (n x p).
Dataset sample_dataset(const PopulationModel& model, Eigen::Index n, Rng& rng,
                       Matrix* z_out = nullptr);

}  // namespace specboot
