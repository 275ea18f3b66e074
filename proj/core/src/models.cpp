#include "specboot/models.hpp"

#include <cmath>
#include <random>

#include "specboot/errors.hpp"

namespace specboot {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

const double kSqrt3 = std::sqrt(3.0);

// Writes V (unit length) into row and returns xi with xi^2 ~ Exp(mean p).
double fill_sphere_radius(Rng& rng, double* row, Eigen::Index p) {
  std::normal_distribution<double> normal;
  double norm2 = 0.0;
  for (Eigen::Index l = 0; l < p; ++l) {
    row[l] = normal(rng);
    norm2 += row[l] * row[l];
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (Eigen::Index l = 0; l < p; ++l) row[l] *= inv;
  std::exponential_distribution<double> expo(1.0 / static_cast<double>(p));
  return std::sqrt(expo(rng));
}

void fill_row(const GeneratorFamily& generator, Rng& rng, double* row, Eigen::Index p) {
  switch (generator.kind) {
    case GeneratorKind::GaussianIid: {
      std::normal_distribution<double> normal;
      for (Eigen::Index l = 0; l < p; ++l) row[l] = normal(rng);
      return;
    }
    case GeneratorKind::EllipticalExp: {
      const double xi = fill_sphere_radius(rng, row, p);
      for (Eigen::Index l = 0; l < p; ++l) row[l] *= xi;
      return;
    }
    case GeneratorKind::TwoPointIid: {
      std::bernoulli_distribution coin(0.5);
      for (Eigen::Index l = 0; l < p; ++l) row[l] = coin(rng) ? 1.0 : -1.0;
      return;
    }
    case GeneratorKind::UniformIid: {
      std::uniform_real_distribution<double> unif(-kSqrt3, kSqrt3);
      for (Eigen::Index l = 0; l < p; ++l) row[l] = unif(rng);
      return;
    }
  }
}

}  // namespace

CustomLeading gap_profile(double g) {
  if (!(g >= 0.0 && g < 1.0)) {
    throw ArgumentError("gap parameter g must lie in [0, 1), got " + std::to_string(g));
  }
  return CustomLeading{{1.0 + g, 1.0, 1.0 - g}, 1.0};
}

Spectrum profile_spectrum(const DecayProfile& profile, Eigen::Index p) {
  if (p < 1) throw ArgumentError("dimension p must be >= 1");
  Vector v(p);
  std::visit(
      Overloaded{
          [&](const PolynomialDecay& d) {
            if (!(d.gamma > 0.0)) {
              throw ArgumentError("polynomial decay gamma must be > 0, got " +
                                  std::to_string(d.gamma));
            }
            for (Eigen::Index j = 0; j < p; ++j)
              v[j] = std::pow(static_cast<double>(j + 1), -d.gamma);
          },
          [&](const ExponentialDecay& d) {
            if (!(d.delta > 0.0 && d.delta < 1.0)) {
              throw ArgumentError("exponential decay delta must lie in (0, 1), got " +
                                  std::to_string(d.delta));
            }
            for (Eigen::Index j = 0; j < p; ++j)
              v[j] = std::pow(d.delta, static_cast<double>(j + 1));
          },
          [&](const CustomLeading& d) {
            const auto lead = static_cast<Eigen::Index>(d.leading.size());
            if (p < 5 || p < lead) {
              throw ArgumentError("custom leading profile needs p >= max(5, #leading), got p=" +
                                  std::to_string(p));
            }
            if (!(d.tail_gamma > 0.0)) throw ArgumentError("tail gamma must be > 0");
            for (Eigen::Index j = 0; j < p; ++j) {
              v[j] = j < lead ? d.leading[static_cast<std::size_t>(j)]
                              : std::pow(static_cast<double>(j + 1), -d.tail_gamma);
              if (!(v[j] > 0.0)) throw ArgumentError("profile eigenvalues must be positive");
            }
          },
      },
      profile);
  // The gap profile's tail can exceed its last leading value (e.g. g near 1),
  // so ordering is restored here rather than assumed.
  return Spectrum::from_unsorted(std::move(v));
}

std::string describe(const DecayProfile& profile) {
  return std::visit(Overloaded{
                        [](const PolynomialDecay&) { return std::string("polynomial"); },
                        [](const ExponentialDecay&) { return std::string("exponential"); },
                        [](const CustomLeading&) { return std::string("gap"); },
                    },
                    profile);
}

double GeneratorFamily::kurtosis() const {
  switch (kind) {
    case GeneratorKind::GaussianIid: return 3.0;
    case GeneratorKind::TwoPointIid: return 1.0;
    case GeneratorKind::UniformIid: return 1.8;
    case GeneratorKind::EllipticalExp: break;
  }
  throw ArgumentError("elliptical generator has dependent entries; no per-entry kurtosis");
}

std::string GeneratorFamily::name() const {
  switch (kind) {
    case GeneratorKind::GaussianIid: return "gaussian";
    case GeneratorKind::EllipticalExp: return "elliptical";
    case GeneratorKind::TwoPointIid: return "twopoint";
    case GeneratorKind::UniformIid: return "uniform";
  }
  return "unknown";
}

GeneratorFamily parse_generator(const std::string& name) {
  if (name == "gaussian" || name == "ii") return {GeneratorKind::GaussianIid};
  if (name == "elliptical" || name == "i") return {GeneratorKind::EllipticalExp};
  if (name == "twopoint") return {GeneratorKind::TwoPointIid};
  if (name == "uniform") return {GeneratorKind::UniformIid};
  throw ArgumentError("unknown generator '" + name +
                      "' (expected gaussian, elliptical, twopoint or uniform)");
}

Vector generate_z(const GeneratorFamily& generator, Eigen::Index p, Rng& rng) {
  if (p < 1) throw ArgumentError("generate_z: p must be >= 1");
  Vector z(p);
  fill_row(generator, rng, z.data(), p);
  return z;
}

EllipticalDraw draw_elliptical(Eigen::Index p, Rng& rng) {
  if (p < 1) throw ArgumentError("draw_elliptical: p must be >= 1");
  EllipticalDraw d;
  d.v.resize(p);
  d.xi = fill_sphere_radius(rng, d.v.data(), p);
  return d;
}

void generate_z_rows(const GeneratorFamily& generator, Rng& rng, Matrix& out) {
  const Eigen::Index p = out.cols();
  // Row-major scratch keeps each draw contiguous; the draw order is row by row.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(out.rows(), p);
  for (Eigen::Index i = 0; i < out.rows(); ++i) fill_row(generator, rng, rows.row(i).data(), p);
  out = rows;
}

PopulationModel::PopulationModel(Spectrum spectrum, OrthogonalBasis basis,
                                 GeneratorFamily generator)
    : spectrum_(std::move(spectrum)), basis_(std::move(basis)), generator_(generator) {
  if (spectrum_.size() != basis_.dim()) {
    throw DimensionError("spectrum length and basis dimension differ");
  }
  root_t_ = (basis_.matrix() * spectrum_.values().cwiseSqrt().asDiagonal()).transpose();
}

Matrix PopulationModel::sigma() const {
  const Matrix& u = basis_.matrix();
  Matrix s = u * spectrum_.values().asDiagonal() * u.transpose();
  return (s + s.transpose()) * 0.5;
}

PopulationModel build_population(const DecayProfile& profile, Eigen::Index p,
                                 const GeneratorFamily& generator, Rng& rng) {
  Spectrum spectrum = profile_spectrum(profile, p);
  OrthogonalBasis basis = haar_orthogonal(p, rng);
  return PopulationModel(std::move(spectrum), std::move(basis), generator);
}

Dataset sample_dataset(const PopulationModel& model, Eigen::Index n, Rng& rng, Matrix* z_out) {
  if (n < 1) throw ArgumentError("sample_dataset: n must be >= 1");
  Matrix z(n, model.dim());
  generate_z_rows(model.generator(), rng, z);
  Dataset ds;
  ds.x.noalias() = z * model.root_transposed();
  ds.provenance = "simulated:" + model.generator().name();
  if (z_out) *z_out = std::move(z);
  return ds;
}

}  // namespace specboot
