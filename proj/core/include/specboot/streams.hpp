#pragma once

// Deterministic random streams and with-replacement resampling.
//
// A stream is identified by a master seed plus an ordered label path such as
// ("cell", 3) / ("trial", 17) / ("replicate", 412). The path is hashed with
// SplitMix64 mixing into a 64-bit seed for std::mt19937_64, so a unit of work
// always sees the same draws regardless of which worker runs it or in what
// order.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace specboot {

using Rng = std::mt19937_64;

struct StreamLabel {
  std::string tag;
  std::uint64_t index = 0;

  bool operator==(const StreamLabel&) const = default;
};

class StreamKey {
 public:
  StreamKey() = default;
  explicit StreamKey(std::uint64_t master_seed) : master_seed_(master_seed) {}

  /// Returns a copy of this key with one more label appended.
  StreamKey child(std::string_view tag, std::uint64_t index) const;

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  const std::vector<StreamLabel>& labels() const noexcept { return labels_; }

  /// 64-bit seed for the engine; pure function of (master seed, label path).
  std::uint64_t digest() const noexcept;

  bool operator==(const StreamKey&) const = default;

 private:
  std::uint64_t master_seed_ = 0;
  std::vector<StreamLabel> labels_;
};

/// SplitMix64 output function (Steele, Lea & Flood 2014).
std::uint64_t splitmix64(std::uint64_t x) noexcept;

Rng derive_stream(const StreamKey& key);

struct ResampleIndices {
  std::vector<std::size_t> indices;
};

/// n i.i.d. uniform draws on {0, ..., n-1}.
ResampleIndices resample_indices(std::size_t n, Rng& rng);

/// Same draws as resample_indices, reusing `out` to avoid allocation.
void resample_indices_into(std::size_t n, Rng& rng, std::vector<std::size_t>& out);

}  // namespace specboot
