#include "specboot/streams.hpp"

#include "specboot/errors.hpp"

namespace specboot {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// FNV-1a, 64-bit.
std::uint64_t hash_tag(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGoldenGamma;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

StreamKey StreamKey::child(std::string_view tag, std::uint64_t index) const {
  StreamKey out = *this;
  out.labels_.push_back({std::string(tag), index});
  return out;
}

std::uint64_t StreamKey::digest() const noexcept {
  std::uint64_t h = splitmix64(master_seed_);
  for (const auto& label : labels_) {
    h = splitmix64(h ^ hash_tag(label.tag));
    h = splitmix64(h ^ label.index);
  }
  return h;
}

Rng derive_stream(const StreamKey& key) { return Rng(key.digest()); }

void resample_indices_into(std::size_t n, Rng& rng, std::vector<std::size_t>& out) {
  if (n == 0) throw ArgumentError("resample_indices: n must be >= 1");
  out.resize(n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (auto& idx : out) idx = pick(rng);
}

ResampleIndices resample_indices(std::size_t n, Rng& rng) {
  ResampleIndices r;
  resample_indices_into(n, rng, r.indices);
  return r;
}

}  // namespace specboot
