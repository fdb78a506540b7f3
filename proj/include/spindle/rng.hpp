#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace spindle {

// Counter-based splittable generator. Each draw is mix(key + i*GAMMA) for an
// incrementing counter i (SplitMix64's output function), so a stream is a pure
// function of (key, counter) and never of how many workers consumed it.
// Substreams derive a fresh key from the parent key and a label+index, which
// gives every (family, seed, row) its own independent stream and makes
// experiment output identical for any worker-pool size.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Independent stream for (label, index) under this stream's key.
  Rng substream(std::string_view label, std::uint64_t index = 0) const {
    std::uint64_t h = key_;
    for (char c : label) h = mix(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    return Rng(mix(h ^ mix(index)));
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform in [0,1), 53-bit mantissa.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0,1], safe as a log argument.
  double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  // Unbiased integer in [0, n) by rejection on the top of the 64-bit range.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  // Box-Muller, cosine branch. Two uniforms per normal draw; the sine partner
  // is discarded so that one call always advances the counter by exactly two.
  double gaussian() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // In-place Fisher-Yates; identity permutation input yields a uniform draw.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    shuffle(p);
    return p;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace spindle
