// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace lyrnet::ad {

/// Counter-based, splittable random generator.
///
/// Every draw is a pure function of (key, counter): the key is derived from
/// the seed and a stream tag, the counter advances by one per 64-bit draw.
/// `split(tag)` derives an independent child stream without touching the
/// parent's counter, so initialization and dropout can each own a stream
/// whose output does not depend on how many draws the other one made.
///
/// Distributions are implemented here rather than taken from <random> so the
/// produced sequences are identical across standard library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Normal draw via Box-Muller; consumes two counters per call.
  double normal(double mean, double stddev);
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  Rng split(std::uint64_t tag) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  /// Fisher-Yates shuffle driven by this generator.
  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  Rng(std::uint64_t key, std::uint64_t counter, int /*raw*/) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace lyrnet::ad
