#pragma once

#include <cstdint>
#include <random>

namespace bnmr {

using Rng = std::mt19937_64;

/// Stream identifiers so that independent consumers of one user seed never
/// share (and therefore never perturb) each other's random sequence.
enum class Stream : std::uint64_t {
  kInit = 1,
  kShuffle = 2,
  kMicroSets = 3,
  kDirichlet = 4,
  kSynthetic = 5,
  kSplit = 6,
  kTrainData = 7,
  kValData = 8,
  kTestData = 9,
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  return Rng(mix_seed(seed, static_cast<std::uint64_t>(stream)));
}

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t sub) {
  return Rng(mix_seed(mix_seed(seed, static_cast<std::uint64_t>(stream)), sub));
}

}  // namespace bnmr
