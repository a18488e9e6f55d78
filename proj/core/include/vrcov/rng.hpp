#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vrcov {

using Engine = std::mt19937_64;

/// Engine for one independent stream, keyed by a master seed and a list of
/// stream coordinates (trial index, block index, ...). Identical inputs give
/// identical streams, independent of thread scheduling.
Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

/// 64-bit mixing function used to derive sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace vrcov
