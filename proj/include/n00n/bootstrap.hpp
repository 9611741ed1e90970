#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "n00n/sensor_model.hpp"

namespace n00n {

/// Relative frequencies of one acquisition; the network's input representation.
using FrequencyVector = std::vector<double>;

/// Parametric bootstrap: replica r, channel k ~ Poisson(counts_k), drawn from
/// the generator seeded with derive_seed(seed, r). Exposure is copied.
std::vector<CountVector> resample_replicas(const CountVector& counts, std::size_t n_b,
                                           std::uint64_t seed);

/// Single replica r of resample_replicas(counts, n, seed), for any n > r.
CountVector resample_replica(const CountVector& counts, std::uint64_t seed, std::size_t r);

/// counts_k / total. Throws EmptyDataError when every count is zero.
FrequencyVector to_frequencies(const CountVector& counts);

}  // namespace n00n
