#include "n00n/bootstrap.hpp"

#include "n00n/errors.hpp"
#include "n00n/rng.hpp"

namespace n00n {

CountVector resample_replica(const CountVector& counts, std::uint64_t seed, std::size_t r) {
  Rng rng = make_rng(seed, r);
  CountVector out{{}, counts.exposure_s};
  out.counts.reserve(counts.size());
  for (auto c : counts.counts) out.counts.push_back(poisson(rng, static_cast<double>(c)));
  return out;
}

std::vector<CountVector> resample_replicas(const CountVector& counts, std::size_t n_b,
                                           std::uint64_t seed) {
  if (n_b == 0) throw InvalidArgument("bootstrap needs at least one replica");
  counts.validate();
  std::vector<CountVector> out;
  out.reserve(n_b);
  for (std::size_t r = 0; r < n_b; ++r) out.push_back(resample_replica(counts, seed, r));
  return out;
}

FrequencyVector to_frequencies(const CountVector& counts) {
  const auto total = counts.total();
  if (total <= 0) throw EmptyDataError("acquisition has no counts");
  FrequencyVector f;
  f.reserve(counts.size());
  const auto denom = static_cast<double>(total);
  for (auto c : counts.counts) f.push_back(static_cast<double>(c) / denom);
  return f;
}

}  // namespace n00n
