#ifndef AMCOEDGE_RANDOM_HPP_
#define AMCOEDGE_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace amcoedge {

using Rng = std::mt19937_64;

// Independent sub-streams of one run seed. Each consumer draws from its own
// stream so that, e.g., exploration never perturbs the arrival trace.
enum class Stream : std::uint64_t
{
  kTopology = 1,
  kArrivals = 2,
  kExploration = 3,
  kReplay = 4,
  kWeightInit = 5,
  kPolicy = 6,
};

inline Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t sub = 0)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(sub),
                    static_cast<std::uint32_t>(sub >> 32)};
  return Rng(seq);
}

inline double uniform(Rng& rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace amcoedge

#endif  // AMCOEDGE_RANDOM_HPP_
