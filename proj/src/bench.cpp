#include "amcoedge/bench.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "amcoedge/allocation.hpp"
#include "amcoedge/random.hpp"

namespace amcoedge {

namespace {

constexpr int kCallsPerRep = 256;
constexpr int kInputVariants = 16;

template <typename Fn>
double median_ns(Fn&& fn, int reps)
{
  using Clock = std::chrono::steady_clock;
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    for (int i = 0; i < kCallsPerRep; ++i) fn(i);
    const auto t1 = Clock::now();
    samples.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count() / kCallsPerRep);
  }
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(samples.size() / 2), samples.end());
  return samples[samples.size() / 2];
}

}  // namespace

std::vector<BenchRow> bench_allocation(int kmax, int reps, std::uint64_t seed)
{
  if (kmax < 1 || kmax > kMaxServers) throw std::invalid_argument("bench: kmax must be in [1, 32]");
  if (reps < 1) throw std::invalid_argument("bench: reps must be >= 1");

  Rng rng = make_stream(seed, Stream::kPolicy, 0xbe9c);
  std::vector<DelayCoefficients<double>> inputs;
  for (int v = 0; v < kInputVariants; ++v) {
    auto c = DelayCoefficients<double>::zeros(kmax);
    for (int e = 0; e < kmax; ++e) c.coefficient(e) = uniform(rng, 0.01, 0.1);
    inputs.push_back(c);
  }

  volatile double sink = 0.0;
  std::vector<BenchRow> rows;
  for (int k = 1; k <= kmax; ++k) {
    const std::uint32_t mask = k >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << k) - 1;
    const auto sel = SelectionSet::from_mask(mask, kmax);
    BenchRow row;
    row.k = k;
    row.cwa_ns = median_ns([&](int i) { sink = sink + cwa_allocate(inputs[static_cast<std::size_t>(i % kInputVariants)], sel)(0); }, reps);
    row.hecwa_ns = median_ns([&](int i) { sink = sink + hecwa_allocate(inputs[static_cast<std::size_t>(i % kInputVariants)], sel)(0); }, reps);
    rows.push_back(row);
  }
  return rows;
}

CsvTable bench_table(const std::vector<BenchRow>& rows)
{
  CsvTable t;
  t.header = {"k", "cwa_ns", "hecwa_ns"};
  for (const auto& r : rows) t.rows.push_back({std::to_string(r.k), format_number(r.cwa_ns), format_number(r.hecwa_ns)});
  return t;
}

}  // namespace amcoedge
