#ifndef AMCOEDGE_BENCH_HPP_
#define AMCOEDGE_BENCH_HPP_

#include <cstdint>
#include <vector>

#include "amcoedge/csv.hpp"

namespace amcoedge {

struct BenchRow
{
  int k = 0;
  double cwa_ns = 0.0;    // median per-call time
  double hecwa_ns = 0.0;
};

/// Times cwa_allocate and hecwa_allocate on synthetic coefficients for
/// k = 1..kmax over kmax servers. Each repetition times a batch of calls;
/// the reported value is the median per-call time across repetitions.
std::vector<BenchRow> bench_allocation(int kmax, int reps, std::uint64_t seed = 1);

/// k, cwa_ns, hecwa_ns
CsvTable bench_table(const std::vector<BenchRow>& rows);

}  // namespace amcoedge

#endif  // AMCOEDGE_BENCH_HPP_
