#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "amcoedge/bench.hpp"
#include "amcoedge/checkpoint.hpp"
#include "amcoedge/config.hpp"
#include "amcoedge/csv.hpp"
#include "amcoedge/simulator.hpp"
#include "amcoedge/sweep.hpp"

using namespace amcoedge;

namespace {

RunConfig tiny(PolicySpec policy = {})
{
  RunConfig c;
  c.num_servers = 3;
  c.slots = 10;
  c.episodes = 3;
  c.tasks_per_slot = 5;
  c.policy = policy;
  return c;
}

std::filesystem::path temp_dir(const std::string& name)
{
  auto p = std::filesystem::temp_directory_path() / ("amcoedge_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Config, DefaultsAndDesk)
{
  const RunConfig c;
  EXPECT_EQ(c.num_servers, 5);
  EXPECT_EQ(c.slots, 60);
  EXPECT_EQ(c.episodes, 300);
  EXPECT_EQ(c.tasks_per_slot, 50);
  EXPECT_EQ(c.arrival_prob, 0.3);
  EXPECT_EQ(c.capacity.high, 50e9);
  EXPECT_NO_THROW(c.validate());
  const auto d = RunConfig::desk();
  EXPECT_EQ(d.episodes, 100);
  EXPECT_EQ(d.tasks_per_slot, 20);
}

TEST(Config, ParseFormatRoundTrip)
{
  const auto c = parse_config("# desk\nepisodes = 12\ncapacity_ghz = 10:90\npolicy = SMCoEdge(2)\nalloc = hecwa\n"
                              "data_size_mbit = 20,50  # larger tasks\nseed = 7\n");
  EXPECT_EQ(c.episodes, 12);
  EXPECT_EQ(c.capacity.high, 90e9);
  EXPECT_EQ(c.policy, (PolicySpec{PolicyKind::kSMCoEdge, 2}));
  EXPECT_EQ(c.alloc, AllocVariant::kHecwa);
  EXPECT_EQ(c.data_size.low, 20e6);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(format_config(parse_config(format_config(c))), format_config(c));
}

TEST(Config, Errors)
{
  EXPECT_THROW(parse_config("bogus = 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("episodes 4\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("episodes = four\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("capacity_ghz = 10\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("capacity_ghz = 50,10\n").validate(), std::invalid_argument);
  EXPECT_THROW(parse_config("arrival_prob = 1.5\n").validate(), std::invalid_argument);
  EXPECT_THROW(parse_config("num_servers = 2\npolicy = SMCoEdge(3)\n").validate(), std::invalid_argument);
  EXPECT_THROW(load_config("/nonexistent/amcoedge.conf"), std::runtime_error);
  EXPECT_EQ(parse_config("policy = AMCoEdge-H\nalloc = cwa\n").effective_alloc(), AllocVariant::kHecwa);
}

TEST(Csv, QuotingAndRoundTrip)
{
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{"plain", "with,comma"}, {"with \"quote\"", "line\nbreak"}, {"", "x"}};
  const auto text = to_csv_string(t);
  const auto back = parse_csv(text);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), std::invalid_argument);
}

TEST(Csv, NumbersRoundTripExactly)
{
  for (double v : {0.0, 0.1, 1.0 / 3.0, 2.5e-17, 123456789.125, -4.2})
    EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(Csv, HeaderOnlyForNoRecordsAndSeedInEveryRow)
{
  const RunConfig c = tiny();
  const auto empty = to_csv_string(metrics_table({}, c));
  EXPECT_EQ(std::count(empty.begin(), empty.end(), '\n'), 1);

  Simulation sim(c);
  const auto records = sim.run_experiment();
  const auto table = metrics_table(records, c);
  const auto seed_col = table.column("seed");
  for (const auto& row : table.rows) EXPECT_EQ(row[seed_col], "1");

  const auto dir = temp_dir("csv");
  write_csv(table, dir / "m.csv");
  const auto back = parse_metrics_table(read_csv(dir / "m.csv"));
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].mean_make_span, records[i].mean_make_span);
    EXPECT_EQ(back[i].tasks_dropped, records[i].tasks_dropped);
  }
  EXPECT_THROW(write_csv(table, dir / "missing" / "m.csv"), std::runtime_error);
  EXPECT_THROW(read_csv(dir / "absent.csv"), std::runtime_error);
}

TEST(GenerateTasks, ArrivalProbabilityExtremes)
{
  RunConfig c = tiny();
  Rng rng(1);
  c.arrival_prob = 0.0;
  for (const auto& list : generate_tasks(c, 0, rng)) EXPECT_TRUE(list.empty());
  c.arrival_prob = 1.0;
  c.tasks_per_slot = 50;
  for (const auto& list : generate_tasks(c, 0, rng)) {
    ASSERT_EQ(list.size(), 50u);
    for (const auto& t : list) {
      EXPECT_GE(t.data_size, c.data_size.low);
      EXPECT_LE(t.data_size, c.data_size.high);
      EXPECT_GE(t.compute_density, c.compute_density.low);
      EXPECT_LE(t.compute_density, c.compute_density.high);
    }
  }
}

TEST(GenerateTasks, MeanArrivalsWithinBinomialInterval)
{
  RunConfig c;
  Rng rng = make_stream(3, Stream::kArrivals);
  long total = 0;
  const int slots = 1000;
  for (int s = 0; s < slots; ++s) total += static_cast<long>(generate_tasks(c, s, rng)[0].size());
  // mean 15, sd of the mean sqrt(50 * 0.3 * 0.7 / 1000); 4-sigma band
  EXPECT_NEAR(static_cast<double>(total) / slots, 15.0, 4.0 * std::sqrt(10.5 / slots));
}

TEST(Simulation, ZeroArrivalsLeaveAgentsUntouched)
{
  RunConfig c = tiny();
  c.arrival_prob = 0.0;
  Simulation sim(c);
  const auto before = sim.agents()[0].eval_network().parameters();
  const auto r = sim.run_episode();
  EXPECT_EQ(r.metrics.tasks_arrived, 0);
  EXPECT_EQ(r.metrics.mean_make_span, 0.0);
  EXPECT_EQ(r.metrics.failure_rate, 0.0);
  EXPECT_EQ(sim.agents()[0].act_steps(), 0);
  EXPECT_EQ(sim.agents()[0].replay().size(), 0u);
  EXPECT_EQ(sim.agents()[0].eval_network().parameters(), before);
}

TEST(Simulation, DeterministicPerSeed)
{
  for (const char* tag : {"AMCoEdge", "RandCoEdge", "DRLCoEdge", "SMCoEdge(2)", "Optimal"}) {
    Simulation a(tiny(parse_policy(tag))), b(tiny(parse_policy(tag)));
    const auto ra = a.run_experiment(), rb = b.run_experiment();
    EXPECT_EQ(to_csv_string(metrics_table(ra, a.config())), to_csv_string(metrics_table(rb, b.config()))) << tag;
  }
  RunConfig other = tiny();
  other.seed = 2;
  Simulation a(tiny()), c(other);
  EXPECT_NE(to_csv_string(metrics_table(a.run_experiment(), tiny())),
            to_csv_string(metrics_table(c.run_experiment(), tiny())));
}

TEST(Simulation, ArrivalTraceIndependentOfPolicy)
{
  Simulation a(tiny(parse_policy("AMCoEdge"))), b(tiny(parse_policy("RandCoEdge")));
  const auto ra = a.run_experiment(), rb = b.run_experiment();
  for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_EQ(ra[i].tasks_arrived, rb[i].tasks_arrived);
}

TEST(Simulation, TwoServerHandTrace)
{
  RunConfig c;
  c.num_servers = 2;
  c.slots = 1;
  c.episodes = 1;
  c.tasks_per_slot = 1;
  c.arrival_prob = 1.0;
  c.data_size = {1e6, 1e6};
  c.compute_density = {100, 100};
  c.policy = parse_policy("Optimal");
  ClusterTopology topo;
  topo.compute_capacity = Eigen::Vector2d(10e9, 40e9);
  topo.tx_rate = Eigen::Matrix2d::Constant(500e6);
  Simulation sim(c, topo);
  const auto r = sim.run_episode();

  // BS 0: local 0.01 s/unit, remote 0.002 + 0.0025; both ESs at equal delay
  const double a0 = 0.01, a1 = 0.0045;
  // BS 1: local 0.0025, remote 0.002 + 0.01; BS 0's allocation is invisible to it
  const double b1 = 0.0025, b0 = 0.012;
  const double expected = 0.5 * (a0 * a1 / (a0 + a1) + b0 * b1 / (b0 + b1));
  EXPECT_NEAR(r.metrics.mean_make_span, expected, 1e-15);
  EXPECT_EQ(r.metrics.tasks_arrived, 2);
  EXPECT_EQ(r.metrics.tasks_dropped, 0);
  EXPECT_NEAR(r.workload.arrived, 2e8, 1e-6);
  EXPECT_NEAR(r.workload.drained, 2e8, 1e-6);
  EXPECT_EQ(r.workload.final_backlog, 0.0);
}

TEST(Property, WorkloadConservation)
{
  for (const char* tag : {"AMCoEdge", "RandCoEdge", "Optimal"}) {
    RunConfig c = tiny(parse_policy(tag));
    c.tasks_per_slot = 40;
    c.capacity = {1e9, 5e9};  // overloaded: backlog carries over and some tasks clip
    Simulation sim(c);
    for (int e = 0; e < 3; ++e) {
      const auto r = sim.run_episode();
      EXPECT_GT(r.metrics.tasks_dropped, 0);
      EXPECT_NEAR(r.workload.arrived, r.workload.drained + r.workload.final_backlog, 1e-6 * r.workload.arrived) << tag;
      EXPECT_NEAR(r.workload.final_backlog, r.final_queues.proc_backlog.sum(), 1e-6);
      EXPECT_TRUE((r.final_queues.proc_backlog.array() >= 0.0).all());
    }
  }
}

TEST(Property, MetricRanges)
{
  RunConfig c = tiny(parse_policy("SMCoEdge(2)"));
  c.tasks_per_slot = 30;
  c.capacity = {2e9, 8e9};
  Simulation sim(c);
  for (const auto& m : sim.run_experiment()) {
    EXPECT_GE(m.failure_rate, 0.0);
    EXPECT_LE(m.failure_rate, 1.0);
    EXPECT_GE(m.mean_waiting, 0.0);
    EXPECT_GE(m.mean_transmission, 0.0);
    EXPECT_GE(m.mean_computing, 0.0);
    EXPECT_LE(m.mean_make_span, c.deadline);
  }
}

TEST(Simulation, RandCoEdgeHasNoTrend)
{
  RunConfig c = tiny(parse_policy("RandCoEdge"));
  c.episodes = 40;
  c.slots = 20;
  Simulation sim(c);
  const auto r = sim.run_experiment();
  // least-squares slope of make-span on episode index and its t statistic
  const double n = static_cast<double>(r.size());
  double mx = 0, my = 0;
  for (const auto& m : r) {
    mx += m.episode / n;
    my += m.mean_make_span / n;
  }
  double sxx = 0, sxy = 0;
  for (const auto& m : r) {
    sxx += (m.episode - mx) * (m.episode - mx);
    sxy += (m.episode - mx) * (m.mean_make_span - my);
  }
  const double slope = sxy / sxx;
  double sse = 0;
  for (const auto& m : r) {
    const double e = m.mean_make_span - my - slope * (m.episode - mx);
    sse += e * e;
  }
  const double t = slope / std::sqrt(sse / (n - 2) / sxx);
  EXPECT_LT(std::abs(t), 2.712);  // two-sided 1%, 38 dof
}

TEST(Sweep, EmptyValuesAndUnknownParameter)
{
  const auto rows = sweep(tiny(), "N", {}, {parse_policy("RandCoEdge")}, 1);
  EXPECT_TRUE(rows.empty());
  const auto text = to_csv_string(sweep_table(rows));
  EXPECT_EQ(text.substr(0, text.find('\n')), "parameter,value,policy,seed,episodes_averaged,mean_make_span,failure_rate,"
                                              "mean_waiting,mean_transmission,mean_computing,tasks_arrived,tasks_dropped");
  EXPECT_THROW(sweep(tiny(), "gamma", {}, {}, 1), std::invalid_argument);
}

TEST(Sweep, RowsPerValuePolicySeed)
{
  RunConfig c = tiny();
  c.episodes = 10;
  const auto rows = sweep(c, "N", {"2", "8"}, {parse_policy("RandCoEdge"), parse_policy("Optimal")}, 2);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0].value, "2");
  EXPECT_EQ(rows[0].seed, 1u);
  EXPECT_EQ(rows[1].seed, 2u);
  EXPECT_EQ(rows[0].episodes_averaged, 1);
  for (const auto& r : rows) EXPECT_GT(r.summary.mean_make_span, 0.0);
  EXPECT_THROW(sweep(c, "f-range", {"90"}, {parse_policy("RandCoEdge")}, 1), std::invalid_argument);
}

TEST(Sweep, TailAndHeadSummaries)
{
  std::vector<MetricsRecord> r(20);
  for (int i = 0; i < 20; ++i) {
    r[static_cast<std::size_t>(i)].episode = i;
    r[static_cast<std::size_t>(i)].mean_make_span = i;
  }
  EXPECT_EQ(summarize_tail(r).mean_make_span, 18.5);
  EXPECT_EQ(summarize_head(r).mean_make_span, 0.5);
  EXPECT_EQ(summarize_tail(std::vector<MetricsRecord>(r.begin(), r.begin() + 3)).mean_make_span, 2.0);
}

TEST(Bench, ProducesOneRowPerK)
{
  const auto rows = bench_allocation(4, 3);
  ASSERT_EQ(rows.size(), 4u);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_EQ(rows[static_cast<std::size_t>(k - 1)].k, k);
    EXPECT_GT(rows[static_cast<std::size_t>(k - 1)].cwa_ns, 0.0);
    EXPECT_GT(rows[static_cast<std::size_t>(k - 1)].hecwa_ns, 0.0);
  }
  EXPECT_LT(rows[0].cwa_ns, 1000.0);
  EXPECT_LT(rows[0].hecwa_ns, 1000.0);
  EXPECT_EQ(bench_table(rows).rows.size(), 4u);
  EXPECT_THROW(bench_allocation(0, 1), std::invalid_argument);
}

TEST(Checkpoint, ResumedRunMatchesContinuousRun)
{
  RunConfig c = tiny();
  c.episodes = 2;
  Simulation full(c);
  full.run_episode();
  const auto dir = temp_dir("ckpt");
  save_checkpoint(dir / "agents.ckpt", full.agents());

  Simulation resumed(c);
  load_checkpoint(dir / "agents.ckpt", resumed.agents());
  for (std::size_t i = 0; i < full.agents().size(); ++i)
    EXPECT_EQ(resumed.agents()[i].eval_network().parameters(), full.agents()[i].eval_network().parameters());
  EXPECT_THROW(load_checkpoint(dir / "none.ckpt", resumed.agents()), std::runtime_error);
}
