#include "amcoedge/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace amcoedge {

namespace {

constexpr double kMega = 1e6;
constexpr double kGiga = 1e9;

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view text)
{
  const std::string s(trim(text));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw std::invalid_argument("config key '" + std::string(key) + "': not a number: '" + s + "'");
  return v;
}

std::int64_t to_int(std::string_view key, std::string_view text)
{
  const std::string s(trim(text));
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw std::invalid_argument("config key '" + std::string(key) + "': not an integer: '" + s + "'");
  return v;
}

Range to_range(std::string_view key, std::string_view text, double unit)
{
  const auto sep = text.find_first_of(",:");
  if (sep == std::string_view::npos)
    throw std::invalid_argument("config key '" + std::string(key) + "': expected 'low,high'");
  return {to_double(key, text.substr(0, sep)) * unit, to_double(key, text.substr(sep + 1)) * unit};
}

std::string fmt(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig RunConfig::desk()
{
  RunConfig c;
  c.num_servers = 5;
  c.episodes = 100;
  c.tasks_per_slot = 20;
  return c;
}

void RunConfig::validate() const
{
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid config: " + msg); };
  if (num_servers < 1 || num_servers > 20) fail("num_servers must be in [1, 20]");
  if (slots < 1) fail("slots must be >= 1");
  if (!(slot_length > 0.0)) fail("slot_length must be > 0");
  if (episodes < 1) fail("episodes must be >= 1");
  if (tasks_per_slot < 0) fail("tasks_per_slot must be >= 0");
  if (!(arrival_prob >= 0.0 && arrival_prob <= 1.0)) fail("arrival_prob must be in [0, 1]");
  for (const auto& [name, r] : {std::pair{"data_size", data_size}, std::pair{"compute_density", compute_density},
                                std::pair{"capacity", capacity}, std::pair{"rate", rate}}) {
    if (!(r.low <= r.high)) fail(std::string(name) + " range must have low <= high");
  }
  if (!(data_size.low >= 0.0)) fail("data_size must be >= 0");
  if (!(compute_density.low > 0.0)) fail("compute_density must be > 0");
  if (!(capacity.low > 0.0)) fail("capacity must be > 0");
  if (!(rate.low > 0.0)) fail("rate must be > 0");
  if (!(deadline > 0.0)) fail("deadline must be > 0");
  if (policy.kind == PolicyKind::kSMCoEdge && (policy.k < 1 || policy.k > num_servers))
    fail("SMCoEdge k must be in [1, num_servers]");
  if (batch_size < 1 || replay_capacity < batch_size) fail("need 1 <= batch_size <= replay_capacity");
  if (train_every < 1 || target_sync_interval < 1 || warmup_actions < 0) fail("bad training cadence");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must be in [0, 1]");
  if (!(epsilon_ceiling >= 0.0 && epsilon_ceiling <= 1.0) || !(epsilon_step >= 0.0)) fail("bad epsilon schedule");
}

void set_config_value(RunConfig& c, std::string_view key_in, std::string_view value_in)
{
  const std::string_view key = trim(key_in);
  const std::string_view value = trim(value_in);
  if (key == "num_servers") c.num_servers = static_cast<int>(to_int(key, value));
  else if (key == "slots") c.slots = static_cast<int>(to_int(key, value));
  else if (key == "slot_length") c.slot_length = to_double(key, value);
  else if (key == "episodes") c.episodes = static_cast<int>(to_int(key, value));
  else if (key == "tasks_per_slot") c.tasks_per_slot = static_cast<int>(to_int(key, value));
  else if (key == "arrival_prob") c.arrival_prob = to_double(key, value);
  else if (key == "data_size_mbit") c.data_size = to_range(key, value, kMega);
  else if (key == "compute_density") c.compute_density = to_range(key, value, 1.0);
  else if (key == "capacity_ghz") c.capacity = to_range(key, value, kGiga);
  else if (key == "rate_mbps") c.rate = to_range(key, value, kMega);
  else if (key == "deadline") c.deadline = to_double(key, value);
  else if (key == "policy") c.policy = parse_policy(value);
  else if (key == "alloc") c.alloc = parse_alloc(value);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(key, value));
  else if (key == "warmup_actions") c.warmup_actions = to_int(key, value);
  else if (key == "train_every") c.train_every = to_int(key, value);
  else if (key == "batch_size") c.batch_size = static_cast<std::size_t>(to_int(key, value));
  else if (key == "target_sync_interval") c.target_sync_interval = to_int(key, value);
  else if (key == "replay_capacity") c.replay_capacity = static_cast<std::size_t>(to_int(key, value));
  else if (key == "learning_rate") c.learning_rate = to_double(key, value);
  else if (key == "gamma") c.gamma = to_double(key, value);
  else if (key == "epsilon_step") c.epsilon_step = to_double(key, value);
  else if (key == "epsilon_ceiling") c.epsilon_ceiling = to_double(key, value);
  else throw std::invalid_argument("unknown config key: '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text, RunConfig base)
{
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
    set_config_value(base, v.substr(0, eq), v.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), base);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::string format_config(const RunConfig& c)
{
  std::ostringstream out;
  out << "num_servers = " << c.num_servers << '\n'
      << "slots = " << c.slots << '\n'
      << "slot_length = " << fmt(c.slot_length) << '\n'
      << "episodes = " << c.episodes << '\n'
      << "tasks_per_slot = " << c.tasks_per_slot << '\n'
      << "arrival_prob = " << fmt(c.arrival_prob) << '\n'
      << "data_size_mbit = " << fmt(c.data_size.low / kMega) << ',' << fmt(c.data_size.high / kMega) << '\n'
      << "compute_density = " << fmt(c.compute_density.low) << ',' << fmt(c.compute_density.high) << '\n'
      << "capacity_ghz = " << fmt(c.capacity.low / kGiga) << ',' << fmt(c.capacity.high / kGiga) << '\n'
      << "rate_mbps = " << fmt(c.rate.low / kMega) << ',' << fmt(c.rate.high / kMega) << '\n'
      << "deadline = " << fmt(c.deadline) << '\n'
      << "policy = " << to_string(c.policy) << '\n'
      << "alloc = " << to_string(c.alloc) << '\n'
      << "seed = " << c.seed << '\n'
      << "warmup_actions = " << c.warmup_actions << '\n'
      << "train_every = " << c.train_every << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "target_sync_interval = " << c.target_sync_interval << '\n'
      << "replay_capacity = " << c.replay_capacity << '\n'
      << "learning_rate = " << fmt(c.learning_rate) << '\n'
      << "gamma = " << fmt(c.gamma) << '\n'
      << "epsilon_step = " << fmt(c.epsilon_step) << '\n'
      << "epsilon_ceiling = " << fmt(c.epsilon_ceiling) << '\n';
  return out.str();
}

}  // namespace amcoedge
