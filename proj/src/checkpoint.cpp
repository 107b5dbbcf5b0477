#include "amcoedge/checkpoint.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace amcoedge {

namespace {

constexpr const char* kMagic = "amcoedge-checkpoint";

std::string hex(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

void write_vector(std::ostream& out, const char* tag, const Eigen::VectorXd& v)
{
  out << tag << ' ' << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << hex(v(i));
  out << '\n';
}

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error("checkpoint: " + what); }

std::string next_token(std::istream& in, const char* context)
{
  std::string tok;
  if (!(in >> tok)) fail(std::string("unexpected end of input reading ") + context);
  return tok;
}

void expect(std::istream& in, const char* word)
{
  const std::string tok = next_token(in, word);
  if (tok != word) fail(std::string("expected '") + word + "', found '" + tok + "'");
}

double read_double(std::istream& in, const char* context)
{
  const std::string tok = next_token(in, context);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || errno == ERANGE) fail(std::string("bad number for ") + context + ": " + tok);
  return v;
}

long long read_int(std::istream& in, const char* context)
{
  const std::string tok = next_token(in, context);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || errno == ERANGE) fail(std::string("bad integer for ") + context + ": " + tok);
  return v;
}

void read_vector(std::istream& in, const char* tag, Eigen::VectorXd& v)
{
  expect(in, tag);
  const long long n = read_int(in, tag);
  if (n != v.size()) fail(std::string(tag) + " has " + std::to_string(n) + " values, expected " + std::to_string(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = read_double(in, tag);
}

}  // namespace

void write_checkpoint(std::ostream& out, std::span<const DqnAgent> agents)
{
  out << kMagic << ' ' << kCheckpointVersion << '\n' << "agents " << agents.size() << '\n';
  for (std::size_t a = 0; a < agents.size(); ++a) {
    const DqnAgent& agent = agents[a];
    const auto& sizes = agent.eval_network().layer_sizes();
    const auto& head = agent.config().head;
    const auto& eps = agent.epsilon();
    const auto& adam = agent.adam();
    out << "agent " << a << '\n' << "layers " << sizes.size();
    for (int s : sizes) out << ' ' << s;
    out << '\n'
        << "head " << (head.kind == HeadKind::kMask ? "mask" : "per_server") << ' ' << head.top_k << '\n'
        << "epsilon " << hex(eps.value) << ' ' << hex(eps.step) << ' ' << hex(eps.ceiling) << '\n'
        << "counters " << agent.act_steps() << ' ' << agent.train_steps() << '\n'
        << "adam " << hex(adam.learning_rate) << ' ' << hex(adam.beta1) << ' ' << hex(adam.beta2) << ' '
        << hex(adam.epsilon) << ' ' << adam.step << '\n';
    write_vector(out, "eval", agent.eval_network().parameters());
    write_vector(out, "target", agent.target_network().parameters());
    write_vector(out, "adam_m", adam.first_moment);
    write_vector(out, "adam_v", adam.second_moment);
    out << "end\n";
  }
  if (!out) fail("write failed");
}

void read_checkpoint(std::istream& in, std::span<DqnAgent> agents)
{
  expect(in, kMagic);
  const long long version = read_int(in, "version");
  if (version != kCheckpointVersion) fail("unsupported version " + std::to_string(version));
  expect(in, "agents");
  const long long count = read_int(in, "agent count");
  if (count != static_cast<long long>(agents.size()))
    fail("holds " + std::to_string(count) + " agents, expected " + std::to_string(agents.size()));

  for (std::size_t a = 0; a < agents.size(); ++a) {
    DqnAgent& agent = agents[a];
    expect(in, "agent");
    if (read_int(in, "agent index") != static_cast<long long>(a)) fail("agents out of order");

    expect(in, "layers");
    const long long n = read_int(in, "layer count");
    const auto& sizes = agent.eval_network().layer_sizes();
    if (n != static_cast<long long>(sizes.size())) fail("layer count mismatch");
    for (int s : sizes)
      if (read_int(in, "layer width") != s) fail("layer width mismatch");

    expect(in, "head");
    const std::string kind = next_token(in, "head kind");
    const long long top_k = read_int(in, "top_k");
    const auto& head = agent.config().head;
    if (kind != (head.kind == HeadKind::kMask ? "mask" : "per_server") || top_k != head.top_k) fail("head mismatch");

    EpsilonSchedule eps;
    expect(in, "epsilon");
    eps.value = read_double(in, "epsilon");
    eps.step = read_double(in, "epsilon");
    eps.ceiling = read_double(in, "epsilon");

    expect(in, "counters");
    const long long act_steps = read_int(in, "counters");
    const long long train_steps = read_int(in, "counters");

    AdamState adam = agent.adam();
    expect(in, "adam");
    adam.learning_rate = read_double(in, "adam");
    adam.beta1 = read_double(in, "adam");
    adam.beta2 = read_double(in, "adam");
    adam.epsilon = read_double(in, "adam");
    adam.step = read_int(in, "adam");

    Eigen::VectorXd eval = agent.eval_network().parameters();
    Eigen::VectorXd target = agent.target_network().parameters();
    read_vector(in, "eval", eval);
    read_vector(in, "target", target);
    read_vector(in, "adam_m", adam.first_moment);
    read_vector(in, "adam_v", adam.second_moment);
    expect(in, "end");

    agent.eval_network().parameters() = eval;
    agent.target_network().parameters() = target;
    agent.adam() = adam;
    agent.epsilon() = eps;
    agent.set_counters(act_steps, train_steps);
  }
}

void save_checkpoint(const std::filesystem::path& path, std::span<const DqnAgent> agents)
{
  std::ofstream out(path);
  if (!out) fail("cannot open for writing: " + path.string());
  write_checkpoint(out, agents);
}

void load_checkpoint(const std::filesystem::path& path, std::span<DqnAgent> agents)
{
  std::ifstream in(path);
  if (!in) fail("cannot open: " + path.string());
  try {
    read_checkpoint(in, agents);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace amcoedge
