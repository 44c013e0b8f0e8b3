#include "smb/scenario/scenario.hpp"

#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "smb/bench/stats.hpp"
#include "smb/error.hpp"
#include "smb/opf/distributed.hpp"
#include "smb/opf/oracle.hpp"
#include "smb/runtime/experiment.hpp"
#include "smb/runtime/sim_echo.hpp"

namespace smb::scenario {

namespace {

using json = nlohmann::json;

Duration ms(const json& j, const char* key, Duration fallback) {
  return j.contains(key) ? from_ms(j.at(key).get<double>()) : fallback;
}

Duration us(const json& j, const char* key, Duration fallback) {
  return j.contains(key) ? from_ms(j.at(key).get<double>() / 1000.0) : fallback;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

}  // namespace

Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir) {
  Scenario s;
  try {
    if (!j.is_object()) invalid("scenario must be a JSON object");
    s.name = j.value("name", s.name);
    if (!j.contains("experiment")) invalid("missing 'experiment'");
    auto exp = j.at("experiment").get<std::string>();
    if (exp == "echo_bench") s.experiment = Experiment::echo_bench;
    else if (exp == "opf_run") s.experiment = Experiment::opf_run;
    else invalid("experiment must be echo_bench or opf_run, got '" + exp + "'");

    s.transport = runtime::transport_from_string(j.value("transport", std::string("broker")));
    s.seed = j.value("seed", std::uint64_t{0});

    if (j.contains("steps")) {
      const auto& st = j.at("steps");
      s.steps.offline_step = ms(st, "offline_ms", s.steps.offline_step);
      s.steps.bus_min_step = ms(st, "bus_min_ms", s.steps.bus_min_step);
      s.steps.drts_step = us(st, "drts_us", s.steps.drts_step);
      s.steps.comm_step = ms(st, "comm_ms", s.steps.comm_step);
    }
    s.steps.validate();

    if (j.contains("sync")) {
      const auto& sy = j.at("sync");
      auto scheme = sy.value("scheme", std::string("real_time"));
      if (scheme == "real_time") s.scheme = sync::Scheme::real_time;
      else if (scheme == "sim_time") s.scheme = sync::Scheme::sim_time;
      else invalid("sync.scheme must be real_time or sim_time");
      s.sync_address = sy.value("address", s.sync_address);
      if (s.sync_address != "inproc") invalid("sync.address: only \"inproc\" is supported");
      if (sy.contains("components")) {
        const auto& c = sy.at("components");
        s.task_step = ms(c, "task_step_ms", s.task_step);
        if (c.contains("drts_step_ms")) s.drts_sim_step = ms(c, "drts_step_ms", Duration{0});
      }
      if (sy.contains("jitter")) {
        const auto& jt = sy.at("jitter");
        s.jitter_seed = jt.value("seed", std::uint64_t{0});
        s.max_jitter = us(jt, "max_us", Duration{0});
      }
    }

    if (j.contains("tasks")) {
      const auto& t = j.at("tasks");
      s.tasks = t.value("count", s.tasks);
      s.period = ms(t, "period_ms", s.steps.offline_step);
      s.samples = t.value("samples", s.samples);
    } else {
      s.period = s.steps.offline_step;
    }
    s.drts.model_step = s.steps.drts_step;
    s.drts.comm_step = s.steps.comm_step;
    if (j.contains("drts")) {
      const auto& d = j.at("drts");
      s.drts.model_step = us(d, "model_step_us", s.drts.model_step);
      s.drts.comm_step = ms(d, "comm_step_ms", s.drts.comm_step);
      s.drts.n_io_pairs = d.value("io_pairs", s.drts.n_io_pairs);
    }

    if (j.contains("wiring")) {
      s.wiring = wiring_from_json(j.at("wiring"));
    } else if (j.contains("wiring_file")) {
      s.wiring = load_wiring(resolve(base_dir, j.at("wiring_file").get<std::string>()));
    }

    if (j.contains("net")) {
      const auto& n = j.at("net");
      json profile = n;
      if (!profile.contains("seed")) profile["seed"] = s.seed;
      s.net = netem::profile_from_json(profile);
      if (n.contains("scale")) s.net = s.net.scaled(n.at("scale").get<double>());
    } else {
      s.net.seed = s.seed;
    }

    if (j.contains("broker")) {
      const auto& b = j.at("broker");
      if (b.contains("listen")) s.broker.listen = wire::HostPort::parse(b.at("listen").get<std::string>());
      s.broker.queue_depth = b.value("queue_depth", s.broker.queue_depth);
      s.broker.max_clients = b.value("max_clients", s.broker.max_clients);
      auto overflow = b.value("overflow", std::string("drop_oldest"));
      if (overflow == "drop_oldest") s.broker.overflow = netem::OverflowPolicy::drop_oldest;
      else if (overflow == "disconnect") s.broker.overflow = netem::OverflowPolicy::disconnect;
      else invalid("broker.overflow must be drop_oldest or disconnect");
      s.broker.validate();
    }

    if (j.contains("network")) s.network = resolve(base_dir, j.at("network").get<std::string>());
    if (j.contains("admm")) {
      const auto& a = j.at("admm");
      s.admm.rho = a.value("rho", s.admm.rho);
      s.admm.tol = a.value("tol", s.admm.tol);
      s.admm.max_iter = a.value("max_iter", s.admm.max_iter);
      s.admm.compute_delay = ms(a, "compute_delay_ms", s.admm.compute_delay);
      s.admm.neighbor_timeout = ms(a, "neighbor_timeout_ms", s.admm.neighbor_timeout);
    }
    s.admm.validate();

    s.output_dir = resolve(base_dir, j.value("output_dir", std::string("out/") + s.name));
  } catch (const json::exception& e) {
    invalid(std::string("scenario: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    invalid(std::string("scenario: ") + e.what());
  }

  if (s.experiment == Experiment::echo_bench) {
    if (s.tasks < 1 || s.tasks > 99) invalid("tasks.count must lie in [1, 99]");
    if (s.period <= Duration::zero()) invalid("tasks.period_ms must be positive");
    if (s.scheme == sync::Scheme::real_time) {
      try {
        s.drts.validate();
      } catch (const Error& e) {
        invalid(std::string("drts: ") + e.what());
      }
      if (s.drts.n_io_pairs < s.tasks) invalid("drts.io_pairs is below tasks.count");
    }
    if (s.wiring) {
      try {
        validate_wiring(*s.wiring, echo_signals(s.tasks));
      } catch (const Error& e) {
        invalid(std::string("wiring: ") + e.what());
      }
    }
  } else {
    if (s.network.empty()) invalid("opf_run needs 'network'");
    if (s.scheme != sync::Scheme::real_time) invalid("opf_run supports the real_time scheme only");
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open scenario " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    invalid(path.string() + ": " + e.what());
  }
  return parse_scenario(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

void apply_seed(Scenario& s, std::uint64_t seed) {
  s.seed = seed;
  s.net.seed = seed;
}

namespace {

RunOutcome run_echo(const Scenario& s) {
  std::vector<bench::RttSample> samples;
  std::size_t lost = 0;
  if (s.scheme == sync::Scheme::sim_time) {
    runtime::SimEchoConfig cfg;
    cfg.tasks = s.tasks;
    cfg.period = s.period;
    cfg.samples = s.samples;
    cfg.task_step = s.task_step;
    cfg.comm_step = s.drts_sim_step.value_or(s.drts.comm_step);
    cfg.profile = s.net;
    cfg.jitter_seed = s.jitter_seed;
    cfg.max_jitter = s.max_jitter;
    auto r = runtime::run_sim_echo(cfg);
    samples = std::move(r.samples);
    lost = r.lost;
  } else {
    runtime::EchoExperimentConfig cfg;
    cfg.tasks = s.tasks;
    cfg.period = s.period;
    cfg.samples = s.samples;
    cfg.drts = s.drts;
    cfg.wiring = s.wiring;
    cfg.deployment.transport = s.transport;
    cfg.deployment.profile = s.net;
    cfg.deployment.broker = s.broker;
    auto r = runtime::run_echo_experiment(cfg);
    samples = std::move(r.samples);
    lost = r.lost;
    spdlog::info("drts: {} model steps, {} flushes, {} overruns", r.drts.model_steps, r.drts.comm_flushes,
                 r.drts.overruns);
  }
  if (samples.empty()) {
    throw Error(ErrorCode::EmptySamples, fmt::format("no sample came back ({} lost)", lost));
  }
  auto stats = bench::compute_stats(samples, lost);
  bench::write_run(s.output_dir, stats, samples);
  return {s.output_dir, bench::render_report(stats).summary};
}

RunOutcome run_opf(const Scenario& s) {
  auto net = opf::load_network(s.network);
  opf::DistributedOptions opts;
  opts.admm = s.admm;
  opts.deployment.transport = s.transport;
  opts.deployment.profile = s.net;
  opts.deployment.broker = s.broker;
  auto result = opf::run_distributed_opf(net, opts);

  std::optional<opf::OpfSolution> oracle;
  try {
    oracle = opf::centralized_opf_oracle(net);
  } catch (const Error& e) {
    spdlog::warn("oracle unavailable: {}", e.what());
  }

  std::filesystem::create_directories(s.output_dir);
  {
    std::ofstream csv(s.output_dir / "residuals.csv");
    csv << "iteration,primal,dual\n";
    for (const auto& r : result.residuals) csv << fmt::format("{},{},{}\n", r.iteration, r.primal, r.dual);
  }
  nlohmann::ordered_json sol;
  sol["iterations"] = result.iterations;
  sol["converged"] = result.converged;
  sol["objective"] = result.solution.objective;
  sol["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : net.nodes) {
    sol["nodes"].push_back({{"id", n.id}, {"v", result.solution.v.at(n.id)}, {"p", result.solution.p.at(n.id)}});
  }
  std::ofstream(s.output_dir / "solution.json") << sol.dump(2) << "\n";

  nlohmann::ordered_json summary;
  summary["experiment"] = "opf_run";
  summary["transport"] = std::string(runtime::to_string(s.transport));
  summary["profile"] = s.net.name;
  summary["iterations"] = result.iterations;
  summary["converged"] = result.converged;
  summary["wall_time_s"] = std::chrono::duration<double>(result.wall_time).count();
  summary["objective"] = result.solution.objective;
  if (oracle) {
    double err = 0.0;
    for (const auto& [id, v] : oracle->v) err = std::max(err, std::abs(v - result.solution.v.at(id)));
    summary["oracle_objective"] = oracle->objective;
    summary["max_voltage_error"] = err;
  }
  std::ofstream(s.output_dir / "summary.json") << summary.dump(2) << "\n";

  auto line = fmt::format("Iterations: {}. Converged: {}. Wall time: {:.2f} s. Objective: {:.6f}.", result.iterations,
                          result.converged ? "yes" : "no", summary["wall_time_s"].get<double>(),
                          result.solution.objective);
  std::ofstream(s.output_dir / "summary.txt") << line << "\n";
  if (!result.converged) spdlog::warn("ADMM stopped at max_iter={} without converging", s.admm.max_iter);
  return {s.output_dir, line};
}

}  // namespace

RunOutcome run_scenario(const Scenario& s) {
  try {
    return s.experiment == Experiment::echo_bench ? run_echo(s) : run_opf(s);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ExperimentFailed) throw;
    throw Error(ErrorCode::ExperimentFailed, fmt::format("{}: {} ({})", s.name, e.what(), to_string(e.code())));
  }
}

namespace {

struct RunSummary {
  std::string kind;
  std::vector<std::pair<std::string, double>> metrics;
};

RunSummary read_run(const std::filesystem::path& dir) {
  RunSummary r;
  auto read_json = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::IncompatibleRuns, p.string() + ": " + e.what());
    }
  };
  if (std::filesystem::exists(dir / "stats.json")) {
    auto j = read_json(dir / "stats.json");
    r.kind = "echo_bench";
    for (const char* k : {"count", "min_ms", "mean_ms", "max_ms", "p99_ms", "lost"}) {
      if (!j.contains(k)) throw Error(ErrorCode::IncompatibleRuns, dir.string() + ": stats.json lacks " + k);
      r.metrics.emplace_back(k, j.at(k).get<double>());
    }
  } else if (std::filesystem::exists(dir / "summary.json")) {
    auto j = read_json(dir / "summary.json");
    if (j.value("experiment", std::string()) != "opf_run") {
      throw Error(ErrorCode::IncompatibleRuns, dir.string() + ": unknown summary.json");
    }
    r.kind = "opf_run";
    for (const char* k : {"iterations", "wall_time_s", "objective"}) r.metrics.emplace_back(k, j.at(k).get<double>());
  } else if (std::filesystem::exists(dir / "samples.csv")) {
    // Raw samples only, as written by an external echo task.
    std::ifstream in(dir / "samples.csv");
    std::string line;
    std::getline(in, line);
    std::vector<Duration> rtts;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto pos = line.rfind(',');
      rtts.emplace_back(std::stoll(line.substr(pos + 1)));
    }
    auto stats = bench::compute_stats(rtts);
    auto j = bench::stats_to_json(stats);
    r.kind = "echo_bench";
    for (const char* k : {"count", "min_ms", "mean_ms", "max_ms", "p99_ms", "lost"}) r.metrics.emplace_back(k, j.at(k).get<double>());
  } else {
    throw Error(ErrorCode::IncompatibleRuns, dir.string() + " holds no run results");
  }
  return r;
}

}  // namespace

std::string compare_runs(const std::filesystem::path& a, const std::filesystem::path& b) {
  auto ra = read_run(a);
  auto rb = read_run(b);
  if (ra.kind != rb.kind) {
    throw Error(ErrorCode::IncompatibleRuns, fmt::format("cannot compare {} with {} results", ra.kind, rb.kind));
  }
  std::string out = fmt::format("{:<12} {:>14} {:>14} {:>8}\n", "metric", "A", "B", "B/A");
  for (std::size_t k = 0; k < ra.metrics.size(); ++k) {
    const auto& [name, va] = ra.metrics[k];
    double vb = rb.metrics[k].second;
    std::string ratio = va == 0.0 ? (vb == 0.0 ? "1.00" : "inf") : fmt::format("{:.2f}", vb / va);
    out += fmt::format("{:<12} {:>14.4f} {:>14.4f} {:>8}\n", name, va, vb, ratio);
  }
  return out;
}

}  // namespace smb::scenario
