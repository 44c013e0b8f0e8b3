#include "spawn.hpp"

#include <csignal>
#include <cstring>
#include <fstream>
#include <thread>

#include <spawn.h>
#include <sys/wait.h>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "smb/bench/stats.hpp"
#include "smb/broker/endpoint.hpp"
#include "smb/error.hpp"
#include "smb/p2p/endpoint.hpp"
#include "smb/runtime/drts.hpp"
#include "smb/runtime/echo.hpp"
#include "smb/wire/socket.hpp"

extern char** environ;

namespace smb::cli {

namespace {

std::atomic<bool> g_stop{false};

void on_term(int) { g_stop = true; }

pid_t spawn_child(const std::string& exe, const std::vector<std::string>& args) {
  std::vector<char*> argv;
  argv.push_back(const_cast<char*>(exe.c_str()));
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid = 0;
  if (int rc = posix_spawn(&pid, exe.c_str(), nullptr, nullptr, argv.data(), environ); rc != 0) {
    throw Error(ErrorCode::ExperimentFailed, fmt::format("cannot spawn {}: {}", exe, std::strerror(rc)));
  }
  return pid;
}

int wait_child(pid_t pid) {
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) return -1;
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

void wait_for_file(const std::filesystem::path& p, Duration timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  while (!std::filesystem::exists(p)) {
    if (std::chrono::steady_clock::now() > deadline) {
      throw Error(ErrorCode::ExperimentFailed, "component did not come up: " + p.string());
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
}

struct Role {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  int task = 0;
};

Role role_of(const scenario::Scenario& s, const std::string& name) {
  Role r;
  if (name == "drts") {
    for (int i = 1; i <= s.drts.n_io_pairs; ++i) {
      r.inputs.push_back(drts_input(i));
      r.outputs.push_back(drts_output(i));
    }
    return r;
  }
  for (int i = 1; i <= s.tasks; ++i) {
    if (name == fmt::format("task{:02d}", i)) {
      r.task = i;
      r.inputs.push_back(task_input(i));
      r.outputs.push_back(task_output(i));
      return r;
    }
  }
  throw Error(ErrorCode::UnknownComponent, "no component '" + name + "'");
}

WiringConfig wiring_of(const scenario::Scenario& s) {
  WiringConfig w = s.wiring.value_or(echo_wiring(s.tasks));
  if (s.drts.n_io_pairs > s.tasks) w.mode = WiringMode::permissive;
  return w;
}

}  // namespace

scenario::RunOutcome run_spawned(const scenario::Scenario& s, const std::filesystem::path& scenario_file,
                                 const std::string& self_exe) {
  if (s.experiment != scenario::Experiment::echo_bench) {
    throw Error(ErrorCode::ConfigInvalid, "--spawn supports echo_bench scenarios only");
  }
  if (s.scheme != sync::Scheme::real_time) {
    throw Error(ErrorCode::ConfigInvalid, "--spawn supports the real_time scheme only");
  }
  auto work = s.output_dir / "spawn";
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);

  std::vector<std::string> names{"drts"};
  for (int i = 1; i <= s.tasks; ++i) names.push_back(fmt::format("task{:02d}", i));

  std::unique_ptr<broker::Broker> brk;
  std::vector<std::string> common{"_component", "--scenario", std::filesystem::absolute(scenario_file).string(),
                                  "--seed", std::to_string(s.seed)};
  if (s.transport == runtime::TransportKind::broker) {
    auto cfg = s.broker;
    cfg.profile = s.net;
    cfg.max_clients = std::max(cfg.max_clients, names.size());
    brk = broker::Broker::serve(cfg);
    common.insert(common.end(), {"--broker", brk->address().str()});
  } else {
    // Ports are picked up front so the directory can be written before any
    // child starts.
    p2p::PeerDirectory dir;
    for (const auto& n : names) {
      auto port = wire::TcpListener::bind(wire::HostPort{"127.0.0.1", 0}).local();
      auto role = role_of(s, n);
      for (const auto& sig : role.inputs) dir.add(sig, port);
      for (const auto& sig : role.outputs) dir.add(sig, port);
    }
    std::ofstream(work / "directory.json") << dir.to_json().dump(2);
    common.insert(common.end(), {"--directory", (work / "directory.json").string()});
  }

  auto args_for = [&](const std::string& n) {
    auto a = common;
    a.insert(a.end(), {"--name", n, "--ready", (work / (n + ".ready")).string(), "--result",
                       (work / (n + ".json")).string()});
    return a;
  };

  pid_t drts_pid = spawn_child(self_exe, args_for("drts"));
  std::vector<pid_t> tasks;
  try {
    wait_for_file(work / "drts.ready", std::chrono::seconds(10));
    for (std::size_t k = 1; k < names.size(); ++k) tasks.push_back(spawn_child(self_exe, args_for(names[k])));
  } catch (...) {
    kill(drts_pid, SIGTERM);
    for (auto pid : tasks) kill(pid, SIGTERM);
    wait_child(drts_pid);
    for (auto pid : tasks) wait_child(pid);
    throw;
  }
  int failures = 0;
  for (auto pid : tasks) failures += wait_child(pid) != 0;
  kill(drts_pid, SIGTERM);
  failures += wait_child(drts_pid) != 0;
  if (brk) brk->shutdown(false);
  if (failures > 0) throw Error(ErrorCode::ExperimentFailed, fmt::format("{} component(s) failed", failures));

  std::vector<bench::RttSample> samples;
  std::size_t lost = 0;
  for (std::size_t k = 1; k < names.size(); ++k) {
    std::ifstream in(work / (names[k] + ".json"));
    auto j = nlohmann::json::parse(in);
    lost += j.at("lost").get<std::size_t>();
    for (const auto& row : j.at("samples")) {
      samples.push_back(bench::make_sample(j.at("task").get<int>(), row.at(0).get<double>(),
                                           Timestamp::wall(row.at(1).get<std::uint64_t>()),
                                           Timestamp::wall(row.at(2).get<std::uint64_t>())));
    }
  }
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "no sample came back");
  auto stats = bench::compute_stats(samples, lost);
  bench::write_run(s.output_dir, stats, samples);
  return {s.output_dir, bench::render_report(stats).summary};
}

int run_component(const ComponentArgs& args) {
  std::signal(SIGTERM, on_term);
  std::signal(SIGINT, on_term);
  auto s = scenario::load_scenario(args.scenario_file);
  if (args.seeded) scenario::apply_seed(s, args.seed);
  auto role = role_of(s, args.name);
  auto wiring = wiring_of(s);

  std::unique_ptr<Endpoint> ep;
  if (!args.broker.empty()) {
    broker::ClientOptions copts;
    copts.profile = s.net;
    auto client = broker::BrokerClient::connect(wire::HostPort::parse(args.broker), args.name, copts);
    ep = std::make_unique<broker::BrokerEndpoint>(std::move(client), wiring, role.inputs, role.outputs);
  } else {
    auto dir = p2p::PeerDirectory::load(args.directory);
    std::set<std::string> owned(role.inputs.begin(), role.inputs.end());
    owned.insert(role.outputs.begin(), role.outputs.end());
    p2p::PeerServerOptions sopts;
    sopts.name = args.name;
    sopts.profile = s.net;
    auto server = p2p::PeerServer::serve(owned, dir.owner(*owned.begin()), sopts);
    p2p::PeerClientOptions copts;
    copts.name = args.name;
    copts.profile = s.net;
    copts.timeout = std::chrono::seconds(5);
    ep = std::make_unique<p2p::PeerEndpoint>(std::move(server), dir, wiring, role.inputs, role.outputs, copts);
  }
  std::ofstream(args.ready_file) << "ready\n";

  ScenarioClock clock;
  if (role.task == 0) {
    auto drts = runtime::run_drts(s.drts, *ep, clock);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(20));
    auto st = drts->stop();
    std::ofstream(args.result_file) << nlohmann::json{{"model_steps", st.model_steps},
                                                      {"flushes", st.comm_flushes},
                                                      {"overruns", st.overruns}}
                                           .dump();
    ep->close();
    return 0;
  }
  auto r = runtime::run_echo_task(role.task, s.period, s.samples, *ep, clock);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& smp : r.samples) {
    rows.push_back({smp.value, smp.t_out.nanos(), smp.t_in.nanos()});
  }
  std::ofstream(args.result_file) << nlohmann::json{{"task", r.task}, {"sent", r.sent}, {"lost", r.lost},
                                                    {"samples", rows}}
                                         .dump();
  ep->close();
  return 0;
}

}  // namespace smb::cli
