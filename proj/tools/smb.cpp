#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "smb/broker/broker.hpp"
#include "smb/error.hpp"
#include "smb/scenario/scenario.hpp"
#include "spawn.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("smb");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("SMB_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

std::string self_exe(const char* argv0) {
  std::error_code ec;
  auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  return ec ? std::string(argv0) : p.string();
}

int exit_code(const smb::Error& e) {
  switch (e.code()) {
    case smb::ErrorCode::ConfigInvalid: return 2;
    case smb::ErrorCode::IncompatibleRuns: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Co-simulation message bus runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario file");
  std::string scenario_file;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool spawn = false;
  run->add_option("file", scenario_file, "Scenario JSON")->required();
  run->add_flag("--spawn", spawn, "Run every component in its own process");
  auto* out_opt = run->add_option("--out", out_dir, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Master seed");

  auto* compare = app.add_subcommand("compare", "Compare two run directories");
  std::string dir_a, dir_b;
  compare->add_option("A", dir_a)->required();
  compare->add_option("B", dir_b)->required();

  auto* broker_cmd = app.add_subcommand("broker", "Broker utilities");
  broker_cmd->require_subcommand(1);
  auto* serve = broker_cmd->add_subcommand("serve", "Run a standalone broker");
  std::string listen = "127.0.0.1:7400";
  std::size_t max_clients = 64;
  serve->add_option("--listen", listen, "HOST:PORT")->capture_default_str();
  serve->add_option("--max-clients", max_clients)->capture_default_str();

  auto* component = app.add_subcommand("_component", "")->group("");
  smb::cli::ComponentArgs cargs;
  component->add_option("--scenario", cargs.scenario_file)->required();
  component->add_option("--name", cargs.name)->required();
  component->add_option("--broker", cargs.broker);
  component->add_option("--directory", cargs.directory);
  component->add_option("--ready", cargs.ready_file)->required();
  component->add_option("--result", cargs.result_file)->required();
  component->add_option("--seed", cargs.seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto s = smb::scenario::load_scenario(scenario_file);
      if (*seed_opt) smb::scenario::apply_seed(s, seed);
      if (*out_opt) s.output_dir = out_dir;
      auto outcome = spawn ? smb::cli::run_spawned(s, scenario_file, self_exe(argv[0]))
                           : smb::scenario::run_scenario(s);
      std::cout << outcome.summary << "\n" << "results in " << outcome.output_dir.string() << "\n";
      return 0;
    }
    if (*compare) {
      std::cout << smb::scenario::compare_runs(dir_a, dir_b);
      return 0;
    }
    if (*serve) {
      smb::broker::BrokerConfig cfg;
      cfg.listen = smb::wire::HostPort::parse(listen);
      cfg.max_clients = max_clients;
      auto broker = smb::broker::Broker::serve(cfg);
      std::cout << "listening on " << broker->address().str() << std::endl;
      std::signal(SIGINT, [](int) { g_interrupted = true; });
      std::signal(SIGTERM, [](int) { g_interrupted = true; });
      while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
      broker->shutdown(true);
      auto st = broker->stats();
      std::cout << fmt::format("published {}, routed {}\n", st.published, st.routed);
      return 0;
    }
    if (*component) {
      cargs.seeded = component->count("--seed") > 0;
      return smb::cli::run_component(cargs);
    }
  } catch (const smb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
