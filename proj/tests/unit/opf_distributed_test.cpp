#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <regex>
#include <set>

#include "random_network.hpp"
#include "smb/netem/profile.hpp"
#include "smb/opf/admm.hpp"
#include "smb/opf/budget.hpp"
#include "smb/opf/distributed.hpp"
#include "smb/opf/oracle.hpp"

using namespace smb;
using namespace smb::opf;
using namespace std::chrono_literals;

namespace {

DcNetwork two_node() {
  return build_network(nlohmann::json::parse(R"({
    "nodes": [
      {"id": 1, "kind": "generator", "a": 0.5, "b": 1.0, "pmin": 0.0, "pmax": 2.0},
      {"id": 2, "kind": "load", "d": 1.0}
    ],
    "edges": [{"i": 1, "j": 2, "g": 10.0}]
  })"));
}

DcNetwork mtdc27() { return load_network(std::string(SMB_DATA_DIR) + "/mtdc27.json"); }

}  // namespace

TEST(OpfSignals, Names) {
  EXPECT_EQ(agent_name(7), "agent07");
  EXPECT_EQ(to_neighbor(3, 12, true), "agent03/to12/self");
  EXPECT_EQ(from_neighbor(12, 3, false), "agent12/from03/copy");
  auto net = two_node();
  auto w = opf_wiring(net);
  EXPECT_EQ(w.downstream_of(to_neighbor(1, 2, true)), std::vector<std::string>{from_neighbor(2, 1, true)});
  EXPECT_EQ(opf_components(net).size(), 3u);  // two agents and the monitor
}

TEST(DistributedOpf, TwoNodeMatchesSequentialAndOracle) {
  auto net = two_node();
  for (auto t : {runtime::TransportKind::broker, runtime::TransportKind::p2p}) {
    DistributedOptions opts;
    opts.deployment.transport = t;
    opts.admm.tol = 1e-6;
    opts.admm.max_iter = 20000;
    auto r = run_distributed_opf(net, opts);
    auto seq = solve_admm(net, opts.admm);
    auto o = centralized_opf_oracle(net);
    ASSERT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, seq.iterations);
    for (int id : {1, 2}) {
      EXPECT_EQ(r.solution.v.at(id), seq.solution.v.at(id));
      EXPECT_NEAR(r.solution.v.at(id), o.v.at(id), 1e-3);
    }
    EXPECT_EQ(r.residuals.size(), static_cast<std::size_t>(r.iterations));
    EXPECT_GT(r.wall_time, Duration::zero());
  }
}

TEST(DistributedOpf, MessagesOnlyReachElectricalNeighbours) {
  auto net = mtdc27();
  std::set<std::pair<int, int>> edges;
  for (const auto& e : net.edges) {
    edges.insert({e.i, e.j});
    edges.insert({e.j, e.i});
  }
  std::mutex m;
  std::map<std::string, std::uint64_t> count;
  std::map<std::string, std::uint64_t> last_seq;
  int violations = 0;
  int reordered = 0;
  const std::regex agent_link(R"(agent(\d+)/to(\d+)/(self|copy))");
  DistributedOptions opts;
  opts.deployment.transport = runtime::TransportKind::p2p;
  opts.admm.max_iter = 20;
  opts.trace = [&](const std::string& from, const std::string& to, const SignalRecord& rec) {
    std::lock_guard lock(m);
    std::smatch match;
    if (std::regex_match(from, match, agent_link)) {
      int i = std::stoi(match[1]);
      int j = std::stoi(match[2]);
      if (!edges.contains({i, j})) ++violations;
      if (to != from_neighbor(j, i, match[3] == "self")) ++violations;
      ++count[from];
      if (rec.seq <= last_seq[from]) ++reordered;
      last_seq[from] = rec.seq;
    } else if (from.rfind("agent", 0) == 0) {
      // Residual reports go to the monitor only.
      if (to.rfind("monitor/", 0) != 0) ++violations;
    }
  };
  auto r = run_distributed_opf(net, opts);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 20);
  EXPECT_EQ(violations, 0);
  EXPECT_EQ(reordered, 0);
  // Every directed edge carries both values once per iteration.
  EXPECT_EQ(count.size(), 4 * net.edges.size());
  for (const auto& [signal, n] : count) EXPECT_EQ(n, 20u) << signal;
}

TEST(DistributedOpf, AnswerIndependentOfDelay) {
  auto net = smb::testing::random_network(3);
  DistributedOptions base;
  base.deployment.transport = runtime::TransportKind::broker;
  base.admm.tol = 1e-5;
  base.admm.max_iter = 20000;
  auto none = run_distributed_opf(net, base);
  auto delayed_opts = base;
  delayed_opts.deployment.profile = netem::preset("3g", 7).scaled(0.01);
  delayed_opts.deployment.profile.loss_prob = 0.2;  // forced off for OPF runs
  auto delayed = run_distributed_opf(net, delayed_opts);
  ASSERT_TRUE(none.converged);
  ASSERT_TRUE(delayed.converged);
  EXPECT_EQ(none.iterations, delayed.iterations);
  for (const auto& [id, v] : none.solution.v) EXPECT_EQ(delayed.solution.v.at(id), v);
}

TEST(Budget, ZeroDelayIsComputeOnly) {
  BudgetModel model;
  model.compute_allowance = 40ms;
  EXPECT_EQ(latency_budget_oracle(netem::preset("none"), 300, mtdc27(), model), 12s);
}

TEST(Budget, SixtySecondsForThreeHundredExchanges) {
  netem::NetProfile p;
  p.base_delay = 100ms;
  auto t = latency_budget_oracle(p, 300, two_node(), BudgetModel{2, Duration::zero()});
  EXPECT_GE(t, 60s);
  EXPECT_LE(t, 60s + 1ms);
}

TEST(Budget, ExpectedMaxAgreesWithMonteCarlo) {
  for (const char* name : {"lan", "4g", "3g"}) {
    auto p = netem::preset(name, 1);
    for (auto [legs, m] : {std::pair{1, std::size_t{1}}, std::pair{2, std::size_t{70}}}) {
      netem::DelaySampler s(p, "mc");
      const int trials = 20000;
      double sum = 0.0;
      for (int t = 0; t < trials; ++t) {
        double worst = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          double d = 0.0;
          for (int l = 0; l < legs; ++l) d += static_cast<double>(s.sample().count());
          worst = std::max(worst, d);
        }
        sum += worst;
      }
      double mc = sum / trials;
      double predicted = static_cast<double>(expected_max_delay(p, legs, m).count());
      EXPECT_NEAR(predicted, mc, 0.01 * mc) << name << " legs=" << legs << " m=" << m;
    }
  }
}

TEST(Budget, PresetRatiosAfterCalibration) {
  auto net = mtdc27();
  std::vector<RatioTarget> targets{{netem::preset("4g"), 167.0 / 62.0}, {netem::preset("3g"), 305.0 / 62.0}};
  auto c = calibrate_compute_allowance(netem::preset("lan"), targets, net, 2);
  EXPECT_NEAR(to_ms(c), 40.96, 0.5);
  BudgetModel model{2, c};
  auto lan = latency_budget_oracle(netem::preset("lan"), 300, net, model);
  auto g4 = latency_budget_oracle(netem::preset("4g"), 300, net, model);
  auto g3 = latency_budget_oracle(netem::preset("3g"), 300, net, model);
  EXPECT_LT(lan, g4);
  EXPECT_LT(g4, g3);
  for (auto [got, want] : {std::pair{double(g4.count()) / double(lan.count()), 167.0 / 62.0},
                           std::pair{double(g3.count()) / double(lan.count()), 305.0 / 62.0}}) {
    EXPECT_GT(got, want / 2.0);
    EXPECT_LT(got, want * 2.0);
  }
}
