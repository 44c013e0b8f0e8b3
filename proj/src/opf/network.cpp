#include "smb/opf/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "smb/error.hpp"

namespace smb::opf {

std::size_t DcNetwork::index_of(int id) const {
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].id == id) return k;
  }
  throw Error(ErrorCode::InvalidArgument, fmt::format("no node {}", id));
}

std::vector<std::pair<int, double>> DcNetwork::neighbors(int id) const {
  std::map<int, double> out;
  for (const auto& e : edges) {
    if (e.i == id) out[e.j] += e.g;
    else if (e.j == id) out[e.i] += e.g;
  }
  return {out.begin(), out.end()};
}

double DcNetwork::total_demand() const {
  double sum = 0.0;
  for (const auto& n : nodes) sum += n.d;
  return sum;
}

void validate_network(const DcNetwork& net) {
  if (net.nodes.empty()) throw Error(ErrorCode::InvalidArgument, "network has no nodes");
  std::set<int> ids;
  bool has_generator = false;
  double pmax_sum = 0.0;
  for (const auto& n : net.nodes) {
    if (!ids.insert(n.id).second) throw Error(ErrorCode::InvalidArgument, fmt::format("duplicate node {}", n.id));
    if (n.id < 1 || n.id > 99) throw Error(ErrorCode::InvalidArgument, fmt::format("node id {} outside [1, 99]", n.id));
    if (!std::isfinite(n.d) || n.d < 0.0) throw Error(ErrorCode::InvalidArgument, fmt::format("node {}: bad demand", n.id));
    if (n.kind == NodeKind::generator) {
      has_generator = true;
      if (!(n.a > 0.0) || !std::isfinite(n.a) || !std::isfinite(n.b)) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("generator {}: cost needs a > 0", n.id));
      }
      if (!(n.pmin <= n.pmax) || !std::isfinite(n.pmin) || !std::isfinite(n.pmax)) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("generator {}: pmin > pmax", n.id));
      }
      pmax_sum += n.pmax;
    }
  }
  for (const auto& e : net.edges) {
    if (!ids.contains(e.i) || !ids.contains(e.j)) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("edge {}-{} references an unknown node", e.i, e.j));
    }
    if (e.i == e.j) throw Error(ErrorCode::InvalidArgument, fmt::format("edge {}-{} is a loop", e.i, e.j));
    if (!(e.g > 0.0) || !std::isfinite(e.g)) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("edge {}-{} needs g > 0", e.i, e.j));
    }
  }
  if (!ids.contains(net.ref)) throw Error(ErrorCode::InvalidArgument, fmt::format("reference node {} missing", net.ref));

  std::set<int> seen{net.nodes.front().id};
  std::vector<int> stack{net.nodes.front().id};
  while (!stack.empty()) {
    int at = stack.back();
    stack.pop_back();
    for (const auto& [nb, g] : net.neighbors(at)) {
      if (seen.insert(nb).second) stack.push_back(nb);
    }
  }
  if (seen.size() != ids.size()) {
    for (int id : ids) {
      if (!seen.contains(id)) throw Error(ErrorCode::Disconnected, fmt::format("node {} is not connected", id));
    }
  }
  if (!has_generator) throw Error(ErrorCode::NoGenerator, "network has no generator");
  if (pmax_sum < net.total_demand()) {
    throw Error(ErrorCode::InfeasibleDemand,
                fmt::format("demand {} exceeds total generation limit {}", net.total_demand(), pmax_sum));
  }
}

DcNetwork build_network(const nlohmann::json& spec) {
  DcNetwork net;
  try {
    for (const auto& jn : spec.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<int>();
      auto kind = jn.at("kind").get<std::string>();
      if (kind == "generator") {
        n.kind = NodeKind::generator;
        n.a = jn.at("a").get<double>();
        n.b = jn.at("b").get<double>();
        n.pmin = jn.value("pmin", 0.0);
        n.pmax = jn.at("pmax").get<double>();
        n.d = jn.value("d", 0.0);
      } else if (kind == "load") {
        n.kind = NodeKind::load;
        n.d = jn.at("d").get<double>();
      } else {
        throw Error(ErrorCode::InvalidArgument, "node kind must be generator or load, got '" + kind + "'");
      }
      net.nodes.push_back(n);
    }
    for (const auto& je : spec.at("edges")) {
      net.edges.push_back(Edge{je.at("i").get<int>(), je.at("j").get<int>(), je.at("g").get<double>()});
    }
    if (spec.contains("ref")) {
      net.ref = spec.at("ref").get<int>();
    } else {
      auto gen = std::find_if(net.nodes.begin(), net.nodes.end(),
                              [](const Node& n) { return n.kind == NodeKind::generator; });
      if (gen == net.nodes.end()) throw Error(ErrorCode::NoGenerator, "network has no generator");
      net.ref = gen->id;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("network spec: ") + e.what());
  }
  validate_network(net);
  return net;
}

DcNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open network spec " + path.string());
  nlohmann::json spec;
  try {
    spec = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
  return build_network(spec);
}

nlohmann::ordered_json network_to_json(const DcNetwork& net) {
  nlohmann::ordered_json j;
  j["ref"] = net.ref;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : net.nodes) {
    nlohmann::ordered_json jn;
    jn["id"] = n.id;
    if (n.kind == NodeKind::generator) {
      jn["kind"] = "generator";
      jn["a"] = n.a;
      jn["b"] = n.b;
      jn["pmin"] = n.pmin;
      jn["pmax"] = n.pmax;
      if (n.d != 0.0) jn["d"] = n.d;
    } else {
      jn["kind"] = "load";
      jn["d"] = n.d;
    }
    j["nodes"].push_back(jn);
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : net.edges) j["edges"].push_back({{"i", e.i}, {"j", e.j}, {"g", e.g}});
  return j;
}

}  // namespace smb::opf
