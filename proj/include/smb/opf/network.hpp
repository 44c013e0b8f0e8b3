#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace smb::opf {

enum class NodeKind { generator, load };

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::load;
  /// Demand in per-unit power. Generators may carry local demand too.
  double d = 0.0;
  /// Cost a p^2 + b p, generators only.
  double a = 0.0;
  double b = 0.0;
  double pmin = 0.0;
  double pmax = 0.0;
};

struct Edge {
  int i = 0;
  int j = 0;
  double g = 0.0;  // conductance, > 0
};

/// Resistive dc grid: p_i - d_i = sum_j g_ij (v_i - v_j), with the reference
/// node held at 1.0 pu.
struct DcNetwork {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  /// Reference node id; build_network defaults it to the first generator.
  int ref = 0;

  [[nodiscard]] std::size_t index_of(int id) const;
  [[nodiscard]] const Node& node(int id) const { return nodes[index_of(id)]; }
  /// (neighbour id, total conductance) sorted by id; parallel edges merge.
  [[nodiscard]] std::vector<std::pair<int, double>> neighbors(int id) const;
  [[nodiscard]] double total_demand() const;
};

/// Checks structure and the invariants. Throws InvalidArgument, Disconnected,
/// NoGenerator or InfeasibleDemand.
void validate_network(const DcNetwork& net);

/// Parses {"nodes":[...], "edges":[...], "ref"?: id} and validates it.
DcNetwork build_network(const nlohmann::json& spec);
DcNetwork load_network(const std::filesystem::path& path);
nlohmann::ordered_json network_to_json(const DcNetwork& net);

}  // namespace smb::opf
