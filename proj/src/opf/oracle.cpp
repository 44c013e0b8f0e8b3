#include "smb/opf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "smb/error.hpp"

namespace smb::opf {

double objective_of(const DcNetwork& net, const std::map<int, double>& p) {
  double sum = 0.0;
  for (const auto& n : net.nodes) {
    if (n.kind != NodeKind::generator) continue;
    double pi = p.at(n.id);
    sum += n.a * pi * pi + n.b * pi;
  }
  return sum;
}

namespace {

double dispatch_at(const Node& g, double price) { return std::clamp((price - g.b) / (2.0 * g.a), g.pmin, g.pmax); }

/// Price at which the generators' cost-minimising outputs add up to `demand`.
/// Total output is piecewise linear and nondecreasing in the price with
/// kinks where a generator reaches a limit, so the price is found exactly
/// by locating the segment that contains the demand.
double clearing_price(const std::vector<const Node*>& gens, double demand) {
  std::vector<double> kinks;
  for (const auto* g : gens) {
    kinks.push_back(g->b + 2.0 * g->a * g->pmin);
    kinks.push_back(g->b + 2.0 * g->a * g->pmax);
  }
  std::sort(kinks.begin(), kinks.end());
  auto total = [&](double price) {
    double s = 0.0;
    for (const auto* g : gens) s += dispatch_at(*g, price);
    return s;
  };
  // First kink whose total output reaches the demand.
  auto hi = std::partition_point(kinks.begin(), kinks.end(), [&](double k) { return total(k) < demand; });
  if (hi == kinks.end()) hi = std::prev(kinks.end());
  if (hi == kinks.begin()) return *hi;
  const double lo_price = *std::prev(hi);
  const double hi_price = *hi;
  // Inside the segment the free generators contribute sum 1/(2a) per unit price.
  double slope = 0.0;
  const double mid = 0.5 * (lo_price + hi_price);
  for (const auto* g : gens) {
    double p = (mid - g->b) / (2.0 * g->a);
    if (p > g->pmin && p < g->pmax) slope += 1.0 / (2.0 * g->a);
  }
  if (slope == 0.0) return hi_price;
  return lo_price + (demand - total(lo_price)) / slope;
}

}  // namespace

OpfSolution centralized_opf_oracle(const DcNetwork& net) {
  std::vector<const Node*> gens;
  double pmin_sum = 0.0, pmax_sum = 0.0;
  for (const auto& n : net.nodes) {
    if (n.kind != NodeKind::generator) continue;
    if (!(n.a > 0.0)) throw Error(ErrorCode::Unbounded, fmt::format("generator {} has no quadratic cost", n.id));
    gens.push_back(&n);
    pmin_sum += n.pmin;
    pmax_sum += n.pmax;
  }
  const double demand = net.total_demand();
  if (gens.empty() || demand > pmax_sum + 1e-12 || demand < pmin_sum - 1e-12) {
    throw Error(ErrorCode::Infeasible, fmt::format("demand {} outside generation range [{}, {}]", demand, pmin_sum, pmax_sum));
  }

  // Without line limits every balance row has the same multiplier: minus
  // the clearing price.
  const double price = clearing_price(gens, demand);
  OpfSolution out;
  for (const auto& n : net.nodes) {
    out.p[n.id] = n.kind == NodeKind::generator ? dispatch_at(n, price) : 0.0;
    out.multiplier[n.id] = -price;
  }

  // Voltages: L v = p - d with v_ref = 1, on the reduced Laplacian.
  const auto n_nodes = static_cast<Eigen::Index>(net.nodes.size());
  const auto ref = static_cast<Eigen::Index>(net.index_of(net.ref));
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
  for (const auto& e : net.edges) {
    auto i = static_cast<Eigen::Index>(net.index_of(e.i));
    auto j = static_cast<Eigen::Index>(net.index_of(e.j));
    lap(i, i) += e.g;
    lap(j, j) += e.g;
    lap(i, j) -= e.g;
    lap(j, i) -= e.g;
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < n_nodes; ++k) {
    if (k != ref) keep.push_back(k);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd reduced(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& node = net.nodes[static_cast<std::size_t>(keep[static_cast<std::size_t>(r)])];
    rhs(r) = out.p.at(node.id) - node.d - lap(keep[static_cast<std::size_t>(r)], ref);
    for (Eigen::Index c = 0; c < m; ++c) reduced(r, c) = lap(keep[static_cast<std::size_t>(r)], keep[static_cast<std::size_t>(c)]);
  }
  Eigen::VectorXd v = m > 0 ? Eigen::VectorXd(reduced.ldlt().solve(rhs)) : Eigen::VectorXd();
  out.v[net.ref] = 1.0;
  for (Eigen::Index r = 0; r < m; ++r) out.v[net.nodes[static_cast<std::size_t>(keep[static_cast<std::size_t>(r)])].id] = v(r);

  out.objective = objective_of(net, out.p);
  return out;
}

}  // namespace smb::opf
