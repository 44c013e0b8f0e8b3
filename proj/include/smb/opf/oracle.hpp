#pragma once

#include <map>

#include "smb/opf/network.hpp"

namespace smb::opf {

struct OpfSolution {
  /// Keyed by node id. p is 0 at load nodes.
  std::map<int, double> v;
  std::map<int, double> p;
  /// Multiplier of each node's flow-balance row (cost gradient is -multiplier).
  std::map<int, double> multiplier;
  double objective = 0.0;
};

/// Exact optimum of the linearised dc OPF. With no line limits the KKT
/// conditions reduce to one clearing price shared by every node; outputs
/// follow from it and voltages from the reduced Laplacian. Throws
/// Infeasible or Unbounded.
OpfSolution centralized_opf_oracle(const DcNetwork& net);

double objective_of(const DcNetwork& net, const std::map<int, double>& p);

}  // namespace smb::opf
