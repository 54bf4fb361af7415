#pragma once

#include <string>
#include <vector>

#include "poa/network.hpp"

namespace poa {

/// A named two-link game with its sweep metadata.
struct Instance {
  std::string name;
  Network net;
  double period_base = 0.0;  // 0 when the PoA has no log-period

  // Demands where WEq or Opt change regime, within [M_lo, M_hi].
  std::vector<double> hints(double M_lo, double M_hi) const;
};

// pigou | step:A | pwl:A | exp:factorial | exp:super_geometric:BASE
// Throws ParseError for unknown names.
Instance named_instance(const std::string& name);

// Network from a JSON file; ParseError carries line/column on bad JSON.
Network load_network_file(const std::string& path);

}  // namespace poa
