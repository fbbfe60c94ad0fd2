#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "wuuct/tree.hpp"

namespace testing {

// Topology plus (N, O) equal and V within tol, node by node in id order.
inline std::string tree_difference(const wuuct::SearchTree& a, const wuuct::SearchTree& b,
                                   double tol = 1e-12) {
  if (a.size() != b.size()) {
    return "size " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
  }
  for (std::uint32_t i = 0; i < a.size(); ++i) {
    const wuuct::NodeId id{i};
    const auto& x = a.stats(id);
    const auto& y = b.stats(id);
    if (a.parent(id) != b.parent(id) || a.action_into(id) != b.action_into(id)) {
      return "topology differs at node " + std::to_string(i);
    }
    if (x.visits != y.visits || x.unobserved != y.unobserved) {
      return "counts differ at node " + std::to_string(i);
    }
    if (std::abs(x.value - y.value) > tol) {
      return "value differs at node " + std::to_string(i);
    }
    if (x.edge_reward != y.edge_reward || x.terminal != y.terminal) {
      return "edge data differs at node " + std::to_string(i);
    }
  }
  return "";
}

inline bool all_unobserved_zero(const wuuct::SearchTree& t) {
  for (std::uint32_t i = 0; i < t.size(); ++i) {
    if (t.stats(wuuct::NodeId{i}).unobserved != 0) return false;
  }
  return true;
}

}  // namespace testing
