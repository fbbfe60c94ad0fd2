#pragma once

#include <vector>

#include "wuuct/env.hpp"
#include "wuuct/tree.hpp"

namespace wuuct {

// Master-owned game states keyed by node id. Tasks always receive copies.
class StateBuffer {
 public:
  void put(NodeId id, State state) {
    if (id.value >= states_.size()) states_.resize(id.value + 1);
    states_[id.value] = std::move(state);
  }

  bool contains(NodeId id) const { return id.value < states_.size() && !states_[id.value].empty(); }

  const State& get(NodeId id) const {
    if (!contains(id)) throw ContractViolation("no state stored for node");
    return states_[id.value];
  }

  State duplicate(NodeId id) const { return get(id); }

 private:
  std::vector<State> states_;
};

}  // namespace wuuct
