#pragma once

#include <cstdint>
#include <optional>

#include "wuuct/policy.hpp"
#include "wuuct/tree.hpp"

namespace wuuct {

struct TreePConfig {
  double r_vl = 1.0;
  std::optional<double> n_vl;  // set: virtual pseudo-count variant
};

// Everything a planning call needs besides the environment and root state.
struct SearchSettings {
  std::uint64_t t_max = 128;
  TreeLimits limits;
  PolicyConfig policy;
  std::uint32_t n_exp = 1;
  std::uint32_t n_sim = 1;  // simulation workers; worker count for the baselines
  bool serialize = false;   // at most one task in flight (diagnostic)
  bool record_events = false;
  TreePConfig treep;

  void validate() const;
};

}  // namespace wuuct
