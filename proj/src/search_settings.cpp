#include "wuuct/search_settings.hpp"

namespace wuuct {

void SearchSettings::validate() const {
  policy.validate();
  if (t_max == 0) throw ConfigError("t_max must be >= 1");
  if (n_exp == 0 || n_sim == 0) throw ConfigError("worker counts must be >= 1");
  if (limits.max_children == 0) throw ConfigError("max_children must be >= 1");
  if (!(treep.r_vl >= 0.0)) throw ConfigError("r_vl must be >= 0");
  if (treep.n_vl && !(*treep.n_vl >= 0.0)) throw ConfigError("n_vl must be >= 0");
}

}  // namespace wuuct
