#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "wuuct/env.hpp"

namespace wuuct {

#ifdef WUUCT_SHADOW_STATS
inline constexpr bool kShadowStats = true;
#else
inline constexpr bool kShadowStats = false;
#endif

struct NodeId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

// Per-node statistics read by every selection rule.
struct NodeStats {
  double value = 0.0;             // V: mean discounted return through this node
  std::uint64_t visits = 0;       // N: completed visits
  std::uint64_t unobserved = 0;   // O: in-flight simulations through this node
  double edge_reward = 0.0;       // reward on the transition into this node
  bool terminal = false;
  std::uint32_t depth = 0;
};

struct TreeLimits {
  std::uint32_t max_depth = 100;     // d_max
  std::uint32_t max_children = 20;   // width cap
};

struct Child {
  ActionId action;
  NodeId node;
};

// Root-to-node path plus the task index it was selected for.
struct PathRecord {
  std::vector<NodeId> nodes;
  std::uint64_t task = 0;
};

struct RootInfo {
  std::uint32_t depth = 0;
  double edge_reward = 0.0;
  bool terminal = false;
};

// Arena of search nodes. Children are kept sorted by action so iteration
// order equals lowest-action-first tie-breaking. An action becomes
// "expanded" either when claimed for a pending expansion or when a child is
// attached; the width cap counts both.
class SearchTree {
 public:
  SearchTree(std::uint32_t action_count, TreeLimits limits, RootInfo root = {});

  NodeId root() const { return NodeId{0}; }
  std::size_t size() const { return nodes_.size(); }
  std::uint32_t action_count() const { return action_count_; }
  const TreeLimits& limits() const { return limits_; }

  const NodeStats& stats(NodeId id) const { return at(id).stats; }
  NodeStats& stats(NodeId id) { return at(id).stats; }
  std::optional<NodeId> parent(NodeId id) const;
  std::optional<ActionId> action_into(NodeId id) const;
  std::span<const Child> children(NodeId id) const { return at(id).children; }
  std::optional<NodeId> child(NodeId id, ActionId action) const;

  bool is_expanded(NodeId id, ActionId action) const;
  std::uint32_t expanded_count(NodeId id) const { return at(id).expanded_count; }
  // Unexpanded actions remain and the width cap has not been reached.
  bool can_expand(NodeId id) const;
  // Ascending list of actions neither claimed nor attached.
  std::vector<ActionId> unexpanded_actions(NodeId id) const;

  // Reserve `action` for an in-flight expansion. Throws DuplicateAction or
  // WidthCapExceeded.
  void claim_action(NodeId parent, ActionId action);

  // Link a new child reached by `action`. The action may have been claimed
  // beforehand; attaching it twice throws DuplicateAction.
  NodeId expand_attach(NodeId parent, ActionId action, double edge_reward, bool terminal);

  // Shadow bookkeeping, live only with WUUCT_SHADOW_STATS.
  double shadow_return_sum(NodeId id) const { return at(id).return_sum; }
  std::uint64_t shadow_ended_here(NodeId id) const { return at(id).ended_here; }
  void record_shadow(NodeId id, double discounted_return, bool path_end);
  // Overwrite shadow totals, for callers that aggregate statistics directly.
  void set_shadow(NodeId id, double return_sum, std::uint64_t ended_here);

  // Fold the statistics of `src` (rooted at src_node) into this tree at
  // dst_node: counts add, values combine as visit-weighted means, missing
  // children are created. Unobserved counts must be zero on both sides.
  void merge_from(NodeId dst_node, const SearchTree& src, NodeId src_node);

  // One line per node: id parent action N O V edge_reward terminal.
  void export_text(std::ostream& out) const;

 private:
  struct Node {
    NodeStats stats;
    NodeId parent{kNoParent};
    ActionId action{kNoAction};
    std::vector<Child> children;
    std::vector<bool> expanded;
    std::uint32_t expanded_count = 0;
    double return_sum = 0.0;
    std::uint64_t ended_here = 0;
  };

  static constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();
  static constexpr std::uint32_t kNoAction = std::numeric_limits<std::uint32_t>::max();

  const Node& at(NodeId id) const;
  Node& at(NodeId id);
  std::uint32_t width_limit() const;
  void check_action(ActionId action) const;

  std::uint32_t action_count_;
  TreeLimits limits_;
  std::vector<Node> nodes_;
};

// O <- O + 1 along the path.
void incomplete_update(SearchTree& tree, const PathRecord& path);

// Leaf-to-root: N += 1, O -= 1, r <- edge_reward + gamma * r, V <- running
// mean. Throws InvariantViolation if any O is already zero.
void complete_update(SearchTree& tree, const PathRecord& path, double simulation_return,
                     double gamma);

// Same V/N recursion without touching O (plain sequential backpropagation).
void backpropagate(SearchTree& tree, const PathRecord& path, double simulation_return,
                   double gamma);

// True iff no node has O > 0 and every node's N covers its children's, with
// the surplus equal to the rollouts that ended there (surplus check only with
// shadow stats).
bool visit_conservation_check(const SearchTree& tree);

// max |V - shadow_sum / N| over visited nodes; 0 without shadow stats.
double max_mean_deviation(const SearchTree& tree);

// Argmax of V over the root's children, lowest action on ties.
std::optional<ActionId> best_root_action(const SearchTree& tree);

}  // namespace wuuct
