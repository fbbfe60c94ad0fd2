#include "wuuct/tree.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace wuuct {

SearchTree::SearchTree(std::uint32_t action_count, TreeLimits limits, RootInfo root)
    : action_count_(action_count), limits_(limits) {
  if (action_count == 0) throw ContractViolation("environment has no actions");
  Node n;
  n.stats.depth = root.depth;
  n.stats.edge_reward = root.edge_reward;
  n.stats.terminal = root.terminal;
  n.expanded.assign(action_count_, false);
  nodes_.push_back(std::move(n));
}

const SearchTree::Node& SearchTree::at(NodeId id) const {
  if (id.value >= nodes_.size()) throw ContractViolation("unknown node id");
  return nodes_[id.value];
}

SearchTree::Node& SearchTree::at(NodeId id) {
  if (id.value >= nodes_.size()) throw ContractViolation("unknown node id");
  return nodes_[id.value];
}

std::optional<NodeId> SearchTree::parent(NodeId id) const {
  const auto& n = at(id);
  if (n.parent.value == kNoParent) return std::nullopt;
  return n.parent;
}

std::optional<ActionId> SearchTree::action_into(NodeId id) const {
  const auto& n = at(id);
  if (n.action.value == kNoAction) return std::nullopt;
  return n.action;
}

std::optional<NodeId> SearchTree::child(NodeId id, ActionId action) const {
  const auto& kids = at(id).children;
  auto it = std::lower_bound(kids.begin(), kids.end(), action,
                             [](const Child& c, ActionId a) { return c.action < a; });
  if (it == kids.end() || it->action != action) return std::nullopt;
  return it->node;
}

void SearchTree::check_action(ActionId action) const {
  if (action.value >= action_count_) throw InvalidAction("action out of range");
}

bool SearchTree::is_expanded(NodeId id, ActionId action) const {
  check_action(action);
  return at(id).expanded[action.value];
}

std::uint32_t SearchTree::width_limit() const {
  return std::min(action_count_, limits_.max_children);
}

bool SearchTree::can_expand(NodeId id) const { return at(id).expanded_count < width_limit(); }

std::vector<ActionId> SearchTree::unexpanded_actions(NodeId id) const {
  const auto& n = at(id);
  std::vector<ActionId> out;
  out.reserve(action_count_ - n.expanded_count);
  for (std::uint32_t a = 0; a < action_count_; ++a) {
    if (!n.expanded[a]) out.push_back(ActionId{a});
  }
  return out;
}

void SearchTree::claim_action(NodeId parent, ActionId action) {
  check_action(action);
  auto& n = at(parent);
  if (n.expanded[action.value]) {
    throw DuplicateAction("action " + std::to_string(action.value) + " already expanded");
  }
  if (n.expanded_count >= width_limit()) {
    throw WidthCapExceeded("node already has " + std::to_string(n.expanded_count) +
                           " expanded actions");
  }
  n.expanded[action.value] = true;
  n.expanded_count += 1;
}

NodeId SearchTree::expand_attach(NodeId parent, ActionId action, double edge_reward,
                                 bool terminal) {
  check_action(action);
  if (child(parent, action)) {
    throw DuplicateAction("action " + std::to_string(action.value) + " already attached");
  }
  if (!at(parent).expanded[action.value]) claim_action(parent, action);

  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  Node n;
  n.stats.edge_reward = edge_reward;
  n.stats.terminal = terminal;
  n.stats.depth = at(parent).stats.depth + 1;
  n.parent = parent;
  n.action = action;
  n.expanded.assign(action_count_, false);
  nodes_.push_back(std::move(n));

  auto& kids = nodes_[parent.value].children;
  auto it = std::lower_bound(kids.begin(), kids.end(), action,
                             [](const Child& c, ActionId a) { return c.action < a; });
  kids.insert(it, Child{action, id});
  return id;
}

void SearchTree::record_shadow(NodeId id, double discounted_return, bool path_end) {
  if constexpr (kShadowStats) {
    auto& n = at(id);
    n.return_sum += discounted_return;
    if (path_end) n.ended_here += 1;
  }
}

void SearchTree::set_shadow(NodeId id, double return_sum, std::uint64_t ended_here) {
  if constexpr (kShadowStats) {
    auto& n = at(id);
    n.return_sum = return_sum;
    n.ended_here = ended_here;
  }
}

void SearchTree::merge_from(NodeId dst_node, const SearchTree& src, NodeId src_node) {
  if (src.action_count_ != action_count_) throw ContractViolation("merging incompatible trees");
  const Node& s = src.at(src_node);
  if (s.stats.unobserved != 0 || at(dst_node).stats.unobserved != 0) {
    throw InvariantViolation("cannot merge trees with tasks in flight");
  }
  {
    Node& d = at(dst_node);
    const std::uint64_t total = d.stats.visits + s.stats.visits;
    if (d.stats.visits == 0) {
      d.stats.value = s.stats.value;
    } else if (total > 0) {
      d.stats.value = (static_cast<double>(d.stats.visits) * d.stats.value +
                       static_cast<double>(s.stats.visits) * s.stats.value) /
                      static_cast<double>(total);
    }
    d.stats.visits = total;
    d.return_sum += s.return_sum;
    d.ended_here += s.ended_here;
  }
  for (const Child& c : s.children) {
    std::optional<NodeId> target = child(dst_node, c.action);
    if (!target) {
      const auto& cs = src.at(c.node).stats;
      // Aggregates may exceed this tree's width cap; bypass it.
      Node& d = at(dst_node);
      if (!d.expanded[c.action.value]) {
        d.expanded[c.action.value] = true;
        d.expanded_count += 1;
      }
      target = expand_attach(dst_node, c.action, cs.edge_reward, cs.terminal);
    }
    merge_from(*target, src, c.node);
  }
}

void SearchTree::export_text(std::ostream& out) const {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const long long parent = n.parent.value == kNoParent ? -1LL : static_cast<long long>(n.parent.value);
    const long long action = n.action.value == kNoAction ? -1LL : static_cast<long long>(n.action.value);
    out << i << ' ' << parent << ' ' << action << ' ' << n.stats.visits << ' '
        << n.stats.unobserved << ' ' << n.stats.value << ' ' << n.stats.edge_reward << ' '
        << (n.stats.terminal ? 1 : 0) << '\n';
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

void incomplete_update(SearchTree& tree, const PathRecord& path) {
  for (NodeId id : path.nodes) tree.stats(id).unobserved += 1;
}

namespace {

template <bool kTrackUnobserved>
void fold_return(SearchTree& tree, const PathRecord& path, double simulation_return,
                 double gamma) {
  if (path.nodes.empty()) throw ContractViolation("empty path");
  if constexpr (kTrackUnobserved) {
    for (NodeId id : path.nodes) {
      if (tree.stats(id).unobserved == 0) {
        throw InvariantViolation("unobserved count underflow at node " +
                                 std::to_string(id.value));
      }
    }
  }
  double acc = simulation_return;
  for (auto it = path.nodes.rbegin(); it != path.nodes.rend(); ++it) {
    NodeStats& s = tree.stats(*it);
    s.visits += 1;
    if constexpr (kTrackUnobserved) s.unobserved -= 1;
    acc = s.edge_reward + gamma * acc;
    const double n = static_cast<double>(s.visits);
    s.value = ((n - 1.0) * s.value + acc) / n;
    tree.record_shadow(*it, acc, it == path.nodes.rbegin());
  }
}

}  // namespace

void complete_update(SearchTree& tree, const PathRecord& path, double simulation_return,
                     double gamma) {
  fold_return<true>(tree, path, simulation_return, gamma);
}

void backpropagate(SearchTree& tree, const PathRecord& path, double simulation_return,
                   double gamma) {
  fold_return<false>(tree, path, simulation_return, gamma);
}

bool visit_conservation_check(const SearchTree& tree) {
  for (std::uint32_t i = 0; i < tree.size(); ++i) {
    const NodeId id{i};
    const NodeStats& s = tree.stats(id);
    if (s.unobserved != 0) return false;
    std::uint64_t below = 0;
    for (const Child& c : tree.children(id)) below += tree.stats(c.node).visits;
    if (s.visits < below) return false;
    if constexpr (kShadowStats) {
      if (s.visits - below != tree.shadow_ended_here(id)) return false;
    }
  }
  return true;
}

double max_mean_deviation(const SearchTree& tree) {
  double worst = 0.0;
  if constexpr (kShadowStats) {
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
      const NodeStats& s = tree.stats(NodeId{i});
      if (s.visits == 0) continue;
      const double mean = tree.shadow_return_sum(NodeId{i}) / static_cast<double>(s.visits);
      worst = std::max(worst, std::abs(s.value - mean));
    }
  }
  return worst;
}

std::optional<ActionId> best_root_action(const SearchTree& tree) {
  std::optional<ActionId> best;
  double best_value = 0.0;
  for (const Child& c : tree.children(tree.root())) {
    const double v = tree.stats(c.node).value;
    if (!best || v > best_value) {
      best = c.action;
      best_value = v;
    }
  }
  return best;
}

}  // namespace wuuct
