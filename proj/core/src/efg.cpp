#include "swapregret/efg.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "swapregret/io.hpp"
#include "swapregret/numeric.hpp"

namespace swapregret::efg {

// --- Builder -------------------------------------------------------------------

int GameTreeBuilder::node_id(const std::string& name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].node.name == name) return static_cast<int>(i);
  }
  return -1;
}

int GameTreeBuilder::add_decision(const std::string& name, int player, const std::string& infoset) {
  if (node_id(name) >= 0) throw StructuralError("tree: duplicate node " + name);
  if (player < 0) throw StructuralError("tree: bad player on node " + name);
  PendingNode p;
  p.node.kind = TreeNode::Kind::decision;
  p.node.name = name;
  p.node.player = player;
  p.infoset_name = infoset;
  nodes_.push_back(std::move(p));
  return static_cast<int>(nodes_.size()) - 1;
}

int GameTreeBuilder::add_chance(const std::string& name, std::vector<double> probs) {
  if (node_id(name) >= 0) throw StructuralError("tree: duplicate node " + name);
  PendingNode p;
  p.node.kind = TreeNode::Kind::chance;
  p.node.name = name;
  p.node.chance_probs = std::move(probs);
  nodes_.push_back(std::move(p));
  return static_cast<int>(nodes_.size()) - 1;
}

int GameTreeBuilder::add_terminal(const std::string& name, std::vector<double> payoffs) {
  if (node_id(name) >= 0) throw StructuralError("tree: duplicate node " + name);
  PendingNode p;
  p.node.kind = TreeNode::Kind::terminal;
  p.node.name = name;
  p.node.payoffs = std::move(payoffs);
  nodes_.push_back(std::move(p));
  return static_cast<int>(nodes_.size()) - 1;
}

void GameTreeBuilder::add_infoset(int player, const std::string& name,
                                  std::vector<std::string> actions) {
  for (const auto& is : infosets_) {
    if (is.player == player && is.name == name) {
      throw StructuralError("tree: duplicate infoset " + name);
    }
  }
  if (actions.empty()) throw StructuralError("tree: infoset " + name + " has no actions");
  Infoset is;
  is.player = player;
  is.name = name;
  is.actions = std::move(actions);
  infosets_.push_back(std::move(is));
}

void GameTreeBuilder::add_edge(const std::string& parent, const std::string& child,
                               const std::string& label) {
  int p = node_id(parent);
  int c = node_id(child);
  if (p < 0) throw StructuralError("tree: edge from unknown node " + parent);
  if (c < 0) throw StructuralError("tree: edge to unknown node " + child);
  if (nodes_[static_cast<std::size_t>(c)].node.parent != -1) {
    throw StructuralError("tree: node " + child + " has two parents");
  }
  nodes_[static_cast<std::size_t>(p)].node.children.push_back(c);
  nodes_[static_cast<std::size_t>(p)].node.edge_labels.push_back(label);
  nodes_[static_cast<std::size_t>(c)].node.parent = p;
}

namespace {

// Kahn-style topological ordering of one player's infosets, declaration order
// breaking ties; parents always precede children.
std::vector<int> topo_order(const std::vector<int>& ids, const std::vector<int>& parent_of) {
  std::vector<int> order;
  std::vector<bool> placed(ids.size(), false);
  while (order.size() < ids.size()) {
    bool progress = false;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (placed[i]) continue;
      int p = parent_of[i];
      bool ready = p < 0 || placed[static_cast<std::size_t>(p)];
      if (ready) {
        order.push_back(static_cast<int>(i));
        placed[i] = true;
        progress = true;
      }
    }
    if (!progress) throw StructuralError("tree: cyclic infoset structure");
  }
  return order;
}

}  // namespace

GameTree GameTreeBuilder::build() {
  GameTree tree;
  if (nodes_.empty()) throw StructuralError("tree: no nodes");

  // Player count from terminal payoffs.
  int players = -1;
  for (const auto& pn : nodes_) {
    if (pn.node.kind == TreeNode::Kind::terminal) {
      int m = static_cast<int>(pn.node.payoffs.size());
      if (players == -1) players = m;
      if (m != players || m < 1) throw StructuralError("tree: inconsistent payoff arity");
      for (double u : pn.node.payoffs) {
        if (!(u >= 0.0 && u <= 1.0)) throw StructuralError("tree: payoffs must lie in [0, 1]");
      }
    }
  }
  if (players < 1) throw StructuralError("tree: no terminal nodes");
  tree.players_ = players;

  // Root: the unique parentless node.
  int root = -1;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].node.parent == -1) {
      if (root != -1) throw StructuralError("tree: multiple roots");
      root = static_cast<int>(i);
    }
  }
  if (root < 0) throw StructuralError("tree: no root");
  tree.root_ = root;

  tree.infosets_ = infosets_;

  // Wire decision nodes to infosets, align children with the action order.
  auto find_infoset = [&](int player, const std::string& name) {
    for (std::size_t i = 0; i < tree.infosets_.size(); ++i) {
      if (tree.infosets_[i].player == player && tree.infosets_[i].name == name) {
        return static_cast<int>(i);
      }
    }
    return -1;
  };
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    TreeNode node = nodes_[i].node;
    if (node.kind == TreeNode::Kind::decision) {
      if (node.player >= players) throw StructuralError("tree: player index beyond payoff arity");
      int is = find_infoset(node.player, nodes_[i].infoset_name);
      if (is < 0) {
        throw StructuralError("tree: node " + node.name + " references unknown infoset " +
                              nodes_[i].infoset_name);
      }
      node.infoset = is;
      const auto& actions = tree.infosets_[static_cast<std::size_t>(is)].actions;
      if (node.children.size() != actions.size()) {
        throw StructuralError("tree: node " + node.name + " edge count differs from action count");
      }
      std::vector<int> ordered(actions.size(), -1);
      for (std::size_t e = 0; e < node.edge_labels.size(); ++e) {
        auto it = std::find(actions.begin(), actions.end(), node.edge_labels[e]);
        if (it == actions.end()) {
          throw StructuralError("tree: edge label " + node.edge_labels[e] +
                                " not an action of infoset");
        }
        auto a = static_cast<std::size_t>(it - actions.begin());
        if (ordered[a] != -1) throw StructuralError("tree: duplicate action edge on " + node.name);
        ordered[a] = node.children[e];
      }
      node.children = std::move(ordered);
      node.edge_labels = actions;
      tree.infosets_[static_cast<std::size_t>(is)].nodes.push_back(static_cast<int>(i));
    } else if (node.kind == TreeNode::Kind::chance) {
      if (node.children.size() != node.chance_probs.size() || node.children.empty()) {
        throw StructuralError("tree: chance node " + node.name + " prob/edge mismatch");
      }
      double sum = 0.0;
      for (double p : node.chance_probs) {
        if (!(p >= 0.0)) throw StructuralError("tree: negative chance probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw StructuralError("tree: chance probabilities sum to " + std::to_string(sum));
      }
    } else if (!node.children.empty()) {
      throw StructuralError("tree: terminal node " + node.name + " has children");
    }
    tree.nodes_.push_back(std::move(node));
  }

  for (const auto& is : tree.infosets_) {
    if (is.nodes.empty()) throw StructuralError("tree: unused infoset " + is.name);
    if (is.player >= players) throw StructuralError("tree: infoset player beyond payoff arity");
  }

  // Disjoint action labels across infosets.
  {
    std::map<std::string, int> owner;
    for (std::size_t i = 0; i < tree.infosets_.size(); ++i) {
      for (const auto& a : tree.infosets_[i].actions) {
        if (!owner.emplace(a, static_cast<int>(i)).second) {
          throw StructuralError("tree: action label " + a + " used by two infosets");
        }
      }
    }
  }

  // Depth-first pass: reachability, per-player action sequences, terminals.
  std::vector<std::vector<std::vector<std::pair<int, int>>>> node_seq(
      tree.nodes_.size(),
      std::vector<std::vector<std::pair<int, int>>>(static_cast<std::size_t>(players)));
  std::vector<double> node_chance(tree.nodes_.size(), 0.0);
  std::vector<bool> visited(tree.nodes_.size(), false);
  struct WalkItem {
    int node;
  };
  std::vector<int> stack{root};
  node_chance[static_cast<std::size_t>(root)] = 1.0;
  visited[static_cast<std::size_t>(root)] = true;
  std::vector<int> dfs_terminals;
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const TreeNode& node = tree.nodes_[static_cast<std::size_t>(id)];
    if (node.kind == TreeNode::Kind::terminal) {
      dfs_terminals.push_back(id);
      continue;
    }
    for (std::size_t c = 0; c < node.children.size(); ++c) {
      int child = node.children[c];
      if (child < 0) throw StructuralError("tree: missing child edge");
      if (visited[static_cast<std::size_t>(child)]) {
        throw StructuralError("tree: node reached twice (not a tree)");
      }
      visited[static_cast<std::size_t>(child)] = true;
      node_seq[static_cast<std::size_t>(child)] = node_seq[static_cast<std::size_t>(id)];
      node_chance[static_cast<std::size_t>(child)] = node_chance[static_cast<std::size_t>(id)];
      if (node.kind == TreeNode::Kind::decision) {
        node_seq[static_cast<std::size_t>(child)][static_cast<std::size_t>(node.player)]
            .emplace_back(node.infoset, static_cast<int>(c));
      } else {
        node_chance[static_cast<std::size_t>(child)] *= node.chance_probs[c];
      }
      stack.push_back(child);
    }
  }
  for (std::size_t i = 0; i < tree.nodes_.size(); ++i) {
    if (!visited[i]) throw StructuralError("tree: unreachable node " + tree.nodes_[i].name);
  }

  // Perfect recall: the owner's sequence agrees across each infoset.
  for (const auto& is : tree.infosets_) {
    const auto& ref = node_seq[static_cast<std::size_t>(is.nodes.front())]
                              [static_cast<std::size_t>(is.player)];
    for (int nid : is.nodes) {
      if (node_seq[static_cast<std::size_t>(nid)][static_cast<std::size_t>(is.player)] != ref) {
        throw StructuralError("tree: perfect recall violated at infoset " + is.name);
      }
    }
  }

  // Per-player layouts.
  tree.positions_.assign(tree.infosets_.size(), -1);
  tree.layouts_.resize(static_cast<std::size_t>(players));
  for (int pl = 0; pl < players; ++pl) {
    PlayerLayout& layout = tree.layouts_[static_cast<std::size_t>(pl)];
    std::vector<int> ids;  // global infoset ids of this player, declaration order
    for (std::size_t i = 0; i < tree.infosets_.size(); ++i) {
      if (tree.infosets_[i].player == pl) ids.push_back(static_cast<int>(i));
    }
    // Parent (as index into ids) from the shared sequence.
    std::vector<int> parent_local(ids.size(), -1);
    std::vector<int> parent_act(ids.size(), -1);
    auto local_of = [&](int global) {
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] == global) return static_cast<int>(i);
      }
      return -1;
    };
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto& is = tree.infosets_[static_cast<std::size_t>(ids[i])];
      const auto& seq =
          node_seq[static_cast<std::size_t>(is.nodes.front())][static_cast<std::size_t>(pl)];
      if (!seq.empty()) {
        parent_local[i] = local_of(seq.back().first);
        parent_act[i] = seq.back().second;
        if (parent_local[i] < 0) throw StructuralError("tree: dangling infoset parent");
      }
    }
    std::vector<int> order = topo_order(ids, parent_local);
    layout.infosets.resize(order.size());
    layout.parent.assign(order.size(), -1);
    layout.parent_action.assign(order.size(), -1);
    std::vector<int> pos_of_local(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
      pos_of_local[static_cast<std::size_t>(order[p])] = static_cast<int>(p);
    }
    for (std::size_t p = 0; p < order.size(); ++p) {
      int local = order[p];
      int global = ids[static_cast<std::size_t>(local)];
      layout.infosets[p] = global;
      tree.positions_[static_cast<std::size_t>(global)] = static_cast<int>(p);
      if (parent_local[static_cast<std::size_t>(local)] >= 0) {
        layout.parent[p] =
            pos_of_local[static_cast<std::size_t>(parent_local[static_cast<std::size_t>(local)])];
        layout.parent_action[p] = parent_act[static_cast<std::size_t>(local)];
      }
    }
    layout.children.resize(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
      int global = layout.infosets[p];
      layout.children[p].resize(tree.infosets_[static_cast<std::size_t>(global)].actions.size());
    }
    layout.root_infosets.clear();
    for (std::size_t p = 0; p < order.size(); ++p) {
      if (layout.parent[p] < 0) {
        layout.root_infosets.push_back(static_cast<int>(p));
      } else {
        layout.children[static_cast<std::size_t>(layout.parent[p])]
                       [static_cast<std::size_t>(layout.parent_action[p])]
                           .push_back(static_cast<int>(p));
      }
    }
    // Subtree log-cardinalities, leaves upward.
    layout.subtree_log_actions.assign(order.size(), 0.0);
    for (std::size_t pi = order.size(); pi-- > 0;) {
      int global = layout.infosets[pi];
      double w =
          std::log(static_cast<double>(tree.infosets_[static_cast<std::size_t>(global)].actions.size()));
      for (const auto& per_action : layout.children[pi]) {
        for (int c : per_action) w += layout.subtree_log_actions[static_cast<std::size_t>(c)];
      }
      layout.subtree_log_actions[pi] = w;
    }
    layout.total_log_actions = 0.0;
    for (int r : layout.root_infosets) {
      layout.total_log_actions += layout.subtree_log_actions[static_cast<std::size_t>(r)];
    }
  }

  // Terminal table with per-player sequences in layout positions, then the
  // bucket assignment (a bucket per (infoset, action) pair owning terminals,
  // plus a root bucket per player when needed).
  std::sort(dfs_terminals.begin(), dfs_terminals.end());
  for (int tid : dfs_terminals) {
    Terminal term;
    term.node = tid;
    term.chance_prob = node_chance[static_cast<std::size_t>(tid)];
    term.payoffs = tree.nodes_[static_cast<std::size_t>(tid)].payoffs;
    term.sequences.resize(static_cast<std::size_t>(players));
    term.bucket.assign(static_cast<std::size_t>(players), -1);
    for (int pl = 0; pl < players; ++pl) {
      for (const auto& [global, act] : node_seq[static_cast<std::size_t>(tid)]
                                               [static_cast<std::size_t>(pl)]) {
        term.sequences[static_cast<std::size_t>(pl)]
            .emplace_back(tree.positions_[static_cast<std::size_t>(global)], act);
      }
    }
    tree.terminals_.push_back(std::move(term));
  }
  for (int pl = 0; pl < players; ++pl) {
    PlayerLayout& layout = tree.layouts_[static_cast<std::size_t>(pl)];
    layout.bucket.resize(layout.infosets.size());
    for (std::size_t p = 0; p < layout.infosets.size(); ++p) {
      int global = layout.infosets[p];
      layout.bucket[p].assign(tree.infosets_[static_cast<std::size_t>(global)].actions.size(), -1);
    }
    int next = 0;
    bool needs_root_bucket = false;
    for (const auto& term : tree.terminals_) {
      if (term.sequences[static_cast<std::size_t>(pl)].empty()) needs_root_bucket = true;
    }
    if (needs_root_bucket) layout.root_bucket = next++;
    for (auto& term : tree.terminals_) {
      const auto& seq = term.sequences[static_cast<std::size_t>(pl)];
      if (seq.empty()) {
        term.bucket[static_cast<std::size_t>(pl)] = layout.root_bucket;
        continue;
      }
      auto [pos, act] = seq.back();
      int& b = layout.bucket[static_cast<std::size_t>(pos)][static_cast<std::size_t>(act)];
      if (b < 0) b = next++;
      term.bucket[static_cast<std::size_t>(pl)] = b;
    }
    layout.bucket_count = next;
  }
  return tree;
}

const PlayerLayout& GameTree::layout(int player) const {
  if (player < 0 || player >= players_) throw ParameterError("layout: player out of range");
  return layouts_[static_cast<std::size_t>(player)];
}

// --- Tree I/O -------------------------------------------------------------------

GameTree read_tree(std::istream& is) {
  GameTreeBuilder builder;
  std::vector<std::vector<std::string>> edges;
  std::string line;
  while (std::getline(is, line)) {
    auto f = split_fields(line, " \t");
    if (f.empty() || f[0].starts_with("#")) continue;
    if (f[0] == "node") {
      if (f.size() < 3) throw StructuralError("read_tree: short node line");
      if (f[2] == "decision") {
        if (f.size() != 5) throw StructuralError("read_tree: decision needs player and infoset");
        builder.add_decision(f[1], static_cast<int>(parse_int(f[3], "read_tree player")) - 1, f[4]);
      } else if (f[2] == "chance") {
        std::vector<double> probs;
        for (std::size_t i = 3; i < f.size(); ++i) {
          probs.push_back(parse_double(f[i], "read_tree chance prob"));
        }
        builder.add_chance(f[1], std::move(probs));
      } else if (f[2] == "terminal") {
        std::vector<double> payoffs;
        for (std::size_t i = 3; i < f.size(); ++i) {
          payoffs.push_back(parse_double(f[i], "read_tree payoff"));
        }
        builder.add_terminal(f[1], std::move(payoffs));
      } else {
        throw StructuralError("read_tree: unknown node kind " + f[2]);
      }
    } else if (f[0] == "edge") {
      if (f.size() != 4) throw StructuralError("read_tree: edge needs parent, child, label");
      edges.push_back({f[1], f[2], f[3]});
    } else if (f[0] == "infoset") {
      if (f.size() < 5 || f[3] != "actions") {
        throw StructuralError("read_tree: infoset needs 'infoset <player> <id> actions ...'");
      }
      std::vector<std::string> actions(f.begin() + 4, f.end());
      builder.add_infoset(static_cast<int>(parse_int(f[1], "read_tree infoset player")) - 1, f[2],
                          std::move(actions));
    } else {
      throw StructuralError("read_tree: unknown directive " + f[0]);
    }
  }
  for (const auto& e : edges) builder.add_edge(e[0], e[1], e[2]);
  return builder.build();
}

void write_tree(std::ostream& os, const GameTree& tree) {
  for (int id = 0; id < tree.num_nodes(); ++id) {
    const TreeNode& node = tree.node(id);
    if (node.kind == TreeNode::Kind::decision) {
      os << "node " << node.name << " decision " << (node.player + 1) << ' '
         << tree.infoset(node.infoset).name << '\n';
    } else if (node.kind == TreeNode::Kind::chance) {
      os << "node " << node.name << " chance";
      for (double p : node.chance_probs) os << ' ' << fmt_double(p);
      os << '\n';
    } else {
      os << "node " << node.name << " terminal";
      for (double u : node.payoffs) os << ' ' << fmt_double(u);
      os << '\n';
    }
  }
  for (int i = 0; i < tree.num_infosets(); ++i) {
    const Infoset& is = tree.infoset(i);
    os << "infoset " << (is.player + 1) << ' ' << is.name << " actions";
    for (const auto& a : is.actions) os << ' ' << a;
    os << '\n';
  }
  for (int id = 0; id < tree.num_nodes(); ++id) {
    const TreeNode& node = tree.node(id);
    for (std::size_t c = 0; c < node.children.size(); ++c) {
      os << "edge " << node.name << ' ' << tree.node(node.children[c]).name << ' '
         << node.edge_labels[c] << '\n';
    }
  }
}

// --- Strategies and utilities ----------------------------------------------------

namespace {
void check_profile(const GameTree& tree, std::span<const PureStrategy> profile) {
  if (static_cast<int>(profile.size()) != tree.players()) {
    throw StructuralError("profile: need one strategy per player");
  }
  for (int pl = 0; pl < tree.players(); ++pl) {
    const auto& s = profile[static_cast<std::size_t>(pl)];
    const auto& layout = tree.layout(pl);
    if (s.player != pl || s.actions.size() != layout.infosets.size()) {
      throw StructuralError("profile: incomplete strategy for player " + std::to_string(pl + 1));
    }
    for (std::size_t p = 0; p < s.actions.size(); ++p) {
      int n = static_cast<int>(
          tree.infoset(layout.infosets[p]).actions.size());
      if (s.actions[p] < 0 || s.actions[p] >= n) {
        throw StructuralError("profile: action out of range");
      }
    }
  }
}
}  // namespace

std::vector<double> eval_utility(const GameTree& tree, std::span<const PureStrategy> profile) {
  check_profile(tree, profile);
  std::vector<double> out(static_cast<std::size_t>(tree.players()), 0.0);
  struct Item {
    int node;
    double weight;
  };
  std::vector<Item> stack{{tree.root(), 1.0}};
  while (!stack.empty()) {
    auto [id, w] = stack.back();
    stack.pop_back();
    const TreeNode& node = tree.node(id);
    switch (node.kind) {
      case TreeNode::Kind::terminal:
        for (int pl = 0; pl < tree.players(); ++pl) {
          out[static_cast<std::size_t>(pl)] += w * node.payoffs[static_cast<std::size_t>(pl)];
        }
        break;
      case TreeNode::Kind::chance:
        for (std::size_t c = 0; c < node.children.size(); ++c) {
          if (node.chance_probs[c] > 0.0) {
            stack.push_back({node.children[c], w * node.chance_probs[c]});
          }
        }
        break;
      case TreeNode::Kind::decision: {
        int pos = tree.infoset_position(node.infoset);
        int act = profile[static_cast<std::size_t>(node.player)]
                      .actions[static_cast<std::size_t>(pos)];
        stack.push_back({node.children[static_cast<std::size_t>(act)], w});
        break;
      }
    }
  }
  return out;
}

std::int64_t strategy_count(const GameTree& tree, int player, std::int64_t cap) {
  const auto& layout = tree.layout(player);
  std::int64_t count = 1;
  for (int global : layout.infosets) {
    auto n = static_cast<std::int64_t>(tree.infoset(global).actions.size());
    if (count > cap / n) {
      throw CapacityError("strategy_count: player " + std::to_string(player + 1) +
                          " exceeds cap " + std::to_string(cap));
    }
    count *= n;
  }
  return count;
}

std::vector<PureStrategy> enumerate_pure_strategies(const GameTree& tree, int player,
                                                    std::int64_t cap) {
  std::int64_t count = strategy_count(tree, player, cap);
  const auto& layout = tree.layout(player);
  std::vector<int> sizes;
  sizes.reserve(layout.infosets.size());
  for (int global : layout.infosets) {
    sizes.push_back(static_cast<int>(tree.infoset(global).actions.size()));
  }
  std::vector<PureStrategy> out;
  out.reserve(static_cast<std::size_t>(count));
  PureStrategy s;
  s.player = player;
  s.actions.assign(sizes.size(), 0);
  while (true) {
    out.push_back(s);
    std::size_t pos = 0;
    while (pos < sizes.size()) {
      if (++s.actions[pos] < sizes[pos]) break;
      s.actions[pos] = 0;
      ++pos;
    }
    if (pos == sizes.size()) break;
  }
  return out;
}

// --- Partition tables --------------------------------------------------------------

std::vector<double> day_bucket_utilities(const GameTree& tree, int player,
                                         std::span<const PureStrategy> profile) {
  check_profile(tree, profile);
  const auto& layout = tree.layout(player);
  std::vector<double> out(static_cast<std::size_t>(layout.bucket_count), 0.0);
  for (const auto& term : tree.terminals()) {
    bool consistent = true;
    for (int pl = 0; pl < tree.players() && consistent; ++pl) {
      if (pl == player) continue;
      for (const auto& [pos, act] : term.sequences[static_cast<std::size_t>(pl)]) {
        if (profile[static_cast<std::size_t>(pl)].actions[static_cast<std::size_t>(pos)] != act) {
          consistent = false;
          break;
        }
      }
    }
    if (!consistent) continue;
    out[static_cast<std::size_t>(term.bucket[static_cast<std::size_t>(player)])] +=
        term.chance_prob * term.payoffs[static_cast<std::size_t>(player)];
  }
  return out;
}

PartitionTables build_partition_from_bucket_sums(const GameTree& tree, int player,
                                                 std::span<const double> bucket_sums, double eta) {
  if (eta < 0.0 || !std::isfinite(eta)) throw ParameterError("build_partition: bad eta");
  const auto& layout = tree.layout(player);
  if (static_cast<int>(bucket_sums.size()) != layout.bucket_count) {
    throw StructuralError("build_partition: bucket sum arity mismatch");
  }
  PartitionTables tables;
  tables.tree_ = &tree;
  tables.player_ = player;
  tables.eta_ = eta;
  tables.lambda_.resize(bucket_sums.size());
  for (std::size_t b = 0; b < bucket_sums.size(); ++b) {
    tables.lambda_[b] = eta * bucket_sums[b];
  }
  auto count = layout.infosets.size();
  tables.log_v_.assign(count, 0.0);
  tables.log_u_.resize(count);
  for (std::size_t pi = count; pi-- > 0;) {
    int actions = static_cast<int>(tree.infoset(layout.infosets[pi]).actions.size());
    double total_w = 0.0;  // subtree log-cardinality of all child infosets
    for (const auto& per_action : layout.children[pi]) {
      for (int c : per_action) total_w += layout.subtree_log_actions[static_cast<std::size_t>(c)];
    }
    auto& row = tables.log_u_[pi];
    row.assign(static_cast<std::size_t>(actions), 0.0);
    for (int a = 0; a < actions; ++a) {
      double own_w = 0.0;
      double sum = 0.0;
      for (int c : layout.children[pi][static_cast<std::size_t>(a)]) {
        sum += tables.log_v_[static_cast<std::size_t>(c)];
        own_w += layout.subtree_log_actions[static_cast<std::size_t>(c)];
      }
      int b = layout.bucket[pi][static_cast<std::size_t>(a)];
      if (b >= 0) sum += tables.lambda_[static_cast<std::size_t>(b)];
      // Unreached sibling subtrees contribute their strategy cardinality.
      row[static_cast<std::size_t>(a)] = sum + (total_w - own_w);
    }
    tables.log_v_[pi] = log_sum_exp(row);
  }
  double z = 0.0;
  for (int r : layout.root_infosets) z += tables.log_v_[static_cast<std::size_t>(r)];
  if (layout.root_bucket >= 0) z += tables.lambda_[static_cast<std::size_t>(layout.root_bucket)];
  tables.log_z_ = z;
  return tables;
}

PartitionTables build_partition(const GameTree& tree, int player,
                                std::span<const StrategyProfile> opponent_profiles, double eta) {
  const auto& layout = tree.layout(player);
  std::vector<KahanSum> sums(static_cast<std::size_t>(layout.bucket_count));
  for (const auto& profile : opponent_profiles) {
    std::vector<double> day = day_bucket_utilities(tree, player, profile);
    for (std::size_t b = 0; b < day.size(); ++b) sums[b].add(day[b]);
  }
  std::vector<double> flat;
  flat.reserve(sums.size());
  for (const auto& k : sums) flat.push_back(k.value());
  return build_partition_from_bucket_sums(tree, player, flat, eta);
}

namespace {

// Shared reachability walk for sampling and prefix probabilities. visit is
// called per position with the action probabilities implied by the rule.
template <typename Pick>
void walk_sampling_rule(const PartitionTables& tables, Pick&& pick) {
  const GameTree& tree = tables.tree();
  const auto& layout = tree.layout(tables.player());
  std::vector<int> chosen(layout.infosets.size(), -1);
  std::vector<bool> reachable(layout.infosets.size(), false);
  for (std::size_t p = 0; p < layout.infosets.size(); ++p) {
    bool reach;
    if (layout.parent[p] < 0) {
      reach = true;
    } else {
      auto par = static_cast<std::size_t>(layout.parent[p]);
      reach = reachable[par] && chosen[par] == layout.parent_action[p];
    }
    reachable[p] = reach;
    int act = pick(static_cast<int>(p), reach);
    if (act < 0) return;  // prefix exhausted
    chosen[p] = act;
  }
}

}  // namespace

PureStrategy sample_strategy(const PartitionTables& tables, Rng& rng) {
  const GameTree& tree = tables.tree();
  const auto& layout = tree.layout(tables.player());
  PureStrategy s;
  s.player = tables.player();
  s.actions.assign(layout.infosets.size(), 0);
  walk_sampling_rule(tables, [&](int pos, bool reachable) {
    int actions = static_cast<int>(tree.infoset(layout.infosets[static_cast<std::size_t>(pos)])
                                       .actions.size());
    int act;
    if (reachable) {
      std::vector<double> w(static_cast<std::size_t>(actions));
      for (int a = 0; a < actions; ++a) {
        w[static_cast<std::size_t>(a)] = std::exp(tables.log_u(pos, a) - tables.log_v(pos));
      }
      act = sample_categorical(rng, w);
    } else {
      act = next_index(rng, actions);
    }
    s.actions[static_cast<std::size_t>(pos)] = act;
    return act;
  });
  return s;
}

double sampler_prefix_log_prob(const PartitionTables& tables, std::span<const int> prefix) {
  const GameTree& tree = tables.tree();
  const auto& layout = tree.layout(tables.player());
  if (prefix.size() > layout.infosets.size()) {
    throw StructuralError("sampler_prefix_log_prob: prefix longer than layout");
  }
  double logp = 0.0;
  walk_sampling_rule(tables, [&](int pos, bool reachable) -> int {
    if (static_cast<std::size_t>(pos) >= prefix.size()) return -1;
    int actions = static_cast<int>(tree.infoset(layout.infosets[static_cast<std::size_t>(pos)])
                                       .actions.size());
    int act = prefix[static_cast<std::size_t>(pos)];
    if (act < 0 || act >= actions) throw StructuralError("sampler_prefix_log_prob: bad action");
    if (reachable) {
      logp += tables.log_u(pos, act) - tables.log_v(pos);
    } else {
      logp -= std::log(static_cast<double>(actions));
    }
    return act;
  });
  return logp;
}

// --- EFG multi-scale learner ---------------------------------------------------------

EfgMultiScaleLearner::EfgMultiScaleLearner(const GameTree& tree, int player,
                                           const Schedule& schedule, Rng rng)
    : tree_(&tree), player_(player), schedule_(schedule), rng_(rng) {
  if (schedule.scales < 0 || schedule.block < 2) {
    throw ParameterError("EfgMultiScaleLearner: bad schedule");
  }
  if (schedule.horizon != checked_pow(schedule.block, std::uint64_t{1} << schedule.scales)) {
    throw ParameterError("EfgMultiScaleLearner: horizon must equal block^(2^scales)");
  }
  const auto& layout = tree.layout(player);
  int count = 1 << schedule.scales;
  threads_.reserve(static_cast<std::size_t>(count));
  std::uint64_t meta = 1;
  double log_n = layout.total_log_actions;
  for (int k = 0; k < count; ++k) {
    Thread th;
    th.meta_len = meta;
    th.restart_len = meta * schedule.block;
    th.eta = std::sqrt(log_n / static_cast<double>(schedule.block)) /
             static_cast<double>(meta);
    auto buckets = static_cast<std::size_t>(layout.bucket_count);
    th.sums.assign(buckets, 0.0);
    th.sums_carry.assign(buckets, 0.0);
    th.buffer.assign(buckets, 0.0);
    th.buffer_carry.assign(buckets, 0.0);
    meta = th.restart_len;
    threads_.push_back(std::move(th));
  }
}

PureStrategy EfgMultiScaleLearner::act() {
  if (t_ >= schedule_.horizon) throw LifecycleError("EfgMultiScaleLearner::act: horizon exhausted");
  auto& th = threads_[static_cast<std::size_t>(next_index(rng_, static_cast<int>(threads_.size())))];
  if (th.dirty || !th.tables) {
    th.tables = build_partition_from_bucket_sums(*tree_, player_, th.sums, th.eta);
    th.dirty = false;
  }
  return sample_strategy(*th.tables, rng_);
}

void EfgMultiScaleLearner::update(std::span<const PureStrategy> profile) {
  if (t_ >= schedule_.horizon) {
    throw LifecycleError("EfgMultiScaleLearner::update: horizon exhausted");
  }
  std::vector<double> day = day_bucket_utilities(*tree_, player_, profile);
  for (auto& th : threads_) {
    for (std::size_t b = 0; b < day.size(); ++b) {
      double y = day[b] - th.buffer_carry[b];
      double t = th.buffer[b] + y;
      th.buffer_carry[b] = (t - th.buffer[b]) - y;
      th.buffer[b] = t;
    }
  }
  ++t_;
  for (auto& th : threads_) {
    if (t_ % th.meta_len == 0) {
      for (std::size_t b = 0; b < th.sums.size(); ++b) {
        double y = th.buffer[b] - th.sums_carry[b];
        double t = th.sums[b] + y;
        th.sums_carry[b] = (t - th.sums[b]) - y;
        th.sums[b] = t;
        th.buffer[b] = 0.0;
        th.buffer_carry[b] = 0.0;
      }
      th.dirty = true;
    }
    if (t_ % th.restart_len == 0 && t_ < schedule_.horizon) {
      std::fill(th.sums.begin(), th.sums.end(), 0.0);
      std::fill(th.sums_carry.begin(), th.sums_carry.end(), 0.0);
      std::fill(th.buffer.begin(), th.buffer.end(), 0.0);
      std::fill(th.buffer_carry.begin(), th.buffer_carry.end(), 0.0);
      th.dirty = true;
    }
  }
}

// --- NFCE verification and dynamics ---------------------------------------------------

NfceCertificate verify_nfce(const GameTree& tree, const StrategyProfileDist& dist,
                            std::int64_t max_strategies) {
  if (dist.atoms.empty()) throw StructuralError("verify_nfce: empty distribution");
  int m = tree.players();

  // Collapse repeated profiles; sampled dynamics revisit few distinct atoms.
  std::map<std::vector<std::vector<int>>, double> collapsed;
  KahanSum total;
  for (const auto& atom : dist.atoms) {
    check_profile(tree, atom.profile);
    if (!(atom.weight >= 0.0)) throw StructuralError("verify_nfce: negative weight");
    total.add(atom.weight);
    std::vector<std::vector<int>> key;
    key.reserve(atom.profile.size());
    for (const auto& s : atom.profile) key.push_back(s.actions);
    collapsed[key] += atom.weight;
  }
  if (std::abs(total.value() - 1.0) > 1e-9) {
    throw StructuralError("verify_nfce: weights sum to " + std::to_string(total.value()));
  }

  NfceCertificate cert;
  cert.per_player_gain.resize(static_cast<std::size_t>(m), 0.0);
  for (int pl = 0; pl < m; ++pl) {
    auto strategies = enumerate_pure_strategies(tree, pl, max_strategies);
    auto count = strategies.size();
    std::map<std::vector<int>, int> index_of;
    for (std::size_t s = 0; s < count; ++s) index_of[strategies[s].actions] = static_cast<int>(s);

    std::vector<std::vector<double>> rows(count, std::vector<double>(count, 0.0));
    StrategyProfile profile(static_cast<std::size_t>(m));
    for (const auto& [key, w] : collapsed) {
      for (int j = 0; j < m; ++j) {
        profile[static_cast<std::size_t>(j)].player = j;
        profile[static_cast<std::size_t>(j)].actions = key[static_cast<std::size_t>(j)];
      }
      int recommended = index_of.at(key[static_cast<std::size_t>(pl)]);
      for (std::size_t s = 0; s < count; ++s) {
        profile[static_cast<std::size_t>(pl)] = strategies[s];
        double u = eval_utility(tree, profile)[static_cast<std::size_t>(pl)];
        rows[static_cast<std::size_t>(recommended)][s] += w * u;
      }
    }
    double gain = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
      double base = rows[s][s];
      double best = base;
      for (std::size_t sp = 0; sp < count; ++sp) best = std::max(best, rows[s][sp]);
      gain += best - base;
    }
    cert.per_player_gain[static_cast<std::size_t>(pl)] = gain;
    cert.epsilon_achieved = std::max(cert.epsilon_achieved, gain);
  }
  return cert;
}

NfceResult run_nfce_dynamics(const GameTree& tree, double epsilon, const NfceOptions& options,
                             Rng& rng) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw ParameterError("run_nfce_dynamics: epsilon must be in (0, 1]");
  }
  int m = tree.players();
  double log_n = 0.0;
  for (int pl = 0; pl < m; ++pl) log_n = std::max(log_n, tree.layout(pl).total_log_actions);
  double regret_budget = epsilon / 2.0;
  Schedule schedule = options.max_days
                          ? schedule_within_budget(regret_budget, log_n, *options.max_days)
                          : schedule_from_epsilon(regret_budget, log_n);

  NfceResult result;
  result.schedule = schedule;
  std::vector<EfgMultiScaleLearner> learners;
  learners.reserve(static_cast<std::size_t>(m));
  for (int pl = 0; pl < m; ++pl) {
    learners.emplace_back(tree, pl, schedule,
                          make_rng(rng(), "nfce-player-" + std::to_string(pl)));
  }
  auto T = static_cast<std::int64_t>(schedule.horizon);
  double w = 1.0 / static_cast<double>(T);
  result.output.atoms.reserve(static_cast<std::size_t>(T));
  for (std::int64_t t = 0; t < T; ++t) {
    StrategyProfile profile;
    profile.reserve(static_cast<std::size_t>(m));
    for (auto& l : learners) profile.push_back(l.act());
    for (auto& l : learners) l.update(profile);
    result.output.atoms.push_back({w, std::move(profile)});
  }
  if (options.compute_certificate) {
    result.certificate = verify_nfce(tree, result.output, options.verify_cap);
  }
  return result;
}

// --- Random trees ------------------------------------------------------------------

namespace {

struct TreeGen {
  const RandomTreeConfig& config;
  Rng& rng;
  GameTreeBuilder builder;
  std::vector<std::int64_t> strategy_products;
  int next_node = 0;
  int next_infoset = 0;

  std::string fresh_node() { return "n" + std::to_string(next_node++); }

  std::string make_terminal() {
    std::vector<double> payoffs(static_cast<std::size_t>(config.players));
    for (double& u : payoffs) u = next_double(rng);
    std::string name = fresh_node();
    builder.add_terminal(name, std::move(payoffs));
    return name;
  }

  std::string gen(int depth) {
    bool can_branch = depth < config.max_depth;
    if (!can_branch || (depth > 0 && next_bernoulli(rng, config.terminal_prob))) {
      return make_terminal();
    }
    if (next_bernoulli(rng, config.chance_prob)) {
      int kids = 2 + next_index(rng, 2);
      std::vector<double> probs(static_cast<std::size_t>(kids));
      double sum = 0.0;
      for (double& p : probs) {
        p = 0.05 + next_double(rng);
        sum += p;
      }
      for (double& p : probs) p /= sum;
      std::string name = fresh_node();
      builder.add_chance(name, probs);
      for (int k = 0; k < kids; ++k) {
        builder.add_edge(name, gen(depth + 1), "o" + std::to_string(next_infoset) + "_" +
                                                   std::to_string(k));
      }
      ++next_infoset;
      return name;
    }
    int player = next_index(rng, config.players);
    int actions = 2 + (config.max_actions > 2 ? next_index(rng, config.max_actions - 1) : 0);
    auto& product = strategy_products[static_cast<std::size_t>(player)];
    if (product > config.max_strategies / actions) {
      return make_terminal();  // adding this infoset would blow the strategy cap
    }
    product *= actions;
    std::string iname = "h" + std::to_string(next_infoset++);
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(actions));
    for (int a = 0; a < actions; ++a) labels.push_back(iname + "a" + std::to_string(a));
    builder.add_infoset(player, iname, labels);
    std::string name = fresh_node();
    builder.add_decision(name, player, iname);
    for (int a = 0; a < actions; ++a) {
      builder.add_edge(name, gen(depth + 1), labels[static_cast<std::size_t>(a)]);
    }
    return name;
  }
};

}  // namespace

GameTree random_tree(const RandomTreeConfig& config, Rng& rng) {
  if (config.players < 1 || config.max_depth < 1 || config.max_actions < 2) {
    throw ParameterError("random_tree: bad config");
  }
  TreeGen gen{config, rng, {}, std::vector<std::int64_t>(static_cast<std::size_t>(config.players), 1)};
  gen.gen(0);
  return gen.builder.build();
}

GameTree blind_two_by_two_tree(int chance_outcomes, Rng& rng) {
  if (chance_outcomes < 1) throw ParameterError("blind_two_by_two_tree: need >= 1 outcome");
  GameTreeBuilder b;
  b.add_infoset(0, "A", {"a0", "a1"});
  b.add_infoset(0, "B", {"b0", "b1"});
  b.add_infoset(1, "C", {"c0", "c1"});
  b.add_infoset(1, "D", {"d0", "d1"});
  std::vector<double> probs(static_cast<std::size_t>(chance_outcomes));
  double sum = 0.0;
  for (double& p : probs) {
    p = 0.2 + next_double(rng);
    sum += p;
  }
  for (double& p : probs) p /= sum;
  b.add_chance("root", probs);
  int id = 0;
  auto fresh = [&](const std::string& prefix) { return prefix + std::to_string(id++); };
  auto terminal = [&]() {
    std::string name = fresh("z");
    b.add_terminal(name, {next_double(rng), next_double(rng)});
    return name;
  };
  // After the second infoset of a branch, optionally descend through the
  // other player's second infoset before the payoff.
  auto maybe_d = [&](bool through_d) {
    if (!through_d) return terminal();
    std::string d = fresh("nd");
    b.add_decision(d, 1, "D");
    b.add_edge(d, terminal(), "d0");
    b.add_edge(d, terminal(), "d1");
    return d;
  };
  for (int o = 0; o < chance_outcomes; ++o) {
    std::string a = fresh("na");
    b.add_decision(a, 0, "A");
    b.add_edge("root", a, "deal" + std::to_string(o));
    for (int ai = 0; ai < 2; ++ai) {
      std::string c = fresh("nc");
      b.add_decision(c, 1, "C");
      b.add_edge(a, c, ai == 0 ? "a0" : "a1");
      for (int ci = 0; ci < 2; ++ci) {
        std::string next;
        if (ai == 0) {
          // B is only reached behind a0.
          std::string bb = fresh("nb");
          b.add_decision(bb, 0, "B");
          b.add_edge(bb, maybe_d(ci == 0), "b0");
          b.add_edge(bb, maybe_d(ci == 0), "b1");
          next = bb;
        } else {
          next = maybe_d(ci == 0);
        }
        b.add_edge(c, next, ci == 0 ? "c0" : "c1");
      }
    }
  }
  return b.build();
}

}  // namespace swapregret::efg
