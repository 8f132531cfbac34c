#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tbrkit/network.hpp"
#include "tbrkit/reduce.hpp"
#include "tbrkit/tree.hpp"

namespace tbrkit {

// Rooted binary phylogenetic tree: root has out-degree 2, leaves are labeled
// sinks, every other vertex has one parent and two children.
class RootedTree {
 public:
  static RootedTree from_edges(int n_vertices, const std::vector<std::pair<int, int>>& edges,
                               const std::map<int, Taxon>& labels);

  int vertex_count() const { return static_cast<int>(children_.size()); }
  int root() const { return root_; }
  int parent(int v) const { return parent_[v]; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  bool is_leaf(int v) const { return children_[v].empty(); }
  const Taxon& label(int v) const { return label_[v]; }
  bool has_taxon(const Taxon& t) const { return by_label_.count(t) != 0; }
  int leaf_vertex(const Taxon& t) const;
  std::vector<Taxon> taxa() const;
  int leaf_count() const { return static_cast<int>(by_label_.size()); }

  // Descendant taxa per vertex; the root's set is the whole taxon set.
  std::vector<Taxon> cluster_of(int v) const;
  std::set<std::vector<Taxon>> cluster_set() const;

 private:
  int root_ = -1;
  std::vector<std::vector<int>> children_;
  std::vector<int> parent_;
  std::vector<Taxon> label_;
  std::map<Taxon, int> by_label_;
};

RootedTree parse_rooted_newick(const std::string& text);
std::string serialize_rooted_newick(const RootedTree& t);
bool rooted_trees_equal(const RootedTree& a, const RootedTree& b);

// Rooted binary phylogenetic network: root in-0/out-2, labeled leaves
// in-1/out-0, tree vertices in-1/out-2, reticulations in-2/out-1; acyclic,
// no parallel edges. r = number of reticulations.
class RootedNetwork {
 public:
  static RootedNetwork from_edges(int n_vertices,
                                  const std::vector<std::pair<int, int>>& edges,
                                  const std::map<int, Taxon>& labels);

  int vertex_count() const { return static_cast<int>(children_.size()); }
  int root() const { return root_; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  const std::vector<int>& parents(int v) const { return parents_[v]; }
  bool is_leaf(int v) const { return children_[v].empty(); }
  bool is_reticulation(int v) const { return parents_[v].size() == 2; }
  const Taxon& label(int v) const { return label_[v]; }
  std::vector<Taxon> taxa() const;
  int reticulation_count() const;
  std::vector<std::pair<int, int>> edges() const;  // (parent, child), sorted

 private:
  int root_ = -1;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> parents_;
  std::vector<Taxon> label_;
  std::map<Taxon, int> by_label_;
};

std::string serialize_rnet(const RootedNetwork& net);
RootedNetwork parse_rnet(const std::string& text);

// Reducedness of a rooted pair. Subtree rule: no common rooted cherry (hence
// no common pendant subtree with >= 2 leaves). Chain rule: no common rooted
// chain of length >= 3. Cluster rule: no common nontrivial cluster.
bool rooted_is_reduced(const RootedTree& t1, const RootedTree& t2, const RuleSet& rules);

// Is the sequence a rooted chain: first two leaves share a parent or the
// first parent is a child of the second; after that each parent is a child
// of the next one up.
bool is_rooted_chain(const RootedTree& t, const std::vector<Taxon>& seq);

struct RootedDisplayResult {
  bool displayed = false;
  std::vector<std::pair<int, int>> removed_edges;  // one in-edge per reticulation
};

// Exhaustive over the 2^r reticulation switchings.
RootedDisplayResult rooted_displays(const RootedNetwork& net, const RootedTree& tree);

// The rooted tree obtained by deleting the given edges, restricting to the
// part reachable from the root, pruning unlabeled sinks and suppressing
// unary vertices. Throws when taxa are lost or the result is not binary.
RootedTree switched_tree(const RootedNetwork& net,
                         const std::vector<std::pair<int, int>>& removed);

UnrootedTree unroot(const RootedTree& t);
UnrootedNetwork unroot_network(const RootedNetwork& net);

struct RootedBoundReport {
  bool ok = false;
  int bound = 0;
  int leaves = 0;
  int slack = 0;
};

// |X| <= 9k-2 for subtree+chain reduced pairs, 9k-4 with the cluster rule as
// well; the reducedness precondition is checked.
RootedBoundReport check_rooted_bound(const RootedTree& t1, const RootedTree& t2, int k,
                                     bool cluster_reduced);

}  // namespace tbrkit
