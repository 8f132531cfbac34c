#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tbrkit/bits.hpp"
#include "tbrkit/graph.hpp"

namespace tbrkit {

using Taxon = std::string;

// Leaf-labeled unrooted binary phylogenetic tree. Immutable once built;
// vertices are 0..V-1, every vertex has degree 1 (labeled leaf) or degree 3
// (unlabeled). The two-leaf tree is the single edge.
class UnrootedTree {
 public:
  // Validates shape and label uniqueness; compacts vertex ids.
  static UnrootedTree from_graph(const MutableGraph& g);

  int vertex_count() const { return static_cast<int>(adj_.size()); }
  int leaf_count() const { return static_cast<int>(leaves_.size()); }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  bool is_leaf(int v) const { return adj_[v].size() == 1; }
  const Taxon& label(int v) const { return label_[v]; }
  bool has_taxon(const Taxon& t) const { return by_label_.count(t) != 0; }
  int leaf_vertex(const Taxon& t) const;        // throws if absent
  const std::vector<int>& leaves() const { return leaves_; }
  std::vector<Taxon> taxa() const;              // sorted
  std::vector<Edge> edges() const;              // sorted
  bool has_edge(int u, int v) const;

  MutableGraph to_graph() const;

 private:
  std::vector<std::vector<int>> adj_;
  std::vector<Taxon> label_;
  std::map<Taxon, int> by_label_;
  std::vector<int> leaves_;
};

// Canonical split of the taxon set: side_a is the lexicographically smaller
// of the two sorted sides.
struct Bipartition {
  std::vector<Taxon> side_a;
  std::vector<Taxon> side_b;

  static Bipartition from_sides(std::vector<Taxon> x, std::vector<Taxon> y);
  bool operator==(const Bipartition& o) const {
    return side_a == o.side_a && side_b == o.side_b;
  }
  bool operator<(const Bipartition& o) const {
    return side_a != o.side_a ? side_a < o.side_a : side_b < o.side_b;
  }
};

// Maximal leaf sequence common to a tree pair; oriented as found in t1 and
// then canonicalized so the first label is <= the last. Pendant flags record
// whether the end leaves share a neighbor in each tree.
struct CommonChain {
  std::vector<Taxon> leaves;
  bool pendant_head_t1 = false;
  bool pendant_tail_t1 = false;
  bool pendant_head_t2 = false;
  bool pendant_tail_t2 = false;
};

// Shared taxon indexing for a tree pair (or a single tree). Index order is
// the sorted label order.
class TaxonIndex {
 public:
  explicit TaxonIndex(std::vector<Taxon> sorted_taxa);
  static TaxonIndex for_pair(const UnrootedTree& t1, const UnrootedTree& t2);
  static TaxonIndex for_tree(const UnrootedTree& t);

  int size() const { return static_cast<int>(taxa_.size()); }
  int index_of(const Taxon& t) const;
  const Taxon& taxon(int i) const { return taxa_[i]; }
  const std::vector<Taxon>& all() const { return taxa_; }

  Bits bits_of(const std::vector<Taxon>& set) const;
  std::vector<Taxon> taxa_of(const Bits& b) const;

 private:
  std::vector<Taxon> taxa_;
  std::map<Taxon, int> pos_;
};

// Per-edge leaf splits of one tree under a taxon indexing. split(e) is the
// side of the leaf set not containing the reference vertex (vertex 0).
class SplitTable {
 public:
  SplitTable(const UnrootedTree& t, const TaxonIndex& ix);
  const std::vector<Edge>& edges() const { return edges_; }
  const Bits& split(int edge_idx) const { return side_[edge_idx]; }
  int edge_index(const Edge& e) const;  // -1 if absent
  // Canonical form: the side containing taxon index 0.
  Bits canonical(int edge_idx) const;
  std::vector<Bits> canonical_set() const;  // sorted

 private:
  int universe_;
  std::vector<Edge> edges_;
  std::vector<Bits> side_;
};

std::vector<Bipartition> bipartitions(const UnrootedTree& t);
bool trees_equal(const UnrootedTree& t1, const UnrootedTree& t2);

// Restriction of t to the taxon subset (|subset| >= 2): delete other leaves,
// trim, suppress degree-2 vertices.
UnrootedTree restrict_to(const UnrootedTree& t, const std::vector<Taxon>& subset);

// Rebuilds the unique tree realizing a full compatible split set (as produced
// by bipartitions()). Throws on inconsistent input.
UnrootedTree tree_from_bipartitions(const std::vector<Taxon>& taxa,
                                    const std::vector<Bipartition>& splits);

// Chain predicate: the leaf neighbors p_1..p_n must form a path where the
// interior is simple; p_1 == p_2 and p_{n-1} == p_n are the allowed
// degeneracies. Works on trees and networks alike via the adjacency view.
struct LeafWalkView {
  const std::vector<std::vector<int>>* adj;
  const std::map<Taxon, int>* by_label;
};
bool is_chain(const LeafWalkView& g, const std::vector<Taxon>& seq);
bool is_chain(const UnrootedTree& t, const std::vector<Taxon>& seq);

std::vector<std::vector<Taxon>> maximal_common_pendant_subtrees(
    const UnrootedTree& t1, const UnrootedTree& t2);
std::vector<CommonChain> maximal_common_chains(const UnrootedTree& t1,
                                               const UnrootedTree& t2,
                                               int min_len);
std::vector<std::vector<Taxon>> common_nontrivial_clusters(
    const UnrootedTree& t1, const UnrootedTree& t2);

// Throws InvalidArgument unless both trees carry exactly the same taxa.
void require_same_taxa(const UnrootedTree& t1, const UnrootedTree& t2);

}  // namespace tbrkit
