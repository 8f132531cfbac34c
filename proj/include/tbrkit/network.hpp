#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tbrkit/tree.hpp"

namespace tbrkit {

// Unrooted binary phylogenetic network: simple connected graph, labeled
// degree-1 leaves, unlabeled degree-3 internal vertices. Reticulation number
// r = |E| - (|V| - 1); a tree is the r = 0 case.
class UnrootedNetwork {
 public:
  static UnrootedNetwork from_graph(const MutableGraph& g);
  static UnrootedNetwork from_tree(const UnrootedTree& t);
  UnrootedTree to_tree() const;  // requires r == 0

  int vertex_count() const { return static_cast<int>(adj_.size()); }
  int leaf_count() const { return static_cast<int>(leaves_.size()); }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  bool is_leaf(int v) const { return adj_[v].size() == 1; }
  const Taxon& label(int v) const { return label_[v]; }
  bool has_taxon(const Taxon& t) const { return by_label_.count(t) != 0; }
  int leaf_vertex(const Taxon& t) const;
  const std::vector<int>& leaves() const { return leaves_; }
  std::vector<Taxon> taxa() const;
  std::vector<Edge> edges() const;
  bool has_edge(int u, int v) const;
  MutableGraph to_graph() const;

 private:
  std::vector<std::vector<int>> adj_;
  std::vector<Taxon> label_;
  std::map<Taxon, int> by_label_;
  std::vector<int> leaves_;
};

int reticulation_number(const UnrootedNetwork& net);
bool is_chain(const UnrootedNetwork& net, const std::vector<Taxon>& seq);

// Connected cubic multigraph with identified sides (edges); loops and
// parallel edges allowed. The unique 1-generator is one vertex with a loop.
struct Generator {
  struct Side {
    int id = -1;
    int a = -1, b = -1;  // endpoint vertices, stored orientation a then b; a == b for loops
  };
  int vertex_count = 0;
  std::vector<Side> sides;

  int edge_count() const { return static_cast<int>(sides.size()); }
  int cyclomatic() const { return edge_count() - (vertex_count - 1); }
  bool is_loop(int side_id) const { return sides[side_id].a == sides[side_id].b; }
};

// Sides must equal 3(k-1) for k >= 2; checked.
int count_sides(const Generator& g);

// All k-generators up to isomorphism, deterministic order. k is capped by
// max_k (vertex-permutation canonicalization needs small k).
std::vector<Generator> enumerate_generators(int k, int max_k = 4);

// Ordered taxa per side id. Sequences follow the side's stored orientation.
struct Attachment {
  std::map<int, std::vector<Taxon>> per_side;
};

// Subdivides each side by its attached leaves. The result must be a simple
// binary network, so loops need two leaves, at most one side per parallel
// class may stay empty, the 1-generator needs three leaves, and at least two
// leaves overall.
UnrootedNetwork attach(const Generator& gen, const Attachment& att);

// Underlying generator: delete leaves, suppress degree-2 vertices. Requires
// r >= 1 and no pendant subtree with two or more leaves.
Generator extract_generator(const UnrootedNetwork& net);

// Generator plus its realization inside a network: each side's path of
// network vertices (endpoint to endpoint) and the leaves hanging along it.
struct NetworkSkeleton {
  Generator generator;
  std::vector<int> gen_vertex;               // generator vertex -> network vertex
  struct SidePath {
    int side_id = -1;
    std::vector<int> path;                   // network vertices, ends are generator vertices
    std::vector<Taxon> chain;                // leaves on the interior, in path order
  };
  std::vector<SidePath> paths;               // indexed by side id
};
NetworkSkeleton network_skeleton(const UnrootedNetwork& net);

// The attachment that rebuilds the network from its generator.
Attachment induced_attachment(const NetworkSkeleton& sk);

// Subdivision of a displayed tree plus a spanning-tree extension of it.
struct Embedding {
  std::vector<Edge> subdivision;
  std::vector<Edge> spanning;
};

struct DisplayResult {
  bool displayed = false;
  Embedding witness;  // meaningful when displayed
};

struct DisplayBudget {
  std::uint64_t max_candidates = 50'000'000;
};

// Does some subdivision of the tree live inside the network? Exact search
// over the spanning trees reachable by deleting one edge per co-tree side,
// pruned by chain consistency against the target tree. Taxa of the tree may
// be a subset of the network's; the rest are ignored.
DisplayResult displays(const UnrootedNetwork& net, const UnrootedTree& tree,
                       const DisplayBudget& budget = {});

// Witness embedding, or throws InvalidArgument when not displayed.
Embedding embed(const UnrootedNetwork& net, const UnrootedTree& tree,
                const DisplayBudget& budget = {});

// Checks an embedding independently of how it was produced.
bool validate_embedding(const UnrootedNetwork& net, const UnrootedTree& tree,
                        const Embedding& emb);

// Builds the embedding whose spanning tree is the network minus the given
// edges; throws if that is not a valid embedding of the tree.
Embedding embedding_from_deleted_edges(const UnrootedNetwork& net,
                                       const UnrootedTree& tree,
                                       const std::vector<Edge>& deleted);

// Per-side cut counts of two spanning embeddings: how many of the two
// spanning trees miss an edge on that side's path. Requires r >= 2. The sum
// over sides is 2r for any pair of spanning embeddings.
std::map<int, int> cut_counts(const UnrootedNetwork& net, const Embedding& b1,
                              const Embedding& b2);

// Breakpoint classification of a network chain against two displayed trees:
// 0 if the chain survives in both, otherwise the first split position per
// tree that fails to keep it whole.
struct BreakpointReport {
  int count = 0;
  std::optional<int> pos_t1;  // i: prefix (l1..li), suffix (l(i+1)..ln)
  std::optional<int> pos_t2;
};
BreakpointReport chain_breakpoints(const UnrootedNetwork& net,
                                   const std::vector<Taxon>& chain,
                                   const UnrootedTree& t1, const UnrootedTree& t2);

// Minimum reticulation number of a network displaying both trees, with a
// witness. Exhaustive over generators and attachments; meant for small
// instances (subtree-reduces the pair first, then re-expands the witness).
struct UhnOptions {
  int max_leaves = 7;
  int generator_cap = 4;
  DisplayBudget display;
};
std::pair<int, UnrootedNetwork> uhn_exact(const UnrootedTree& t1,
                                          const UnrootedTree& t2, int k_max,
                                          const UhnOptions& opts = {});

// Bit-exact file formats.
std::string serialize_unet(const UnrootedNetwork& net);
UnrootedNetwork parse_unet(const std::string& text);
std::string serialize_gen(const Generator& gen);
Generator parse_gen(const std::string& text);

}  // namespace tbrkit
