#pragma once

#include <set>
#include <string>
#include <vector>

namespace tbrkit {

// Undirected edge, endpoints normalized so a <= b.
struct Edge {
  int a = -1;
  int b = -1;
  Edge() = default;
  Edge(int u, int v) : a(u < v ? u : v), b(u < v ? v : u) {}
  bool operator==(const Edge& o) const { return a == o.a && b == o.b; }
  bool operator<(const Edge& o) const { return a != o.a ? a < o.a : b < o.b; }
};

// Scratch graph used by parsing, reductions, network surgery and display
// checks. Simple undirected graph; vertices carry an optional leaf label and
// a liveness flag so ids stay stable while editing. All tree/network surgery
// funnels through the suppress/prune utilities here.
class MutableGraph {
 public:
  int add_vertex(std::string label = "");
  void add_edge(int u, int v);
  void remove_edge(int u, int v);
  bool has_edge(int u, int v) const;
  void remove_vertex(int v);  // drops incident edges

  bool alive(int v) const { return alive_[v]; }
  int size() const { return static_cast<int>(adj_.size()); }  // includes dead
  int live_count() const;
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  const std::string& label(int v) const { return label_[v]; }
  void set_label(int v, std::string s) { label_[v] = std::move(s); }

  std::vector<int> live_vertices() const;
  std::vector<Edge> edges() const;
  bool connected() const;

  // Removes the unlabeled degree-2 vertex v, joining its two neighbors.
  // Throws if that would create a loop or a parallel edge.
  void suppress_vertex(int v);

  // Suppresses every unlabeled degree-2 vertex, repeatedly.
  void suppress_degree2();

  // Iteratively removes degree<=1 vertices that are unlabeled or whose label
  // is not in keep. Used to trim a subgraph down to the subtree spanned by a
  // leaf set.
  void prune_leaves_outside(const std::set<std::string>& keep);

  // Live subgraph with vertices renumbered 0..n-1; old_of maps new -> old id.
  MutableGraph compact(std::vector<int>* old_of = nullptr) const;

 private:
  std::vector<std::vector<int>> adj_;
  std::vector<std::string> label_;
  std::vector<char> alive_;
};

}  // namespace tbrkit
