#include "tbrkit/graph.hpp"

#include <algorithm>
#include <cassert>

#include "tbrkit/errors.hpp"

namespace tbrkit {

int MutableGraph::add_vertex(std::string label) {
  adj_.emplace_back();
  label_.push_back(std::move(label));
  alive_.push_back(1);
  return static_cast<int>(adj_.size()) - 1;
}

void MutableGraph::add_edge(int u, int v) {
  assert(alive_[u] && alive_[v]);
  if (u == v) throw Error("graph: loop edges are not allowed here");
  if (has_edge(u, v)) throw Error("graph: parallel edges are not allowed here");
  adj_[u].push_back(v);
  adj_[v].push_back(u);
}

bool MutableGraph::has_edge(int u, int v) const {
  return std::find(adj_[u].begin(), adj_[u].end(), v) != adj_[u].end();
}

void MutableGraph::remove_edge(int u, int v) {
  auto drop = [](std::vector<int>& vec, int x) {
    auto it = std::find(vec.begin(), vec.end(), x);
    assert(it != vec.end());
    vec.erase(it);
  };
  drop(adj_[u], v);
  drop(adj_[v], u);
}

void MutableGraph::remove_vertex(int v) {
  assert(alive_[v]);
  for (int u : std::vector<int>(adj_[v])) remove_edge(v, u);
  alive_[v] = 0;
}

int MutableGraph::live_count() const {
  int c = 0;
  for (char a : alive_) c += a;
  return c;
}

std::vector<int> MutableGraph::live_vertices() const {
  std::vector<int> out;
  for (int v = 0; v < size(); ++v)
    if (alive_[v]) out.push_back(v);
  return out;
}

std::vector<Edge> MutableGraph::edges() const {
  std::vector<Edge> out;
  for (int v = 0; v < size(); ++v) {
    if (!alive_[v]) continue;
    for (int u : adj_[v])
      if (v < u) out.emplace_back(v, u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool MutableGraph::connected() const {
  std::vector<int> live = live_vertices();
  if (live.empty()) return true;
  std::vector<char> seen(size(), 0);
  std::vector<int> stack{live[0]};
  seen[live[0]] = 1;
  int reached = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    ++reached;
    for (int u : adj_[v])
      if (!seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
  }
  return reached == static_cast<int>(live.size());
}

void MutableGraph::suppress_vertex(int v) {
  assert(alive_[v] && label_[v].empty() && degree(v) == 2);
  int a = adj_[v][0];
  int b = adj_[v][1];
  if (a == b) throw Error("graph: suppression would create a loop");
  if (has_edge(a, b)) throw Error("graph: suppression would create a parallel edge");
  remove_vertex(v);
  add_edge(a, b);
}

void MutableGraph::suppress_degree2() {
  bool again = true;
  while (again) {
    again = false;
    for (int v = 0; v < size(); ++v) {
      if (alive_[v] && label_[v].empty() && degree(v) == 2) {
        suppress_vertex(v);
        again = true;
      }
    }
  }
}

void MutableGraph::prune_leaves_outside(const std::set<std::string>& keep) {
  bool again = true;
  while (again) {
    again = false;
    for (int v = 0; v < size(); ++v) {
      if (!alive_[v] || degree(v) > 1) continue;
      if (label_[v].empty() || !keep.count(label_[v])) {
        remove_vertex(v);
        again = true;
      }
    }
  }
}

MutableGraph MutableGraph::compact(std::vector<int>* old_of) const {
  MutableGraph g;
  std::vector<int> new_id(size(), -1);
  if (old_of) old_of->clear();
  for (int v = 0; v < size(); ++v) {
    if (!alive_[v]) continue;
    new_id[v] = g.add_vertex(label_[v]);
    if (old_of) old_of->push_back(v);
  }
  for (const Edge& e : edges()) g.add_edge(new_id[e.a], new_id[e.b]);
  return g;
}

}  // namespace tbrkit
