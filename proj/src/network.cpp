#include "tbrkit/network.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "tbrkit/errors.hpp"
#include "tbrkit/reduce.hpp"

namespace tbrkit {

// ---- UnrootedNetwork ----

UnrootedNetwork UnrootedNetwork::from_graph(const MutableGraph& g) {
  MutableGraph c = g.compact();
  UnrootedNetwork net;
  int n = c.live_count();
  net.adj_.resize(n);
  net.label_.resize(n);
  for (int v = 0; v < n; ++v) {
    net.adj_[v] = c.neighbors(v);
    std::sort(net.adj_[v].begin(), net.adj_[v].end());
    net.label_[v] = c.label(v);
  }
  if (!c.connected()) throw InvalidArgument("network: not connected");
  for (int v = 0; v < n; ++v) {
    int d = static_cast<int>(net.adj_[v].size());
    if (d == 1) {
      if (net.label_[v].empty()) throw InvalidArgument("network: unlabeled leaf");
      if (net.by_label_.count(net.label_[v]))
        throw InvalidArgument("network: duplicate taxon '" + net.label_[v] + "'");
      net.by_label_[net.label_[v]] = v;
      net.leaves_.push_back(v);
    } else if (d == 3) {
      if (!net.label_[v].empty())
        throw InvalidArgument("network: labeled internal vertex");
    } else {
      throw InvalidArgument("network: vertex of degree " + std::to_string(d));
    }
  }
  if (net.leaf_count() < 2) throw InvalidArgument("network: fewer than 2 leaves");
  return net;
}

UnrootedNetwork UnrootedNetwork::from_tree(const UnrootedTree& t) {
  return from_graph(t.to_graph());
}

UnrootedTree UnrootedNetwork::to_tree() const {
  if (reticulation_number(*this) != 0)
    throw InvalidArgument("network: reticulation number nonzero, not a tree");
  return UnrootedTree::from_graph(to_graph());
}

int UnrootedNetwork::leaf_vertex(const Taxon& t) const {
  auto it = by_label_.find(t);
  if (it == by_label_.end())
    throw InvalidArgument("network: unknown taxon '" + t + "'");
  return it->second;
}

std::vector<Taxon> UnrootedNetwork::taxa() const {
  std::vector<Taxon> out;
  for (const auto& [lab, v] : by_label_) out.push_back(lab);
  return out;
}

std::vector<Edge> UnrootedNetwork::edges() const {
  std::vector<Edge> out;
  for (int v = 0; v < vertex_count(); ++v)
    for (int u : adj_[v])
      if (v < u) out.emplace_back(v, u);
  std::sort(out.begin(), out.end());
  return out;
}

bool UnrootedNetwork::has_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= vertex_count() || v >= vertex_count()) return false;
  return std::find(adj_[u].begin(), adj_[u].end(), v) != adj_[u].end();
}

MutableGraph UnrootedNetwork::to_graph() const {
  MutableGraph g;
  for (int v = 0; v < vertex_count(); ++v) g.add_vertex(label_[v]);
  for (const Edge& e : edges()) g.add_edge(e.a, e.b);
  return g;
}

int reticulation_number(const UnrootedNetwork& net) {
  return static_cast<int>(net.edges().size()) - (net.vertex_count() - 1);
}

bool is_chain(const UnrootedNetwork& net, const std::vector<Taxon>& seq) {
  std::vector<std::vector<int>> adj(net.vertex_count());
  for (int v = 0; v < net.vertex_count(); ++v) adj[v] = net.neighbors(v);
  std::map<Taxon, int> by_label;
  for (int v : net.leaves()) by_label[net.label(v)] = v;
  LeafWalkView view{&adj, &by_label};
  return is_chain(view, seq);
}

// ---- generators ----

int count_sides(const Generator& g) {
  int k = g.cyclomatic();
  if (k < 2) throw InvalidArgument("count_sides: needs a generator with k >= 2");
  int sides = g.edge_count();
  if (sides != 3 * (k - 1))
    throw Error("count_sides: side inventory does not match 3(k-1)");
  return sides;
}

namespace {

using EdgeList = std::vector<std::pair<int, int>>;  // sorted endpoint pairs

EdgeList canonical_multigraph(int nv, EdgeList edges) {
  std::vector<int> perm(nv);
  std::iota(perm.begin(), perm.end(), 0);
  EdgeList best;
  bool first = true;
  do {
    EdgeList mapped;
    mapped.reserve(edges.size());
    for (auto [a, b] : edges) {
      int x = perm[a], y = perm[b];
      mapped.emplace_back(std::min(x, y), std::max(x, y));
    }
    std::sort(mapped.begin(), mapped.end());
    if (first || mapped < best) {
      best = std::move(mapped);
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool multigraph_connected(int nv, const EdgeList& edges) {
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : edges) parent[find(a)] = find(b);
  for (int v = 1; v < nv; ++v)
    if (find(v) != find(0)) return false;
  return true;
}

Generator generator_from_edges(int nv, const EdgeList& edges) {
  Generator g;
  g.vertex_count = nv;
  for (std::size_t i = 0; i < edges.size(); ++i)
    g.sides.push_back({static_cast<int>(i), edges[i].first, edges[i].second});
  return g;
}

}  // namespace

std::vector<Generator> enumerate_generators(int k, int max_k) {
  if (k < 1) throw InvalidArgument("enumerate_generators: k must be positive");
  if (k > max_k)
    throw InvalidArgument("enumerate_generators: k exceeds the configured bound");
  std::vector<Generator> out;
  if (k == 1) {
    Generator g;
    g.vertex_count = 1;
    g.sides.push_back({0, 0, 0});
    out.push_back(std::move(g));
    return out;
  }
  int nv = 2 * (k - 1);
  // Slots in lex order: loops (i,i) with multiplicity 0..1, pairs (i,j) with
  // multiplicity 0..3. Degree-constrained DFS.
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < nv; ++i)
    for (int j = i; j < nv; ++j) slots.emplace_back(i, j);
  std::vector<int> degree(nv, 0);
  EdgeList edges;
  std::set<EdgeList> seen;
  std::function<void(std::size_t)> rec = [&](std::size_t si) {
    if (si == slots.size()) {
      for (int v = 0; v < nv; ++v)
        if (degree[v] != 3) return;
      if (!multigraph_connected(nv, edges)) return;
      EdgeList canon = canonical_multigraph(nv, edges);
      if (seen.insert(canon).second) out.push_back(generator_from_edges(nv, canon));
      return;
    }
    auto [i, j] = slots[si];
    int max_mult = (i == j) ? 1 : 3;
    for (int m = 0; m <= max_mult; ++m) {
      if (degree[i] + (i == j ? m * 2 : m) > 3) break;
      if (i != j && degree[j] + m > 3) break;
      for (int c = 0; c < m; ++c) edges.emplace_back(i, j);
      degree[i] += (i == j ? 2 * m : m);
      if (i != j) degree[j] += m;
      rec(si + 1);
      degree[i] -= (i == j ? 2 * m : m);
      if (i != j) degree[j] -= m;
      for (int c = 0; c < m; ++c) edges.pop_back();
    }
  };
  rec(0);
  std::sort(out.begin(), out.end(), [](const Generator& a, const Generator& b) {
    EdgeList ea, eb;
    for (const auto& s : a.sides) ea.emplace_back(s.a, s.b);
    for (const auto& s : b.sides) eb.emplace_back(s.a, s.b);
    return ea < eb;
  });
  return out;
}

// ---- attachment ----

UnrootedNetwork attach(const Generator& gen, const Attachment& att) {
  int k = gen.cyclomatic();
  auto chain_of = [&](int sid) -> const std::vector<Taxon>& {
    static const std::vector<Taxon> empty;
    auto it = att.per_side.find(sid);
    return it == att.per_side.end() ? empty : it->second;
  };
  int total = 0;
  for (const auto& s : gen.sides) total += static_cast<int>(chain_of(s.id).size());
  if (total < 2) throw InvalidArgument("attach: fewer than 2 leaves overall");
  bool one_gen = (gen.vertex_count == 1 && gen.sides.size() == 1 && gen.is_loop(0));
  if (one_gen && total < 3)
    throw InvalidArgument(
        "attach: the 1-generator needs at least 3 leaves for a simple network");
  std::map<std::pair<int, int>, int> empty_per_class;
  for (const auto& s : gen.sides) {
    const auto& chain = chain_of(s.id);
    if (!one_gen && s.a == s.b && chain.size() < 2)
      throw InvalidArgument("attach: a loop side needs at least 2 leaves");
    if (chain.empty()) ++empty_per_class[{std::min(s.a, s.b), std::max(s.a, s.b)}];
  }
  std::map<std::pair<int, int>, int> class_size;
  for (const auto& s : gen.sides)
    ++class_size[{std::min(s.a, s.b), std::max(s.a, s.b)}];
  for (const auto& [key, empties] : empty_per_class) {
    if (class_size[key] >= 2 && empties >= 2)
      throw InvalidArgument("attach: two parallel sides left empty");
    if (class_size[key] == 1 && key.first == key.second && empties > 0)
      throw InvalidArgument("attach: a loop side left empty");
  }

  MutableGraph g;
  std::vector<int> gen_v(gen.vertex_count);
  for (int i = 0; i < gen.vertex_count; ++i) gen_v[i] = g.add_vertex();
  for (const auto& s : gen.sides) {
    const auto& chain = chain_of(s.id);
    int prev = gen_v[s.a];
    for (const Taxon& taxon : chain) {
      int mid = g.add_vertex();
      int leaf = g.add_vertex(taxon);
      g.add_edge(prev, mid);
      g.add_edge(mid, leaf);
      prev = mid;
    }
    g.add_edge(prev, gen_v[s.b]);
  }
  if (one_gen) g.suppress_vertex(gen_v[0]);
  UnrootedNetwork net = UnrootedNetwork::from_graph(g);
  if (reticulation_number(net) != k) throw Error("attach: reticulation count drifted");
  return net;
}

// ---- skeleton extraction ----

NetworkSkeleton network_skeleton(const UnrootedNetwork& net) {
  int r = reticulation_number(net);
  if (r < 1) throw InvalidArgument("network_skeleton: reticulation number is zero");
  // A pendant subtree with >= 2 leaves implies a cherry.
  for (int v = 0; v < net.vertex_count(); ++v) {
    if (net.is_leaf(v)) continue;
    int leaf_neighbors = 0;
    for (int u : net.neighbors(v)) leaf_neighbors += net.is_leaf(u);
    if (leaf_neighbors >= 2)
      throw InvalidArgument("network_skeleton: network has a pendant subtree");
  }

  // Core = internal vertices; core degree = 3 - attached leaves.
  auto core_neighbors = [&](int v) {
    std::vector<int> out;
    for (int u : net.neighbors(v))
      if (!net.is_leaf(u)) out.push_back(u);
    return out;
  };
  auto leaf_at = [&](int v) -> std::optional<Taxon> {
    for (int u : net.neighbors(v))
      if (net.is_leaf(u)) return net.label(u);
    return std::nullopt;
  };

  std::vector<int> gen_vertices;
  for (int v = 0; v < net.vertex_count(); ++v)
    if (!net.is_leaf(v) && core_neighbors(v).size() == 3) gen_vertices.push_back(v);

  NetworkSkeleton sk;
  if (gen_vertices.empty()) {
    // r == 1 necklace: the core is a single cycle; realize the 1-generator
    // with the whole cycle as its loop path. The chain holds every leaf,
    // starting from the smallest core vertex toward its smaller neighbor.
    assert(r == 1);
    int start = -1;
    for (int v = 0; v < net.vertex_count(); ++v)
      if (!net.is_leaf(v)) {
        start = v;
        break;
      }
    sk.generator.vertex_count = 1;
    sk.generator.sides.push_back({0, 0, 0});
    sk.gen_vertex = {start};
    NetworkSkeleton::SidePath sp;
    sp.side_id = 0;
    sp.path.push_back(start);
    sp.chain.push_back(*leaf_at(start));
    auto cn = core_neighbors(start);
    assert(cn.size() == 2);
    int prev = start, cur = std::min(cn[0], cn[1]);
    while (cur != start) {
      sp.path.push_back(cur);
      sp.chain.push_back(*leaf_at(cur));
      auto nb = core_neighbors(cur);
      int next = nb[0] == prev ? nb[1] : nb[0];
      prev = cur;
      cur = next;
    }
    sp.path.push_back(start);
    sk.paths.push_back(std::move(sp));
    return sk;
  }

  std::map<int, int> gen_index;
  for (std::size_t i = 0; i < gen_vertices.size(); ++i)
    gen_index[gen_vertices[i]] = static_cast<int>(i);

  // Walk each side from each generator vertex; dedup by canonical path.
  std::set<std::vector<int>> seen_paths;
  std::vector<std::vector<int>> raw_paths;
  for (int gv : gen_vertices) {
    for (int n0 : core_neighbors(gv)) {
      std::vector<int> path{gv};
      int prev = gv, cur = n0;
      while (!gen_index.count(cur)) {
        path.push_back(cur);
        auto nb = core_neighbors(cur);
        assert(nb.size() == 2);
        int next = nb[0] == prev ? nb[1] : nb[0];
        prev = cur;
        cur = next;
      }
      path.push_back(cur);
      std::vector<int> rev(path.rbegin(), path.rend());
      std::vector<int> canon = std::min(path, rev);
      if (seen_paths.insert(canon).second) raw_paths.push_back(canon);
    }
  }
  std::sort(raw_paths.begin(), raw_paths.end());

  sk.gen_vertex = gen_vertices;
  sk.generator.vertex_count = static_cast<int>(gen_vertices.size());
  for (std::size_t i = 0; i < raw_paths.size(); ++i) {
    const auto& path = raw_paths[i];
    Generator::Side side;
    side.id = static_cast<int>(i);
    side.a = gen_index.at(path.front());
    side.b = gen_index.at(path.back());
    sk.generator.sides.push_back(side);
    NetworkSkeleton::SidePath sp;
    sp.side_id = side.id;
    sp.path = path;
    for (std::size_t j = 1; j + 1 < path.size(); ++j) sp.chain.push_back(*leaf_at(path[j]));
    sk.paths.push_back(std::move(sp));
  }
  return sk;
}

Generator extract_generator(const UnrootedNetwork& net) {
  return network_skeleton(net).generator;
}

Attachment induced_attachment(const NetworkSkeleton& sk) {
  Attachment att;
  for (const auto& sp : sk.paths)
    if (!sp.chain.empty()) att.per_side[sp.side_id] = sp.chain;
  return att;
}

// ---- display ----

namespace {

// Pendant subtrees collapsed cherry by cherry, with the surviving tree-side
// taxa tracked so the search runs on a reduced network. Edge ids stay those
// of the original network so the final spanning tree lifts back.
struct CollapseState {
  MutableGraph g;                  // working copy, original vertex ids
  std::vector<Taxon> tree_taxa;    // taxa of the (possibly reduced) target tree
  std::vector<Edge> removed_edges; // pendant edges re-added to the spanning tree
  bool impossible = false;
};

CollapseState collapse_pendants(const UnrootedNetwork& net, const UnrootedTree& tree) {
  CollapseState st;
  st.g = net.to_graph();
  st.tree_taxa = tree.taxa();
  std::set<Taxon> in_tree(st.tree_taxa.begin(), st.tree_taxa.end());

  auto leaf_vertices_at = [&](int p) {
    std::vector<int> out;
    for (int u : st.g.neighbors(p))
      if (st.g.degree(u) == 1 && !st.g.label(u).empty()) out.push_back(u);
    return out;
  };

  for (;;) {
    int parent = -1;
    std::vector<int> pair;
    for (int v = 0; v < st.g.size() && parent < 0; ++v) {
      if (!st.g.alive(v) || st.g.degree(v) != 3 || !st.g.label(v).empty()) continue;
      auto lv = leaf_vertices_at(v);
      if (lv.size() >= 2) {
        parent = v;
        pair = {lv[0], lv[1]};
      }
    }
    if (parent < 0) break;
    Taxon lx = st.g.label(pair[0]), ly = st.g.label(pair[1]);
    if (lx > ly) std::swap(lx, ly);
    bool x_in = in_tree.count(lx), y_in = in_tree.count(ly);
    if (x_in && y_in) {
      // Both survive into any displayed tree, so the tree must pair them.
      UnrootedTree sub = restrict_to(
          tree, std::vector<Taxon>(in_tree.begin(), in_tree.end()));
      bool cherry = false;
      int a = sub.leaf_vertex(lx);
      for (int u : sub.neighbors(sub.neighbors(a)[0]))
        if (sub.is_leaf(u) && sub.label(u) == ly) cherry = true;
      if (!cherry) {
        st.impossible = true;
        return st;
      }
      in_tree.erase(ly);
    }
    Taxon keep = x_in ? lx : (y_in ? ly : lx);
    for (int leaf : pair) {
      st.removed_edges.emplace_back(leaf, st.g.neighbors(leaf)[0]);
      st.g.remove_vertex(leaf);
    }
    st.g.set_label(parent, keep);
  }
  st.tree_taxa.assign(in_tree.begin(), in_tree.end());
  return st;
}

}  // namespace

Embedding embedding_from_deleted_edges(const UnrootedNetwork& net,
                                       const UnrootedTree& tree,
                                       const std::vector<Edge>& deleted) {
  MutableGraph g = net.to_graph();
  for (const Edge& e : deleted) {
    if (!g.has_edge(e.a, e.b))
      throw InvalidArgument("embedding: deleted edge not present");
    g.remove_edge(e.a, e.b);
  }
  if (!g.connected()) throw InvalidArgument("embedding: deletions disconnect the network");
  Embedding emb;
  emb.spanning = g.edges();
  if (static_cast<int>(emb.spanning.size()) != net.vertex_count() - 1)
    throw InvalidArgument("embedding: not a spanning tree");
  std::set<std::string> keep;
  for (const Taxon& x : tree.taxa()) keep.insert(x);
  g.prune_leaves_outside(keep);
  emb.subdivision = g.edges();
  if (!validate_embedding(net, tree, emb))
    throw InvalidArgument("embedding: deletions do not realize the tree");
  return emb;
}

bool validate_embedding(const UnrootedNetwork& net, const UnrootedTree& tree,
                        const Embedding& emb) {
  // Spanning part: a spanning tree of the network containing the subdivision.
  std::vector<Edge> all_edges = net.edges();
  std::set<Edge> net_edges(all_edges.begin(), all_edges.end());
  for (const Edge& e : emb.spanning)
    if (!net_edges.count(e)) return false;
  if (static_cast<int>(emb.spanning.size()) != net.vertex_count() - 1) return false;
  std::set<Edge> span_set(emb.spanning.begin(), emb.spanning.end());
  if (span_set.size() != emb.spanning.size()) return false;
  for (const Edge& e : emb.subdivision)
    if (!span_set.count(e)) return false;

  MutableGraph g;
  for (int v = 0; v < net.vertex_count(); ++v) g.add_vertex(net.label(v));
  for (const Edge& e : emb.spanning) g.add_edge(e.a, e.b);
  if (!g.connected()) return false;

  // Subdivision part: its degree-1 vertices are exactly the tree's taxa and
  // suppressing degree-2 vertices yields the tree.
  MutableGraph s;
  for (int v = 0; v < net.vertex_count(); ++v) s.add_vertex(net.label(v));
  std::set<int> used;
  for (const Edge& e : emb.subdivision) {
    s.add_edge(e.a, e.b);
    used.insert(e.a);
    used.insert(e.b);
  }
  for (int v = 0; v < net.vertex_count(); ++v)
    if (!used.count(v)) s.remove_vertex(v);
  std::vector<Taxon> tree_taxa_list = tree.taxa();
  std::set<Taxon> want(tree_taxa_list.begin(), tree_taxa_list.end());
  for (int v : s.live_vertices()) {
    if (s.degree(v) == 1 && (s.label(v).empty() || !want.count(s.label(v)))) return false;
    if (s.degree(v) == 0) return false;
    if (!s.label(v).empty() && s.degree(v) == 1) want.erase(s.label(v));
  }
  if (!want.empty()) return false;
  try {
    s.suppress_degree2();
    UnrootedTree got = UnrootedTree::from_graph(s);
    return trees_equal(got, tree);
  } catch (const Error&) {
    return false;
  }
}

namespace {

// Search over co-tree side subsets and break positions on the collapsed
// network. Returns the deleted edges of the first realization found.
std::optional<std::vector<Edge>> display_search(const UnrootedNetwork& net,
                                                const UnrootedTree& tree,
                                                bool exact_taxa,
                                                const DisplayBudget& budget,
                                                std::uint64_t& used) {
  int r = reticulation_number(net);
  std::vector<Taxon> taxa_list = tree.taxa();
  std::set<Taxon> tree_taxa(taxa_list.begin(), taxa_list.end());

  auto try_candidate = [&](const std::vector<Edge>& deleted)
      -> std::optional<std::vector<Edge>> {
    if (++used > budget.max_candidates)
      throw BudgetExceeded("displays: candidate budget exhausted");
    MutableGraph g = net.to_graph();
    for (const Edge& e : deleted) g.remove_edge(e.a, e.b);
    if (!g.connected()) return std::nullopt;
    g.prune_leaves_outside(tree_taxa);
    try {
      g.suppress_degree2();
      if (trees_equal(UnrootedTree::from_graph(g), tree)) return deleted;
    } catch (const Error&) {
    }
    return std::nullopt;
  };

  if (r == 1) {
    // Single cycle: delete each cycle edge in turn.
    for (const Edge& e : net.edges()) {
      if (net.is_leaf(e.a) || net.is_leaf(e.b)) continue;
      MutableGraph probe = net.to_graph();
      probe.remove_edge(e.a, e.b);
      if (!probe.connected()) continue;  // a bridge, not on the cycle
      if (auto hit = try_candidate({e})) return hit;
    }
    return std::nullopt;
  }

  NetworkSkeleton sk = network_skeleton(net);
  int nsides = static_cast<int>(sk.generator.sides.size());

  // Per-side data: chain-consistency filters apply only when the tree uses
  // exactly the network's taxa.
  std::vector<std::vector<int>> allowed(nsides);
  std::vector<bool> unbroken_ok(nsides, true);
  for (int sid = 0; sid < nsides; ++sid) {
    const auto& sp = sk.paths[sid];
    int t = static_cast<int>(sp.chain.size());
    if (exact_taxa) {
      unbroken_ok[sid] = sp.chain.empty() || is_chain(tree, sp.chain);
      for (int p = 0; p <= t; ++p) {
        std::vector<Taxon> prefix(sp.chain.begin(), sp.chain.begin() + p);
        std::vector<Taxon> suffix(sp.chain.begin() + p, sp.chain.end());
        bool ok = (prefix.empty() || is_chain(tree, prefix)) &&
                  (suffix.empty() || is_chain(tree, suffix));
        if (ok) allowed[sid].push_back(p);
      }
    } else {
      unbroken_ok[sid] = true;
      for (int p = 0; p <= t; ++p) allowed[sid].push_back(p);
    }
  }

  // Enumerate co-trees: r sides whose removal leaves a spanning tree.
  std::vector<int> chosen;
  std::optional<std::vector<Edge>> found;
  std::function<bool(int)> choose = [&](int from) -> bool {
    if (static_cast<int>(chosen.size()) == r) {
      // Remaining sides must connect the generator.
      std::vector<int> parent(sk.generator.vertex_count);
      std::iota(parent.begin(), parent.end(), 0);
      std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      std::set<int> cut(chosen.begin(), chosen.end());
      int joins = 0;
      for (const auto& s : sk.generator.sides) {
        if (cut.count(s.id) || s.a == s.b) continue;
        int ra = find(s.a), rb = find(s.b);
        if (ra != rb) {
          parent[ra] = rb;
          ++joins;
        }
      }
      if (joins != sk.generator.vertex_count - 1) return false;
      for (const auto& s : sk.generator.sides)
        if (!cut.count(s.id) && !unbroken_ok[s.id]) return false;

      // Enumerate break positions on the chosen sides.
      std::vector<Edge> deleted(chosen.size());
      std::function<bool(std::size_t)> place = [&](std::size_t i) -> bool {
        if (i == chosen.size()) {
          if (auto hit = try_candidate(deleted)) {
            found = hit;
            return true;
          }
          return false;
        }
        const auto& sp = sk.paths[chosen[i]];
        for (int p : allowed[chosen[i]]) {
          deleted[i] = Edge(sp.path[p], sp.path[p + 1]);
          if (place(i + 1)) return true;
        }
        return false;
      };
      return place(0);
    }
    for (int sid = from; sid < nsides; ++sid) {
      chosen.push_back(sid);
      if (choose(sid + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  choose(0);
  return found;
}

}  // namespace

DisplayResult displays(const UnrootedNetwork& net, const UnrootedTree& tree,
                       const DisplayBudget& budget) {
  for (const Taxon& x : tree.taxa())
    if (!net.has_taxon(x))
      throw InvalidArgument("displays: tree taxon '" + x + "' not in network");
  DisplayResult res;

  if (reticulation_number(net) == 0) {
    UnrootedTree as_tree = net.to_tree();
    UnrootedTree pruned = tree.taxa() == as_tree.taxa()
                              ? as_tree
                              : restrict_to(as_tree, tree.taxa());
    if (!trees_equal(pruned, tree)) return res;
    res.displayed = true;
    res.witness = embedding_from_deleted_edges(net, tree, {});
    return res;
  }

  CollapseState st = collapse_pendants(net, tree);
  if (st.impossible) return res;

  std::vector<int> old_of;
  MutableGraph compacted = st.g.compact(&old_of);
  UnrootedNetwork reduced = UnrootedNetwork::from_graph(compacted);
  UnrootedTree target = st.tree_taxa == tree.taxa()
                            ? tree
                            : restrict_to(tree, st.tree_taxa);
  bool exact = reduced.taxa() == target.taxa();

  // The compacted network renumbers vertices identically to from_graph
  // (order-preserving), so edges map back through old_of.
  std::uint64_t used = 0;
  auto hit = display_search(reduced, target, exact, budget, used);
  if (!hit) return res;
  std::vector<Edge> deleted;
  for (const Edge& e : *hit) deleted.emplace_back(old_of[e.a], old_of[e.b]);
  res.displayed = true;
  res.witness = embedding_from_deleted_edges(net, tree, deleted);
  return res;
}

Embedding embed(const UnrootedNetwork& net, const UnrootedTree& tree,
                const DisplayBudget& budget) {
  DisplayResult res = displays(net, tree, budget);
  if (!res.displayed) throw InvalidArgument("embed: network does not display the tree");
  return res.witness;
}

std::map<int, int> cut_counts(const UnrootedNetwork& net, const Embedding& b1,
                              const Embedding& b2) {
  if (reticulation_number(net) < 2)
    throw InvalidArgument("cut_counts: needs reticulation number >= 2");
  for (const Embedding* emb : {&b1, &b2}) {
    if (static_cast<int>(emb->spanning.size()) != net.vertex_count() - 1)
      throw InvalidArgument("cut_counts: embedding is not spanning");
  }
  NetworkSkeleton sk = network_skeleton(net);
  std::set<Edge> s1(b1.spanning.begin(), b1.spanning.end());
  std::set<Edge> s2(b2.spanning.begin(), b2.spanning.end());
  std::map<int, int> out;
  for (const auto& sp : sk.paths) {
    int c = 0;
    for (const std::set<Edge>* span : {&s1, &s2}) {
      bool missing = false;
      for (std::size_t i = 0; i + 1 < sp.path.size(); ++i)
        if (!span->count(Edge(sp.path[i], sp.path[i + 1]))) missing = true;
      c += missing;
    }
    out[sp.side_id] = c;
  }
  return out;
}

BreakpointReport chain_breakpoints(const UnrootedNetwork& net,
                                   const std::vector<Taxon>& chain,
                                   const UnrootedTree& t1, const UnrootedTree& t2) {
  if (!is_chain(net, chain))
    throw InvalidArgument("chain_breakpoints: not a chain of the network");
  BreakpointReport rep;
  int n = static_cast<int>(chain.size());
  auto break_pos = [&](const UnrootedTree& t) -> std::optional<int> {
    if (is_chain(t, chain)) return std::nullopt;
    for (int i = 1; i < n; ++i) {
      std::vector<Taxon> prefix(chain.begin(), chain.begin() + i);
      std::vector<Taxon> suffix(chain.begin() + i, chain.end());
      if (is_chain(t, prefix) && is_chain(t, suffix)) return i;
    }
    throw Error("chain_breakpoints: chain cannot be split once; tree not displayed?");
  };
  rep.pos_t1 = break_pos(t1);
  rep.pos_t2 = break_pos(t2);
  rep.count = static_cast<int>(rep.pos_t1.has_value()) +
              static_cast<int>(rep.pos_t2.has_value());
  return rep;
}

// ---- exact minimum-network search ----

namespace {

struct Fragment {
  MutableGraph piece;
  int root = -1;
  Taxon fresh;
};

Fragment make_fragment(const UnrootedTree& t, const std::vector<Taxon>& set,
                       const Taxon& fresh) {
  TaxonIndex ix = TaxonIndex::for_tree(t);
  Bits target = ix.bits_of(set);
  SplitTable st(t, ix);
  int cut = -1;
  for (std::size_t i = 0; i < st.edges().size(); ++i) {
    const Bits& s = st.split(static_cast<int>(i));
    if (s == target || s == target.complement()) {
      cut = static_cast<int>(i);
      break;
    }
  }
  assert(cut >= 0);
  Edge e = st.edges()[cut];
  MutableGraph g = t.to_graph();
  g.remove_edge(e.a, e.b);
  std::set<std::string> want(set.begin(), set.end());
  // The side containing the set.
  auto labels_from = [&](int start) {
    std::set<std::string> out;
    std::vector<int> stack{start};
    std::set<int> seen{start};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (!g.label(v).empty()) out.insert(g.label(v));
      for (int u : g.neighbors(v))
        if (seen.insert(u).second) stack.push_back(u);
    }
    return out;
  };
  int inside = labels_from(e.a) == want ? e.a : e.b;
  std::set<int> comp{inside};
  std::vector<int> stack{inside};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : g.neighbors(v))
      if (comp.insert(u).second) stack.push_back(u);
  }
  Fragment frag;
  frag.fresh = fresh;
  std::map<int, int> to_new;
  for (int v : comp) to_new[v] = frag.piece.add_vertex(g.label(v));
  for (int v : comp)
    for (int u : g.neighbors(v))
      if (v < u && comp.count(u)) frag.piece.add_edge(to_new[v], to_new[u]);
  frag.root = to_new.at(inside);
  return frag;
}

UnrootedNetwork expand_network(const UnrootedNetwork& net,
                               const std::vector<Fragment>& frags) {
  MutableGraph g = net.to_graph();
  for (auto it = frags.rbegin(); it != frags.rend(); ++it) {
    const Fragment& f = *it;
    int leaf = -1;
    for (int v = 0; v < g.size(); ++v)
      if (g.alive(v) && g.label(v) == f.fresh) leaf = v;
    assert(leaf >= 0 && g.degree(leaf) == 1);
    int nb = g.neighbors(leaf)[0];
    g.remove_vertex(leaf);
    std::map<int, int> to_new;
    for (int v = 0; v < f.piece.size(); ++v)
      if (f.piece.alive(v)) to_new[v] = g.add_vertex(f.piece.label(v));
    for (const Edge& e : f.piece.edges()) g.add_edge(to_new[e.a], to_new[e.b]);
    g.add_edge(to_new.at(f.root), nb);
  }
  return UnrootedNetwork::from_graph(g);
}

// Orbit representatives of the sides under the generator's automorphisms;
// parallel sides share an orbit.
std::vector<int> side_orbit_reps(const Generator& gen) {
  int nv = gen.vertex_count;
  std::vector<int> perm(nv);
  std::iota(perm.begin(), perm.end(), 0);
  EdgeList base;
  for (const auto& s : gen.sides)
    base.emplace_back(std::min(s.a, s.b), std::max(s.a, s.b));
  EdgeList base_sorted = base;
  std::sort(base_sorted.begin(), base_sorted.end());

  std::vector<int> orbit(gen.sides.size());
  std::iota(orbit.begin(), orbit.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (orbit[x] != x) x = orbit[x] = orbit[orbit[x]];
    return x;
  };
  do {
    EdgeList mapped;
    for (auto [a, b] : base) {
      int x = perm[a], y = perm[b];
      mapped.emplace_back(std::min(x, y), std::max(x, y));
    }
    EdgeList mapped_sorted = mapped;
    std::sort(mapped_sorted.begin(), mapped_sorted.end());
    if (mapped_sorted != base_sorted) continue;
    for (std::size_t s = 0; s < gen.sides.size(); ++s)
      for (std::size_t t = 0; t < gen.sides.size(); ++t)
        if (base[t] == mapped[s]) orbit[find(static_cast<int>(s))] = find(static_cast<int>(t));
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::set<int> roots;
  std::vector<int> reps;
  for (std::size_t s = 0; s < gen.sides.size(); ++s)
    if (roots.insert(find(static_cast<int>(s))).second) reps.push_back(static_cast<int>(s));
  return reps;
}

std::optional<UnrootedNetwork> search_attachments(const Generator& gen,
                                                  const std::vector<Taxon>& taxa,
                                                  const UnrootedTree& t1,
                                                  const UnrootedTree& t2,
                                                  const DisplayBudget& display) {
  std::vector<int> reps = side_orbit_reps(gen);
  int nsides = gen.edge_count();
  std::vector<int> all_sides(nsides);
  std::iota(all_sides.begin(), all_sides.end(), 0);
  std::vector<std::vector<Taxon>> seq(nsides);
  std::optional<UnrootedNetwork> found;

  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == taxa.size()) {
      Attachment att;
      for (int s = 0; s < nsides; ++s)
        if (!seq[s].empty()) att.per_side[gen.sides[s].id] = seq[s];
      try {
        UnrootedNetwork candidate = attach(gen, att);
        if (displays(candidate, t1, display).displayed &&
            displays(candidate, t2, display).displayed) {
          found = candidate;
          return true;
        }
      } catch (const InvalidArgument&) {
        // attachment violates the simplicity rules; skip
      }
      return false;
    }
    for (int s : i == 0 ? reps : all_sides) {
      for (std::size_t pos = 0; pos <= seq[s].size(); ++pos) {
        seq[s].insert(seq[s].begin() + pos, taxa[i]);
        if (rec(i + 1)) return true;
        seq[s].erase(seq[s].begin() + pos);
      }
    }
    return false;
  };
  rec(0);
  return found;
}

}  // namespace

std::pair<int, UnrootedNetwork> uhn_exact(const UnrootedTree& t1,
                                          const UnrootedTree& t2, int k_max,
                                          const UhnOptions& opts) {
  require_same_taxa(t1, t2);
  if (t1.leaf_count() > opts.max_leaves)
    throw InvalidArgument("uhn_exact: instance larger than the configured limit");
  if (trees_equal(t1, t2)) return {0, UnrootedNetwork::from_tree(t1)};

  // Shared pendant subtrees are collapsed first (any displaying network would
  // carry them verbatim); the witness is re-expanded afterwards.
  ReductionTrace trace;
  trace.seed_from(t1, t2);
  UnrootedTree a = t1, b = t2;
  std::vector<Fragment> frags;
  for (;;) {
    auto sets = maximal_common_pendant_subtrees(a, b);
    if (sets.empty()) break;
    for (const auto& set : sets) {
      Taxon fresh = trace.fresh_label();
      frags.push_back(make_fragment(a, set, fresh));
      a = replace_pendant_set(a, set, fresh);
      b = replace_pendant_set(b, set, fresh);
    }
  }
  if (trees_equal(a, b)) {
    // Equal after collapsing: the original trees were equal too.
    return {0, UnrootedNetwork::from_tree(t1)};
  }

  std::vector<Taxon> taxa = a.taxa();
  for (int k = 1; k <= k_max; ++k) {
    for (const Generator& gen : enumerate_generators(k, opts.generator_cap)) {
      auto hit = search_attachments(gen, taxa, a, b, opts.display);
      if (!hit) continue;
      UnrootedNetwork witness = expand_network(*hit, frags);
      if (!displays(witness, t1, opts.display).displayed ||
          !displays(witness, t2, opts.display).displayed)
        throw Error("uhn_exact: witness expansion failed its display recheck");
      return {k, witness};
    }
  }
  throw BudgetExceeded("uhn_exact: no network found up to k_max");
}

// ---- file formats ----

std::string serialize_unet(const UnrootedNetwork& net) {
  std::ostringstream out;
  out << "UNET v1\n";
  out << "V " << net.vertex_count() << "\n";
  for (const Edge& e : net.edges()) out << "E " << e.a << " " << e.b << "\n";
  for (int v = 0; v < net.vertex_count(); ++v)
    if (net.is_leaf(v)) out << "L " << v << " " << net.label(v) << "\n";
  return out.str();
}

namespace {

struct LineReader {
  std::istringstream in;
  int lineno = 0;
  explicit LineReader(const std::string& text) : in(text) {}
  std::optional<std::string> next() {
    std::string line;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    return std::nullopt;
  }
};

}  // namespace

UnrootedNetwork parse_unet(const std::string& text) {
  LineReader rd(text);
  auto header = rd.next();
  if (!header || *header != "UNET v1") throw ParseError("unet: missing 'UNET v1' header");
  auto vline = rd.next();
  int n = 0;
  if (!vline || sscanf(vline->c_str(), "V %d", &n) != 1 || n <= 0)
    throw ParseError("unet: missing vertex count");
  MutableGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex();
  while (auto line = rd.next()) {
    char kind = (*line)[0];
    if (kind == 'E') {
      int x = -1, y = -1;
      if (sscanf(line->c_str(), "E %d %d", &x, &y) != 2 || x < 0 || y < 0 || x >= n ||
          y >= n)
        throw ParseError("unet: bad edge on line " + std::to_string(rd.lineno));
      if (x == y) throw ParseError("unet: loop edge on line " + std::to_string(rd.lineno));
      if (g.has_edge(x, y))
        throw ParseError("unet: parallel edge on line " + std::to_string(rd.lineno));
      g.add_edge(x, y);
    } else if (kind == 'L') {
      int v = -1;
      char buf[256];
      if (sscanf(line->c_str(), "L %d %255s", &v, buf) != 2 || v < 0 || v >= n)
        throw ParseError("unet: bad label on line " + std::to_string(rd.lineno));
      g.set_label(v, buf);
    } else {
      throw ParseError("unet: unknown line " + std::to_string(rd.lineno));
    }
  }
  try {
    return UnrootedNetwork::from_graph(g);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("unet: ") + e.what());
  }
}

std::string serialize_gen(const Generator& gen) {
  std::ostringstream out;
  out << "GEN v1\n";
  out << "V " << gen.vertex_count << "\n";
  for (const auto& s : gen.sides) out << "E " << s.id << " " << s.a << " " << s.b << "\n";
  return out.str();
}

Generator parse_gen(const std::string& text) {
  LineReader rd(text);
  auto header = rd.next();
  if (!header || *header != "GEN v1") throw ParseError("gen: missing 'GEN v1' header");
  auto vline = rd.next();
  Generator g;
  if (!vline || sscanf(vline->c_str(), "V %d", &g.vertex_count) != 1 ||
      g.vertex_count <= 0)
    throw ParseError("gen: missing vertex count");
  std::set<int> ids;
  while (auto line = rd.next()) {
    int id = -1, a = -1, b = -1;
    if (sscanf(line->c_str(), "E %d %d %d", &id, &a, &b) != 3 || a < 0 || b < 0 ||
        a >= g.vertex_count || b >= g.vertex_count)
      throw ParseError("gen: bad edge on line " + std::to_string(rd.lineno));
    if (!ids.insert(id).second)
      throw ParseError("gen: duplicate edge id on line " + std::to_string(rd.lineno));
    g.sides.push_back({id, a, b});
  }
  std::vector<int> degree(g.vertex_count, 0);
  for (const auto& s : g.sides) {
    degree[s.a] += s.a == s.b ? 2 : 1;
    if (s.a != s.b) degree[s.b] += 1;
  }
  bool one_gen = g.vertex_count == 1 && g.sides.size() == 1 && g.sides[0].a == g.sides[0].b;
  for (int v = 0; v < g.vertex_count && !one_gen; ++v)
    if (degree[v] != 3) throw ParseError("gen: vertex of degree != 3");
  return g;
}

}  // namespace tbrkit
