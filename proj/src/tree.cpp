#include "tbrkit/tree.hpp"

#include <algorithm>
#include <cassert>
#include <set>

#include "tbrkit/errors.hpp"

namespace tbrkit {

UnrootedTree UnrootedTree::from_graph(const MutableGraph& g) {
  MutableGraph c = g.compact();
  UnrootedTree t;
  int n = c.live_count();
  t.adj_.resize(n);
  t.label_.resize(n);
  for (int v = 0; v < n; ++v) {
    t.adj_[v] = c.neighbors(v);
    std::sort(t.adj_[v].begin(), t.adj_[v].end());
    t.label_[v] = c.label(v);
  }
  if (!c.connected()) throw InvalidArgument("tree: not connected");
  int nedges = static_cast<int>(c.edges().size());
  if (nedges != n - 1) throw InvalidArgument("tree: contains a cycle");
  for (int v = 0; v < n; ++v) {
    int d = static_cast<int>(t.adj_[v].size());
    if (d == 1) {
      if (t.label_[v].empty()) throw InvalidArgument("tree: unlabeled leaf");
      if (t.by_label_.count(t.label_[v]))
        throw InvalidArgument("tree: duplicate taxon '" + t.label_[v] + "'");
      t.by_label_[t.label_[v]] = v;
      t.leaves_.push_back(v);
    } else if (d == 3) {
      if (!t.label_[v].empty())
        throw InvalidArgument("tree: labeled internal vertex '" + t.label_[v] + "'");
    } else {
      throw InvalidArgument("tree: vertex of degree " + std::to_string(d));
    }
  }
  if (t.leaf_count() < 2) throw InvalidArgument("tree: fewer than 2 leaves");
  return t;
}

int UnrootedTree::leaf_vertex(const Taxon& t) const {
  auto it = by_label_.find(t);
  if (it == by_label_.end()) throw InvalidArgument("tree: unknown taxon '" + t + "'");
  return it->second;
}

std::vector<Taxon> UnrootedTree::taxa() const {
  std::vector<Taxon> out;
  out.reserve(by_label_.size());
  for (const auto& [lab, v] : by_label_) out.push_back(lab);
  return out;
}

std::vector<Edge> UnrootedTree::edges() const {
  std::vector<Edge> out;
  for (int v = 0; v < vertex_count(); ++v)
    for (int u : adj_[v])
      if (v < u) out.emplace_back(v, u);
  std::sort(out.begin(), out.end());
  return out;
}

bool UnrootedTree::has_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= vertex_count() || v >= vertex_count()) return false;
  return std::find(adj_[u].begin(), adj_[u].end(), v) != adj_[u].end();
}

MutableGraph UnrootedTree::to_graph() const {
  MutableGraph g;
  for (int v = 0; v < vertex_count(); ++v) g.add_vertex(label_[v]);
  for (const Edge& e : edges()) g.add_edge(e.a, e.b);
  return g;
}

void require_same_taxa(const UnrootedTree& t1, const UnrootedTree& t2) {
  if (t1.taxa() != t2.taxa())
    throw InvalidArgument("tree pair: leaf sets differ");
}

// Fixed total order on taxon sets: by size, then lexicographically on the
// sorted label sequence. Smaller side becomes side_a.
static bool set_less(const std::vector<Taxon>& x, const std::vector<Taxon>& y) {
  if (x.size() != y.size()) return x.size() < y.size();
  return x < y;
}

Bipartition Bipartition::from_sides(std::vector<Taxon> x, std::vector<Taxon> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  Bipartition b;
  if (set_less(x, y)) {
    b.side_a = std::move(x);
    b.side_b = std::move(y);
  } else {
    b.side_a = std::move(y);
    b.side_b = std::move(x);
  }
  return b;
}

TaxonIndex::TaxonIndex(std::vector<Taxon> sorted_taxa) : taxa_(std::move(sorted_taxa)) {
  for (int i = 0; i < size(); ++i) pos_[taxa_[i]] = i;
}

TaxonIndex TaxonIndex::for_pair(const UnrootedTree& t1, const UnrootedTree& t2) {
  require_same_taxa(t1, t2);
  return TaxonIndex(t1.taxa());
}

TaxonIndex TaxonIndex::for_tree(const UnrootedTree& t) { return TaxonIndex(t.taxa()); }

int TaxonIndex::index_of(const Taxon& t) const {
  auto it = pos_.find(t);
  if (it == pos_.end()) throw InvalidArgument("taxon index: unknown taxon '" + t + "'");
  return it->second;
}

Bits TaxonIndex::bits_of(const std::vector<Taxon>& set) const {
  Bits b(size());
  for (const Taxon& t : set) b.set(index_of(t));
  return b;
}

std::vector<Taxon> TaxonIndex::taxa_of(const Bits& b) const {
  std::vector<Taxon> out;
  for (int i = 0; i < size(); ++i)
    if (b.test(i)) out.push_back(taxa_[i]);
  return out;
}

SplitTable::SplitTable(const UnrootedTree& t, const TaxonIndex& ix)
    : universe_(ix.size()), edges_(t.edges()), side_(edges_.size(), Bits(ix.size())) {
  // Post-order from vertex 0: the split of an edge is the leaf set hanging
  // away from the root side.
  int n = t.vertex_count();
  std::vector<int> parent(n, -1), order;
  order.reserve(n);
  std::vector<int> stack{0};
  std::vector<char> seen(n, 0);
  seen[0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int u : t.neighbors(v))
      if (!seen[u]) {
        seen[u] = 1;
        parent[u] = v;
        stack.push_back(u);
      }
  }
  std::vector<Bits> below(n, Bits(universe_));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    if (t.is_leaf(v)) below[v].set(ix.index_of(t.label(v)));
    if (parent[v] >= 0) {
      int ei = edge_index(Edge(v, parent[v]));
      assert(ei >= 0);
      side_[ei] = below[v];
      below[parent[v]] = below[parent[v]] | below[v];
    }
  }
}

int SplitTable::edge_index(const Edge& e) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || !(*it == e)) return -1;
  return static_cast<int>(it - edges_.begin());
}

Bits SplitTable::canonical(int edge_idx) const {
  const Bits& s = side_[edge_idx];
  return s.test(0) ? s : s.complement();
}

std::vector<Bits> SplitTable::canonical_set() const {
  std::vector<Bits> out;
  out.reserve(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i)
    out.push_back(canonical(static_cast<int>(i)));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Bipartition> bipartitions(const UnrootedTree& t) {
  TaxonIndex ix = TaxonIndex::for_tree(t);
  SplitTable st(t, ix);
  std::vector<Bipartition> out;
  for (std::size_t i = 0; i < st.edges().size(); ++i) {
    const Bits& s = st.split(static_cast<int>(i));
    out.push_back(Bipartition::from_sides(ix.taxa_of(s), ix.taxa_of(s.complement())));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool trees_equal(const UnrootedTree& t1, const UnrootedTree& t2) {
  TaxonIndex ix = TaxonIndex::for_pair(t1, t2);
  return SplitTable(t1, ix).canonical_set() == SplitTable(t2, ix).canonical_set();
}

UnrootedTree restrict_to(const UnrootedTree& t, const std::vector<Taxon>& subset) {
  if (subset.size() < 2) throw InvalidArgument("restrict_to: need at least 2 taxa");
  std::set<std::string> keep(subset.begin(), subset.end());
  for (const Taxon& x : keep)
    if (!t.has_taxon(x)) throw InvalidArgument("restrict_to: unknown taxon '" + x + "'");
  MutableGraph g = t.to_graph();
  g.prune_leaves_outside(keep);
  g.suppress_degree2();
  return UnrootedTree::from_graph(g);
}

UnrootedTree tree_from_bipartitions(const std::vector<Taxon>& taxa,
                                    const std::vector<Bipartition>& splits) {
  std::vector<Taxon> labels = taxa;
  std::sort(labels.begin(), labels.end());
  int n = static_cast<int>(labels.size());
  if (n < 2) throw InvalidArgument("tree_from_bipartitions: need at least 2 taxa");

  // Keep only nontrivial splits, as index sets.
  TaxonIndex ix(labels);
  std::set<Bits> work;
  for (const Bipartition& b : splits) {
    Bits s = ix.bits_of(b.side_a);
    int c = s.count();
    if (c < 2 || c > n - 2) continue;
    if (!s.test(0)) s = s.complement();
    work.insert(s);
  }
  if (static_cast<int>(work.size()) != std::max(0, n - 3))
    throw InvalidArgument("tree_from_bipartitions: split count does not match a binary tree");

  // Peel cherries: a minimal-side split of size 2 is a cherry; collapse it to
  // a meta leaf and recurse on the smaller instance.
  struct Meta {
    Taxon a, b;  // expansion (may themselves be metas)
  };
  std::map<Taxon, Meta> meta;
  int meta_counter = 0;
  std::vector<Bits> active(work.begin(), work.end());
  std::vector<Taxon> cur = labels;

  while (static_cast<int>(cur.size()) > 3) {
    TaxonIndex cix(cur);
    int m = static_cast<int>(cur.size());
    int pick = -1;
    for (std::size_t i = 0; i < active.size(); ++i) {
      int c = active[i].count();
      if (c == 2 || c == m - 2) {
        pick = static_cast<int>(i);
        break;
      }
    }
    if (pick < 0) throw InvalidArgument("tree_from_bipartitions: incompatible split set");
    Bits side = active[pick].count() == 2 ? active[pick] : active[pick].complement();
    auto pair_idx = side.indices();
    Taxon x = cix.taxon(pair_idx[0]), y = cix.taxon(pair_idx[1]);
    Taxon m_label = std::string("\x01m") + std::to_string(meta_counter++);
    meta[m_label] = Meta{x, y};

    std::vector<Taxon> next;
    for (const Taxon& t : cur)
      if (t != x && t != y) next.push_back(t);
    next.push_back(m_label);
    std::sort(next.begin(), next.end());
    TaxonIndex nix(next);

    std::vector<Bits> nact;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (static_cast<int>(i) == pick) continue;
      Bits s = active[i];
      bool hx = s.test(cix.index_of(x)), hy = s.test(cix.index_of(y));
      if (hx != hy) throw InvalidArgument("tree_from_bipartitions: incompatible split set");
      Bits ns(nix.size());
      for (const Taxon& t : cur)
        if (t != x && t != y && s.test(cix.index_of(t))) ns.set(nix.index_of(t));
      if (hx) ns.set(nix.index_of(m_label));
      if (!ns.test(0)) ns = ns.complement();
      nact.push_back(ns);
    }
    cur = std::move(next);
    active = std::move(nact);
  }

  // Base tree on <= 3 labels, then expand metas outward.
  MutableGraph g;
  std::map<Taxon, int> vert;
  if (cur.size() == 2) {
    int a = g.add_vertex(cur[0]), b = g.add_vertex(cur[1]);
    g.add_edge(a, b);
    vert[cur[0]] = a;
    vert[cur[1]] = b;
  } else {
    int c = g.add_vertex();
    for (const Taxon& t : cur) {
      int v = g.add_vertex(t);
      g.add_edge(c, v);
      vert[t] = v;
    }
  }
  // Expand in reverse creation order so inner metas exist when needed.
  for (int i = meta_counter - 1; i >= 0; --i) {
    Taxon m_label = std::string("\x01m") + std::to_string(i);
    const Meta& mm = meta.at(m_label);
    int v = vert.at(m_label);
    g.set_label(v, "");
    int a = g.add_vertex(mm.a), b = g.add_vertex(mm.b);
    g.add_edge(v, a);
    g.add_edge(v, b);
    vert[mm.a] = a;
    vert[mm.b] = b;
    vert.erase(m_label);
  }
  return UnrootedTree::from_graph(g);
}

bool is_chain(const LeafWalkView& g, const std::vector<Taxon>& seq) {
  const auto& adj = *g.adj;
  const auto& by_label = *g.by_label;
  int n = static_cast<int>(seq.size());
  if (n == 0) return false;
  std::vector<int> p(n);
  std::set<Taxon> distinct(seq.begin(), seq.end());
  if (static_cast<int>(distinct.size()) != n) return false;
  for (int i = 0; i < n; ++i) {
    auto it = by_label.find(seq[i]);
    if (it == by_label.end()) return false;
    int v = it->second;
    if (adj[v].size() != 1) return false;
    p[i] = adj[v][0];
  }
  if (n == 1) return true;
  auto adjacent = [&](int u, int v) {
    return std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end();
  };
  // Consecutive neighbors must be adjacent; equality is allowed only at the
  // two ends. All vertices of the walk are distinct apart from those
  // degeneracies.
  for (int i = 0; i + 1 < n; ++i) {
    bool end_pair = (i == 0 || i == n - 2);
    if (p[i] == p[i + 1]) {
      if (!end_pair) return false;
    } else if (!adjacent(p[i], p[i + 1])) {
      return false;
    }
  }
  std::vector<int> walk;
  walk.push_back(p[0]);
  for (int i = 1; i < n; ++i)
    if (p[i] != p[i - 1]) walk.push_back(p[i]);
  std::set<int> uniq(walk.begin(), walk.end());
  return uniq.size() == walk.size();
}

bool is_chain(const UnrootedTree& t, const std::vector<Taxon>& seq) {
  // Build the adjacency view inline; cheap at these sizes.
  std::vector<std::vector<int>> adj(t.vertex_count());
  for (int v = 0; v < t.vertex_count(); ++v) adj[v] = t.neighbors(v);
  std::map<Taxon, int> by_label;
  for (int v : t.leaves()) by_label[t.label(v)] = v;
  LeafWalkView view{&adj, &by_label};
  return is_chain(view, seq);
}

// ---- common pendant subtrees: collapse common cherries to a fixpoint ----

namespace {

struct CherryState {
  MutableGraph g1, g2;
  std::map<Taxon, std::vector<Taxon>> expansion;  // working label -> original taxa
};

// All common cherries present at once, greedily matched into disjoint pairs
// (smallest labels first). Collapsing them round by round keeps the
// decomposition symmetric: identical quartets give both cherries rather than
// a lopsided 3-leaf set. Degenerates at 3 leaves, where every pair of a star
// would qualify, so stop there.
std::vector<std::pair<Taxon, Taxon>> common_cherry_round(const CherryState& st) {
  std::vector<std::pair<Taxon, int>> leaves1;
  for (int v : st.g1.live_vertices())
    if (st.g1.degree(v) == 1 && !st.g1.label(v).empty())
      leaves1.emplace_back(st.g1.label(v), v);
  std::sort(leaves1.begin(), leaves1.end());
  std::map<Taxon, int> l2;
  for (int v : st.g2.live_vertices())
    if (st.g2.degree(v) == 1 && !st.g2.label(v).empty()) l2[st.g2.label(v)] = v;
  std::vector<std::pair<Taxon, Taxon>> out;
  if (leaves1.size() <= 3) return out;
  std::set<Taxon> used;
  for (std::size_t i = 0; i < leaves1.size(); ++i) {
    if (used.count(leaves1[i].first)) continue;
    for (std::size_t j = i + 1; j < leaves1.size(); ++j) {
      if (used.count(leaves1[j].first)) continue;
      int x1 = leaves1[i].second, y1 = leaves1[j].second;
      if (st.g1.neighbors(x1)[0] != st.g1.neighbors(y1)[0]) continue;
      int x2 = l2.at(leaves1[i].first), y2 = l2.at(leaves1[j].first);
      if (st.g2.neighbors(x2)[0] != st.g2.neighbors(y2)[0]) continue;
      out.emplace_back(leaves1[i].first, leaves1[j].first);
      used.insert(leaves1[i].first);
      used.insert(leaves1[j].first);
      break;
    }
  }
  return out;
}

void collapse_cherry(MutableGraph& g, const Taxon& x, const Taxon& y, const Taxon& meta) {
  int vx = -1, vy = -1;
  for (int v : g.live_vertices()) {
    if (g.label(v) == x) vx = v;
    if (g.label(v) == y) vy = v;
  }
  int p = g.neighbors(vx)[0];
  g.remove_vertex(vx);
  g.remove_vertex(vy);
  g.set_label(p, meta);
}

}  // namespace

std::vector<std::vector<Taxon>> maximal_common_pendant_subtrees(const UnrootedTree& t1,
                                                                const UnrootedTree& t2) {
  require_same_taxa(t1, t2);
  CherryState st{t1.to_graph(), t2.to_graph(), {}};
  for (const Taxon& t : t1.taxa()) st.expansion[t] = {t};
  int counter = 0;
  for (;;) {
    auto round = common_cherry_round(st);
    if (round.empty()) break;
    for (const auto& [x, y] : round) {
      Taxon meta = std::string("\x01s") + std::to_string(counter++);
      collapse_cherry(st.g1, x, y, meta);
      collapse_cherry(st.g2, x, y, meta);
      std::vector<Taxon> exp = st.expansion.at(x);
      const auto& ey = st.expansion.at(y);
      exp.insert(exp.end(), ey.begin(), ey.end());
      std::sort(exp.begin(), exp.end());
      st.expansion.erase(x);
      st.expansion.erase(y);
      st.expansion[meta] = std::move(exp);
    }
  }
  std::vector<std::vector<Taxon>> out;
  for (const auto& [label, exp] : st.expansion)
    if (exp.size() >= 2) out.push_back(exp);
  std::sort(out.begin(), out.end());
  return out;
}

// ---- maximal common chains ----

namespace {

struct ChainContext {
  std::vector<std::vector<int>> adj1, adj2;
  std::map<Taxon, int> lab1, lab2;
  std::map<Taxon, std::vector<Taxon>> common_next;
};

ChainContext make_chain_context(const UnrootedTree& t1, const UnrootedTree& t2) {
  ChainContext c;
  c.adj1.resize(t1.vertex_count());
  for (int v = 0; v < t1.vertex_count(); ++v) c.adj1[v] = t1.neighbors(v);
  c.adj2.resize(t2.vertex_count());
  for (int v = 0; v < t2.vertex_count(); ++v) c.adj2[v] = t2.neighbors(v);
  for (int v : t1.leaves()) c.lab1[t1.label(v)] = v;
  for (int v : t2.leaves()) c.lab2[t2.label(v)] = v;

  auto neighbors_of = [](const std::vector<std::vector<int>>& adj,
                         const std::map<Taxon, int>& lab, const Taxon& x) {
    std::set<Taxon> out;
    int vx = lab.at(x);
    int px = adj[vx][0];
    // Leaves whose parent equals px or is adjacent to px.
    auto add_leaves_at = [&](int p) {
      for (int u : adj[p])
        if (adj[u].size() == 1 && u != vx) {
          // find label of u
          for (const auto& [l, v] : lab)
            if (v == u) out.insert(l);
        }
    };
    add_leaves_at(px);
    for (int q : adj[px])
      if (adj[q].size() > 1) add_leaves_at(q);
    return out;
  };

  for (const auto& [x, vx] : c.lab1) {
    std::set<Taxon> n1 = neighbors_of(c.adj1, c.lab1, x);
    std::set<Taxon> n2 = neighbors_of(c.adj2, c.lab2, x);
    std::vector<Taxon> both;
    for (const Taxon& y : n1)
      if (n2.count(y)) both.push_back(y);
    c.common_next[x] = both;
  }
  return c;
}

bool common_chain_ok(const ChainContext& c, const std::vector<Taxon>& seq) {
  LeafWalkView v1{&c.adj1, &c.lab1}, v2{&c.adj2, &c.lab2};
  return is_chain(v1, seq) && is_chain(v2, seq);
}

void extend_chain(const ChainContext& c, std::vector<Taxon>& seq,
                  std::vector<std::vector<Taxon>>& out, int min_len) {
  bool extended = false;
  for (const Taxon& y : c.common_next.at(seq.back())) {
    if (std::find(seq.begin(), seq.end(), y) != seq.end()) continue;
    seq.push_back(y);
    if (common_chain_ok(c, seq)) {
      extended = true;
      extend_chain(c, seq, out, min_len);
    }
    seq.pop_back();
  }
  if (extended || static_cast<int>(seq.size()) < min_len) return;
  // Back-terminal; keep only if the front cannot be extended either (the
  // longer chain is reached from another start).
  for (const Taxon& z : c.common_next.at(seq.front())) {
    if (std::find(seq.begin(), seq.end(), z) != seq.end()) continue;
    std::vector<Taxon> longer;
    longer.reserve(seq.size() + 1);
    longer.push_back(z);
    longer.insert(longer.end(), seq.begin(), seq.end());
    if (common_chain_ok(c, longer)) return;
  }
  out.push_back(seq);
}

}  // namespace

std::vector<CommonChain> maximal_common_chains(const UnrootedTree& t1,
                                               const UnrootedTree& t2, int min_len) {
  require_same_taxa(t1, t2);
  if (min_len < 2) throw InvalidArgument("maximal_common_chains: min_len must be >= 2");
  ChainContext c = make_chain_context(t1, t2);

  std::vector<std::vector<Taxon>> raw;
  for (const auto& [x, nexts] : c.common_next) {
    std::vector<Taxon> seq{x};
    extend_chain(c, seq, raw, min_len);
  }
  // A chain starting (or ending) with a pendant pair in both trees admits the
  // swapped pair as an equally valid sequence; canonicalize over that orbit
  // plus whole-chain reversal, then dedup.
  auto pendant_both = [&](const Taxon& a, const Taxon& b) {
    return c.adj1[c.lab1.at(a)][0] == c.adj1[c.lab1.at(b)][0] &&
           c.adj2[c.lab2.at(a)][0] == c.adj2[c.lab2.at(b)][0];
  };
  auto orbit_min = [&](const std::vector<Taxon>& s) {
    std::set<std::vector<Taxon>> orbit{s};
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<std::vector<Taxon>> add;
      for (const auto& v : orbit) {
        std::vector<Taxon> r(v.rbegin(), v.rend());
        if (!orbit.count(r)) add.push_back(r);
        if (v.size() >= 2 && pendant_both(v[0], v[1])) {
          std::vector<Taxon> f = v;
          std::swap(f[0], f[1]);
          if (!orbit.count(f)) add.push_back(f);
        }
        if (v.size() >= 2 && pendant_both(v[v.size() - 2], v[v.size() - 1])) {
          std::vector<Taxon> f = v;
          std::swap(f[f.size() - 2], f[f.size() - 1]);
          if (!orbit.count(f)) add.push_back(f);
        }
      }
      for (auto& x : add) {
        orbit.insert(std::move(x));
        grew = true;
      }
    }
    return *orbit.begin();
  };
  std::set<std::vector<Taxon>> canon;
  for (auto& s : raw) canon.insert(orbit_min(s));
  std::vector<std::vector<Taxon>> chains(canon.begin(), canon.end());
  std::vector<CommonChain> out;
  for (const auto& s : chains) {
    CommonChain cc;
    cc.leaves = s;
    auto pend = [](const std::vector<std::vector<int>>& adj, const std::map<Taxon, int>& lab,
                   const Taxon& a, const Taxon& b) {
      return adj[lab.at(a)][0] == adj[lab.at(b)][0];
    };
    int n = static_cast<int>(s.size());
    cc.pendant_head_t1 = pend(c.adj1, c.lab1, s[0], s[1]);
    cc.pendant_tail_t1 = pend(c.adj1, c.lab1, s[n - 2], s[n - 1]);
    cc.pendant_head_t2 = pend(c.adj2, c.lab2, s[0], s[1]);
    cc.pendant_tail_t2 = pend(c.adj2, c.lab2, s[n - 2], s[n - 1]);
    out.push_back(std::move(cc));
  }
  std::sort(out.begin(), out.end(),
            [](const CommonChain& a, const CommonChain& b) { return a.leaves < b.leaves; });
  return out;
}

std::vector<std::vector<Taxon>> common_nontrivial_clusters(const UnrootedTree& t1,
                                                           const UnrootedTree& t2) {
  TaxonIndex ix = TaxonIndex::for_pair(t1, t2);
  int n = ix.size();
  SplitTable s1(t1, ix), s2(t2, ix);
  std::vector<Bits> set2 = s2.canonical_set();
  std::vector<std::vector<Taxon>> out;
  std::set<Bits> seen;
  for (std::size_t i = 0; i < s1.edges().size(); ++i) {
    Bits c = s1.canonical(static_cast<int>(i));
    int sz = c.count();
    if (sz < 2 || sz > n - 2) continue;
    if (!std::binary_search(set2.begin(), set2.end(), c)) continue;
    if (!seen.insert(c).second) continue;
    Bipartition b = Bipartition::from_sides(ix.taxa_of(c), ix.taxa_of(c.complement()));
    out.push_back(b.side_a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace tbrkit
