#include "tbrkit/tbr.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "tbrkit/errors.hpp"

namespace tbrkit {

namespace {

// Component vertex sets after cutting one edge and suppressing the stubs.
struct CutParts {
  MutableGraph g;
  int rep1 = -1, rep2 = -1;  // surviving vertices on each side
};

CutParts cut_and_suppress(const UnrootedTree& t, const Edge& cut) {
  if (!t.has_edge(cut.a, cut.b)) throw InvalidArgument("apply_tbr: cut edge not in tree");
  CutParts parts;
  parts.g = t.to_graph();
  parts.g.remove_edge(cut.a, cut.b);
  parts.rep1 = cut.a;
  parts.rep2 = cut.b;
  for (int* rep : {&parts.rep1, &parts.rep2}) {
    int v = *rep;
    if (parts.g.label(v).empty() && parts.g.degree(v) == 2) {
      *rep = parts.g.neighbors(v)[0];
      parts.g.suppress_vertex(v);
    }
  }
  return parts;
}

std::set<int> component_of(const MutableGraph& g, int start) {
  std::set<int> comp{start};
  std::vector<int> stack{start};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : g.neighbors(v))
      if (comp.insert(u).second) stack.push_back(u);
  }
  return comp;
}

// Subdivides the attachment edge (or takes the isolated vertex) and returns
// the endpoint for the reconnecting edge.
int attachment_point(MutableGraph& g, const std::set<int>& comp,
                     const std::optional<Edge>& attach) {
  if (!attach) {
    if (comp.size() != 1)
      throw InvalidArgument("apply_tbr: component has edges, attachment required");
    return *comp.begin();
  }
  if (!comp.count(attach->a) || !comp.count(attach->b) ||
      !g.has_edge(attach->a, attach->b))
    throw InvalidArgument("apply_tbr: attachment edge not in component");
  g.remove_edge(attach->a, attach->b);
  int mid = g.add_vertex();
  g.add_edge(attach->a, mid);
  g.add_edge(mid, attach->b);
  return mid;
}

}  // namespace

UnrootedTree apply_tbr(const UnrootedTree& t, const TbrMove& move) {
  CutParts parts = cut_and_suppress(t, move.cut);
  std::set<int> comp1 = component_of(parts.g, parts.rep1);
  std::set<int> comp2 = component_of(parts.g, parts.rep2);
  int v1 = attachment_point(parts.g, comp1, move.attach1);
  int v2 = attachment_point(parts.g, comp2, move.attach2);
  parts.g.add_edge(v1, v2);
  return UnrootedTree::from_graph(parts.g);
}

std::string canonical_encoding(const UnrootedTree& t) {
  TaxonIndex ix = TaxonIndex::for_tree(t);
  SplitTable st(t, ix);
  std::ostringstream out;
  for (const Bits& b : st.canonical_set()) {
    for (int i : b.indices()) out << i << ",";
    out << ";";
  }
  return out.str();
}

std::vector<UnrootedTree> tbr_neighbors(const UnrootedTree& t) {
  if (t.leaf_count() < 4) throw InvalidArgument("tbr_neighbors: need at least 4 leaves");
  std::string self = canonical_encoding(t);
  std::map<std::string, UnrootedTree> found;
  for (const Edge& cut : t.edges()) {
    CutParts base = cut_and_suppress(t, cut);
    std::set<int> comp1 = component_of(base.g, base.rep1);
    std::set<int> comp2 = component_of(base.g, base.rep2);
    auto targets = [&base](const std::set<int>& comp) {
      std::vector<std::optional<Edge>> out;
      if (comp.size() == 1) {
        out.push_back(std::nullopt);
        return out;
      }
      for (int v : comp)
        for (int u : base.g.neighbors(v))
          if (v < u) out.emplace_back(Edge(v, u));
      return out;
    };
    for (const auto& a1 : targets(comp1)) {
      for (const auto& a2 : targets(comp2)) {
        MutableGraph g = base.g;
        std::set<int> c1 = comp1, c2 = comp2;
        int v1 = attachment_point(g, c1, a1);
        int v2 = attachment_point(g, c2, a2);
        g.add_edge(v1, v2);
        UnrootedTree nb = UnrootedTree::from_graph(g);
        std::string key = canonical_encoding(nb);
        if (key == self) continue;
        found.emplace(std::move(key), std::move(nb));
      }
    }
  }
  std::vector<UnrootedTree> out;
  out.reserve(found.size());
  for (auto& [k, tree] : found) out.push_back(std::move(tree));
  return out;
}

std::optional<int> tbr_distance_bfs(const UnrootedTree& t1, const UnrootedTree& t2,
                                    int max_k, std::uint64_t max_visited) {
  require_same_taxa(t1, t2);
  std::string goal = canonical_encoding(t2);
  if (canonical_encoding(t1) == goal) return 0;
  if (max_k <= 0) return std::nullopt;
  std::unordered_set<std::string> seen{canonical_encoding(t1)};
  std::deque<std::pair<UnrootedTree, int>> frontier{{t1, 0}};
  std::uint64_t visited = 0;
  while (!frontier.empty()) {
    auto [tree, depth] = std::move(frontier.front());
    frontier.pop_front();
    if (++visited > max_visited)
      throw BudgetExceeded("tbr_distance_bfs: visit budget exhausted");
    for (UnrootedTree& nb : tbr_neighbors(tree)) {
      std::string key = canonical_encoding(nb);
      if (key == goal) return depth + 1;
      if (depth + 1 >= max_k) continue;
      if (seen.insert(key).second) frontier.emplace_back(std::move(nb), depth + 1);
    }
  }
  return std::nullopt;
}

// ---- minimum agreement forest search ----

namespace {

struct PairView {
  const UnrootedTree& t1;
  const UnrootedTree& t2;
  TaxonIndex ix;
  SplitTable s1, s2;
  std::vector<Edge> edges1;
  std::vector<int> parent1;           // t1 rooted at vertex 0
  std::vector<int> leaf_vertex1;      // taxon idx -> t1 vertex
  std::vector<int> leaf_vertex2;      // taxon idx -> t2 vertex
  std::vector<int> leaf_of2;          // t2 vertex -> taxon idx or -1

  PairView(const UnrootedTree& a, const UnrootedTree& b)
      : t1(a), t2(b), ix(TaxonIndex::for_pair(a, b)), s1(a, ix), s2(b, ix),
        edges1(a.edges()) {
    parent1.assign(t1.vertex_count(), -1);
    std::vector<int> stack{0};
    std::vector<char> seen(t1.vertex_count(), 0);
    seen[0] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : t1.neighbors(v))
        if (!seen[u]) {
          seen[u] = 1;
          parent1[u] = v;
          stack.push_back(u);
        }
    }
    leaf_vertex1.resize(ix.size());
    leaf_vertex2.resize(ix.size());
    leaf_of2.assign(t2.vertex_count(), -1);
    for (int i = 0; i < ix.size(); ++i) {
      leaf_vertex1[i] = t1.leaf_vertex(ix.taxon(i));
      leaf_vertex2[i] = t2.leaf_vertex(ix.taxon(i));
      leaf_of2[leaf_vertex2[i]] = i;
    }
  }

  int edge_id1(const Edge& e) const { return s1.edge_index(e); }

  // Edge ids along the t1 path between two leaves (by taxon index).
  std::vector<int> path_edges1(int ta, int tb) const {
    int a = leaf_vertex1[ta], b = leaf_vertex1[tb];
    std::vector<char> mark(t1.vertex_count(), 0);
    for (int v = a; v != -1; v = parent1[v]) mark[v] = 1;
    int meet = b;
    while (!mark[meet]) meet = parent1[meet];
    std::vector<int> out;
    for (int v = a; v != meet; v = parent1[v]) out.push_back(edge_id1(Edge(v, parent1[v])));
    for (int v = b; v != meet; v = parent1[v]) out.push_back(edge_id1(Edge(v, parent1[v])));
    return out;
  }

  // Does ab|cd hold in the given tree (1 or 2)?
  bool quartet_split(int which, int a, int b, int c, int d) const {
    const SplitTable& st = which == 1 ? s1 : s2;
    for (std::size_t i = 0; i < st.edges().size(); ++i) {
      const Bits& s = st.split(static_cast<int>(i));
      bool sa = s.test(a), sb = s.test(b), sc = s.test(c), sd = s.test(d);
      if (sa == sb && sc == sd && sa != sc) return true;
    }
    return false;
  }
};

struct Violation {
  std::vector<int> candidates;  // t1 edge ids that can fix it
};

struct Evaluation {
  bool valid = false;
  std::vector<Bits> blocks;
  std::optional<Violation> violation;
};

// Steiner vertices of a leaf set in t2: prune non-block leaves until only
// the spanned subtree remains.
std::vector<int> steiner2(const PairView& pv, const Bits& block) {
  int n = pv.t2.vertex_count();
  std::vector<int> deg(n, 0);
  std::vector<char> removed(n, 0);
  for (int v = 0; v < n; ++v) deg[v] = static_cast<int>(pv.t2.neighbors(v).size());
  std::vector<int> queue;
  for (int v = 0; v < n; ++v) {
    int taxon = pv.leaf_of2[v];
    if (deg[v] == 1 && (taxon < 0 || !block.test(taxon))) queue.push_back(v);
  }
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    removed[v] = 1;
    for (int u : pv.t2.neighbors(v)) {
      if (removed[u]) continue;
      if (--deg[u] == 1) {
        int taxon = pv.leaf_of2[u];
        if (taxon < 0 || !block.test(taxon)) queue.push_back(u);
      }
    }
  }
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (!removed[v]) out.push_back(v);
  return out;
}

// Two block leaves whose t2 path passes through vertex v.
std::pair<int, int> leaves_through(const PairView& pv, const Bits& block, int v) {
  int own = pv.leaf_of2[v];
  if (own >= 0 && block.test(own)) {
    for (int other : block.indices())
      if (other != own) return {own, other};
    return {own, -1};  // blocks here always have >= 2 leaves
  }
  // First block leaf found in each direction away from v.
  std::vector<int> per_branch;
  for (int u : pv.t2.neighbors(v)) {
    int found = -1;
    std::vector<int> stack{u};
    std::set<int> seen{v, u};
    while (!stack.empty() && found < 0) {
      int w = stack.back();
      stack.pop_back();
      int taxon = pv.leaf_of2[w];
      if (taxon >= 0 && block.test(taxon)) {
        found = taxon;
        break;
      }
      for (int x : pv.t2.neighbors(w))
        if (!seen.count(x)) {
          seen.insert(x);
          stack.push_back(x);
        }
    }
    if (found >= 0) per_branch.push_back(found);
    if (per_branch.size() == 2) break;
  }
  assert(per_branch.size() == 2);
  return {per_branch[0], per_branch[1]};
}

Evaluation evaluate(const PairView& pv, const std::vector<int>& cuts) {
  Evaluation ev;

  // Blocks: leaf sets of the components of t1 minus the cut edges.
  int n1 = pv.t1.vertex_count();
  std::vector<char> is_cut(pv.edges1.size(), 0);
  for (int e : cuts) is_cut[e] = 1;
  std::vector<int> comp(n1, -1);
  int ncomp = 0;
  for (int start = 0; start < n1; ++start) {
    if (comp[start] >= 0) continue;
    std::vector<int> stack{start};
    comp[start] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : pv.t1.neighbors(v)) {
        int eid = pv.edge_id1(Edge(v, u));
        if (is_cut[eid] || comp[u] >= 0) continue;
        comp[u] = ncomp;
        stack.push_back(u);
      }
    }
    ++ncomp;
  }
  std::map<int, Bits> by_comp;
  for (int i = 0; i < pv.ix.size(); ++i) {
    int c = comp[pv.leaf_vertex1[i]];
    auto [it, fresh] = by_comp.try_emplace(c, Bits(pv.ix.size()));
    it->second.set(i);
  }
  for (auto& [c, bits] : by_comp) ev.blocks.push_back(bits);
  std::sort(ev.blocks.begin(), ev.blocks.end(),
            [](const Bits& a, const Bits& b) { return a.lowest() < b.lowest(); });

  auto not_cut_path = [&](std::vector<int> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<int> out;
    for (int e : edges)
      if (!is_cut[e]) out.push_back(e);
    return out;
  };

  // Topology check per block, via restricted split sets.
  for (const Bits& block : ev.blocks) {
    int size = block.count();
    if (size < 4) continue;
    auto restricted = [&](const SplitTable& st) {
      std::set<Bits> out;
      for (std::size_t i = 0; i < st.edges().size(); ++i) {
        Bits s = st.split(static_cast<int>(i)) & block;
        int c = s.count();
        if (c < 2 || c > size - 2) continue;
        if (!s.test(block.lowest())) s = block.and_not(s);
        out.insert(s);
      }
      return out;
    };
    std::set<Bits> r1 = restricted(pv.s1);
    std::set<Bits> r2 = restricted(pv.s2);
    if (r1 == r2) continue;

    // sigma: a canonical split present in exactly one restriction.
    Bits sigma(pv.ix.size());
    int owner = 0;
    for (const Bits& s : r1)
      if (!r2.count(s)) {
        sigma = s;
        owner = 1;
        break;
      }
    if (owner == 0)
      for (const Bits& s : r2)
        if (!r1.count(s)) {
          sigma = s;
          owner = 2;
          break;
        }
    assert(owner != 0);
    int other = owner == 1 ? 2 : 1;
    std::vector<int> P = sigma.indices();
    std::vector<int> Q = block.and_not(sigma).indices();
    // Quartet witnessing that sigma is absent from the other tree. The first
    // crossing quartet is normally within the first few pairs; a scan cap
    // falls back to the whole block, which stays complete.
    int wa = -1, wb = -1, wc = -1, wd = -1;
    long scanned = 0;
    for (std::size_t i = 0; i < P.size() && wa < 0; ++i)
      for (std::size_t j = i + 1; j < P.size() && wa < 0; ++j)
        for (std::size_t k = 0; k < Q.size() && wa < 0; ++k)
          for (std::size_t l = k + 1; l < Q.size() && wa < 0; ++l) {
            if (++scanned > 100000) goto scan_done;
            if (!pv.quartet_split(other, P[i], P[j], Q[k], Q[l])) {
              wa = P[i];
              wb = P[j];
              wc = Q[k];
              wd = Q[l];
            }
          }
  scan_done:
    std::vector<int> cand;
    if (wa >= 0) {
      cand = pv.path_edges1(wa, wb);
      for (int e : pv.path_edges1(wc, wd)) cand.push_back(e);
      for (int e : pv.path_edges1(wa, wc)) cand.push_back(e);
    } else {
      // Every t1 edge splitting the block can fix it.
      for (std::size_t i = 0; i < pv.s1.edges().size(); ++i) {
        int c = (pv.s1.split(static_cast<int>(i)) & block).count();
        if (c >= 1 && c < block.count()) cand.push_back(static_cast<int>(i));
      }
    }
    ev.violation = Violation{not_cut_path(std::move(cand))};
    return ev;
  }

  // Vertex-disjointness of the t2 embeddings.
  std::vector<int> owner(pv.t2.vertex_count(), -1);
  for (std::size_t bi = 0; bi < ev.blocks.size(); ++bi) {
    for (int v : steiner2(pv, ev.blocks[bi])) {
      if (owner[v] < 0) {
        owner[v] = static_cast<int>(bi);
        continue;
      }
      const Bits& b1 = ev.blocks[owner[v]];
      const Bits& b2 = ev.blocks[bi];
      std::vector<int> cand;
      if (b1.count() >= 2) {
        auto [x, y] = leaves_through(pv, b1, v);
        for (int e : pv.path_edges1(x, y)) cand.push_back(e);
      }
      if (b2.count() >= 2) {
        auto [x, y] = leaves_through(pv, b2, v);
        for (int e : pv.path_edges1(x, y)) cand.push_back(e);
      }
      assert(!cand.empty());
      ev.violation = Violation{not_cut_path(std::move(cand))};
      return ev;
    }
  }

  ev.valid = true;
  return ev;
}

struct Search {
  const PairView& pv;
  const SolveOptions& opts;
  std::uint64_t nodes = 0;
  std::set<std::vector<int>> visited;
  std::optional<std::vector<Bits>> solution;

  Search(const PairView& p, const SolveOptions& o) : pv(p), opts(o) {}

  bool dfs(std::vector<int>& cuts, int depth_left) {
    if (++nodes > opts.max_nodes) throw BudgetExceeded("tbr_distance_maf: node budget");
    Evaluation ev = evaluate(pv, cuts);
    if (ev.valid) {
      solution = ev.blocks;
      return true;
    }
    if (depth_left == 0) return false;
    for (int e : ev.violation->candidates) {
      std::vector<int> next = cuts;
      next.insert(std::lower_bound(next.begin(), next.end(), e), e);
      if (!visited.insert(next).second) continue;
      if (dfs(next, depth_left - 1)) return true;
    }
    return false;
  }
};

AgreementForest forest_from_blocks(const PairView& pv, const std::vector<Bits>& blocks) {
  AgreementForest f;
  for (const Bits& b : blocks) f.components.push_back(pv.ix.taxa_of(b));
  std::sort(f.components.begin(), f.components.end());
  return f;
}

}  // namespace

SolveResult tbr_distance_maf(const UnrootedTree& t1, const UnrootedTree& t2,
                             const SolveOptions& opts) {
  require_same_taxa(t1, t2);
  PairView pv(t1, t2);
  SolveResult res;
  int max_depth = std::max(0, t1.leaf_count() - 1);
  Search search(pv, opts);
  try {
    for (int limit = 0; limit <= max_depth; ++limit) {
      search.visited.clear();
      std::vector<int> cuts;
      if (search.dfs(cuts, limit)) {
        res.exact = true;
        res.distance = limit;
        res.lower = res.upper = limit;
        res.forest = forest_from_blocks(pv, *search.solution);
        res.nodes = search.nodes;
        return res;
      }
      res.lower = limit + 1;
    }
    throw Error("tbr_distance_maf: search space exhausted without a forest");
  } catch (const BudgetExceeded&) {
    res.exact = false;
    res.nodes = search.nodes;
    // Greedy completion for an upper bound: always take the first candidate.
    std::vector<int> cuts;
    for (;;) {
      Evaluation ev = evaluate(pv, cuts);
      if (ev.valid) {
        res.upper = static_cast<int>(ev.blocks.size()) - 1;
        res.forest = forest_from_blocks(pv, ev.blocks);
        break;
      }
      int e = ev.violation->candidates.at(0);
      cuts.insert(std::lower_bound(cuts.begin(), cuts.end(), e), e);
    }
    return res;
  }
}

DistanceCertificate tbr_distance(const UnrootedTree& t1, const UnrootedTree& t2,
                                 const SolveOptions& opts) {
  KernelResult kernel = kernelize(t1, t2, subtree_chain_rules());
  DistanceCertificate cert{-1, kernel.t1, kernel.t2, std::move(kernel.trace), {}};
  cert.solve = tbr_distance_maf(cert.kernel1, cert.kernel2, opts);
  if (!cert.solve.exact)
    throw BudgetExceeded("tbr_distance: solver budget exhausted; bracket [" +
                         std::to_string(cert.solve.lower) + "," +
                         std::to_string(cert.solve.upper) + "]");
  cert.distance = cert.solve.distance;
  return cert;
}

std::string serialize_certificate(const DistanceCertificate& cert) {
  std::ostringstream out;
  out << "distance " << cert.distance << "\n";
  out << "kernel_leaves " << cert.kernel1.leaf_count() << "\n";
  out << "forest_components " << cert.solve.forest.components.size() << "\n";
  for (const auto& comp : cert.solve.forest.components) {
    out << "component";
    for (const auto& x : comp) out << " " << x;
    out << "\n";
  }
  out << "trace_steps " << cert.trace.steps.size() << "\n";
  return out.str();
}

}  // namespace tbrkit
