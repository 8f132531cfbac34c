#include "tbrkit/parsimony.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

#include "tbrkit/errors.hpp"

namespace tbrkit {

FitchResult fitch_score(const UnrootedTree& t, const Character& f) {
  for (const Taxon& x : t.taxa())
    if (!f.states.count(x))
      throw InvalidArgument("fitch_score: no state for taxon '" + x + "'");

  int n = t.vertex_count();
  FitchResult res;
  res.extension.assign(n, State());

  if (t.leaf_count() == 2) {
    auto taxa = t.taxa();
    const State& a = f.states.at(taxa[0]);
    const State& b = f.states.at(taxa[1]);
    res.extension[t.leaf_vertex(taxa[0])] = a;
    res.extension[t.leaf_vertex(taxa[1])] = b;
    res.score = a == b ? 0 : 1;
    return res;
  }

  // Root on the pendant edge of the smallest leaf: a virtual degree-2 root
  // between the leaf and its neighbor keeps every combination binary, so the
  // top-down pass yields an extension that attains the score.
  int root_leaf = t.leaf_vertex(t.taxa()[0]);
  int root = t.neighbors(root_leaf)[0];

  std::vector<int> parent(n, -1), order;
  order.reserve(n);
  std::vector<int> stack{root};
  std::vector<char> seen(n, 0);
  seen[root] = 1;
  seen[root_leaf] = 1;  // handled at the virtual root
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

  std::vector<std::set<State>> sets(n);
  int score = 0;
  auto combine = [&score](const std::set<State>& a, const std::set<State>& b) {
    std::set<State> inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(inter, inter.begin()));
    if (!inter.empty()) return inter;
    ++score;
    std::set<State> uni;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                   std::inserter(uni, uni.begin()));
    return uni;
  };
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    if (t.is_leaf(v)) {
      sets[v] = {f.states.at(t.label(v))};
      continue;
    }
    std::vector<int> kids;
    for (int u : t.neighbors(v))
      if (u != parent[v] && u != root_leaf) kids.push_back(u);
    assert(kids.size() == 2);
    sets[v] = combine(sets[kids[0]], sets[kids[1]]);
  }
  std::set<State> leaf_set{f.states.at(t.label(root_leaf))};
  std::set<State> root_set = combine(leaf_set, sets[root]);

  res.extension[root_leaf] = *leaf_set.begin();
  State at_virtual_root = *root_set.begin();
  for (int v : order) {
    const State& up = parent[v] < 0 ? at_virtual_root : res.extension[parent[v]];
    res.extension[v] = sets[v].count(up) ? up : *sets[v].begin();
  }
  res.score = score;
  return res;
}

Character bipartition_character(const UnrootedTree& t, const Edge& e) {
  if (!t.has_edge(e.a, e.b)) throw InvalidArgument("bipartition_character: no such edge");
  TaxonIndex ix = TaxonIndex::for_tree(t);
  SplitTable st(t, ix);
  int idx = st.edge_index(e);
  assert(idx >= 0);
  const Bits& side = st.split(idx);
  Character f;
  for (int i = 0; i < ix.size(); ++i) f.states[ix.taxon(i)] = side.test(i) ? "1" : "0";
  return f;
}

MpLowerBound mp_lower_bound(const UnrootedTree& t1, const UnrootedTree& t2,
                            bool exhaustive_binary) {
  require_same_taxa(t1, t2);
  MpLowerBound best;
  best.bound = 0;
  auto consider = [&](const Character& f) {
    int d = std::abs(fitch_score(t1, f).score - fitch_score(t2, f).score);
    if (d > best.bound) {
      best.bound = d;
      best.witness = f;
    }
  };
  for (const Edge& e : t1.edges()) consider(bipartition_character(t1, e));
  for (const Edge& e : t2.edges()) consider(bipartition_character(t2, e));
  if (exhaustive_binary) {
    std::vector<Taxon> taxa = t1.taxa();
    int n = static_cast<int>(taxa.size());
    if (n > 16)
      throw InvalidArgument("mp_lower_bound: exhaustive mode limited to 16 taxa");
    for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
      Character f;
      for (int i = 0; i < n; ++i)
        f.states[taxa[i]] = (i > 0 && (mask >> (i - 1)) & 1) ? "1" : "0";
      consider(f);
    }
  }
  if (best.bound == 0 && !t1.taxa().empty()) {
    // Deterministic witness even when the bound is trivial.
    best.witness = bipartition_character(t1, t1.edges()[0]);
  }
  return best;
}

std::string serialize_character(const Character& f) {
  std::ostringstream out;
  for (const auto& [taxon, state] : f.states) out << taxon << "\t" << state << "\n";
  return out.str();
}

Character parse_character(const std::string& text) {
  Character f;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("character: missing tab on line " + std::to_string(lineno));
    std::string taxon = line.substr(0, tab);
    std::string state = line.substr(tab + 1);
    if (taxon.empty() || state.empty())
      throw ParseError("character: empty field on line " + std::to_string(lineno));
    if (f.states.count(taxon))
      throw ParseError("character: duplicate taxon on line " + std::to_string(lineno));
    f.states[taxon] = state;
  }
  return f;
}

}  // namespace tbrkit
