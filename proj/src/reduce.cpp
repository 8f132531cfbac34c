#include "tbrkit/reduce.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "tbrkit/errors.hpp"

namespace tbrkit {

namespace {

bool reserved_index(const Taxon& label, int* idx) {
  if (label.size() < 3 || label[0] != '$' || label[1] != 'R') return false;
  for (std::size_t i = 2; i < label.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(label[i]))) return false;
  *idx = std::stoi(label.substr(2));
  return true;
}

}  // namespace

Taxon ReductionTrace::fresh_label() { return "$R" + std::to_string(fresh_counter++); }

void ReductionTrace::seed_from(const UnrootedTree& t1, const UnrootedTree& t2) {
  for (const UnrootedTree* t : {&t1, &t2})
    for (const Taxon& x : t->taxa()) {
      int idx = 0;
      if (reserved_index(x, &idx)) fresh_counter = std::max(fresh_counter, idx + 1);
    }
}

UnrootedTree replace_pendant_set(const UnrootedTree& t, const std::vector<Taxon>& set,
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
  if (cut < 0) throw InvalidArgument("replace_pendant_set: set is not a cluster");
  Edge e = st.edges()[cut];
  // Identify which endpoint hangs on the set side, drop that component, and
  // grow the fresh leaf at the surviving endpoint.
  MutableGraph g = t.to_graph();
  g.remove_edge(e.a, e.b);
  std::set<std::string> keep(set.begin(), set.end());
  auto side_labels = [&](int start) {
    std::set<std::string> out;
    std::vector<int> stack{start};
    std::set<int> seen{start};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (!g.label(v).empty()) out.insert(g.label(v));
      for (int u : g.neighbors(v))
        if (!seen.count(u)) {
          seen.insert(u);
          stack.push_back(u);
        }
    }
    return out;
  };
  int inside = side_labels(e.a) == keep ? e.a : e.b;
  int outside = inside == e.a ? e.b : e.a;
  // Remove the whole inside component.
  std::vector<int> stack{inside};
  std::set<int> comp{inside};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : g.neighbors(v))
      if (!comp.count(u)) {
        comp.insert(u);
        stack.push_back(u);
      }
  }
  for (int v : comp) g.remove_vertex(v);
  int leaf = g.add_vertex(fresh);
  g.add_edge(outside, leaf);
  return UnrootedTree::from_graph(g);
}

UnrootedTree replace_chain_prefix(const UnrootedTree& t, const std::vector<Taxon>& chain,
                                  const std::vector<Taxon>& fresh3) {
  assert(chain.size() >= 4 && fresh3.size() == 3);
  MutableGraph g = t.to_graph();
  std::set<std::string> gone(chain.begin() + 3, chain.end());
  for (int v = 0; v < g.size(); ++v) {
    if (!g.alive(v) || g.label(v).empty()) continue;
    auto it = std::find(chain.begin(), chain.begin() + 3, g.label(v));
    if (it != chain.begin() + 3)
      g.set_label(v, fresh3[it - chain.begin()]);
    else if (gone.count(g.label(v)))
      g.remove_vertex(v);
  }
  // Attachment vertices of the removed leaves become unlabeled leaves or
  // degree-2 vertices; trim and suppress.
  std::set<std::string> keep;
  for (int v = 0; v < g.size(); ++v)
    if (g.alive(v) && !g.label(v).empty()) keep.insert(g.label(v));
  g.prune_leaves_outside(keep);
  g.suppress_degree2();
  return UnrootedTree::from_graph(g);
}

std::pair<UnrootedTree, UnrootedTree> reduce_subtrees(const UnrootedTree& t1,
                                                      const UnrootedTree& t2,
                                                      ReductionTrace& trace) {
  require_same_taxa(t1, t2);
  UnrootedTree a = t1, b = t2;
  for (;;) {
    auto sets = maximal_common_pendant_subtrees(a, b);
    if (sets.empty()) return {a, b};
    for (const auto& set : sets) {
      Taxon fresh = trace.fresh_label();
      a = replace_pendant_set(a, set, fresh);
      b = replace_pendant_set(b, set, fresh);
      ReductionStep step;
      step.kind = Rule::Subtree;
      step.removed = set;
      step.introduced = {fresh};
      trace.steps.push_back(std::move(step));
    }
  }
}

std::pair<UnrootedTree, UnrootedTree> reduce_chains(const UnrootedTree& t1,
                                                    const UnrootedTree& t2,
                                                    ReductionTrace& trace) {
  require_same_taxa(t1, t2);
  if (!maximal_common_pendant_subtrees(t1, t2).empty())
    throw InvalidArgument("reduce_chains: pair is not subtree reduced");
  UnrootedTree a = t1, b = t2;
  for (;;) {
    auto chains = maximal_common_chains(a, b, 4);
    if (chains.empty()) return {a, b};
    const CommonChain& c = chains.front();
    std::vector<Taxon> fresh3;
    for (int i = 0; i < 3; ++i) fresh3.push_back(trace.fresh_label());
    a = replace_chain_prefix(a, c.leaves, fresh3);
    b = replace_chain_prefix(b, c.leaves, fresh3);
    ReductionStep step;
    step.kind = Rule::Chain;
    step.removed = c.leaves;
    step.introduced = fresh3;
    step.pendant_t1 = {c.pendant_head_t1, c.pendant_tail_t1};
    step.pendant_t2 = {c.pendant_head_t2, c.pendant_tail_t2};
    trace.steps.push_back(std::move(step));
  }
}

namespace {

std::optional<std::vector<Taxon>> minimal_common_cluster(const UnrootedTree& a,
                                                         const UnrootedTree& b) {
  auto clusters = common_nontrivial_clusters(a, b);
  if (clusters.empty()) return std::nullopt;
  auto best = clusters.front();
  for (const auto& c : clusters)
    if (c.size() < best.size() || (c.size() == best.size() && c < best)) best = c;
  return best;
}

}  // namespace

KernelResult kernelize(const UnrootedTree& t1, const UnrootedTree& t2,
                       const RuleSet& rules) {
  require_same_taxa(t1, t2);
  KernelResult r{t1, t2, {}};
  r.trace.seed_from(t1, t2);
  bool changed = true;
  while (changed) {
    changed = false;
    std::size_t before = r.trace.steps.size();
    if (rules.count(Rule::Subtree))
      std::tie(r.t1, r.t2) = reduce_subtrees(r.t1, r.t2, r.trace);
    if (rules.count(Rule::Chain))
      std::tie(r.t1, r.t2) = reduce_chains(r.t1, r.t2, r.trace);
    if (r.trace.steps.size() != before) changed = true;
    if (rules.count(Rule::Cluster)) {
      auto cluster = minimal_common_cluster(r.t1, r.t2);
      if (cluster) {
        Taxon marker = r.trace.fresh_label();
        ReductionStep step;
        step.kind = Rule::Cluster;
        step.removed = *cluster;
        step.introduced = {marker};
        r.trace.steps.push_back(std::move(step));
        r.t1 = replace_pendant_set(r.t1, *cluster, marker);
        r.t2 = replace_pendant_set(r.t2, *cluster, marker);
        changed = true;
      }
    }
  }
  return r;
}

bool is_reduced(const UnrootedTree& t1, const UnrootedTree& t2, const RuleSet& rules) {
  require_same_taxa(t1, t2);
  if (rules.count(Rule::Subtree) && !maximal_common_pendant_subtrees(t1, t2).empty())
    return false;
  if (rules.count(Rule::Chain) && !maximal_common_chains(t1, t2, 4).empty()) return false;
  if (rules.count(Rule::Cluster) && !common_nontrivial_clusters(t1, t2).empty())
    return false;
  return true;
}

ClusterSplit cluster_decompose(const UnrootedTree& t1, const UnrootedTree& t2) {
  require_same_taxa(t1, t2);
  auto cluster = minimal_common_cluster(t1, t2);
  if (!cluster) throw InvalidArgument("cluster_decompose: no common nontrivial cluster");
  ReductionTrace counter;
  counter.seed_from(t1, t2);
  ClusterSplit out;
  out.cluster = *cluster;
  out.marker = counter.fresh_label();
  std::vector<Taxon> complement;
  for (const Taxon& x : t1.taxa())
    if (!std::binary_search(cluster->begin(), cluster->end(), x)) complement.push_back(x);
  out.piece = {replace_pendant_set(t1, complement, out.marker),
               replace_pendant_set(t2, complement, out.marker)};
  out.remainder = {replace_pendant_set(t1, *cluster, out.marker),
                   replace_pendant_set(t2, *cluster, out.marker)};
  return out;
}

std::vector<std::pair<UnrootedTree, UnrootedTree>> cluster_decompose_recursive(
    const UnrootedTree& t1, const UnrootedTree& t2) {
  std::vector<std::pair<UnrootedTree, UnrootedTree>> done;
  std::vector<std::pair<UnrootedTree, UnrootedTree>> todo{{t1, t2}};
  while (!todo.empty()) {
    auto [a, b] = todo.back();
    todo.pop_back();
    if (common_nontrivial_clusters(a, b).empty()) {
      done.emplace_back(std::move(a), std::move(b));
      continue;
    }
    ClusterSplit split = cluster_decompose(a, b);
    todo.push_back(split.piece);
    todo.push_back(split.remainder);
  }
  std::sort(done.begin(), done.end(), [](const auto& x, const auto& y) {
    return x.first.taxa() < y.first.taxa();
  });
  return done;
}

std::pair<UnrootedTree, UnrootedTree> replay_trace(const UnrootedTree& t1,
                                                   const UnrootedTree& t2,
                                                   const ReductionTrace& trace) {
  UnrootedTree a = t1, b = t2;
  for (const ReductionStep& s : trace.steps) {
    switch (s.kind) {
      case Rule::Subtree:
      case Rule::Cluster:
        assert(s.introduced.size() == 1);
        a = replace_pendant_set(a, s.removed, s.introduced[0]);
        b = replace_pendant_set(b, s.removed, s.introduced[0]);
        break;
      case Rule::Chain:
        assert(s.introduced.size() == 3);
        a = replace_chain_prefix(a, s.removed, s.introduced);
        b = replace_chain_prefix(b, s.removed, s.introduced);
        break;
    }
  }
  return {a, b};
}

namespace {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Subtree: return "subtree";
    case Rule::Chain: return "chain";
    case Rule::Cluster: return "cluster";
  }
  return "?";
}

std::string join(const std::vector<Taxon>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += xs[i];
  }
  return out;
}

std::vector<Taxon> split_csv(const std::string& s) {
  std::vector<Taxon> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

std::string serialize_trace(const ReductionTrace& trace) {
  std::ostringstream out;
  for (const ReductionStep& s : trace.steps) {
    out << rule_name(s.kind) << " removed=" << join(s.removed)
        << " introduced=" << join(s.introduced);
    if (s.kind == Rule::Chain)
      out << " pendant_t1=" << s.pendant_t1[0] << s.pendant_t1[1]
          << " pendant_t2=" << s.pendant_t2[0] << s.pendant_t2[1];
    out << "\n";
  }
  return out.str();
}

ReductionTrace parse_trace(const std::string& text) {
  ReductionTrace trace;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    ReductionStep step;
    if (kind == "subtree")
      step.kind = Rule::Subtree;
    else if (kind == "chain")
      step.kind = Rule::Chain;
    else if (kind == "cluster")
      step.kind = Rule::Cluster;
    else
      throw ParseError("trace: unknown step kind on line " + std::to_string(lineno));
    std::string field;
    while (ls >> field) {
      auto eq = field.find('=');
      if (eq == std::string::npos)
        throw ParseError("trace: malformed field on line " + std::to_string(lineno));
      std::string key = field.substr(0, eq), val = field.substr(eq + 1);
      if (key == "removed")
        step.removed = split_csv(val);
      else if (key == "introduced")
        step.introduced = split_csv(val);
      else if (key == "pendant_t1" && val.size() == 2)
        step.pendant_t1 = {val[0] == '1', val[1] == '1'};
      else if (key == "pendant_t2" && val.size() == 2)
        step.pendant_t2 = {val[0] == '1', val[1] == '1'};
      else
        throw ParseError("trace: unknown field on line " + std::to_string(lineno));
    }
    for (const Taxon& f : step.introduced) {
      int idx = 0;
      if (reserved_index(f, &idx)) trace.fresh_counter = std::max(trace.fresh_counter, idx + 1);
    }
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

}  // namespace tbrkit
