#include "tbrkit/rooted.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <functional>
#include <sstream>

#include "tbrkit/errors.hpp"

namespace tbrkit {

// ---- RootedTree ----

RootedTree RootedTree::from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                                  const std::map<int, Taxon>& labels) {
  RootedTree t;
  t.children_.resize(n);
  t.parent_.assign(n, -1);
  t.label_.resize(n);
  for (auto [p, c] : edges) {
    if (p < 0 || c < 0 || p >= n || c >= n)
      throw InvalidArgument("rooted tree: edge endpoint out of range");
    if (t.parent_[c] != -1) throw InvalidArgument("rooted tree: vertex with two parents");
    t.parent_[c] = p;
    t.children_[p].push_back(c);
  }
  for (auto& [v, lab] : labels) {
    if (v < 0 || v >= n) throw InvalidArgument("rooted tree: label id out of range");
    t.label_[v] = lab;
  }
  for (int v = 0; v < n; ++v) {
    if (t.parent_[v] == -1) {
      if (t.root_ != -1) throw InvalidArgument("rooted tree: two roots");
      t.root_ = v;
    }
  }
  if (t.root_ == -1) throw InvalidArgument("rooted tree: no root (cycle)");
  for (int v = 0; v < n; ++v) {
    std::size_t out = t.children_[v].size();
    if (out == 0) {
      if (t.label_[v].empty()) throw InvalidArgument("rooted tree: unlabeled leaf");
      if (t.by_label_.count(t.label_[v]))
        throw InvalidArgument("rooted tree: duplicate taxon '" + t.label_[v] + "'");
      t.by_label_[t.label_[v]] = v;
    } else if (out == 2) {
      if (!t.label_[v].empty()) throw InvalidArgument("rooted tree: labeled internal vertex");
    } else {
      throw InvalidArgument("rooted tree: vertex with out-degree " + std::to_string(out));
    }
    std::sort(t.children_[v].begin(), t.children_[v].end());
  }
  // Reachability doubles as the acyclicity check.
  std::vector<char> seen(n, 0);
  std::vector<int> stack{t.root_};
  seen[t.root_] = 1;
  int reached = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    ++reached;
    for (int c : t.children_[v])
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
  }
  if (reached != n) throw InvalidArgument("rooted tree: unreachable vertices");
  if (t.leaf_count() < 2) throw InvalidArgument("rooted tree: fewer than 2 leaves");
  return t;
}

int RootedTree::leaf_vertex(const Taxon& t) const {
  auto it = by_label_.find(t);
  if (it == by_label_.end())
    throw InvalidArgument("rooted tree: unknown taxon '" + t + "'");
  return it->second;
}

std::vector<Taxon> RootedTree::taxa() const {
  std::vector<Taxon> out;
  for (const auto& [lab, v] : by_label_) out.push_back(lab);
  return out;
}

std::vector<Taxon> RootedTree::cluster_of(int v) const {
  std::vector<Taxon> out;
  std::vector<int> stack{v};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    if (is_leaf(x)) out.push_back(label_[x]);
    for (int c : children_[x]) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::set<std::vector<Taxon>> RootedTree::cluster_set() const {
  std::set<std::vector<Taxon>> out;
  for (int v = 0; v < vertex_count(); ++v) out.insert(cluster_of(v));
  return out;
}

bool rooted_trees_equal(const RootedTree& a, const RootedTree& b) {
  if (a.taxa() != b.taxa()) throw InvalidArgument("rooted pair: leaf sets differ");
  return a.cluster_set() == b.cluster_set();
}

// ---- rooted Newick ----

namespace {

struct RootedParser {
  const std::string& text;
  std::size_t pos = 0;
  int counter = 0;
  std::vector<std::pair<int, int>> edges;
  std::map<int, Taxon> labels;

  explicit RootedParser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  char peek() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("rooted newick: unexpected end", pos);
    return text[pos];
  }
  bool label_char(char c) const {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
    return c != '(' && c != ')' && c != ',' && c != ':' && c != ';';
  }
  void discard_length() {
    skip_ws();
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      skip_ws();
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
              text[pos] == '-' || text[pos] == '+' || text[pos] == 'e' || text[pos] == 'E'))
        ++pos;
      if (pos == start) throw ParseError("rooted newick: missing length after ':'", pos);
    }
  }

  int read_node() {
    skip_ws();
    int id = counter++;
    if (peek() == '(') {
      ++pos;
      std::vector<int> kids;
      kids.push_back(read_node());
      while (peek() == ',') {
        ++pos;
        kids.push_back(read_node());
      }
      if (peek() != ')') throw ParseError("rooted newick: expected ')'", pos);
      ++pos;
      std::size_t here = pos;
      while (pos < text.size() && label_char(text[pos])) ++pos;  // internal label
      discard_length();
      if (kids.size() != 2)
        throw ParseError("rooted newick: internal vertex without exactly two children",
                         here);
      for (int c : kids) edges.emplace_back(id, c);
      return id;
    }
    std::size_t start = pos;
    while (pos < text.size() && label_char(text[pos])) ++pos;
    std::string lab = text.substr(start, pos - start);
    if (lab.empty()) throw ParseError("rooted newick: empty leaf label", start);
    discard_length();
    labels[id] = lab;
    return id;
  }

  RootedTree run() {
    skip_ws();
    if (pos >= text.size() || text[pos] != '(')
      throw ParseError("rooted newick: tree must start with '('", pos);
    read_node();
    skip_ws();
    if (pos >= text.size() || text[pos] != ';')
      throw ParseError("rooted newick: expected ';'", pos);
    ++pos;
    skip_ws();
    if (pos != text.size()) throw ParseError("rooted newick: trailing characters", pos);
    try {
      return RootedTree::from_edges(counter, edges, labels);
    } catch (const InvalidArgument& e) {
      throw ParseError(std::string("rooted newick: ") + e.what());
    }
  }
};

}  // namespace

RootedTree parse_rooted_newick(const std::string& text) {
  RootedParser p(text);
  return p.run();
}

std::string serialize_rooted_newick(const RootedTree& t) {
  std::function<std::pair<std::string, Taxon>(int)> render =
      [&](int v) -> std::pair<std::string, Taxon> {
    if (t.is_leaf(v)) return {t.label(v), t.label(v)};
    std::vector<std::pair<Taxon, std::string>> parts;
    for (int c : t.children(v)) {
      auto [txt, mn] = render(c);
      parts.emplace_back(mn, txt);
    }
    std::sort(parts.begin(), parts.end());
    return {"(" + parts[0].second + "," + parts[1].second + ")", parts[0].first};
  };
  return render(t.root()).first + ";";
}

// ---- RootedNetwork ----

RootedNetwork RootedNetwork::from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                                        const std::map<int, Taxon>& labels) {
  RootedNetwork net;
  net.children_.resize(n);
  net.parents_.resize(n);
  net.label_.resize(n);
  std::set<std::pair<int, int>> seen_edges;
  for (auto [p, c] : edges) {
    if (p < 0 || c < 0 || p >= n || c >= n)
      throw InvalidArgument("rooted network: edge endpoint out of range");
    if (!seen_edges.insert({p, c}).second)
      throw InvalidArgument("rooted network: parallel edge");
    net.children_[p].push_back(c);
    net.parents_[c].push_back(p);
  }
  for (auto& [v, lab] : labels) {
    if (v < 0 || v >= n) throw InvalidArgument("rooted network: label id out of range");
    net.label_[v] = lab;
  }
  for (int v = 0; v < n; ++v) {
    std::size_t in = net.parents_[v].size(), out = net.children_[v].size();
    if (in == 0 && out == 2) {
      if (net.root_ != -1) throw InvalidArgument("rooted network: two roots");
      net.root_ = v;
    } else if (in == 1 && out == 0) {
      if (net.label_[v].empty()) throw InvalidArgument("rooted network: unlabeled leaf");
      if (net.by_label_.count(net.label_[v]))
        throw InvalidArgument("rooted network: duplicate taxon");
      net.by_label_[net.label_[v]] = v;
    } else if ((in == 1 && out == 2) || (in == 2 && out == 1)) {
      if (!net.label_[v].empty())
        throw InvalidArgument("rooted network: labeled internal vertex");
    } else {
      throw InvalidArgument("rooted network: degree pattern in=" + std::to_string(in) +
                            " out=" + std::to_string(out));
    }
    std::sort(net.children_[v].begin(), net.children_[v].end());
    std::sort(net.parents_[v].begin(), net.parents_[v].end());
  }
  if (net.root_ == -1) throw InvalidArgument("rooted network: no root");
  // Topological order exists iff acyclic.
  std::vector<int> indeg(n, 0);
  for (int v = 0; v < n; ++v) indeg[v] = static_cast<int>(net.parents_[v].size());
  std::vector<int> queue{net.root_};
  int seen = 0;
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    ++seen;
    for (int c : net.children_[v])
      if (--indeg[c] == 0) queue.push_back(c);
  }
  if (seen != n) throw InvalidArgument("rooted network: cyclic or unreachable vertices");
  if (net.by_label_.size() < 2) throw InvalidArgument("rooted network: fewer than 2 leaves");
  return net;
}

std::vector<Taxon> RootedNetwork::taxa() const {
  std::vector<Taxon> out;
  for (const auto& [lab, v] : by_label_) out.push_back(lab);
  return out;
}

int RootedNetwork::reticulation_count() const {
  int r = 0;
  for (int v = 0; v < vertex_count(); ++v) r += is_reticulation(v);
  return r;
}

std::vector<std::pair<int, int>> RootedNetwork::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int v = 0; v < vertex_count(); ++v)
    for (int c : children_[v]) out.emplace_back(v, c);
  std::sort(out.begin(), out.end());
  return out;
}

std::string serialize_rnet(const RootedNetwork& net) {
  std::ostringstream out;
  out << "RNET v1\n";
  out << "V " << net.vertex_count() << "\n";
  for (auto [p, c] : net.edges()) out << "E " << p << " " << c << "\n";
  for (int v = 0; v < net.vertex_count(); ++v)
    if (net.is_leaf(v)) out << "L " << v << " " << net.label(v) << "\n";
  return out.str();
}

RootedNetwork parse_rnet(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next = [&]() -> std::optional<std::string> {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    return std::nullopt;
  };
  auto header = next();
  if (!header || *header != "RNET v1") throw ParseError("rnet: missing 'RNET v1' header");
  auto vline = next();
  int n = 0;
  if (!vline || sscanf(vline->c_str(), "V %d", &n) != 1 || n <= 0)
    throw ParseError("rnet: missing vertex count");
  std::vector<std::pair<int, int>> edges;
  std::map<int, Taxon> labels;
  while (auto l = next()) {
    if ((*l)[0] == 'E') {
      int p = -1, c = -1;
      if (sscanf(l->c_str(), "E %d %d", &p, &c) != 2)
        throw ParseError("rnet: bad edge on line " + std::to_string(lineno));
      edges.emplace_back(p, c);
    } else if ((*l)[0] == 'L') {
      int v = -1;
      char buf[256];
      if (sscanf(l->c_str(), "L %d %255s", &v, buf) != 2)
        throw ParseError("rnet: bad label on line " + std::to_string(lineno));
      labels[v] = buf;
    } else {
      throw ParseError("rnet: unknown line " + std::to_string(lineno));
    }
  }
  try {
    return RootedNetwork::from_edges(n, edges, labels);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("rnet: ") + e.what());
  }
}

// ---- reducedness ----

bool is_rooted_chain(const RootedTree& t, const std::vector<Taxon>& seq) {
  int n = static_cast<int>(seq.size());
  if (n < 2) return false;
  std::set<Taxon> distinct(seq.begin(), seq.end());
  if (static_cast<int>(distinct.size()) != n) return false;
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) {
    if (!t.has_taxon(seq[i])) return false;
    p[i] = t.parent(t.leaf_vertex(seq[i]));
  }
  bool first_ok = (p[0] == p[1]) || (t.parent(p[0]) == p[1]);
  if (!first_ok) return false;
  for (int i = 1; i + 1 < n; ++i)
    if (t.parent(p[i]) != p[i + 1]) return false;
  return true;
}

namespace {

bool common_rooted_cherry(const RootedTree& a, const RootedTree& b) {
  for (const Taxon& x : a.taxa())
    for (const Taxon& y : a.taxa()) {
      if (x >= y) continue;
      if (a.parent(a.leaf_vertex(x)) == a.parent(a.leaf_vertex(y)) &&
          b.parent(b.leaf_vertex(x)) == b.parent(b.leaf_vertex(y)))
        return true;
    }
  return false;
}

bool common_rooted_3chain(const RootedTree& a, const RootedTree& b) {
  std::vector<Taxon> taxa = a.taxa();
  for (const Taxon& x : taxa)
    for (const Taxon& y : taxa) {
      if (x == y) continue;
      std::vector<Taxon> pair{x, y};
      if (!is_rooted_chain(a, pair) || !is_rooted_chain(b, pair)) continue;
      for (const Taxon& z : taxa) {
        if (z == x || z == y) continue;
        std::vector<Taxon> triple{x, y, z};
        if (is_rooted_chain(a, triple) && is_rooted_chain(b, triple)) return true;
      }
    }
  return false;
}

std::set<std::vector<Taxon>> nontrivial_clusters(const RootedTree& t) {
  std::set<std::vector<Taxon>> out;
  int n = t.leaf_count();
  for (const auto& c : t.cluster_set())
    if (static_cast<int>(c.size()) >= 2 && static_cast<int>(c.size()) < n) out.insert(c);
  return out;
}

}  // namespace

bool rooted_is_reduced(const RootedTree& t1, const RootedTree& t2, const RuleSet& rules) {
  if (t1.taxa() != t2.taxa()) throw InvalidArgument("rooted pair: leaf sets differ");
  if (rules.count(Rule::Subtree) && common_rooted_cherry(t1, t2)) return false;
  if (rules.count(Rule::Chain) && common_rooted_3chain(t1, t2)) return false;
  if (rules.count(Rule::Cluster)) {
    auto c1 = nontrivial_clusters(t1);
    auto c2 = nontrivial_clusters(t2);
    for (const auto& c : c1)
      if (c2.count(c)) return false;
  }
  return true;
}

// ---- display ----

RootedDisplayResult rooted_displays(const RootedNetwork& net, const RootedTree& tree) {
  if (net.taxa() != tree.taxa())
    throw InvalidArgument("rooted_displays: leaf sets differ");
  std::vector<int> retics;
  for (int v = 0; v < net.vertex_count(); ++v)
    if (net.is_reticulation(v)) retics.push_back(v);
  int r = static_cast<int>(retics.size());

  auto tree_clusters = tree.cluster_set();

  RootedDisplayResult res;
  for (int mask = 0; mask < (1 << r); ++mask) {
    // Keep parent bit i of retics[i]; delete the other in-edge.
    std::vector<std::pair<int, int>> removed;
    std::set<std::pair<int, int>> gone;
    for (int i = 0; i < r; ++i) {
      int keep = (mask >> i) & 1;
      int lose = net.parents(retics[i])[1 - keep];
      removed.emplace_back(lose, retics[i]);
      gone.insert({lose, retics[i]});
    }
    // Children lists after deletion, restricted to vertices reachable from
    // the root; then prune unlabeled sinks and suppress unary vertices by
    // walking each surviving leaf upward.
    std::vector<std::vector<int>> kids(net.vertex_count());
    for (auto [p, c] : net.edges())
      if (!gone.count({p, c})) kids[p].push_back(c);

    // Clusters of the switched subgraph: taxa below each vertex.
    std::vector<std::set<Taxon>> below(net.vertex_count());
    // Process in reverse topological order via DFS post-order from the root.
    std::vector<int> order;
    std::vector<char> seen(net.vertex_count(), 0);
    std::function<void(int)> dfs = [&](int v) {
      seen[v] = 1;
      for (int c : kids[v])
        if (!seen[c]) dfs(c);
      order.push_back(v);
    };
    dfs(net.root());
    for (int v : order) {
      if (net.is_leaf(v)) {
        below[v].insert(net.label(v));
        continue;
      }
      for (int c : kids[v])
        for (const Taxon& x : below[c]) below[v].insert(x);
    }
    // The displayed tree's clusters: vertices with >= 2 children-side
    // branches that hold taxa, plus leaves. Vertices whose branch sets are
    // nested chains collapse by suppression, so the cluster set is just the
    // distinct nonempty "below" sets of branching vertices and leaves.
    std::set<std::vector<Taxon>> got;
    bool ok = true;
    for (int v : order) {
      if (!seen[v]) continue;
      if (net.is_leaf(v)) {
        got.insert({net.label(v)});
        continue;
      }
      int live_branches = 0;
      for (int c : kids[v])
        if (!below[c].empty()) ++live_branches;
      if (live_branches >= 2)
        got.insert(std::vector<Taxon>(below[v].begin(), below[v].end()));
    }
    // The root cluster must cover everything (every taxon reachable).
    std::vector<Taxon> all(below[net.root()].begin(), below[net.root()].end());
    if (all != tree.taxa()) ok = false;
    if (ok && got == tree_clusters) {
      res.displayed = true;
      res.removed_edges = removed;
      return res;
    }
  }
  return res;
}

RootedTree switched_tree(const RootedNetwork& net,
                         const std::vector<std::pair<int, int>>& removed) {
  std::set<std::pair<int, int>> gone(removed.begin(), removed.end());
  int n = net.vertex_count();
  std::vector<std::vector<int>> kids(n);
  for (auto [p, c] : net.edges())
    if (!gone.count({p, c})) kids[p].push_back(c);

  // Reachable part.
  std::vector<char> reach(n, 0);
  std::vector<int> stack{net.root()};
  reach[net.root()] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int c : kids[v])
      if (!reach[c]) {
        reach[c] = 1;
        stack.push_back(c);
      }
  }
  // Iteratively drop unlabeled sinks.
  bool again = true;
  while (again) {
    again = false;
    for (int v = 0; v < n; ++v) {
      if (!reach[v] || net.is_leaf(v)) continue;
      int live = 0;
      for (int c : kids[v]) live += reach[c];
      if (live == 0) {
        reach[v] = 0;
        again = true;
      }
    }
  }
  // Resolve each vertex to its first branching descendant (or leaf).
  std::function<int(int)> resolve = [&](int v) -> int {
    for (;;) {
      if (net.is_leaf(v)) return v;
      std::vector<int> live;
      for (int c : kids[v])
        if (reach[c]) live.push_back(c);
      if (live.size() >= 2) return v;
      if (live.empty()) throw InvalidArgument("switched_tree: dangling vertex");
      v = live[0];
    }
  };
  int root = resolve(net.root());
  std::vector<std::pair<int, int>> edges;
  std::map<int, Taxon> labels;
  std::set<int> used;
  std::function<void(int)> walk = [&](int v) {
    used.insert(v);
    if (net.is_leaf(v)) {
      labels[v] = net.label(v);
      return;
    }
    for (int c : kids[v]) {
      if (!reach[c]) continue;
      int rc = resolve(c);
      edges.emplace_back(v, rc);
      walk(rc);
    }
  };
  walk(root);
  // Renumber to a compact range.
  std::map<int, int> id;
  for (int v : used) id[v] = static_cast<int>(id.size());
  std::vector<std::pair<int, int>> redges;
  for (auto [p, c] : edges) redges.emplace_back(id[p], id[c]);
  std::map<int, Taxon> rlabels;
  for (auto& [v, lab] : labels) rlabels[id[v]] = lab;
  return RootedTree::from_edges(static_cast<int>(id.size()), redges, rlabels);
}

// ---- unrooting ----

UnrootedTree unroot(const RootedTree& t) {
  MutableGraph g;
  for (int v = 0; v < t.vertex_count(); ++v) g.add_vertex(t.label(v));
  for (int v = 0; v < t.vertex_count(); ++v)
    for (int c : t.children(v)) g.add_edge(v, c);
  g.suppress_vertex(t.root());
  try {
    return UnrootedTree::from_graph(g);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("unroot: ") + e.what());
  }
}

UnrootedNetwork unroot_network(const RootedNetwork& net) {
  MutableGraph g;
  for (int v = 0; v < net.vertex_count(); ++v) g.add_vertex(net.label(v));
  for (auto [p, c] : net.edges()) g.add_edge(p, c);
  try {
    g.suppress_vertex(net.root());
    return UnrootedNetwork::from_graph(g);
  } catch (const Error& e) {
    throw InvalidArgument(std::string("unroot_network: result not a valid network: ") +
                          e.what());
  }
}

RootedBoundReport check_rooted_bound(const RootedTree& t1, const RootedTree& t2, int k,
                                     bool cluster_reduced) {
  RuleSet rules = subtree_chain_rules();
  if (cluster_reduced) rules.insert(Rule::Cluster);
  if (!rooted_is_reduced(t1, t2, rules))
    throw InvalidArgument("check_rooted_bound: pair is not reduced under the given rules");
  RootedBoundReport rep;
  rep.bound = cluster_reduced ? 9 * k - 4 : 9 * k - 2;
  rep.leaves = t1.leaf_count();
  rep.slack = rep.bound - rep.leaves;
  rep.ok = rep.leaves <= rep.bound;
  return rep;
}

}  // namespace tbrkit
