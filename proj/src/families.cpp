#include "tbrkit/families.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tbrkit/errors.hpp"
#include "tbrkit/newick.hpp"
#include "tbrkit/reduce.hpp"
#include "tbrkit/tbr.hpp"

namespace tbrkit {

namespace {

std::vector<Taxon> label_range(int lo, int hi) {
  std::vector<Taxon> out;
  for (int x = lo; x <= hi; ++x) out.push_back(std::to_string(x));
  return out;
}

// Doubled-rung ladder: vertex pairs (u_i, v_i) for the k-1 rung levels, the
// top and bottom rungs doubled; degenerates to the theta graph at k = 2.
struct ScLayout {
  Generator gen;
  std::vector<int> horizontals;  // top to bottom, k+1 ids
  std::vector<int> lefts;        // rail ids top to bottom, k-2
  std::vector<int> rights;
};

ScLayout sc_layout(int k) {
  ScLayout L;
  int levels = k - 1;
  auto u = [](int i) { return 2 * i; };
  auto v = [](int i) { return 2 * i + 1; };
  L.gen.vertex_count = 2 * levels;
  int next_id = 0;
  auto add_side = [&](int a, int b) {
    L.gen.sides.push_back({next_id, a, b});
    return next_id++;
  };
  if (k == 2) {
    for (int c = 0; c < 3; ++c) L.horizontals.push_back(add_side(u(0), v(0)));
  } else {
    L.horizontals.push_back(add_side(u(0), v(0)));
    L.horizontals.push_back(add_side(u(0), v(0)));
    for (int i = 1; i <= levels - 2; ++i) L.horizontals.push_back(add_side(u(i), v(i)));
    L.horizontals.push_back(add_side(u(levels - 1), v(levels - 1)));
    L.horizontals.push_back(add_side(u(levels - 1), v(levels - 1)));
  }
  for (int i = 0; i + 1 < levels; ++i) L.lefts.push_back(add_side(u(i), u(i + 1)));
  for (int i = 0; i + 1 < levels; ++i) L.rights.push_back(add_side(v(i), v(i + 1)));
  return L;
}

// Crossed ladder: k-1 single rungs plus two crossing sides joining the top
// corners to the opposite bottom corners.
struct SccLayout {
  Generator gen;
  std::vector<int> rungs;   // top to bottom, k-1 ids
  std::vector<int> lefts;   // k-2
  std::vector<int> rights;  // k-2
  int tl_br = -1, tr_bl = -1;
};

SccLayout scc_layout(int k) {
  SccLayout L;
  int levels = k - 1;
  auto u = [](int i) { return 2 * i; };
  auto v = [](int i) { return 2 * i + 1; };
  L.gen.vertex_count = 2 * levels;
  int next_id = 0;
  auto add_side = [&](int a, int b) {
    L.gen.sides.push_back({next_id, a, b});
    return next_id++;
  };
  for (int i = 0; i < levels; ++i) L.rungs.push_back(add_side(u(i), v(i)));
  for (int i = 0; i + 1 < levels; ++i) L.lefts.push_back(add_side(u(i), u(i + 1)));
  for (int i = 0; i + 1 < levels; ++i) L.rights.push_back(add_side(v(i), v(i + 1)));
  L.tl_br = add_side(u(0), v(levels - 1));
  L.tr_bl = add_side(v(0), u(levels - 1));
  return L;
}

UnrootedTree tree_by_breaking(const UnrootedNetwork& net,
                              const std::vector<std::pair<Taxon, Taxon>>& breaks) {
  MutableGraph g = net.to_graph();
  for (const Edge& e : break_edges(net, breaks)) g.remove_edge(e.a, e.b);
  g.suppress_degree2();
  return UnrootedTree::from_graph(g);
}

// Breaking a chain severs it between two adjacent leaves.
std::pair<Taxon, Taxon> break_between(const std::vector<Taxon>& chain, int prefix_len) {
  return {chain[prefix_len - 1], chain[prefix_len]};
}

void find_certificate(TightInstance& inst) {
  int want = inst.k + 1;
  for (const Edge& e : inst.s.edges()) {
    Character f = bipartition_character(inst.s, e);
    int on_s = fitch_score(inst.s, f).score;
    int on_sp = fitch_score(inst.s_prime, f).score;
    if (on_s == 1 && on_sp == want) {
      inst.cert_character = f;
      inst.fitch_s = on_s;
      inst.fitch_s_prime = on_sp;
      return;
    }
  }
  throw Error("family certificate: no edge realizes the (1, k+1) score pair");
}

void hard_check(bool ok, const std::string& what) {
  if (!ok) throw Error("family construction failed its certificate: " + what);
}

}  // namespace

std::vector<Edge> break_edges(const UnrootedNetwork& witness,
                              const std::vector<std::pair<Taxon, Taxon>>& breaks) {
  std::vector<Edge> out;
  for (const auto& [x, y] : breaks) {
    int px = witness.neighbors(witness.leaf_vertex(x))[0];
    int py = witness.neighbors(witness.leaf_vertex(y))[0];
    if (!witness.has_edge(px, py))
      throw InvalidArgument("break_edges: leaves '" + x + "' and '" + y +
                            "' are not adjacent on a chain");
    out.emplace_back(px, py);
  }
  return out;
}

TightInstance build_sc(int k) {
  if (k < 2) throw InvalidArgument("build_sc: k must be at least 2");
  ScLayout L = sc_layout(k);
  Attachment att;
  std::vector<std::vector<Taxon>> nine_chains;

  att.per_side[L.horizontals[0]] = label_range(1, 3);
  for (int i = 1; i <= k - 2; ++i) {
    att.per_side[L.horizontals[i]] = label_range(15 * i - 11, 15 * i - 3);
    nine_chains.push_back(att.per_side[L.horizontals[i]]);
    att.per_side[L.lefts[i - 1]] = label_range(15 * i - 2, 15 * i);
    att.per_side[L.rights[i - 1]] = label_range(15 * i + 1, 15 * i + 3);
  }
  att.per_side[L.horizontals[k - 1]] = label_range(15 * k - 26, 15 * k - 18);
  nine_chains.push_back(att.per_side[L.horizontals[k - 1]]);
  att.per_side[L.horizontals[k]] = label_range(15 * k - 17, 15 * k - 9);
  nine_chains.push_back(att.per_side[L.horizontals[k]]);

  TightInstance inst;
  inst.variant = FamilyVariant::SC;
  inst.k = k;
  inst.witness = attach(L.gen, att);
  // Each nine-chain splits into blocks A|B|C of three; s breaks between A
  // and B, s_prime between B and C.
  for (const auto& chain : nine_chains) {
    inst.breaks_s.push_back(break_between(chain, 3));
    inst.breaks_s_prime.push_back(break_between(chain, 6));
  }
  inst.s = tree_by_breaking(inst.witness, inst.breaks_s);
  inst.s_prime = tree_by_breaking(inst.witness, inst.breaks_s_prime);

  for (int i = 1; i <= k - 1; ++i)
    inst.expected_clusters.push_back(label_range(15 * i - 8, 15 * i - 6));
  inst.expected_clusters.push_back(label_range(15 * k - 14, 15 * k - 12));
  std::sort(inst.expected_clusters.begin(), inst.expected_clusters.end());

  hard_check(inst.witness.leaf_count() == 15 * k - 9, "leaf count");
  hard_check(reticulation_number(inst.witness) == k, "reticulation number");
  find_certificate(inst);
  validate_embedding(inst.witness, inst.s,
                     embedding_from_deleted_edges(inst.witness, inst.s,
                                                  break_edges(inst.witness, inst.breaks_s)));
  return inst;
}

TightInstance build_scc(int k) {
  if (k < 4) throw InvalidArgument("build_scc: k must be at least 4");
  SccLayout L = scc_layout(k);
  Attachment att;
  int base = 15 * (k - 2);

  att.per_side[L.rungs[0]] = label_range(1, 6);
  att.per_side[L.lefts[0]] = label_range(7, 12);
  att.per_side[L.rights[0]] = label_range(13, 18);
  for (int i = 2; i <= k - 2; ++i) {
    att.per_side[L.rungs[i - 1]] = label_range(15 * i - 11, 15 * i - 6);
    att.per_side[L.lefts[i - 1]] = label_range(15 * i - 5, 15 * i);
    att.per_side[L.rights[i - 1]] = label_range(15 * i + 1, 15 * i + 3);
  }
  att.per_side[L.rungs[k - 2]] = label_range(base + 4, base + 9);
  att.per_side[L.tl_br] = label_range(base + 10, base + 15);
  att.per_side[L.tr_bl] = label_range(base + 16, base + 21);

  TightInstance inst;
  inst.variant = FamilyVariant::SCC;
  inst.k = k;
  inst.witness = attach(L.gen, att);
  // Six-chains split into blocks A|B of three; breaking severs A from B.
  for (int r : L.rungs) inst.breaks_s.push_back(break_between(att.per_side[r], 3));
  inst.breaks_s.push_back(break_between(att.per_side[L.tl_br], 3));
  for (int l : L.lefts) inst.breaks_s_prime.push_back(break_between(att.per_side[l], 3));
  inst.breaks_s_prime.push_back(break_between(att.per_side[L.rights[0]], 3));
  inst.breaks_s_prime.push_back(break_between(att.per_side[L.tr_bl], 3));

  inst.s = tree_by_breaking(inst.witness, inst.breaks_s);
  inst.s_prime = tree_by_breaking(inst.witness, inst.breaks_s_prime);

  hard_check(inst.witness.leaf_count() == 15 * k - 9, "leaf count");
  hard_check(reticulation_number(inst.witness) == k, "reticulation number");
  hard_check(static_cast<int>(inst.breaks_s.size()) == k, "break count");
  hard_check(static_cast<int>(inst.breaks_s_prime.size()) == k, "break count");
  find_certificate(inst);
  validate_embedding(inst.witness, inst.s,
                     embedding_from_deleted_edges(inst.witness, inst.s,
                                                  break_edges(inst.witness, inst.breaks_s)));
  return inst;
}

VerifyReport verify_instance(const TightInstance& inst, const VerifyOptions& opts) {
  VerifyReport rep;
  auto item = [&rep](const std::string& name, bool pass, std::string detail = "") {
    rep.items.push_back({name, pass, std::move(detail)});
  };

  int k = inst.k;
  int want_leaves = 15 * k - 9;
  bool taxa_ok = inst.s.leaf_count() == want_leaves;
  {
    std::vector<Taxon> expect = label_range(1, want_leaves);
    std::sort(expect.begin(), expect.end());
    taxa_ok = taxa_ok && inst.s.taxa() == expect && inst.s_prime.taxa() == expect &&
              inst.witness.taxa() == expect;
  }
  item("leaf-count", taxa_ok,
       std::to_string(inst.s.leaf_count()) + " vs 15k-9 = " + std::to_string(want_leaves));

  item("subtree-reduced", is_reduced(inst.s, inst.s_prime, {Rule::Subtree}));
  item("chain-reduced", is_reduced(inst.s, inst.s_prime, {Rule::Chain}));
  if (inst.variant == FamilyVariant::SCC) {
    item("cluster-reduced", common_nontrivial_clusters(inst.s, inst.s_prime).empty());
  } else {
    auto got = common_nontrivial_clusters(inst.s, inst.s_prime);
    std::sort(got.begin(), got.end());
    item("cluster-pattern", got == inst.expected_clusters,
         "expected the k common three-leaf clusters");
  }

  item("witness-reticulation", reticulation_number(inst.witness) == k);

  bool disp_s = false, disp_sp = false;
  try {
    DisplayResult r1 = displays(inst.witness, inst.s);
    disp_s = r1.displayed && validate_embedding(inst.witness, inst.s, r1.witness);
    DisplayResult r2 = displays(inst.witness, inst.s_prime);
    disp_sp = r2.displayed && validate_embedding(inst.witness, inst.s_prime, r2.witness);
  } catch (const Error& e) {
    item("display-search", false, e.what());
  }
  item("witness-displays-s", disp_s);
  item("witness-displays-s-prime", disp_sp);

  bool breaks_ok = true;
  std::string break_detail;
  try {
    embedding_from_deleted_edges(inst.witness, inst.s,
                                 break_edges(inst.witness, inst.breaks_s));
    embedding_from_deleted_edges(inst.witness, inst.s_prime,
                                 break_edges(inst.witness, inst.breaks_s_prime));
  } catch (const Error& e) {
    breaks_ok = false;
    break_detail = e.what();
  }
  item("break-embeddings", breaks_ok, break_detail);

  int on_s = -1, on_sp = -1;
  try {
    on_s = fitch_score(inst.s, inst.cert_character).score;
    on_sp = fitch_score(inst.s_prime, inst.cert_character).score;
  } catch (const Error&) {
  }
  item("parsimony-certificate", on_s == 1 && on_sp == k + 1,
       "scores (" + std::to_string(on_s) + ", " + std::to_string(on_sp) + ")");
  item("distance-certified",
       on_s >= 0 && std::abs(on_s - on_sp) == k && reticulation_number(inst.witness) == k,
       "lower bound k from the score gap, upper bound k from the witness");

  if (k <= opts.solver_confirm_max_k) {
    SolveOptions so;
    so.max_nodes = opts.solver_budget;
    bool ok = false;
    std::string detail;
    try {
      SolveResult res = tbr_distance_maf(inst.s, inst.s_prime, so);
      ok = res.exact && res.distance == k;
      detail = "solver says " + std::to_string(res.distance);
    } catch (const BudgetExceeded& e) {
      detail = e.what();
    }
    item("solver-confirmation", ok, detail);
  }
  return rep;
}

// ---- instance directory io ----

namespace {

std::string join_pairs(const std::vector<std::pair<Taxon, Taxon>>& pairs) {
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i) out += ",";
    out += pairs[i].first + ":" + pairs[i].second;
  }
  return out;
}

std::vector<std::pair<Taxon, Taxon>> split_pairs(const std::string& text) {
  std::vector<std::pair<Taxon, Taxon>> out;
  std::string cur;
  auto flush = [&]() {
    if (cur.empty()) return;
    auto colon = cur.find(':');
    if (colon == std::string::npos) throw ParseError("certificate: malformed break pair");
    out.emplace_back(cur.substr(0, colon), cur.substr(colon + 1));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',')
      flush();
    else
      cur += c;
  }
  flush();
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void write_instance(const std::string& dir, const TightInstance& inst) {
  std::filesystem::create_directories(dir);
  write_file(dir + "/s.nwk", serialize_newick(inst.s) + "\n");
  write_file(dir + "/s_prime.nwk", serialize_newick(inst.s_prime) + "\n");
  write_file(dir + "/witness.unet", serialize_unet(inst.witness));
  std::ostringstream cert;
  cert << "variant " << (inst.variant == FamilyVariant::SC ? "sc" : "scc") << "\n";
  cert << "k " << inst.k << "\n";
  cert << "leaves " << inst.s.leaf_count() << "\n";
  cert << "breaks_s " << join_pairs(inst.breaks_s) << "\n";
  cert << "breaks_s_prime " << join_pairs(inst.breaks_s_prime) << "\n";
  std::vector<Taxon> ones;
  for (const auto& [taxon, state] : inst.cert_character.states)
    if (state == "1") ones.push_back(taxon);
  cert << "fitch_ones ";
  for (std::size_t i = 0; i < ones.size(); ++i) cert << (i ? "," : "") << ones[i];
  cert << "\n";
  cert << "fitch_scores " << inst.fitch_s << " " << inst.fitch_s_prime << "\n";
  if (inst.variant == FamilyVariant::SC) {
    cert << "clusters ";
    for (std::size_t i = 0; i < inst.expected_clusters.size(); ++i) {
      if (i) cert << ";";
      for (std::size_t j = 0; j < inst.expected_clusters[i].size(); ++j)
        cert << (j ? "," : "") << inst.expected_clusters[i][j];
    }
    cert << "\n";
  }
  write_file(dir + "/certificate.txt", cert.str());
}

TightInstance read_instance(const std::string& dir) {
  TightInstance inst;
  inst.s = read_newick_file(dir + "/s.nwk", true).at(0);
  inst.s_prime = read_newick_file(dir + "/s_prime.nwk", true).at(0);
  inst.witness = parse_unet(read_file(dir + "/witness.unet"));

  std::istringstream cert(read_file(dir + "/certificate.txt"));
  std::string line;
  std::vector<Taxon> ones;
  while (std::getline(cert, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "variant") {
      std::string v;
      ls >> v;
      if (v == "sc")
        inst.variant = FamilyVariant::SC;
      else if (v == "scc")
        inst.variant = FamilyVariant::SCC;
      else
        throw ParseError("certificate: unknown variant '" + v + "'");
    } else if (key == "k") {
      ls >> inst.k;
    } else if (key == "leaves") {
      int ignored;
      ls >> ignored;
    } else if (key == "breaks_s") {
      std::string rest;
      ls >> rest;
      inst.breaks_s = split_pairs(rest);
    } else if (key == "breaks_s_prime") {
      std::string rest;
      ls >> rest;
      inst.breaks_s_prime = split_pairs(rest);
    } else if (key == "fitch_ones") {
      std::string rest;
      ls >> rest;
      std::string cur;
      for (char c : rest + ",") {
        if (c == ',') {
          if (!cur.empty()) ones.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
    } else if (key == "fitch_scores") {
      ls >> inst.fitch_s >> inst.fitch_s_prime;
    } else if (key == "clusters") {
      std::string rest;
      ls >> rest;
      std::vector<Taxon> cur;
      std::string tok;
      for (char c : rest + ";") {
        if (c == ';') {
          if (!tok.empty()) cur.push_back(tok);
          tok.clear();
          if (!cur.empty()) inst.expected_clusters.push_back(cur);
          cur.clear();
        } else if (c == ',') {
          if (!tok.empty()) cur.push_back(tok);
          tok.clear();
        } else {
          tok += c;
        }
      }
    } else if (!key.empty()) {
      throw ParseError("certificate: unknown key '" + key + "'");
    }
  }
  std::set<Taxon> one_set(ones.begin(), ones.end());
  for (const Taxon& x : inst.s.taxa())
    inst.cert_character.states[x] = one_set.count(x) ? "1" : "0";
  return inst;
}

// ---- rooted candidates ----

VerifyReport verify_rooted_family(const RootedCandidate& cand) {
  VerifyReport rep;
  auto item = [&rep](const std::string& name, bool pass, std::string detail = "") {
    rep.items.push_back({name, pass, std::move(detail)});
  };
  int k = cand.k;
  int want = cand.cluster_reduced ? 9 * k - 4 : 9 * k - 2;
  bool taxa_ok = cand.s.leaf_count() == want && cand.s.taxa() == cand.s_prime.taxa() &&
                 cand.s.taxa() == cand.witness.taxa();
  item("leaf-count", taxa_ok,
       std::to_string(cand.s.leaf_count()) + " vs bound " + std::to_string(want));

  bool sub_ok = false, chain_ok = false, cluster_ok = true;
  try {
    sub_ok = rooted_is_reduced(cand.s, cand.s_prime, {Rule::Subtree});
    chain_ok = rooted_is_reduced(cand.s, cand.s_prime, {Rule::Chain});
    if (cand.cluster_reduced)
      cluster_ok = rooted_is_reduced(cand.s, cand.s_prime, {Rule::Cluster});
  } catch (const Error&) {
  }
  item("subtree-reduced", sub_ok);
  item("chain-reduced", chain_ok);
  if (cand.cluster_reduced) item("cluster-reduced", cluster_ok);

  item("witness-reticulations", cand.witness.reticulation_count() == k);
  bool d1 = false, d2 = false;
  try {
    d1 = rooted_displays(cand.witness, cand.s).displayed;
    d2 = rooted_displays(cand.witness, cand.s_prime).displayed;
  } catch (const Error&) {
  }
  item("witness-displays-s", d1);
  item("witness-displays-s-prime", d2);

  bool lb_ok = false;
  std::string lb_detail;
  try {
    UnrootedTree u1 = unroot(cand.s);
    UnrootedTree u2 = unroot(cand.s_prime);
    int lb = mp_lower_bound(u1, u2).bound;
    lb_ok = lb >= k;
    lb_detail = "parsimony gap " + std::to_string(lb) + " vs k = " + std::to_string(k);
  } catch (const Error& e) {
    lb_detail = e.what();
  }
  item("hybridization-lower-bound", lb_ok, lb_detail);
  return rep;
}

void write_rooted_candidate(const std::string& dir, const RootedCandidate& cand) {
  std::filesystem::create_directories(dir);
  write_file(dir + "/s.nwk", serialize_rooted_newick(cand.s) + "\n");
  write_file(dir + "/s_prime.nwk", serialize_rooted_newick(cand.s_prime) + "\n");
  write_file(dir + "/witness.rnet", serialize_rnet(cand.witness));
  std::ostringstream cert;
  cert << "k " << cand.k << "\n";
  cert << "cluster_reduced " << (cand.cluster_reduced ? 1 : 0) << "\n";
  write_file(dir + "/certificate.txt", cert.str());
}

RootedCandidate read_rooted_candidate(const std::string& dir) {
  RootedCandidate cand;
  std::string s1 = read_file(dir + "/s.nwk");
  std::string s2 = read_file(dir + "/s_prime.nwk");
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
  };
  cand.s = parse_rooted_newick(strip(s1));
  cand.s_prime = parse_rooted_newick(strip(s2));
  cand.witness = parse_rnet(read_file(dir + "/witness.rnet"));
  std::istringstream cert(read_file(dir + "/certificate.txt"));
  std::string key;
  while (cert >> key) {
    if (key == "k")
      cert >> cand.k;
    else if (key == "cluster_reduced") {
      int flag = 0;
      cert >> flag;
      cand.cluster_reduced = flag != 0;
    }
  }
  return cand;
}

namespace {

struct SplitMix {
  std::uint64_t s;
  explicit SplitMix(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next() {
    s ^= s >> 12;
    s ^= s << 25;
    s ^= s >> 27;
    return s * 0x2545f4914f6cdd1dull;
  }
  int uniform(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

struct RootedScratch {
  int counter = 0;
  std::vector<std::pair<int, int>> edges;
  std::map<int, Taxon> labels;
};

RootedScratch random_rooted_scratch(const std::vector<Taxon>& taxa, SplitMix& rng) {
  RootedScratch t;
  int root = t.counter++;
  int a = t.counter++, b = t.counter++;
  t.edges = {{root, a}, {root, b}};
  t.labels[a] = taxa[0];
  t.labels[b] = taxa[1];
  for (std::size_t i = 2; i < taxa.size(); ++i) {
    int pick = rng.uniform(static_cast<int>(t.edges.size()) + 1);
    int leaf = t.counter++;
    if (pick == static_cast<int>(t.edges.size())) {
      int new_root = t.counter++;
      // Find the current root: the vertex with no parent.
      std::set<int> kids;
      for (auto [p, c] : t.edges) kids.insert(c);
      int cur_root = -1;
      for (int v = 0; v < t.counter; ++v)
        if (v != leaf && v != new_root && !kids.count(v)) cur_root = v;
      t.edges.emplace_back(new_root, cur_root);
      t.edges.emplace_back(new_root, leaf);
    } else {
      auto [p, c] = t.edges[pick];
      int mid = t.counter++;
      t.edges[pick] = {p, mid};
      t.edges.emplace_back(mid, c);
      t.edges.emplace_back(mid, leaf);
    }
    t.labels[leaf] = taxa[i];
  }
  return t;
}

}  // namespace

RootedCandidate build_rooted_candidate(bool cluster_reduced, std::uint64_t seed) {
  int n = cluster_reduced ? 5 : 7;
  std::vector<Taxon> taxa;
  for (int i = 1; i <= n; ++i) taxa.push_back(std::to_string(i));
  SplitMix rng(seed);

  for (int attempt = 0; attempt < 100000; ++attempt) {
    RootedScratch scratch = random_rooted_scratch(taxa, rng);
    RootedTree t = RootedTree::from_edges(scratch.counter, scratch.edges, scratch.labels);

    // One rSPR move realized as a single-reticulation network: subdivide the
    // pruned subtree's parent edge with x, the regraft edge with w, add w->x.
    std::vector<std::pair<int, int>> edges = scratch.edges;
    int m = static_cast<int>(edges.size());
    int prune_idx = rng.uniform(m);
    auto [p, a] = edges[prune_idx];
    // Subtree below a.
    std::set<int> below{a};
    bool grew = true;
    while (grew) {
      grew = false;
      for (auto [x, y] : edges)
        if (below.count(x) && !below.count(y)) {
          below.insert(y);
          grew = true;
        }
    }
    std::vector<int> targets;
    for (int i = 0; i < m; ++i) {
      if (i == prune_idx) continue;
      if (below.count(edges[i].first)) continue;
      targets.push_back(i);
    }
    if (targets.empty()) continue;
    int target_idx = targets[rng.uniform(static_cast<int>(targets.size()))];
    auto [u, v] = edges[target_idx];

    int counter = scratch.counter;
    int x = counter++, w = counter++;
    edges[prune_idx] = {p, x};
    edges.emplace_back(x, a);
    edges[target_idx] = {u, w};
    edges.emplace_back(w, v);
    edges.emplace_back(w, x);

    RootedNetwork net;
    RootedTree t_prime = t;
    try {
      net = RootedNetwork::from_edges(counter, edges, scratch.labels);
      t_prime = switched_tree(net, {{p, x}});
      RootedTree t_check = switched_tree(net, {{w, x}});
      if (!rooted_trees_equal(t_check, t)) continue;
    } catch (const Error&) {
      continue;
    }
    if (rooted_trees_equal(t, t_prime)) continue;

    RootedCandidate cand;
    cand.k = 1;
    cand.cluster_reduced = cluster_reduced;
    cand.s = t;
    cand.s_prime = t_prime;
    cand.witness = net;
    if (verify_rooted_family(cand).all_pass()) return cand;
  }
  throw Error("build_rooted_candidate: search failed; try another seed");
}

}  // namespace tbrkit
