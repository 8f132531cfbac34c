#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tbrkit/errors.hpp"
#include "tbrkit/newick.hpp"
#include "tbrkit/tbr.hpp"
#include "test_util.hpp"

using namespace tbrkit;

namespace {

UnrootedTree quartet(const char* s) { return parse_newick(s); }

}  // namespace

namespace {

// Cut the pendant edge of `leaf` and regraft the leaf onto `target` (an edge
// of the suppressed remainder, by surviving vertex ids).
TbrMove leaf_move(const UnrootedTree& t, const Taxon& leaf, const Edge& target) {
  int v = t.leaf_vertex(leaf);
  Edge cut(v, t.neighbors(v)[0]);
  TbrMove m{cut, std::nullopt, std::nullopt};
  if (cut.a == v)
    m.attach2 = target;
  else
    m.attach1 = target;
  return m;
}

}  // namespace

TEST_CASE("identity move returns an isomorphic tree") {
  UnrootedTree t = parse_newick("((a,b),(c,(d,e)));");
  // Cut a's pendant edge; its old neighbor is suppressed, merging the two
  // other incident edges. Reattaching there restores the tree.
  int leaf = t.leaf_vertex("a");
  int p = t.neighbors(leaf)[0];
  std::vector<int> rest;
  for (int u : t.neighbors(p))
    if (u != leaf) rest.push_back(u);
  UnrootedTree moved = apply_tbr(t, leaf_move(t, "a", Edge(rest[0], rest[1])));
  CHECK(trees_equal(t, moved));
}

TEST_CASE("regrafting a leaf rearranges a quartet") {
  UnrootedTree t = quartet("((a,b),(c,d));");
  // Cut c's pendant edge and reattach inside a's pendant edge: the only
  // quartet pairing a with c.
  int a = t.leaf_vertex("a");
  UnrootedTree moved = apply_tbr(t, leaf_move(t, "c", Edge(a, t.neighbors(a)[0])));
  CHECK(trees_equal(moved, quartet("((a,c),(b,d));")));
}

TEST_CASE("invalid moves are rejected") {
  UnrootedTree t = quartet("((a,b),(c,d));");
  TbrMove bogus{Edge(97, 98), std::nullopt, std::nullopt};
  CHECK_THROWS_AS(apply_tbr(t, bogus), InvalidArgument);
}

TEST_CASE("a quartet has exactly two TBR neighbors") {
  UnrootedTree t = quartet("((a,b),(c,d));");
  auto nb = tbr_neighbors(t);
  REQUIRE(nb.size() == 2);
  bool saw_ac = false, saw_ad = false;
  for (const auto& x : nb) {
    if (trees_equal(x, quartet("((a,c),(b,d));"))) saw_ac = true;
    if (trees_equal(x, quartet("((a,d),(b,c));"))) saw_ad = true;
  }
  CHECK(saw_ac);
  CHECK(saw_ad);
}

TEST_CASE("five-leaf neighborhood matches the distance-one sphere") {
  testutil::Rng rng(5);
  UnrootedTree t = testutil::random_tree(testutil::numbered_labels(5), rng);
  auto nb = tbr_neighbors(t);
  std::set<std::string> nb_keys;
  for (const auto& x : nb) nb_keys.insert(canonical_encoding(x));
  std::set<std::string> sphere;
  for (const auto& u : testutil::all_trees(testutil::numbered_labels(5)))
    if (tbr_distance_maf(t, u).distance == 1) sphere.insert(canonical_encoding(u));
  CHECK(nb_keys == sphere);
  for (const auto& x : nb) CHECK(tbr_distance_bfs(t, x, 2) == 1);
}

TEST_CASE("bfs distance basics") {
  UnrootedTree t = quartet("((a,b),(c,d));");
  UnrootedTree u = quartet("((a,c),(b,d));");
  CHECK(tbr_distance_bfs(t, t, 3) == 0);
  CHECK(tbr_distance_bfs(t, u, 3) == 1);
  CHECK(tbr_distance_bfs(t, u, 0) == std::nullopt);
}

TEST_CASE("maf solver agrees with bfs on random pairs") {
  testutil::Rng rng(404);
  for (int rep = 0; rep < 40; ++rep) {
    int n = 4 + rng.uniform(3);  // 4..6
    auto labels = testutil::numbered_labels(n);
    UnrootedTree a = testutil::random_tree(labels, rng);
    UnrootedTree b = testutil::random_tree(labels, rng);
    SolveResult r = tbr_distance_maf(a, b);
    REQUIRE(r.exact);
    CHECK(r.distance == tbr_distance_bfs(a, b, 6).value());
    CHECK(static_cast<int>(r.forest.components.size()) == r.distance + 1);
  }
}

TEST_CASE("maf solver agrees with bfs on seven-leaf pairs") {
  testutil::Rng rng(405);
  auto labels = testutil::numbered_labels(7);
  for (int rep = 0; rep < 10; ++rep) {
    UnrootedTree a = testutil::random_tree(labels, rng);
    UnrootedTree b = testutil::random_tree(labels, rng);
    SolveResult r = tbr_distance_maf(a, b);
    REQUIRE(r.exact);
    CHECK(r.distance == tbr_distance_bfs(a, b, 8).value());
  }
}

TEST_CASE("forest witness is a valid agreement forest") {
  testutil::Rng rng(77);
  auto labels = testutil::numbered_labels(8);
  UnrootedTree a = testutil::random_tree(labels, rng);
  UnrootedTree b = testutil::random_tree(labels, rng);
  SolveResult r = tbr_distance_maf(a, b);
  REQUIRE(r.exact);
  // Components partition the taxa and induce equal topologies.
  std::set<Taxon> all;
  for (const auto& comp : r.forest.components) {
    for (const auto& x : comp) CHECK(all.insert(x).second);
    if (comp.size() >= 2)
      CHECK(trees_equal(restrict_to(a, comp), restrict_to(b, comp)));
  }
  CHECK(all.size() == static_cast<std::size_t>(a.leaf_count()));
}

TEST_CASE("metric axioms on samples") {
  testutil::Rng rng(31);
  auto labels = testutil::numbered_labels(6);
  for (int rep = 0; rep < 10; ++rep) {
    UnrootedTree a = testutil::random_tree(labels, rng);
    UnrootedTree b = testutil::random_tree(labels, rng);
    UnrootedTree c = testutil::random_tree(labels, rng);
    int dab = tbr_distance_maf(a, b).distance;
    int dba = tbr_distance_maf(b, a).distance;
    int dac = tbr_distance_maf(a, c).distance;
    int dbc = tbr_distance_maf(b, c).distance;
    CHECK(tbr_distance_maf(a, a).distance == 0);
    CHECK(dab == dba);
    CHECK(dac <= dab + dbc);
  }
}

TEST_CASE("one-move soundness: distance one iff neighbor, n = 5 exhaustive") {
  std::vector<UnrootedTree> space = testutil::all_trees(testutil::numbered_labels(5));
  REQUIRE(space.size() == 15);
  for (std::size_t i = 0; i < space.size(); ++i) {
    auto nbs = tbr_neighbors(space[i]);
    std::set<std::string> keys;
    for (const auto& x : nbs) keys.insert(canonical_encoding(x));
    for (std::size_t j = 0; j < space.size(); ++j) {
      if (i == j) continue;
      int d = tbr_distance_maf(space[i], space[j]).distance;
      bool neighbor = keys.count(canonical_encoding(space[j])) > 0;
      CHECK((d == 1) == neighbor);
    }
  }
}

TEST_CASE("facade kernelizes then solves") {
  testutil::Rng rng(606);
  auto labels = testutil::numbered_labels(10);
  for (int rep = 0; rep < 10; ++rep) {
    UnrootedTree a = testutil::random_tree(labels, rng);
    UnrootedTree b = testutil::random_tree(labels, rng);
    DistanceCertificate cert = tbr_distance(a, b);
    SolveResult direct = tbr_distance_maf(a, b);
    CHECK(cert.distance == direct.distance);
    CHECK(cert.kernel1.leaf_count() <= a.leaf_count());
  }
  DistanceCertificate self = tbr_distance(parse_newick("((a,b),(c,d));"),
                                          parse_newick("((a,b),(c,d));"));
  CHECK(self.distance == 0);
}

TEST_CASE("budget exhaustion yields a certified bracket") {
  testutil::Rng rng(909);
  auto labels = testutil::numbered_labels(9);
  UnrootedTree a = testutil::random_tree(labels, rng);
  UnrootedTree b = testutil::random_tree(labels, rng);
  SolveResult full = tbr_distance_maf(a, b);
  REQUIRE(full.exact);
  SolveOptions tiny;
  tiny.max_nodes = 2;
  SolveResult r = tbr_distance_maf(a, b, tiny);
  if (!r.exact) {
    CHECK(r.lower <= full.distance);
    CHECK(full.distance <= r.upper);
  }
}

TEST_CASE("bfs resource guard throws cleanly") {
  testutil::Rng rng(3131);
  auto labels = testutil::numbered_labels(7);
  UnrootedTree a = testutil::random_tree(labels, rng);
  UnrootedTree b = testutil::random_tree(labels, rng);
  if (!trees_equal(a, b)) CHECK_THROWS_AS(tbr_distance_bfs(a, b, 8, 1), BudgetExceeded);
}

TEST_CASE("one-move soundness: exhaustive over all six-leaf tree pairs") {
  std::vector<UnrootedTree> space = testutil::all_trees(testutil::numbered_labels(6));
  REQUIRE(space.size() == 105);
  std::vector<std::set<std::string>> nbr_keys(space.size());
  std::vector<std::string> keys(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    keys[i] = canonical_encoding(space[i]);
    for (const auto& x : tbr_neighbors(space[i]))
      nbr_keys[i].insert(canonical_encoding(x));
  }
  int checked = 0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      int d = tbr_distance_maf(space[i], space[j]).distance;
      bool neighbor = nbr_keys[i].count(keys[j]) > 0;
      CHECK((d == 1) == neighbor);
      // Symmetry of the move relation.
      CHECK(neighbor == (nbr_keys[j].count(keys[i]) > 0));
      ++checked;
    }
  }
  CHECK(checked == 105 * 104 / 2);
}

TEST_CASE("identical trees give a single-component forest") {
  UnrootedTree t = parse_newick("((a,b),(c,(d,e)));");
  SolveResult r = tbr_distance_maf(t, t);
  CHECK(r.exact);
  CHECK(r.distance == 0);
  REQUIRE(r.forest.components.size() == 1);
  CHECK(r.forest.components[0].size() == 5);
}
