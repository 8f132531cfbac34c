#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tbrkit/errors.hpp"
#include "tbrkit/newick.hpp"
#include "tbrkit/reduce.hpp"
#include "test_util.hpp"

using namespace tbrkit;

TEST_CASE("identical quartets collapse to a fresh two-leaf pair") {
  UnrootedTree t = parse_newick("((a,b),(c,d));");
  ReductionTrace trace;
  trace.seed_from(t, t);
  auto [a, b] = reduce_subtrees(t, t, trace);
  CHECK(a.leaf_count() == 2);
  CHECK(trees_equal(a, b));
  for (const auto& x : a.taxa()) CHECK(x.substr(0, 2) == "$R");
  CHECK(trace.steps.size() == 2);
}

TEST_CASE("one shared cherry in otherwise conflicting trees") {
  UnrootedTree t = parse_newick("(((x,y),a),(b,(c,d)));");
  UnrootedTree u = parse_newick("(((x,y),c),(d,(a,b)));");
  ReductionTrace trace;
  trace.seed_from(t, u);
  auto [a, b] = reduce_subtrees(t, u, trace);
  CHECK(a.leaf_count() == 5);
  CHECK(b.leaf_count() == 5);
  REQUIRE(trace.steps.size() == 1);
  CHECK(trace.steps[0].removed == std::vector<Taxon>{"x", "y"});
  CHECK(maximal_common_pendant_subtrees(a, b).empty());
}

TEST_CASE("chain reduction replaces a common 5-chain by a fresh 3-chain") {
  UnrootedTree t = parse_newick(
      "(((x1,x2),(x3,x4)),(c1,(c2,(c3,(c4,(c5,((y1,y2),(y3,y4))))))));");
  UnrootedTree u = parse_newick(
      "(((x1,x3),(x2,x4)),(c1,(c2,(c3,(c4,(c5,((y1,y3),(y2,y4))))))));");
  ReductionTrace trace;
  trace.seed_from(t, u);
  auto [a, b] = reduce_chains(t, u, trace);
  CHECK(a.leaf_count() == t.leaf_count() - 2);
  CHECK(b.leaf_count() == u.leaf_count() - 2);
  REQUIRE(trace.steps.size() == 1);
  CHECK(trace.steps[0].kind == Rule::Chain);
  CHECK(trace.steps[0].removed.size() == 5);
  CHECK(trace.steps[0].introduced.size() == 3);
  CHECK(is_chain(a, trace.steps[0].introduced));
  CHECK(is_chain(b, trace.steps[0].introduced));
  CHECK(maximal_common_chains(a, b, 4).empty());
}

TEST_CASE("chain pendant in one tree only keeps its pendant shape") {
  // (l1..l4) pendant in t (l1,l2 share a parent), not pendant in u; every
  // other cherry differs between the trees.
  UnrootedTree t = parse_newick("((((l1,l2),l3),l4),((p,q),((r,s),(w,z))));");
  UnrootedTree u = parse_newick("(((p,r),(q,w)),(l1,(l2,(l3,(l4,(s,z))))));");
  REQUIRE(maximal_common_pendant_subtrees(t, u).empty());
  auto chains = maximal_common_chains(t, u, 4);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].leaves.size() == 4);

  ReductionTrace trace;
  trace.seed_from(t, u);
  auto [a, b] = reduce_chains(t, u, trace);
  auto reduced = maximal_common_chains(a, b, 2);
  bool found = false;
  for (const auto& c : reduced) {
    if (c.leaves.size() == 3 && c.leaves[0].substr(0, 2) == "$R") {
      found = true;
      // Pendant in a (the reduced t) only, matching the input shape.
      CHECK(c.pendant_head_t1 != c.pendant_head_t2);
    }
  }
  CHECK(found);
}

TEST_CASE("reduce_chains requires a subtree reduced pair") {
  UnrootedTree t = parse_newick("((a,b),(c,d));");
  ReductionTrace trace;
  CHECK_THROWS_AS(reduce_chains(t, t, trace), InvalidArgument);
}

TEST_CASE("kernelize fixpoint is idempotent") {
  testutil::Rng rng(555);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 6 + rng.uniform(5);
    UnrootedTree t = testutil::random_tree(testutil::numbered_labels(n), rng);
    UnrootedTree u = testutil::random_tree(testutil::numbered_labels(n), rng);
    KernelResult k1 = kernelize(t, u);
    KernelResult k2 = kernelize(k1.t1, k1.t2);
    CHECK(trees_equal(k1.t1, k2.t1));
    CHECK(trees_equal(k1.t2, k2.t2));
    CHECK(k2.trace.steps.empty());
    CHECK(is_reduced(k1.t1, k1.t2, subtree_chain_rules()));
  }
}

TEST_CASE("trace replay reproduces the reduced pair") {
  testutil::Rng rng(777);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 6 + rng.uniform(6);
    UnrootedTree t = testutil::random_tree(testutil::numbered_labels(n), rng);
    UnrootedTree u = testutil::random_tree(testutil::numbered_labels(n), rng);
    KernelResult k = kernelize(t, u, all_rules());
    auto [a, b] = replay_trace(t, u, k.trace);
    CHECK(trees_equal(a, k.t1));
    CHECK(trees_equal(b, k.t2));
    // Serialized trace replays identically.
    ReductionTrace parsed = parse_trace(serialize_trace(k.trace));
    auto [a2, b2] = replay_trace(t, u, parsed);
    CHECK(trees_equal(a2, k.t1));
    CHECK(trees_equal(b2, k.t2));
  }
}

TEST_CASE("fresh labels never collide with reserved input labels") {
  UnrootedTree t = parse_newick("((($R7,b),(c,d)),(e,f));", true);
  ReductionTrace trace;
  trace.seed_from(t, t);
  CHECK(trace.fresh_counter == 8);
  CHECK(trace.fresh_label() == "$R8");
}

TEST_CASE("cluster decomposition splits around a minimal common cluster") {
  UnrootedTree t = parse_newick("(((p,q),r),((a,b),(c,d)));");
  UnrootedTree u = parse_newick("(((p,q),r),((a,c),(b,d)));");
  ClusterSplit split = cluster_decompose(t, u);
  CHECK(split.cluster == std::vector<Taxon>{"p", "q"});
  CHECK(split.piece.first.leaf_count() == 3);   // p, q, marker
  CHECK(split.remainder.first.leaf_count() == 6);
  CHECK(split.piece.first.has_taxon(split.marker));
  CHECK(split.remainder.first.has_taxon(split.marker));

  auto comps = cluster_decompose_recursive(t, u);
  for (const auto& [x, y] : comps) CHECK(common_nontrivial_clusters(x, y).empty());
}

TEST_CASE("cluster decompose on a cluster reduced pair is an error") {
  UnrootedTree t = parse_newick("((a,b),(c,d));");
  UnrootedTree u = parse_newick("((a,c),(b,d));");
  CHECK_THROWS_AS(cluster_decompose(t, u), InvalidArgument);
}

TEST_CASE("is_reduced on identical trees with n >= 4 is false") {
  UnrootedTree t = parse_newick("((a,b),(c,d));");
  CHECK_FALSE(is_reduced(t, t, {Rule::Subtree}));
  CHECK_FALSE(is_reduced(t, t, {Rule::Chain}));
  CHECK_FALSE(is_reduced(t, t, {Rule::Cluster}));
  UnrootedTree u = parse_newick("((a,c),(b,d));");
  CHECK(is_reduced(t, u, all_rules()));
}

#include "tbrkit/tbr.hpp"

TEST_CASE("cluster decomposition is empirically additive for the exact distance") {
  // Measured rather than assumed: the split-off piece and the remainder must
  // account for the whole distance. Any counterexample fails hard with the
  // instance attached.
  testutil::Rng rng(4242);
  int tested = 0;
  for (int rep = 0; rep < 60 && tested < 25; ++rep) {
    int inner = 4 + rng.uniform(3);                  // conflicting core
    int outer = 3 + rng.uniform(3);                  // planted cluster size
    auto inner_labels = testutil::numbered_labels(inner, "i");
    auto outer_labels = testutil::numbered_labels(outer, "o");
    UnrootedTree core1 = testutil::random_tree(inner_labels, rng);
    UnrootedTree core2 = testutil::random_tree(inner_labels, rng);
    UnrootedTree blob1 = testutil::random_tree(outer_labels, rng);
    UnrootedTree blob2 = testutil::random_tree(outer_labels, rng);
    // Graft each blob onto the pendant edge of i1 so {o...} is a cluster of
    // both trees.
    auto graft = [](const UnrootedTree& core, const UnrootedTree& blob) {
      MutableGraph g = core.to_graph();
      int leaf = -1;
      for (int v = 0; v < g.size(); ++v)
        if (g.alive(v) && g.label(v) == "i1") leaf = v;
      int stub = g.neighbors(leaf)[0];
      g.remove_edge(leaf, stub);
      int mid = g.add_vertex();
      g.add_edge(leaf, mid);
      g.add_edge(mid, stub);
      std::map<int, int> to;
      for (int v = 0; v < blob.vertex_count(); ++v) to[v] = g.add_vertex(blob.label(v));
      for (const Edge& e : blob.edges()) g.add_edge(to[e.a], to[e.b]);
      // Hang the blob from mid through a fresh junction on its first edge.
      Edge be = blob.edges()[0];
      g.remove_edge(to[be.a], to[be.b]);
      int hub = g.add_vertex();
      g.add_edge(to[be.a], hub);
      g.add_edge(hub, to[be.b]);
      g.add_edge(hub, mid);
      return UnrootedTree::from_graph(g);
    };
    UnrootedTree t1 = graft(core1, blob1);
    UnrootedTree t2 = graft(core2, blob2);
    auto clusters = common_nontrivial_clusters(t1, t2);
    bool planted = false;
    for (const auto& c : clusters)
      if (c.size() == outer_labels.size()) planted = true;
    if (!planted) continue;
    ++tested;
    ClusterSplit split = cluster_decompose(t1, t2);
    int whole = tbr_distance_maf(t1, t2).distance;
    int piece = tbr_distance_maf(split.piece.first, split.piece.second).distance;
    int rest = tbr_distance_maf(split.remainder.first, split.remainder.second).distance;
    CAPTURE(serialize_newick(t1));
    CAPTURE(serialize_newick(t2));
    CHECK(whole == piece + rest);
  }
  CHECK(tested >= 20);
}
