#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tbrkit/reduce.hpp"
#include "tbrkit/tree.hpp"

namespace tbrkit {

// One TBR operation: cut an edge, then reconnect the two components by a new
// edge. A reattachment point is an edge of the (suppressed) component, or
// nothing when the component is a single leaf vertex.
struct TbrMove {
  Edge cut;
  std::optional<Edge> attach1;  // component containing cut.a
  std::optional<Edge> attach2;  // component containing cut.b
};

UnrootedTree apply_tbr(const UnrootedTree& t, const TbrMove& move);

// All distinct trees one TBR move away (the tree itself excluded).
std::vector<UnrootedTree> tbr_neighbors(const UnrootedTree& t);

// Breadth-first search over the move graph with canonical-form memoization.
// Returns nullopt when the distance exceeds max_k; throws BudgetExceeded if
// more than max_visited trees would be expanded.
std::optional<int> tbr_distance_bfs(const UnrootedTree& t1, const UnrootedTree& t2,
                                    int max_k, std::uint64_t max_visited = 2'000'000);

// Partition of the taxa into blocks inducing identical subtrees in both
// trees, with vertex-disjoint minimal subtrees. d_TBR = #components - 1.
struct AgreementForest {
  std::vector<std::vector<Taxon>> components;
};

struct SolveOptions {
  std::uint64_t max_nodes = 10'000'000;
};

struct SolveResult {
  bool exact = false;
  int distance = -1;     // valid when exact
  int lower = 0;         // certified bracket when inexact
  int upper = -1;
  AgreementForest forest;  // witness for distance (exact) or upper (inexact)
  std::uint64_t nodes = 0;
};

// Exact TBR distance through minimum agreement forest search: iterative
// deepening over sets of cut edges of t1, branching only on edges that can
// fix the current conflict. Deterministic.
SolveResult tbr_distance_maf(const UnrootedTree& t1, const UnrootedTree& t2,
                             const SolveOptions& opts = {});

// Kernelize with the subtree and chain rules, then solve the kernel.
struct DistanceCertificate {
  int distance = -1;
  UnrootedTree kernel1, kernel2;
  ReductionTrace trace;
  SolveResult solve;
};
DistanceCertificate tbr_distance(const UnrootedTree& t1, const UnrootedTree& t2,
                                 const SolveOptions& opts = {});

std::string serialize_certificate(const DistanceCertificate& cert);

// Canonical split-set encoding used for move-space memoization.
std::string canonical_encoding(const UnrootedTree& t);

}  // namespace tbrkit
