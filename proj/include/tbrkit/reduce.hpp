#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tbrkit/tree.hpp"

namespace tbrkit {

enum class Rule { Subtree, Chain, Cluster };
using RuleSet = std::set<Rule>;

inline RuleSet all_rules() { return {Rule::Subtree, Rule::Chain, Rule::Cluster}; }
inline RuleSet subtree_chain_rules() { return {Rule::Subtree, Rule::Chain}; }

// One recorded reduction application. removed lists the leaves taken out of
// both trees (chain steps keep the order found in t1); introduced lists the
// fresh labels that replaced them. Enough context to replay the step.
struct ReductionStep {
  Rule kind = Rule::Subtree;
  std::vector<Taxon> removed;
  std::vector<Taxon> introduced;
  // Chain steps: pendant flags per tree, head then tail.
  std::array<bool, 2> pendant_t1{false, false};
  std::array<bool, 2> pendant_t2{false, false};
};

struct ReductionTrace {
  std::vector<ReductionStep> steps;
  int fresh_counter = 1;

  // Fresh labels live in a reserved namespace. The counter starts past any
  // reserved label already present so replayed artifacts never collide.
  Taxon fresh_label();
  void seed_from(const UnrootedTree& t1, const UnrootedTree& t2);
};

std::string serialize_trace(const ReductionTrace& trace);
ReductionTrace parse_trace(const std::string& text);

// Subtree rule to a fixpoint: no common pendant subtree with >= 2 leaves
// remains. Identity when already reduced.
std::pair<UnrootedTree, UnrootedTree> reduce_subtrees(const UnrootedTree& t1,
                                                      const UnrootedTree& t2,
                                                      ReductionTrace& trace);

// Chain rule to a fixpoint: every maximal common chain of length >= 4 is
// replaced by a fresh 3-chain, preserving orientation and pendant shape.
// Requires the pair to be subtree reduced.
std::pair<UnrootedTree, UnrootedTree> reduce_chains(const UnrootedTree& t1,
                                                    const UnrootedTree& t2,
                                                    ReductionTrace& trace);

// Alternates the enabled rules to a global fixpoint. Subtree runs before
// chain (a chain pendant at both ends in both trees is a subtree case); the
// cluster rule contracts one minimal common cluster to a fresh marker per
// step, with the split-off piece recoverable via cluster_decompose.
struct KernelResult {
  UnrootedTree t1, t2;
  ReductionTrace trace;
};
KernelResult kernelize(const UnrootedTree& t1, const UnrootedTree& t2,
                       const RuleSet& rules = subtree_chain_rules());

bool is_reduced(const UnrootedTree& t1, const UnrootedTree& t2, const RuleSet& rules);

// Splits the pair around one common nontrivial cluster Y (minimal by size,
// then lexicographically): the restriction to Y plus a marker leaf at the
// cut edge, and the remainder with Y contracted to the same marker.
struct ClusterSplit {
  std::vector<Taxon> cluster;
  Taxon marker;
  std::pair<UnrootedTree, UnrootedTree> piece;
  std::pair<UnrootedTree, UnrootedTree> remainder;
};
ClusterSplit cluster_decompose(const UnrootedTree& t1, const UnrootedTree& t2);

// Repeats cluster decomposition until every component pair is cluster
// reduced; returns the component pairs.
std::vector<std::pair<UnrootedTree, UnrootedTree>> cluster_decompose_recursive(
    const UnrootedTree& t1, const UnrootedTree& t2);

// Applies the recorded steps to the original pair, reproducing the reduced
// pair exactly.
std::pair<UnrootedTree, UnrootedTree> replay_trace(const UnrootedTree& t1,
                                                   const UnrootedTree& t2,
                                                   const ReductionTrace& trace);

// Single-step surgeries, exposed for replay and the step-safety tests.
UnrootedTree replace_pendant_set(const UnrootedTree& t, const std::vector<Taxon>& set,
                                 const Taxon& fresh);
UnrootedTree replace_chain_prefix(const UnrootedTree& t, const std::vector<Taxon>& chain,
                                  const std::vector<Taxon>& fresh3);

}  // namespace tbrkit
