#pragma once

#include <map>
#include <string>
#include <vector>

#include "tbrkit/tree.hpp"

namespace tbrkit {

using State = std::string;

// Leaf-state assignment, total on the taxa it is scored against.
struct Character {
  std::map<Taxon, State> states;
};

// Optimal parsimony score together with one optimal extension to all
// vertices of the scored tree.
struct FitchResult {
  int score = 0;
  std::vector<State> extension;  // indexed by tree vertex id
};

// Small-parsimony scoring: root on the edge of the smallest leaf, bottom-up
// state sets, top-down resolution. Score is root-invariant; fixing the root
// makes the witness deterministic.
FitchResult fitch_score(const UnrootedTree& t, const Character& f);

// Binary character cutting the given edge: one side 0, the other 1. Scores
// exactly 1 on the source tree.
Character bipartition_character(const UnrootedTree& t, const Edge& e);

struct MpLowerBound {
  int bound = 0;
  Character witness;
};

// Certified lower bound for the maximum parsimony distance (and hence for
// the TBR distance): maximizes |l_f(t1) - l_f(t2)| over the bipartition
// characters of both trees. exhaustive_binary additionally scans every
// binary character; guarded to small leaf sets.
MpLowerBound mp_lower_bound(const UnrootedTree& t1, const UnrootedTree& t2,
                            bool exhaustive_binary = false);

std::string serialize_character(const Character& f);        // taxon<TAB>state lines
Character parse_character(const std::string& text);

}  // namespace tbrkit
