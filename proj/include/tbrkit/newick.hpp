#pragma once

#include <string>
#include <vector>

#include "tbrkit/tree.hpp"

namespace tbrkit {

// Reads one unrooted binary tree from Newick text. Branch lengths and
// internal labels are tolerated and discarded. A degree-2 vertex at the
// written root is suppressed; any other non-binary vertex is rejected.
// Labels in the reserved "$R<n>" namespace are rejected unless
// allow_reserved is set (used when reading back our own artifacts).
UnrootedTree parse_newick(const std::string& text, bool allow_reserved = false);

// Canonical text: rooted at the internal vertex next to the smallest leaf,
// subtrees ordered by their smallest contained taxon. Isomorphic trees
// serialize identically.
std::string serialize_newick(const UnrootedTree& t);

// One tree per line, each terminated by ';'.
std::vector<UnrootedTree> read_newick_file(const std::string& path,
                                           bool allow_reserved = false);
void write_newick_file(const std::string& path, const std::vector<UnrootedTree>& trees);

}  // namespace tbrkit
