#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tbrkit/network.hpp"
#include "tbrkit/parsimony.hpp"
#include "tbrkit/rooted.hpp"
#include "tbrkit/tree.hpp"

namespace tbrkit {

enum class FamilyVariant { SC, SCC };

// A built tight instance: the reduced tree pair on 15k-9 integer-labeled
// taxa, the witness network with reticulation number k, and the certificate
// data that pins d_TBR to exactly k.
struct TightInstance {
  FamilyVariant variant = FamilyVariant::SC;
  int k = 0;
  UnrootedTree s, s_prime;
  UnrootedNetwork witness;
  // Break schedule: each entry (x, y) deletes the witness edge between the
  // attachment vertices of adjacent chain leaves x and y.
  std::vector<std::pair<Taxon, Taxon>> breaks_s, breaks_s_prime;
  Character cert_character;  // scores 1 on s and k+1 on s_prime
  int fitch_s = 0, fitch_s_prime = 0;
  std::vector<std::vector<Taxon>> expected_clusters;  // SC only
};

// Subtree+chain reduced family on the doubled-rung ladder generator; k >= 2.
TightInstance build_sc(int k);
// Subtree+chain+cluster reduced family on the crossed ladder; k >= 4.
TightInstance build_scc(int k);

struct VerifyReport {
  struct Item {
    std::string name;
    bool pass = false;
    std::string detail;
  };
  std::vector<Item> items;
  bool all_pass() const {
    for (const auto& i : items)
      if (!i.pass) return false;
    return true;
  }
  const Item* first_failure() const {
    for (const auto& i : items)
      if (!i.pass) return &i;
    return nullptr;
  }
};

struct VerifyOptions {
  int solver_confirm_max_k = 3;
  std::uint64_t solver_budget = 10'000'000;
};

// Re-derives every certificate item from scratch: leaf count, reducedness,
// witness reticulation number and displays, break embeddings, the parsimony
// score pair, and (for small k) a direct solver confirmation.
VerifyReport verify_instance(const TightInstance& inst, const VerifyOptions& opts = {});

// Break edges of the witness, resolved from the taxon pairs.
std::vector<Edge> break_edges(const UnrootedNetwork& witness,
                              const std::vector<std::pair<Taxon, Taxon>>& breaks);

// Directory layout: s.nwk, s_prime.nwk, witness.unet, certificate.txt.
void write_instance(const std::string& dir, const TightInstance& inst);
TightInstance read_instance(const std::string& dir);

// Candidate family for the rooted bounds: the verifier consumes any supplied
// pair + witness network and certifies (or refutes) tightness at the claimed
// hybridization number.
struct RootedCandidate {
  int k = 0;
  bool cluster_reduced = false;
  RootedTree s, s_prime;
  RootedNetwork witness;
};

VerifyReport verify_rooted_family(const RootedCandidate& cand);

void write_rooted_candidate(const std::string& dir, const RootedCandidate& cand);
RootedCandidate read_rooted_candidate(const std::string& dir);

// Seeded search for a valid rooted candidate at k = 1 (|X| = 7, or 5 with
// the cluster rule): random rooted trees one rSPR move apart plus the
// connecting one-reticulation network, retried until the verifier passes.
RootedCandidate build_rooted_candidate(bool cluster_reduced, std::uint64_t seed);

}  // namespace tbrkit
