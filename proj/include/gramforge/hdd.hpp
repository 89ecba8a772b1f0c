#pragma once

#include <cstdint>
#include <vector>

#include "gramforge/oracle.hpp"
#include "gramforge/parse_tree.hpp"
#include "gramforge/util.hpp"

namespace gramforge {

struct HddOptions {
  int samples = 50;
  std::uint64_t rng_seed = 101;
};

/// Samples strings from the tree the way the bubble check does: the plain
/// yield first, then single random substitutions of a subtree's yield by a
/// same-labeled donor from anywhere in the forest. True iff the oracle
/// accepts all of them. Deterministic for a given (tree, forest, seed), so
/// results can be re-asserted.
bool passes_sample_criterion(const ParseTree& tree, const ParseForest& forest,
                             OracleClient& oracle, int n, std::uint64_t seed);

/// Hierarchical delta debugging per tree: root-down, per parent, a ddmin run
/// over the child list where a configuration counts as "failing" exactly
/// when the pruned tree still meets the sample criterion. Every intermediate
/// passing tree is kept; originals are always included first.
std::vector<ParseTree> hdd_decompose(const ParseForest& forest, OracleClient& oracle,
                                     const HddOptions& opts = {});

}  // namespace gramforge
