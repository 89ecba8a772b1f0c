#pragma once

#include <string>
#include <vector>

#include "gramforge/bubbling.hpp"

namespace gramforge {

/// A scored bubble/partner pairing. Single-label sequences denote a plain
/// class merge rather than a new span.
struct RankedCandidate {
  std::vector<std::string> seq;
  ClassRef partner;
  double similarity = 0.0;  // Jaccard over multisets of (left,right) neighbor labels
  int frequency = 0;
  int depth = 0;
};

struct HeuristicOptions {
  int ngram_min = 1;
  int ngram_max = 7;
  std::size_t max_candidates = 20000;
};

/// Deterministic ranking: context similarity desc, frequency desc, depth
/// deeper-first, length shorter-first, lexicographic tiebreak.
std::vector<RankedCandidate> rank_bubbles(const ParseForest& forest,
                                          const HeuristicOptions& opts = {});

/// Walks the ranked list through the engine's bubble check, re-ranking after
/// every accepted merge; stops after `budget` consecutive rejects or when a
/// full pass makes no progress. Returns the number of accepted merges.
int refine_with_heuristics(BubbleEngine& engine, int budget,
                           const HeuristicOptions& opts = {});

}  // namespace gramforge
