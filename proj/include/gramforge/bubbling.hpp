#pragma once

#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gramforge/oracle.hpp"
#include "gramforge/parse_tree.hpp"
#include "gramforge/util.hpp"

namespace gramforge {

/// Contiguous sibling span proposed for extraction under a new parent.
/// Indices are inclusive child positions.
struct Bubble {
  int tree_index = 0;
  std::uint64_t parent_id = 0;
  int start = 0;
  int end = 0;
};

/// An existing node class: a non-terminal label, or a terminal token text
/// (every leaf with that text forms an implicit class).
struct ClassRef {
  bool is_terminal = false;
  std::string text;

  bool operator==(const ClassRef&) const = default;
};

using MergeSide = std::variant<Bubble, ClassRef>;

struct MergeCandidate {
  MergeSide a;
  MergeSide b;
};

/// Names the class created by an accepted merge. Implementations may consult
/// an LLM; returning an empty string falls back to the fresh-label scheme.
class Labeler {
 public:
  virtual ~Labeler() = default;
  virtual std::string suggest_label(const std::string& yield_a, const std::string& yield_b,
                                    const std::set<std::string>& taken) = 0;
};

struct CheckOutcome {
  bool accepted = false;
  std::string unified_label;
  int strings_checked = 0;
};

struct BubbleOptions {
  int sample_cap = 100;
  int per_side_occurrence_cap = 50;
};

struct ClassInventory {
  std::vector<std::string> labels;     // internal labels, sorted, start first
  std::vector<std::string> terminals;  // leaf texts with at least one bare occurrence, sorted
};

/// Mutating engine over one forest. All structural generalization goes
/// through check(): tentative restructure, swapped-string sampling, and
/// either a forest-wide relabel or an exact rollback.
class BubbleEngine {
 public:
  BubbleEngine(ParseForest& forest, OracleClient& oracle, Rng& rng, BubbleOptions opts = {},
               Labeler* labeler = nullptr, std::ostream* trace = nullptr)
      : forest_(forest), oracle_(oracle), rng_(rng), opts_(opts), labeler_(labeler),
        trace_(trace) {}

  /// Swapped-string sampling for a pair of classes: for each capped
  /// occurrence and direction, the occurrence's subtree yield is replaced by
  /// the yield of a randomly drawn donor of the other class. Returns
  /// distinct strings, at most `cap`.
  std::vector<std::string> sample_swapped_strings(const ClassRef& a, const ClassRef& b, int cap);

  /// Validates and applies a merge candidate. On acceptance the bubbles are
  /// materialized, both sides relabeled forest-wide under one name, and
  /// terminal-class leaves wrapped. On rejection the forest is restored
  /// bit-identically.
  CheckOutcome check_bubble(const MergeCandidate& cand);

  /// Pre-processing pass: tries to merge each bracket-created node class
  /// with every other class, in ascending node-id order. Accepted merges are
  /// visible to later pairs. Returns the number of accepted merges.
  int merge_all_valid(const std::vector<std::uint64_t>& bracket_ids);

  /// Distinct label sequences found strictly inside a matched bracket pair,
  /// shortest first, then lexicographic.
  std::vector<std::vector<std::string>> bracket_bubble_candidates() const;

  /// Folds every sibling span matching `seq` under a node labeled `target`,
  /// leftmost-innermost first, until no match remains. Returns folds made.
  int apply_rule_everywhere(const std::vector<std::string>& seq, const std::string& target);

  /// Finds occurrences of a label sequence as sibling spans (excluding full
  /// root spans). Deterministic order.
  std::vector<Bubble> find_sequence_spans(const std::vector<std::string>& seq) const;

  /// Folds every occurrence of `seq` under one tentative class, then tries
  /// partners from the current inventory until one accepts; everything rolls
  /// back when none does. Returns the unified label on acceptance.
  std::optional<std::string> try_sequence_merge(const std::vector<std::string>& seq);

  /// Same, but against one specific partner.
  std::optional<std::string> try_sequence_merge_with(const std::vector<std::string>& seq,
                                                     const ClassRef& partner);

  /// Tries to merge two sequences with each other (a 2-bubble): both are
  /// folded tentatively and checked as one class pair.
  std::optional<std::string> try_sequence_pair_merge(const std::vector<std::string>& seq_a,
                                                     const std::vector<std::string>& seq_b);

  ClassInventory classes() const;

  ParseForest& forest() { return forest_; }
  OracleClient& oracle() { return oracle_; }

 private:
  struct Materialized {
    ParseNode* node = nullptr;
    bool ok = false;
  };

  Materialized materialize(const Bubble& b);
  std::optional<ClassRef> materialize_sequence_class(const std::vector<std::string>& seq);
  std::vector<NodeRef> class_occurrences(const ClassRef& c) const;
  void relabel_class(const ClassRef& c, const std::string& unified);
  std::string decide_label(const ClassRef& a, const ClassRef& b, const std::string& yield_a,
                           const std::string& yield_b);
  void trace_line(const std::string& line);

  ParseForest& forest_;
  OracleClient& oracle_;
  Rng& rng_;
  BubbleOptions opts_;
  Labeler* labeler_;
  std::ostream* trace_;
};

}  // namespace gramforge
