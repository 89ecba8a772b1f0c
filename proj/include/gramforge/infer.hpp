#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gramforge/grammar.hpp"
#include "gramforge/llm.hpp"
#include "gramforge/oracle.hpp"

namespace gramforge {

struct InferOptions {
  std::string start_label = "start";
  std::uint64_t rng_seed = 101;

  bool bracket_bubbles = true;  // bracket-node merging and in-bracket candidates
  bool llm_bubbles = true;
  bool treevada = true;
  bool hdd = true;
  bool lexinfer = true;
  bool ai_label = true;
  bool split_digit_runs = false;
  bool lex_any_printable = false;

  int idle_rounds = 5;
  int max_loop_iterations = 500;  // hard stop even if merges keep trickling in
  int sample_cap = 100;
  int per_side_occurrence_cap = 50;
  int hdd_samples = 50;
  int lex_samples = 50;
  int heuristic_budget = 2000;

  std::string trace_path;
  std::string dump_trees_dir;
};

struct RunReport {
  std::uint64_t oracle_calls_total = 0;
  std::uint64_t oracle_calls_external = 0;
  std::uint64_t oracle_timeouts = 0;
  std::uint64_t llm_bubble_calls = 0;
  std::uint64_t llm_label_calls = 0;
  int loop_iterations = 0;
  int merges_accepted = 0;
  int hdd_trees = 0;
  double runtime_s = 0.0;

  std::string to_json() const;
};

struct SeedProgram {
  std::string id;
  std::string text;
};

class InferError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs the full recovery pipeline: pretokenize, prune whitespace, naive
/// trees, bracket pre-structuring and merging, the bracket/LLM bubble loop,
/// heuristic refinement, HDD, grammar induction and lexical inference.
Grammar infer_grammar(const std::vector<SeedProgram>& seeds, OracleClient& oracle,
                      BubbleAdvisor& advisor, const InferOptions& opts, RunReport* report = nullptr);

}  // namespace gramforge
