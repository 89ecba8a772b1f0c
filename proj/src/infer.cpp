#include "gramforge/infer.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gramforge/bubbling.hpp"
#include "gramforge/hdd.hpp"
#include "gramforge/heuristics.hpp"
#include "gramforge/parse_tree.hpp"
#include "gramforge/token.hpp"
#include "json.hpp"

namespace gramforge {

std::string RunReport::to_json() const {
  nlohmann::json j{
      {"oracle_calls_total", oracle_calls_total},
      {"oracle_calls_external", oracle_calls_external},
      {"oracle_timeouts", oracle_timeouts},
      {"llm_bubble_calls", llm_bubble_calls},
      {"llm_label_calls", llm_label_calls},
      {"loop_iterations", loop_iterations},
      {"merges_accepted", merges_accepted},
      {"hdd_trees", hdd_trees},
      {"runtime_s", runtime_s},
  };
  return j.dump(2);
}

namespace {

std::vector<std::string> forest_levels(const ParseForest& forest) {
  std::vector<std::string> levels;
  for (const auto& tree : forest.trees) {
    levels.push_back("# " + tree.source_id);
    for (auto& l : tree_levels(tree)) levels.push_back(std::move(l));
  }
  return levels;
}

std::string joined(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

void dump_forest_to_dir(const ParseForest& forest, const std::string& dir,
                        const std::string& stage) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + stage + ".txt");
  out << dump_forest(forest);
}

}  // namespace

Grammar infer_grammar(const std::vector<SeedProgram>& seeds, OracleClient& oracle,
                      BubbleAdvisor& advisor, const InferOptions& opts, RunReport* report) {
  auto started = std::chrono::steady_clock::now();
  if (seeds.empty()) throw InferError("no seed programs given");

  std::ofstream trace_file;
  std::ostream* trace = nullptr;
  if (!opts.trace_path.empty()) {
    trace_file.open(opts.trace_path, std::ios::trunc);
    if (!trace_file) throw InferError("cannot open trace file: " + opts.trace_path);
    trace = &trace_file;
  }

  // Pre-tokenization and whitespace pruning. Seeds are validated up front so
  // a bad one fails with a clear message (and the pruning precondition check
  // becomes a cache hit).
  TokenizerOptions tok_opts{opts.split_digit_runs};
  std::vector<TokenSeq> seqs;
  for (const auto& seed : seeds) {
    if (!oracle.accepts(seed.text))
      throw InferError("stage pretokenize: seed '" + seed.id + "' is rejected by the oracle");
    TokenSeq seq = pretokenize(seed.text, seed.id, tok_opts);
    seqs.push_back(remove_redundant_whitespace(seq, oracle));
  }

  ParseForest forest = create_naive_trees(seqs, opts.start_label);
  auto bracket_ids = prestructure_brackets(forest);
  if (!opts.dump_trees_dir.empty()) dump_forest_to_dir(forest, opts.dump_trees_dir, "prestructured");

  Rng rng(opts.rng_seed);
  BubbleOptions bopts{opts.sample_cap, opts.per_side_occurrence_cap};
  Labeler* labeler = opts.ai_label ? &advisor : nullptr;
  BubbleEngine engine(forest, oracle, rng, bopts, labeler, trace);

  int accepted_total = 0;
  if (opts.bracket_bubbles) accepted_total += engine.merge_all_valid(bracket_ids);

  // Main generalization loop: bracket-content bubbles, then LLM 1-bubbles,
  // then LLM 2-bubbles once 1-bubbles stall. Terminates after idle_rounds
  // full iterations without a single accepted merge.
  int idle = 0;
  int iterations = 0;
  std::string prior_state;
  while (idle < opts.idle_rounds && iterations < opts.max_loop_iterations) {
    ++iterations;
    int accepts_this_round = 0;

    if (opts.bracket_bubbles) {
      for (const auto& seq : engine.bracket_bubble_candidates()) {
        if (engine.try_sequence_merge(seq)) ++accepts_this_round;
      }
    }

    int one_bubble_accepts = 0;
    if (opts.llm_bubbles) {
      auto levels = forest_levels(forest);
      auto proposal = advisor.propose_1_bubbles(levels, prior_state, forest);
      // an accepted bubble is tried again: folds can expose new occurrences
      // of other groups, so sweep the list until it stops changing
      for (int sweep = 0; sweep < 10; ++sweep) {
        int sweep_accepts = 0;
        for (const auto& group : proposal.groups) {
          if (engine.try_sequence_merge(group)) ++sweep_accepts;
        }
        one_bubble_accepts += sweep_accepts;
        if (sweep_accepts == 0) break;
      }
      accepts_this_round += one_bubble_accepts;

      if (one_bubble_accepts == 0) {
        auto proposal2 = advisor.propose_2_bubbles(forest_levels(forest), prior_state, forest);
        for (const auto& [a, b] : proposal2.pairs) {
          if (engine.try_sequence_pair_merge(a, b)) ++accepts_this_round;
        }
      }
      prior_state = joined(levels);
    }

    accepted_total += accepts_this_round;
    idle = accepts_this_round == 0 ? idle + 1 : 0;
  }

  if (opts.treevada) {
    accepted_total += refine_with_heuristics(engine, opts.heuristic_budget);
  }
  if (!opts.dump_trees_dir.empty()) dump_forest_to_dir(forest, opts.dump_trees_dir, "structured");

  std::vector<ParseTree> all_trees;
  if (opts.hdd) {
    all_trees = hdd_decompose(forest, oracle, HddOptions{opts.hdd_samples, opts.rng_seed});
  } else {
    for (const auto& t : forest.trees) all_trees.push_back(t.clone());
  }

  Grammar g = induce_grammar(all_trees);
  if (opts.lexinfer) {
    LexInferOptions lex{opts.lex_samples, 40, opts.lex_any_printable, opts.rng_seed};
    g = expand_tokens(all_trees, g, oracle, lex);
  }

  // The final grammar must cover every seed exactly.
  EarleyRecognizer final_recognizer(g);
  for (const auto& t : seqs) {
    if (!final_recognizer.accepts(t.concat()))
      throw InferError("stage induce: final grammar does not cover seed '" + t.source_id + "'");
  }

  if (report) {
    auto stats = oracle.stats();
    report->oracle_calls_total = stats.calls_total;
    report->oracle_calls_external = stats.calls_external;
    report->oracle_timeouts = stats.timeouts;
    report->llm_bubble_calls = advisor.advisor_stats().bubble_calls;
    report->llm_label_calls = advisor.advisor_stats().label_calls;
    report->loop_iterations = iterations;
    report->merges_accepted = accepted_total;
    report->hdd_trees = static_cast<int>(all_trees.size());
    report->runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }
  return g;
}

}  // namespace gramforge
