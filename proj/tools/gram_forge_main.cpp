#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "gramforge/bench.hpp"
#include "gramforge/infer.hpp"
#include "gramforge/metrics.hpp"
#include "gramforge/util.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace gramforge;

namespace {

std::vector<SeedProgram> read_seed_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<SeedProgram> seeds;
  for (const auto& f : files) seeds.push_back({f.filename().string(), read_file(f.string())});
  if (seeds.empty()) throw std::runtime_error("no seed files in " + dir);
  return seeds;
}

struct LlmSelection {
  std::string kind = "stub";
  std::string model = "gpt-4o";
  std::string endpoint;
  std::string replay_store;
  std::string record_store;
};

std::unique_ptr<BubbleAdvisor> make_advisor(const LlmSelection& sel, ReplayRecorder* recorder) {
  if (sel.kind == "stub") return std::make_unique<HeuristicStubAdvisor>(20, recorder);
  if (sel.kind == "replay") {
    if (sel.replay_store.empty()) throw std::runtime_error("--llm replay needs --replay-store");
    auto provider = std::make_shared<ReplayProvider>(ReplayProvider::from_file(sel.replay_store));
    return std::make_unique<TextModelAdvisor>(provider, 20, recorder);
  }
  if (sel.kind == "http") {
    if (sel.endpoint.empty()) throw std::runtime_error("--llm http needs --llm-endpoint");
    auto provider = std::make_shared<HttpProvider>(HttpProviderConfig{sel.endpoint, sel.model});
    return std::make_unique<TextModelAdvisor>(provider, 20, recorder);
  }
  throw std::runtime_error("unknown --llm kind: " + sel.kind);
}

int cmd_infer(const std::string& seeds_dir, const std::string& oracle_cmd, int oracle_timeout_ms,
              const std::string& oracle_cache, const std::string& out_path,
              const std::string& report_path, const LlmSelection& llm, InferOptions opts,
              bool zero_shot) {
  auto seeds = read_seed_dir(seeds_dir);
  ProcessOracle oracle(split_command(oracle_cmd), oracle_timeout_ms);
  if (!oracle_cache.empty()) oracle.load_cache_file(oracle_cache);

  ReplayRecorder recorder;
  auto advisor = make_advisor(llm, llm.record_store.empty() ? nullptr : &recorder);

  RunReport report;
  Grammar g;
  if (zero_shot) {
    auto started = std::chrono::steady_clock::now();
    std::vector<std::string> texts;
    for (const auto& s : seeds) texts.push_back(s.text);
    g = advisor->zero_shot_grammar(texts);
    if (opts.lexinfer) {
      LexInferOptions lex{opts.lex_samples, 40, opts.lex_any_printable, opts.rng_seed};
      g = expand_tokens({}, g, oracle, lex);
    }
    auto stats = oracle.stats();
    report.oracle_calls_total = stats.calls_total;
    report.oracle_calls_external = stats.calls_external;
    report.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  } else {
    g = infer_grammar(seeds, oracle, *advisor, opts, &report);
  }

  write_file(out_path, serialize(g));
  if (!llm.record_store.empty()) recorder.save(llm.record_store);
  if (!oracle_cache.empty()) oracle.save_cache_file(oracle_cache);
  if (!report_path.empty()) write_file(report_path, report.to_json() + "\n");
  std::cerr << "wrote " << out_path << " (oracle calls: " << report.oracle_calls_external
            << " external / " << report.oracle_calls_total << " total, "
            << report.llm_bubble_calls << " llm bubble calls)\n";
  return 0;
}

int cmd_eval(const std::string& grammar_path, const std::string& oracle_cmd, int oracle_timeout_ms,
             const std::string& tests_dir, int precision_n, std::uint64_t sample_seed) {
  auto started = std::chrono::steady_clock::now();
  Grammar g = parse_grammar_file(read_file(grammar_path));
  ProcessOracle oracle(split_command(oracle_cmd), oracle_timeout_ms);

  std::vector<std::string> test_set;
  for (const auto& seed : read_seed_dir(tests_dir)) test_set.push_back(seed.text);

  Rng rng(sample_seed);
  double p = precision(g, oracle, precision_n, rng);
  double r = recall(g, test_set);
  auto cm = complexity_metrics(g);
  auto stats = oracle.stats();
  double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  nlohmann::json j{
      {"precision", p},
      {"recall", r},
      {"f1", f1(p, r)},
      {"oracle_calls", stats.calls_external},
      {"t", cm.terminals},
      {"nt", cm.nonterminals},
      {"rhs", cm.rhs_avg},
      {"mcc_total", cm.mcc_total},
      {"mcc_avg", cm.mcc_avg},
      {"runtime_s", runtime},
  };
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_stats(const std::string& grammar_path) {
  Grammar g = parse_grammar_file(read_file(grammar_path));
  auto cm = complexity_metrics(g);
  nlohmann::json j{
      {"t", cm.terminals},       {"nt", cm.nonterminals},   {"rhs", cm.rhs_avg},
      {"mcc_total", cm.mcc_total}, {"mcc_avg", cm.mcc_avg},
  };
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_seeds(const std::string& lang, const std::string& grammar_path, int n, std::uint64_t seed,
              const std::string& out_dir) {
  Grammar g = grammar_path.empty() ? golden_grammar(lang) : parse_grammar_file(read_file(grammar_path));
  auto strings = make_seeds(g, n, seed);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < strings.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "seed_%03zu.txt", i);
    write_file(out_dir + "/" + name, strings[i]);
  }
  std::cerr << "wrote " << strings.size() << " programs to " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gram-forge: black-box context-free grammar inference"};
  app.require_subcommand(1);

  // Shared inference/eval options.
  std::string seeds_dir, oracle_cmd, out_path = "grammar.bnf", report_path;
  std::string oracle_cache;
  int oracle_timeout_ms = 10000;
  LlmSelection llm;
  InferOptions opts;
  bool no_bracket = false, no_llm = false, no_treevada = false, no_hdd = false, no_lexinfer = false,
       no_ai_label = false, zero_shot = false;

  auto* infer = app.add_subcommand("infer", "recover a grammar from seed programs");
  infer->add_option("--seeds", seeds_dir, "directory of seed programs")->required();
  infer->add_option("--oracle", oracle_cmd, "acceptor command; candidate on stdin, exit 0 = accept")
      ->required();
  infer->add_option("--oracle-timeout-ms", oracle_timeout_ms, "per-query timeout (default 10000)");
  infer->add_option("--oracle-cache", oracle_cache, "persistent oracle cache file");
  infer->add_option("--out", out_path, "output grammar file (default grammar.bnf)");
  infer->add_option("--report", report_path, "write a JSON run report here");
  infer->add_option("--llm", llm.kind, "llm channel: stub, replay, http (default stub)");
  infer->add_option("--llm-model", llm.model, "model name for the http channel");
  infer->add_option("--llm-endpoint", llm.endpoint, "chat-completions URL for the http channel");
  infer->add_option("--replay-store", llm.replay_store, "replay store for --llm replay");
  infer->add_option("--llm-record", llm.record_store, "record prompts/responses to this store");
  infer->add_option("--rng-seed", opts.rng_seed, "sampling seed (default 101)");
  infer->add_option("--trace", opts.trace_path, "append one line per merge proposal");
  infer->add_option("--dump-trees", opts.dump_trees_dir, "dump forests to this directory");
  infer->add_option("--heuristic-budget", opts.heuristic_budget,
                    "consecutive rejects before refinement stops (default 500)");
  infer->add_flag("--split-digit-runs", opts.split_digit_runs, "tokenize each digit separately");
  infer->add_flag("--lex-any-printable", opts.lex_any_printable,
                  "allow the any-printable rung during lexical inference");
  infer->add_flag("--no-bracket-bubbles", no_bracket, "disable bracket-guided bubbles");
  infer->add_flag("--no-llm-bubbles", no_llm, "disable LLM bubble exploration");
  infer->add_flag("--no-treevada", no_treevada, "disable heuristic refinement");
  infer->add_flag("--no-hdd", no_hdd, "disable hierarchical delta debugging");
  infer->add_flag("--no-lexinfer", no_lexinfer, "disable lexical inference");
  infer->add_flag("--no-ai-label", no_ai_label, "keep fresh t<k> labels instead of LLM names");
  infer->add_flag("--zero-shot", zero_shot, "single-prompt baseline instead of tree recovery");

  std::string eval_grammar, tests_dir;
  int precision_n = 1000;
  std::uint64_t sample_seed = 101;
  auto* eval = app.add_subcommand("eval", "score a grammar against an oracle and test set");
  eval->add_option("--grammar", eval_grammar, "grammar file to evaluate")->required();
  eval->add_option("--oracle", oracle_cmd, "acceptor command")->required();
  eval->add_option("--tests", tests_dir, "directory of held-out valid programs")->required();
  eval->add_option("--oracle-timeout-ms", oracle_timeout_ms, "per-query timeout");
  eval->add_option("--precision-n", precision_n, "samples for precision (default 1000)");
  eval->add_option("--sample-seed", sample_seed, "sampler seed (default 101)");

  std::string stats_grammar;
  auto* stats = app.add_subcommand("stats", "grammar complexity metrics");
  stats->add_option("grammar", stats_grammar, "grammar file")->required();

  std::string serve_grammar;
  auto* serve = app.add_subcommand("oracle-serve", "act as an acceptor for a grammar file");
  serve->add_option("grammar", serve_grammar, "grammar file")->required();

  std::string seeds_lang, seeds_grammar, seeds_out = "seeds";
  int seeds_n = 25;
  std::uint64_t seeds_seed = 101;
  auto* seeds = app.add_subcommand("seeds", "generate seed programs from a golden grammar");
  seeds->add_option("--lang", seeds_lang, "bundled language: while, json, lisp, cond");
  seeds->add_option("--grammar", seeds_grammar, "or an explicit grammar file");
  seeds->add_option("--n", seeds_n, "number of programs (default 25)");
  seeds->add_option("--seed", seeds_seed, "sampler seed (default 101)");
  seeds->add_option("--out-dir", seeds_out, "output directory (default ./seeds)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (infer->parsed()) {
      opts.bracket_bubbles = !no_bracket;
      opts.llm_bubbles = !no_llm;
      opts.treevada = !no_treevada;
      opts.hdd = !no_hdd;
      opts.lexinfer = !no_lexinfer;
      opts.ai_label = !no_ai_label;
      return cmd_infer(seeds_dir, oracle_cmd, oracle_timeout_ms, oracle_cache, out_path,
                       report_path, llm, opts, zero_shot);
    }
    if (eval->parsed())
      return cmd_eval(eval_grammar, oracle_cmd, oracle_timeout_ms, tests_dir, precision_n,
                      sample_seed);
    if (stats->parsed()) return cmd_stats(stats_grammar);
    if (serve->parsed()) return acceptor_main(serve_grammar);
    if (seeds->parsed()) {
      if (seeds_lang.empty() == seeds_grammar.empty())
        throw std::runtime_error("seeds: give exactly one of --lang or --grammar");
      return cmd_seeds(seeds_lang, seeds_grammar, seeds_n, seeds_seed, seeds_out);
    }
  } catch (const GrammarSyntaxError& e) {
    std::cerr << "error: " << e.what() << " (line " << e.line << ", col " << e.col << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
