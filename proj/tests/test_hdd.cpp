#include "doctest.h"
#include "gramforge/bench.hpp"
#include "gramforge/hdd.hpp"
#include "gramforge/infer.hpp"
#include "support/test_support.hpp"

using namespace gramforge;
using namespace gramforge::testsupport;

namespace {

// Runs the pipeline far enough to get a structured forest for HDD tests:
// tokenize, naive trees, bracket pre-structuring, bracket merging.
ParseForest structured_forest(const std::vector<std::string>& programs, OracleClient& oracle) {
  std::vector<TokenSeq> seqs;
  for (std::size_t i = 0; i < programs.size(); ++i)
    seqs.push_back(pretokenize(programs[i], "seed" + std::to_string(i)));
  auto forest = create_naive_trees(seqs, "start");
  auto ids = prestructure_brackets(forest);
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);
  engine.merge_all_valid(ids);
  return forest;
}

}  // namespace

TEST_CASE("sample criterion accepts unpruned seed trees") {
  GoldenOracle oracle(golden_grammar("cond"));
  auto forest = structured_forest({"if(a+b) c=d; else c=d;"}, oracle);
  CHECK(passes_sample_criterion(forest.trees[0], forest, oracle, 50, 101));
}

TEST_CASE("sample criterion rejects invalid prunings") {
  GoldenOracle oracle(golden_grammar("cond"));
  auto forest = structured_forest({"if(a+b) c=d; else c=d;"}, oracle);
  // drop everything but the if header: "if(a+b)" alone is not a program
  ParseTree pruned = forest.trees[0].clone();
  auto& children = pruned.root->children;
  children.resize(2);  // "if" and the bracket group
  CHECK_FALSE(passes_sample_criterion(pruned, forest, oracle, 50, 101));
}

TEST_CASE("hdd harvests the else-less variant of fig 3 style trees") {
  GoldenOracle oracle(golden_grammar("cond"));
  auto forest = structured_forest({"if(a+b) c=d; else e=f;"}, oracle);

  auto trees = hdd_decompose(forest, oracle);
  REQUIRE(trees.size() >= 2);

  // originals come first
  CHECK(yield_string(*trees[0].root) == "if(a+b) c=d; else e=f;");

  std::set<std::string> yields;
  for (const auto& t : trees) yields.insert(yield_string(*t.root));
  bool has_else_less = false;
  for (const auto& y : yields)
    if (y.find("else") == std::string::npos && y.rfind("if(", 0) == 0) has_else_less = true;
  CHECK(has_else_less);

  SUBCASE("soundness: every returned tree passes the criterion at its seed") {
    for (const auto& t : trees) {
      std::uint64_t seed = 101 + static_cast<std::uint64_t>(t.tree_id) * 7919;
      CHECK(passes_sample_criterion(t, forest, oracle, 50, seed));
    }
  }
  SUBCASE("yield shrinkage: non-originals have strictly fewer leaves") {
    std::size_t original_leaves = leaf_count(*trees[0].root);
    for (std::size_t i = 1; i < trees.size(); ++i)
      CHECK(leaf_count(*trees[i].root) < original_leaves);
  }
}

TEST_CASE("unprunable trees return only the original") {
  // language of exactly one string: any pruning is invalid
  GoldenOracle oracle(parse_grammar_file("start: \"a\" \" \" \"b\" \" \" \"c\"\n"));
  std::vector<TokenSeq> seqs = {pretokenize("a b c", "s0")};
  auto forest = create_naive_trees(seqs, "start");
  auto trees = hdd_decompose(forest, oracle);
  REQUIRE(trees.size() == 1);
  CHECK(yield_string(*trees[0].root) == "a b c");
}

TEST_CASE("straight-line single-token tree returns only the original") {
  GoldenOracle oracle(golden_grammar("while"));
  std::vector<TokenSeq> seqs = {pretokenize("skip", "s0")};
  auto forest = create_naive_trees(seqs, "start");
  auto trees = hdd_decompose(forest, oracle);
  REQUIRE(trees.size() == 1);
  CHECK(yield_string(*trees[0].root) == "skip");
}

TEST_CASE("hdd output is deterministic") {
  GoldenOracle oracle(golden_grammar("cond"));
  auto forest = structured_forest({"if(a+b) c=d; else e=f;", "g=h;"}, oracle);
  auto once = hdd_decompose(forest, oracle);
  auto twice = hdd_decompose(forest, oracle);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i)
    CHECK(yield_string(*once[i].root) == yield_string(*twice[i].root));
}
