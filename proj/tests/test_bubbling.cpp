#include "doctest.h"
#include "gramforge/bubbling.hpp"
#include "gramforge/bench.hpp"
#include "gramforge/grammar.hpp"
#include "support/test_support.hpp"

using namespace gramforge;
using namespace gramforge::testsupport;

namespace {

ParseForest forest_of(const std::vector<std::string>& programs,
                      const std::string& start = "start") {
  std::vector<TokenSeq> seqs;
  for (std::size_t i = 0; i < programs.size(); ++i)
    seqs.push_back(pretokenize(programs[i], "seed" + std::to_string(i)));
  return create_naive_trees(seqs, start);
}

int count_label(const ParseForest& forest, const std::string& label) {
  return static_cast<int>(forest.occurrences_of_label(label, false).size());
}

std::set<std::string> internal_labels(const ParseForest& forest) {
  std::set<std::string> out;
  std::function<void(const ParseNode&)> walk = [&](const ParseNode& n) {
    if (!n.is_leaf()) out.insert(n.label);
    for (const auto& c : n.children) walk(*c);
  };
  for (const auto& t : forest.trees) walk(*t.root);
  return out;
}

// Fig 1 setting: "if a==b then skip" and "if true then skip"; the condition
// slot accepts either form.
GoldenOracle fig1_oracle() {
  Grammar g = parse_grammar_file(R"BNF(
start: "if " cond " then skip"
cond: "a==b" | "true"
)BNF");
  return GoldenOracle(std::move(g));
}

}  // namespace

namespace {

// Reparents children [start..end] of `parent` under a new node.
ParseNode* group_span(ParseForest& forest, ParseNode* parent, int start, int end,
                      const std::string& label) {
  auto group = std::make_unique<ParseNode>();
  group->label = label;
  group->id = forest.new_node_id();
  for (int i = start; i <= end; ++i) {
    group->children.push_back(std::move(parent->children[static_cast<std::size_t>(start)]));
    parent->children.erase(parent->children.begin() + start);
  }
  ParseNode* raw = group.get();
  parent->children.insert(parent->children.begin() + start, std::move(group));
  return raw;
}

}  // namespace

TEST_CASE("swap sampling covers both directions") {
  auto forest = forest_of({"if a==b then skip", "if true then skip"});
  GoldenOracle oracle(golden_grammar("while"));  // not consulted by sampling
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);

  // bubble the a==b tokens by hand (indices 2..5: a = = b)
  group_span(forest, forest.trees[0].root.get(), 2, 5, "tnew");

  auto samples = engine.sample_swapped_strings(ClassRef{false, "tnew"}, ClassRef{true, "true"}, 100);
  std::set<std::string> sampled(samples.begin(), samples.end());
  CHECK(sampled.count("if true then skip"));   // tnew replaced by true
  CHECK(sampled.count("if a==b then skip"));   // true replaced by tnew
}

TEST_CASE("swap sampling caps and degenerate cases") {
  auto forest = forest_of({"a a a a", "a a a"});
  GoldenOracle oracle(golden_grammar("while"));
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);

  SUBCASE("cap 0 yields nothing") {
    CHECK(engine.sample_swapped_strings(ClassRef{true, "a"}, ClassRef{true, " "}, 0).empty());
  }
  SUBCASE("self swap yields only unchanged strings") {
    auto samples = engine.sample_swapped_strings(ClassRef{true, "a"}, ClassRef{true, "a"}, 100);
    for (const auto& s : samples) CHECK((s == "a a a a" || s == "a a a"));
  }
  SUBCASE("missing class yields nothing") {
    CHECK(engine.sample_swapped_strings(ClassRef{true, "a"}, ClassRef{true, "zz"}, 100).empty());
  }
}

TEST_CASE("fig 1 bubble merge learns the alternation") {
  auto forest = forest_of({"if a==b then skip", "if true then skip"});
  auto oracle = fig1_oracle();
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);

  auto spans = engine.find_sequence_spans({"a", "=", "=", "b"});
  REQUIRE(spans.size() == 1);
  auto outcome = engine.check_bubble(MergeCandidate{spans[0], ClassRef{true, "true"}});
  REQUIRE(outcome.accepted);

  // the merged class has both alternatives in the induced grammar
  std::vector<ParseTree> trees;
  for (const auto& t : forest.trees) trees.push_back(t.clone());
  Grammar g = induce_grammar(trees);
  REQUIRE(g.has_rule(outcome.unified_label));
  const auto& alts = g.alternatives(outcome.unified_label);
  Alternative want_seq = {Symbol::terminal("a"), Symbol::terminal("="), Symbol::terminal("="),
                          Symbol::terminal("b")};
  Alternative want_true = {Symbol::terminal("true")};
  CHECK(std::find(alts.begin(), alts.end(), want_seq) != alts.end());
  CHECK(std::find(alts.begin(), alts.end(), want_true) != alts.end());
}

TEST_CASE("rejected candidates roll back bit-exactly") {
  auto forest = forest_of({"if a==b then skip", "if true then skip"});
  // oracle that rejects everything new: only the two seeds pass
  std::set<std::string> seeds = {"if a==b then skip", "if true then skip"};
  CallbackOracle oracle([seeds](const std::string& s) { return seeds.count(s) > 0; });
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);

  std::string before = dump_forest(forest, true);
  auto next_id_before = forest.next_node_id;

  auto spans = engine.find_sequence_spans({"a", "=", "="});
  REQUIRE_FALSE(spans.empty());
  auto outcome = engine.check_bubble(MergeCandidate{spans[0], ClassRef{true, "skip"}});
  CHECK_FALSE(outcome.accepted);
  CHECK(dump_forest(forest, true) == before);
  CHECK(forest.next_node_id == next_id_before);
}

TEST_CASE("accepted merges never add non-terminal labels beyond the bubble") {
  auto forest = forest_of({"if a==b then skip", "if true then skip"});
  auto oracle = fig1_oracle();
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);

  auto labels_before = internal_labels(forest);
  auto spans = engine.find_sequence_spans({"a", "=", "=", "b"});
  auto outcome = engine.check_bubble(MergeCandidate{spans[0], ClassRef{true, "true"}});
  REQUIRE(outcome.accepted);
  auto labels_after = internal_labels(forest);
  CHECK(labels_after.size() <= labels_before.size() + 1);
}

TEST_CASE("oracle consistency holds after an accept") {
  auto forest = forest_of({"if a==b then skip", "if true then skip"});
  auto oracle = fig1_oracle();
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);

  auto spans = engine.find_sequence_spans({"a", "=", "=", "b"});
  auto outcome = engine.check_bubble(MergeCandidate{spans[0], ClassRef{true, "true"}});
  REQUIRE(outcome.accepted);

  // re-sampling swaps within the unified class only yields accepted strings
  Rng rng2(101);
  BubbleEngine engine2(forest, oracle, rng2);
  auto occs = forest.occurrences_of_label(outcome.unified_label, false);
  REQUIRE(occs.size() >= 2);
  for (const auto& site : occs) {
    for (const auto& donor : occs) {
      std::string s = yield_with_override(*forest.trees[site.tree_index].root.get(), site.node,
                                          yield_string(*donor.node));
      CHECK(oracle.accepts(s));
    }
  }
}

TEST_CASE("merge_all_valid merges bracket groups with token classes") {
  // toy: any single letter or any parenthesized letter is a valid program
  Grammar toy = parse_grammar_file(R"BNF(
start: item | start " " item
item: letter | "(" letter ")"
letter: "a" | "b"
)BNF");
  GoldenOracle oracle(std::move(toy));

  auto forest = forest_of({"(a) b", "(b) a"});
  auto bracket_ids = prestructure_brackets(forest);
  REQUIRE(bracket_ids.size() == 2);
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);
  int accepted = engine.merge_all_valid(bracket_ids);
  CHECK(accepted >= 2);

  // both bracket nodes end up in one class
  ParseNode* g1 = forest.find(bracket_ids[0]);
  ParseNode* g2 = forest.find(bracket_ids[1]);
  REQUIRE(g1 != nullptr);
  REQUIRE(g2 != nullptr);
  CHECK(g1->label == g2->label);
  auto occs = forest.occurrences_of_label(g1->label, false);
  CHECK(occs.size() >= 4);
}

TEST_CASE("merge_all_valid leaves bracket-free forests unchanged") {
  GoldenOracle oracle(golden_grammar("while"));
  auto forest = forest_of({"skip"});
  auto ids = prestructure_brackets(forest);
  CHECK(ids.empty());
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);
  std::string before = dump_forest(forest, true);
  CHECK(engine.merge_all_valid(ids) == 0);
  CHECK(dump_forest(forest, true) == before);
}

TEST_CASE("bracket bubble candidates list in-bracket sequences") {
  auto forest = forest_of({"(a,(a))"});
  prestructure_brackets(forest);
  GoldenOracle oracle(golden_grammar("while"));
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);

  auto cands = engine.bracket_bubble_candidates();
  REQUIRE(cands.size() == 2);
  // shortest first
  CHECK(cands[0].size() <= cands[1].size());
  CHECK(cands[0] == std::vector<std::string>{"a"});
  // outer content: a , t<k>  (the inner group label)
  REQUIRE(cands[1].size() == 3);
  CHECK(cands[1][0] == "a");
  CHECK(cands[1][1] == ",");

  SUBCASE("no brackets, no candidates") {
    auto flat = forest_of({"a+b"});
    Rng rng2(1);
    BubbleEngine e2(flat, oracle, rng2);
    CHECK(e2.bracket_bubble_candidates().empty());
  }
}

TEST_CASE("apply_rule_everywhere folds leftmost-innermost until fixpoint") {
  auto forest = forest_of({"c=e+e+e;"});
  GoldenOracle oracle(golden_grammar("while"));
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);

  // relabel the e leaves as class nodes first so the rule refers to classes
  for (auto& ref : forest.occurrences_of_label("e", true)) {
    ParseNode* parent = ref.parent;
    group_span(forest, parent, ref.child_index, ref.child_index, "expr");
  }

  std::string before_yield = yield_string(*forest.trees[0].root);
  int folds = engine.apply_rule_everywhere({"expr", "+", "expr"}, "expr");
  CHECK(folds == 2);
  CHECK(yield_string(*forest.trees[0].root) == before_yield);

  // left fold: the sum collapses to one expr node whose first child is the
  // nested expr over "e+e"
  const auto& root = *forest.trees[0].root;
  REQUIRE(root.children.size() == 4);  // c = expr ;
  const auto& top = *root.children[2];
  CHECK(top.label == "expr");
  REQUIRE(top.children.size() == 3);
  CHECK(yield_string(*top.children[0]) == "e+e");
  CHECK(top.children[0]->label == "expr");

  SUBCASE("absent sequence is a no-op") {
    std::string before = dump_forest(forest, true);
    CHECK(engine.apply_rule_everywhere({"nope", "nope"}, "expr") == 0);
    CHECK(dump_forest(forest, true) == before);
  }
}

TEST_CASE("two-bubble merges pair disjoint spans") {
  // language where both "x y" and "p q" fill the same slot
  Grammar toy = parse_grammar_file(R"BNF(
start: "<" filler ">"
filler: "x" " " "y" | "p" " " "q"
)BNF");
  GoldenOracle oracle(std::move(toy));
  auto forest = forest_of({"<x y>", "<p q>"});
  Rng rng(101);
  BubbleEngine engine(forest, oracle, rng);

  auto unified = engine.try_sequence_pair_merge({"x", " ", "y"}, {"p", " ", "q"});
  REQUIRE(unified.has_value());
  auto occs = forest.occurrences_of_label(*unified, false);
  CHECK(occs.size() == 2);
}
