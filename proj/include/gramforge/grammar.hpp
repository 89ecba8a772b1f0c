#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gramforge/util.hpp"

namespace gramforge {

class OracleClient;
struct ParseTree;

enum class CharClassKind { Digits1Plus, Letters1Plus, AlnumUnderscore1Plus, AnyPrintable1Plus };

bool char_in_class(char c, CharClassKind k);
std::string_view char_class_spelling(CharClassKind k);  // "<digits+>" etc.

struct Symbol {
  enum class Kind { Terminal, NonTerminal, CharClass };
  Kind kind;
  std::string text;          // terminal text or non-terminal name
  CharClassKind char_class;  // valid when kind == CharClass

  static Symbol terminal(std::string t) { return {Kind::Terminal, std::move(t), {}}; }
  static Symbol nonterminal(std::string n) { return {Kind::NonTerminal, std::move(n), {}}; }
  static Symbol charclass(CharClassKind k) { return {Kind::CharClass, "", k}; }

  bool operator==(const Symbol& o) const {
    return kind == o.kind && text == o.text &&
           (kind != Kind::CharClass || char_class == o.char_class);
  }
  auto key() const { return std::tuple(kind, text, char_class); }
  bool operator<(const Symbol& o) const { return key() < o.key(); }
};

using Alternative = std::vector<Symbol>;

/// Plain context-free grammar. Rule and alternative order is preserved so
/// that a run serializes deterministically and round-trips exactly.
struct Grammar {
  std::string start;
  std::vector<std::string> rule_order;
  std::map<std::string, std::vector<Alternative>> productions;

  bool has_rule(const std::string& name) const { return productions.count(name) != 0; }

  /// Appends the alternative unless the rule already contains it.
  void add_alternative(const std::string& name, Alternative alt);

  const std::vector<Alternative>& alternatives(const std::string& name) const;

  bool operator==(const Grammar& o) const {
    return start == o.start && rule_order == o.rule_order && productions == o.productions;
  }

  /// Every referenced non-terminal must have a rule and start must exist.
  void validate() const;
};

class GrammarSyntaxError : public std::runtime_error {
 public:
  GrammarSyntaxError(std::string msg, int line, int col)
      : std::runtime_error(std::move(msg)), line(line), col(col) {}
  int line;
  int col;
};

/// One rule per line: `name: alt | alt`. Terminals are double-quoted with
/// \" \\ \n \t escapes; character classes are <digits+>, <letters+>,
/// <alnum_+>, <print+>. `#` starts a comment. An empty alternative denotes
/// epsilon. The start rule (default "start") must be present.
Grammar parse_grammar_file(std::string_view text, const std::string& start = "start");
std::string serialize(const Grammar& g);

/// Chart-based recognizer; character classes match one-or-more characters
/// of their class (all run lengths are explored). Construct once per
/// grammar and reuse: building the tables dominates short queries.
class EarleyRecognizer {
 public:
  explicit EarleyRecognizer(const Grammar& g);
  bool accepts(std::string_view input) const;

 private:
  struct Production {
    int lhs;
    Alternative alt;
  };
  std::map<std::string, int> nt_ids_;
  std::vector<Production> prods_;
  std::vector<std::vector<int>> prods_by_lhs_;
  int start_id_ = 0;
};

/// One-shot convenience wrapper around EarleyRecognizer.
bool earley_accepts(const Grammar& g, std::string_view input);

class NonTerminatingGrammar : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Random derivations; alternatives are chosen uniformly until max_depth,
/// after which the minimal-height alternative is forced so every derivation
/// terminates. Throws NonTerminatingGrammar if some non-terminal has no
/// finite derivation at all.
std::vector<std::string> sample_from_grammar(const Grammar& g, int n, Rng& rng,
                                             int max_depth = 40);

/// Lowest-height derivation with deterministic choices; used as the first
/// seed and by the sampler's depth cut-off.
std::string minimal_string(const Grammar& g);

/// Reads one production per internal node (label -> child labels) over all
/// trees, deduplicating alternatives.
Grammar induce_grammar(const std::vector<ParseTree>& trees);

struct LexInferOptions {
  int samples = 50;
  int max_depth = 40;
  bool allow_any_printable = false;
  std::uint64_t rng_seed = 101;
};

/// Generalizes terminal classes: a single digit may become <digits+>, a
/// single letter <letters+> then <alnum_+>, a letter run <alnum_+>. A rung
/// is adopted only when all sampled strings from the candidate grammar pass
/// the oracle; the highest passing rung wins.
Grammar expand_tokens(const std::vector<ParseTree>& trees, const Grammar& g,
                      OracleClient& oracle, const LexInferOptions& opts = {});

}  // namespace gramforge
