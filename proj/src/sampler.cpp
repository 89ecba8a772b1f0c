#include <algorithm>
#include <functional>
#include <limits>

#include "gramforge/grammar.hpp"
#include "gramforge/oracle.hpp"
#include "gramforge/parse_tree.hpp"

namespace gramforge {

namespace {

constexpr int kInfiniteHeight = std::numeric_limits<int>::max() / 4;

/// Minimal derivation height per non-terminal (fixpoint). Height of a
/// terminal or character class is 0.
std::map<std::string, int> min_heights(const Grammar& g) {
  std::map<std::string, int> h;
  for (const auto& name : g.rule_order) h[name] = kInfiniteHeight;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& name : g.rule_order) {
      for (const auto& alt : g.productions.at(name)) {
        int worst = 0;
        for (const auto& sym : alt)
          if (sym.kind == Symbol::Kind::NonTerminal) worst = std::max(worst, h.at(sym.text));
        int height = worst >= kInfiniteHeight ? kInfiniteHeight : worst + 1;
        if (height < h[name]) {
          h[name] = height;
          changed = true;
        }
      }
    }
  }
  return h;
}

/// Index of the minimum-height alternative; ties break to the first one so
/// the choice is deterministic.
std::map<std::string, std::size_t> min_alternatives(const Grammar& g,
                                                    const std::map<std::string, int>& heights) {
  std::map<std::string, std::size_t> pick;
  for (const auto& name : g.rule_order) {
    const auto& alts = g.productions.at(name);
    int best = kInfiniteHeight + 1;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < alts.size(); ++i) {
      int worst = 0;
      for (const auto& sym : alts[i])
        if (sym.kind == Symbol::Kind::NonTerminal) worst = std::max(worst, heights.at(sym.text));
      int height = worst >= kInfiniteHeight ? kInfiniteHeight : worst + 1;
      if (height < best) best = height, best_i = i;
    }
    pick[name] = best_i;
  }
  return pick;
}

char class_floor_char(CharClassKind k) {
  switch (k) {
    case CharClassKind::Digits1Plus:
      return '0';
    case CharClassKind::Letters1Plus:
      return 'a';
    case CharClassKind::AlnumUnderscore1Plus:
      return 'a';
    case CharClassKind::AnyPrintable1Plus:
      return '!';
  }
  return 'a';
}

std::string sample_char_class(CharClassKind k, Rng& rng) {
  static const char* digits = "0123456789";
  static const char* letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  static const char* alnum = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
  std::string pool;
  switch (k) {
    case CharClassKind::Digits1Plus:
      pool = digits;
      break;
    case CharClassKind::Letters1Plus:
      pool = letters;
      break;
    case CharClassKind::AlnumUnderscore1Plus:
      pool = alnum;
      break;
    case CharClassKind::AnyPrintable1Plus:
      for (char c = 0x21; c <= 0x7e; ++c) pool.push_back(c);
      break;
  }
  std::size_t len = 1 + rand_index(rng, 4);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) out.push_back(pool[rand_index(rng, pool.size())]);
  return out;
}

struct DerivationContext {
  const Grammar& g;
  const std::map<std::string, int> heights;
  const std::map<std::string, std::size_t> min_alt;

  explicit DerivationContext(const Grammar& g)
      : g(g), heights(min_heights(g)), min_alt(min_alternatives(g, heights)) {
    for (const auto& [name, h] : heights)
      if (h >= kInfiniteHeight)
        throw NonTerminatingGrammar("non-terminal '" + name + "' has no finite derivation");
  }

  // Recursive rules can branch critically and occasionally derive enormous
  // strings; past the size budget every choice collapses to the minimal
  // alternative, which bounds the output without skewing normal draws.
  static constexpr std::size_t kSizeBudget = 4000;

  void derive(const std::string& nt, Rng& rng, int depth, int max_depth, std::string& out) const {
    const auto& alts = g.alternatives(nt);
    bool force_minimal = depth >= max_depth || out.size() > kSizeBudget;
    std::size_t choice = force_minimal ? min_alt.at(nt) : rand_index(rng, alts.size());
    for (const auto& sym : alts[choice]) {
      switch (sym.kind) {
        case Symbol::Kind::Terminal:
          out += sym.text;
          break;
        case Symbol::Kind::CharClass:
          out += sample_char_class(sym.char_class, rng);
          break;
        case Symbol::Kind::NonTerminal:
          derive(sym.text, rng, depth + 1, max_depth, out);
          break;
      }
    }
  }
};

}  // namespace

std::vector<std::string> sample_from_grammar(const Grammar& g, int n, Rng& rng, int max_depth) {
  if (g.rule_order.empty()) throw std::runtime_error("cannot sample from empty grammar");
  DerivationContext ctx(g);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::string s;
    ctx.derive(g.start, rng, 0, max_depth, s);
    out.push_back(std::move(s));
  }
  return out;
}

std::string minimal_string(const Grammar& g) {
  DerivationContext ctx(g);
  std::function<void(const std::string&, std::string&)> derive_min = [&](const std::string& nt,
                                                                         std::string& out) {
    const auto& alt = g.alternatives(nt)[ctx.min_alt.at(nt)];
    for (const auto& sym : alt) {
      switch (sym.kind) {
        case Symbol::Kind::Terminal:
          out += sym.text;
          break;
        case Symbol::Kind::CharClass:
          out.push_back(class_floor_char(sym.char_class));
          break;
        case Symbol::Kind::NonTerminal:
          derive_min(sym.text, out);
          break;
      }
    }
  };
  std::string s;
  derive_min(g.start, s);
  return s;
}

Grammar induce_grammar(const std::vector<ParseTree>& trees) {
  Grammar g;
  if (trees.empty()) return g;
  g.start = trees.front().root->label;

  std::function<void(const ParseNode&)> walk = [&](const ParseNode& node) {
    if (node.is_leaf()) return;
    Alternative alt;
    alt.reserve(node.children.size());
    for (const auto& c : node.children) {
      if (c->is_leaf())
        alt.push_back(Symbol::terminal(c->label));
      else
        alt.push_back(Symbol::nonterminal(c->label));
    }
    g.add_alternative(node.label, std::move(alt));
    for (const auto& c : node.children) walk(*c);
  };
  for (const auto& tree : trees) walk(*tree.root);
  return g;
}

namespace {

enum class TerminalShape { SingleDigit, DigitRun, SingleLetter, LetterRun, Other };

TerminalShape shape_of(const std::string& t) {
  bool all_digits = !t.empty();
  bool all_letters = !t.empty();
  for (char c : t) {
    if (!char_in_class(c, CharClassKind::Digits1Plus)) all_digits = false;
    if (!char_in_class(c, CharClassKind::Letters1Plus)) all_letters = false;
  }
  if (all_digits) return t.size() == 1 ? TerminalShape::SingleDigit : TerminalShape::DigitRun;
  if (all_letters) return t.size() == 1 ? TerminalShape::SingleLetter : TerminalShape::LetterRun;
  return TerminalShape::Other;
}

std::vector<CharClassKind> ladder_for(TerminalShape shape, bool allow_any_printable) {
  std::vector<CharClassKind> rungs;
  switch (shape) {
    case TerminalShape::SingleDigit:
    case TerminalShape::DigitRun:
      rungs = {CharClassKind::Digits1Plus};
      break;
    case TerminalShape::SingleLetter:
      rungs = {CharClassKind::Letters1Plus, CharClassKind::AlnumUnderscore1Plus};
      break;
    case TerminalShape::LetterRun:
      rungs = {CharClassKind::AlnumUnderscore1Plus};
      break;
    case TerminalShape::Other:
      break;
  }
  if (allow_any_printable) rungs.push_back(CharClassKind::AnyPrintable1Plus);
  return rungs;
}

Grammar with_terminal_replaced(const Grammar& g, const std::string& terminal, CharClassKind k) {
  Grammar out;
  out.start = g.start;
  for (const auto& name : g.rule_order) {
    for (const auto& alt : g.productions.at(name)) {
      Alternative replaced;
      replaced.reserve(alt.size());
      for (const auto& sym : alt) {
        if (sym.kind == Symbol::Kind::Terminal && sym.text == terminal)
          replaced.push_back(Symbol::charclass(k));
        else
          replaced.push_back(sym);
      }
      out.add_alternative(name, std::move(replaced));
    }
  }
  return out;
}

}  // namespace

Grammar expand_tokens(const std::vector<ParseTree>&, const Grammar& g, OracleClient& oracle,
                      const LexInferOptions& opts) {
  std::vector<std::string> terminals;
  for (const auto& name : g.rule_order)
    for (const auto& alt : g.productions.at(name))
      for (const auto& sym : alt)
        if (sym.kind == Symbol::Kind::Terminal &&
            std::find(terminals.begin(), terminals.end(), sym.text) == terminals.end())
          terminals.push_back(sym.text);
  std::sort(terminals.begin(), terminals.end());

  Grammar current = g;
  for (const auto& term : terminals) {
    auto rungs = ladder_for(shape_of(term), opts.allow_any_printable);
    CharClassKind adopted{};
    bool any = false;
    for (CharClassKind rung : rungs) {
      Grammar candidate = with_terminal_replaced(current, term, rung);
      Rng rng(opts.rng_seed ^ std::hash<std::string>{}(term) ^ static_cast<int>(rung));
      bool all_pass = true;
      for (const auto& s : sample_from_grammar(candidate, opts.samples, rng, opts.max_depth)) {
        if (!oracle.accepts(s)) {
          all_pass = false;
          break;
        }
      }
      if (all_pass) {
        adopted = rung;
        any = true;
      }
    }
    if (any) current = with_terminal_replaced(current, term, adopted);
  }
  return current;
}

}  // namespace gramforge
