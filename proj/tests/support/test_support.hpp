#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gramforge/grammar.hpp"
#include "gramforge/oracle.hpp"
#include "gramforge/util.hpp"

namespace gramforge::testsupport {

/// Independent membership oracle: exhaustive leftmost derivation search.
/// Enumerates every string of length <= max_len derivable from the grammar.
/// Sentential forms are pruned by their minimum possible yield length, so
/// non-terminating rules cannot loop. Grammars whose nullable symbols allow
/// unbounded pumping can exceed the exploration budget; those return nullopt
/// and the caller should skip them.
inline std::optional<std::set<std::string>> brute_force_language_budgeted(
    const Grammar& g, std::size_t max_len, std::size_t max_visited = 400000) {
  // minimum yield length per non-terminal (may stay "infinite")
  constexpr long kInf = 1L << 40;
  std::map<std::string, long> min_len;
  for (const auto& name : g.rule_order) min_len[name] = kInf;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& name : g.rule_order) {
      for (const auto& alt : g.productions.at(name)) {
        long total = 0;
        for (const auto& sym : alt) {
          if (sym.kind == Symbol::Kind::Terminal)
            total += static_cast<long>(sym.text.size());
          else if (sym.kind == Symbol::Kind::CharClass)
            total += 1;
          else
            total += min_len.at(sym.text);
          if (total >= kInf) break;
        }
        if (total < min_len[name]) min_len[name] = total, changed = true;
      }
    }
  }

  auto form_min_len = [&](const std::vector<Symbol>& form) {
    long total = 0;
    for (const auto& sym : form) {
      if (sym.kind == Symbol::Kind::Terminal)
        total += static_cast<long>(sym.text.size());
      else if (sym.kind == Symbol::Kind::CharClass)
        total += 1;
      else
        total += min_len.at(sym.text);
      if (total >= kInf) return kInf;
    }
    return total;
  };

  auto form_key = [](const std::vector<Symbol>& form) {
    std::string key;
    for (const auto& sym : form) {
      key += sym.kind == Symbol::Kind::Terminal ? 'T' : (sym.kind == Symbol::Kind::NonTerminal ? 'N' : 'C');
      key += sym.kind == Symbol::Kind::CharClass
                 ? std::string(char_class_spelling(sym.char_class))
                 : sym.text;
      key += '\x1f';
    }
    return key;
  };

  std::set<std::string> language;
  std::set<std::string> visited;
  std::deque<std::vector<Symbol>> frontier;
  frontier.push_back({Symbol::nonterminal(g.start)});
  visited.insert(form_key(frontier.front()));

  while (!frontier.empty()) {
    if (visited.size() > max_visited) return std::nullopt;
    std::vector<Symbol> form = std::move(frontier.front());
    frontier.pop_front();
    if (form_min_len(form) > static_cast<long>(max_len)) continue;

    // leftmost non-terminal
    std::size_t nt_pos = form.size();
    for (std::size_t i = 0; i < form.size(); ++i)
      if (form[i].kind == Symbol::Kind::NonTerminal) {
        nt_pos = i;
        break;
      }

    if (nt_pos == form.size()) {
      // expand character classes over all strings of admissible length
      std::vector<std::string> parts{""};
      bool ok = true;
      for (const auto& sym : form) {
        if (sym.kind == Symbol::Kind::Terminal) {
          for (auto& p : parts) p += sym.text;
        } else {
          // enumerate class strings of length 1..max_len (pruned by budget)
          std::vector<std::string> expanded;
          std::string alphabet;
          for (int c = 0x21; c <= 0x7e; ++c)
            if (char_in_class(static_cast<char>(c), sym.char_class))
              alphabet.push_back(static_cast<char>(c));
          for (const auto& p : parts) {
            std::deque<std::string> runs{""};
            while (!runs.empty()) {
              std::string run = std::move(runs.front());
              runs.pop_front();
              if (!run.empty() && p.size() + run.size() <= max_len) expanded.push_back(p + run);
              if (p.size() + run.size() + 1 <= max_len)
                for (char c : alphabet) runs.push_back(run + c);
            }
          }
          parts = std::move(expanded);
          if (parts.size() > 200000) {
            ok = false;
            break;
          }
        }
      }
      if (ok)
        for (auto& p : parts)
          if (p.size() <= max_len) language.insert(std::move(p));
      continue;
    }

    for (const auto& alt : g.productions.at(form[nt_pos].text)) {
      std::vector<Symbol> next(form.begin(), form.begin() + static_cast<std::ptrdiff_t>(nt_pos));
      next.insert(next.end(), alt.begin(), alt.end());
      next.insert(next.end(), form.begin() + static_cast<std::ptrdiff_t>(nt_pos) + 1, form.end());
      if (form_min_len(next) > static_cast<long>(max_len)) continue;
      if (visited.insert(form_key(next)).second) frontier.push_back(std::move(next));
    }
  }
  return language;
}

/// Convenience wrapper for grammars known to stay within budget.
inline std::set<std::string> brute_force_language(const Grammar& g, std::size_t max_len) {
  auto result = brute_force_language_budgeted(g, max_len);
  if (!result) throw std::runtime_error("brute force enumeration exceeded its budget");
  return *result;
}

/// All strings over `alphabet` with length <= max_len (including "").
inline std::vector<std::string> all_strings(const std::string& alphabet, std::size_t max_len) {
  std::vector<std::string> out{""};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (char c : alphabet) out.push_back(out[i] + c);
    begin = end;
  }
  return out;
}

/// Random small grammar over single-char terminals; may be non-terminating
/// or contain epsilon alternatives.
inline Grammar fuzz_grammar(Rng& rng, int max_nts = 5, int max_terms = 3,
                            bool allow_charclass = false) {
  Grammar g;
  int nts = 1 + static_cast<int>(rand_index(rng, static_cast<std::size_t>(max_nts)));
  int terms = 1 + static_cast<int>(rand_index(rng, static_cast<std::size_t>(max_terms)));
  std::vector<std::string> names;
  for (int i = 0; i < nts; ++i) names.push_back("n" + std::to_string(i));
  g.start = names[0];
  std::string alphabet = "abc";

  for (int i = 0; i < nts; ++i) {
    int alts = 1 + static_cast<int>(rand_index(rng, 3));
    for (int a = 0; a < alts; ++a) {
      Alternative alt;
      int len = static_cast<int>(rand_index(rng, 5));  // 0..4, 0 = epsilon
      for (int k = 0; k < len; ++k) {
        auto roll = rand_index(rng, 10);
        if (allow_charclass && roll == 9) {
          alt.push_back(Symbol::charclass(rand_index(rng, 2) == 0
                                              ? CharClassKind::Digits1Plus
                                              : CharClassKind::Letters1Plus));
        } else if (roll < 6) {
          alt.push_back(Symbol::terminal(std::string(1, alphabet[rand_index(
                            rng, static_cast<std::size_t>(terms))])));
        } else {
          alt.push_back(Symbol::nonterminal(names[rand_index(rng, names.size())]));
        }
      }
      g.add_alternative(names[static_cast<std::size_t>(i)], std::move(alt));
    }
  }
  // make sure every non-terminal has at least one rule entry
  for (const auto& name : names)
    if (!g.has_rule(name)) g.add_alternative(name, {Symbol::terminal("a")});
  return g;
}

/// Oracle over a fixed golden grammar, answered in-process by the
/// recognizer. This is the offline stand-in for an external parser binary.
class GoldenOracle : public CallbackOracle {
 public:
  explicit GoldenOracle(const Grammar& golden)
      : CallbackOracle([rec = std::make_shared<EarleyRecognizer>(golden)](const std::string& s) {
          return rec->accepts(s);
        }) {}
};

}  // namespace gramforge::testsupport
