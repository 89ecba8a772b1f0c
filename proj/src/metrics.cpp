#include "gramforge/metrics.hpp"

#include <set>

namespace gramforge {

double precision(const Grammar& g, OracleClient& oracle, int n, Rng& rng, int max_depth) {
  if (n <= 0) throw std::invalid_argument("precision needs a positive sample count");
  auto samples = sample_from_grammar(g, n, rng, max_depth);
  int accepted = 0;
  for (const auto& s : samples)
    if (oracle.accepts(s)) ++accepted;
  return static_cast<double>(accepted) / n;
}

double recall(const Grammar& g, const std::vector<std::string>& test_set) {
  if (test_set.empty()) throw EmptyTestSet("recall needs a non-empty test set");
  EarleyRecognizer recognizer(g);
  int accepted = 0;
  for (const auto& s : test_set)
    if (recognizer.accepts(s)) ++accepted;
  return static_cast<double>(accepted) / static_cast<double>(test_set.size());
}

double f1(double p, double r) {
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

ComplexityMetrics complexity_metrics(const Grammar& g) {
  ComplexityMetrics m;
  std::set<std::string> terminals;
  std::set<CharClassKind> classes;
  long symbol_occurrences = 0;

  for (const auto& [name, alts] : g.productions) {
    (void)name;
    if (!alts.empty()) m.mcc_total += static_cast<int>(alts.size()) - 1;
    for (const auto& alt : alts) {
      symbol_occurrences += static_cast<long>(alt.size());
      for (const auto& sym : alt) {
        switch (sym.kind) {
          case Symbol::Kind::Terminal:
            terminals.insert(sym.text);
            break;
          case Symbol::Kind::CharClass:
            classes.insert(sym.char_class);
            ++m.mcc_total;  // the one-or-more closure is a branch operator
            break;
          case Symbol::Kind::NonTerminal:
            break;
        }
      }
    }
  }

  m.nonterminals = static_cast<int>(g.productions.size());
  m.terminals = static_cast<int>(terminals.size() + classes.size());
  if (m.nonterminals > 0) {
    m.rhs_avg = static_cast<double>(symbol_occurrences) / m.nonterminals;
    m.mcc_avg = static_cast<double>(m.mcc_total) / m.nonterminals;
  }
  return m;
}

}  // namespace gramforge
