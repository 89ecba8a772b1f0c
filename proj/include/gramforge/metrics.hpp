#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gramforge/grammar.hpp"
#include "gramforge/oracle.hpp"

namespace gramforge {

class EmptyTestSet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fraction of n sampled strings (multiset: duplicates count per draw) the
/// oracle accepts.
double precision(const Grammar& g, OracleClient& oracle, int n, Rng& rng, int max_depth = 40);

/// Fraction of the held-out set accepted by the grammar's own recognizer.
double recall(const Grammar& g, const std::vector<std::string>& test_set);

/// Harmonic mean; 0 when both are 0.
double f1(double p, double r);

struct ComplexityMetrics {
  int terminals = 0;       // distinct terminal symbols (character classes count once per kind)
  int nonterminals = 0;
  double rhs_avg = 0.0;    // symbol occurrences over all alternatives / NT
  int mcc_total = 0;       // alternation separators plus character-class closures
  double mcc_avg = 0.0;    // mcc_total / NT
};

ComplexityMetrics complexity_metrics(const Grammar& g);

}  // namespace gramforge
