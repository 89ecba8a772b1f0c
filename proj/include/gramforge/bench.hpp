#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gramforge/grammar.hpp"

namespace gramforge {

/// A self-contained benchmark language: a golden grammar whose recognizer
/// doubles as the black-box acceptor for fully offline runs.
struct GoldenLanguage {
  std::string name;
  std::string bnf;
  int default_seed_count;
  int default_test_count;
};

const std::vector<GoldenLanguage>& bundled_languages();
const GoldenLanguage& bundled_language(const std::string& name);  // throws on unknown name
Grammar golden_grammar(const std::string& name);

class InsufficientDiversity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n distinct oracle-valid strings, stratified over derivation depths so
/// lengths vary; the first seed is always the minimal program. Samples
/// longer than max_chars are discarded (recursive rules occasionally derive
/// huge programs; seed corpora stay desk-scale).
std::vector<std::string> make_seeds(const Grammar& g, int n, std::uint64_t seed,
                                    std::size_t max_chars = 200);

/// Acceptor entry point: parses the grammar file, reads one candidate from
/// stdin (to EOF, byte-exact), exits 0 iff accepted, 1 otherwise, 2 on
/// grammar-file problems.
int acceptor_main(const std::string& grammar_path);

}  // namespace gramforge
