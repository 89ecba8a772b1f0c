#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gramforge/oracle.hpp"

namespace gramforge {

enum class TokenClass { Letters, Digits, Whitespace, Punct };

struct Token {
  std::string text;
  TokenClass klass;

  bool operator==(const Token&) const = default;
};

struct TokenSeq {
  std::vector<Token> tokens;
  std::string source_id;

  std::string concat() const;
  bool operator==(const TokenSeq& other) const { return tokens == other.tokens; }
};

struct TokenizerOptions {
  /// When set, each digit becomes its own token instead of merging maximal
  /// runs. Default keeps numbers atomic.
  bool split_digit_runs = false;
};

/// Maximal runs of letters (and, by default, digits) form one token; every
/// whitespace character and every other character is its own token.
/// Upper and lower case share one class. Bytes >= 0x80 are treated as part
/// of letter runs so multi-byte UTF-8 identifiers stay atomic.
TokenSeq pretokenize(std::string_view text, std::string source_id = "",
                     const TokenizerOptions& opts = {});

class BadSeedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single left-to-right pass: drops each whitespace token whose removal
/// still yields an oracle-accepted string. Throws BadSeedError when the
/// unmodified input is itself rejected. Callers normally validate seeds
/// up front, which makes the precondition check a cache hit.
TokenSeq remove_redundant_whitespace(const TokenSeq& seq, OracleClient& oracle);

}  // namespace gramforge
