#include "gramforge/token.hpp"

namespace gramforge {

std::string TokenSeq::concat() const {
  std::string out;
  for (const auto& t : tokens) out += t.text;
  return out;
}

namespace {

TokenClass classify(unsigned char c) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80) return TokenClass::Letters;
  if (c >= '0' && c <= '9') return TokenClass::Digits;
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return TokenClass::Whitespace;
  return TokenClass::Punct;
}

}  // namespace

TokenSeq pretokenize(std::string_view text, std::string source_id, const TokenizerOptions& opts) {
  TokenSeq seq;
  seq.source_id = std::move(source_id);
  for (std::size_t i = 0; i < text.size();) {
    TokenClass klass = classify(static_cast<unsigned char>(text[i]));
    std::size_t j = i + 1;
    bool merge = klass == TokenClass::Letters ||
                 (klass == TokenClass::Digits && !opts.split_digit_runs);
    if (merge) {
      while (j < text.size() && classify(static_cast<unsigned char>(text[j])) == klass) ++j;
    }
    seq.tokens.push_back(Token{std::string(text.substr(i, j - i)), klass});
    i = j;
  }
  return seq;
}

TokenSeq remove_redundant_whitespace(const TokenSeq& seq, OracleClient& oracle) {
  bool has_ws = false;
  for (const auto& t : seq.tokens)
    if (t.klass == TokenClass::Whitespace) has_ws = true;
  if (!has_ws) return seq;

  if (!oracle.accepts(seq.concat())) {
    throw BadSeedError("seed '" + seq.source_id + "' is rejected by the oracle");
  }

  TokenSeq out;
  out.source_id = seq.source_id;
  out.tokens = seq.tokens;
  for (std::size_t i = 0; i < out.tokens.size();) {
    if (out.tokens[i].klass != TokenClass::Whitespace) {
      ++i;
      continue;
    }
    std::string without;
    for (std::size_t k = 0; k < out.tokens.size(); ++k)
      if (k != i) without += out.tokens[k].text;
    if (oracle.accepts(without)) {
      out.tokens.erase(out.tokens.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace gramforge
