#include "gramforge/bench.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "gramforge/util.hpp"

namespace gramforge {

namespace {

// Fixed single spaces between all tokens keep the canonical form unambiguous
// and make whitespace an honest part of the language.
const char* kWhileBnf = R"BNF(# while language
start: stmt
stmt: stmt " " ";" " " stmt | "L" " " "=" " " numexpr | "while" " " boolexpr " " "do" " " stmt | "if" " " boolexpr " " "then" " " stmt " " "else" " " stmt | "skip"
boolexpr: "~" " " boolexpr | boolexpr " " "&" " " boolexpr | numexpr " " "==" " " numexpr | "true" | "false"
numexpr: "(" " " numexpr " " "+" " " numexpr " " ")" | "L" | "n"
)BNF";

const char* kJsonBnf = R"BNF(# compact json-like language
start: value
value: obj | arr | str | num | "true" | "false" | "null"
obj: "{" "}" | "{" members "}"
members: pair | pair "," members
pair: str ":" value
arr: "[" "]" | "[" elems "]"
elems: value | value "," elems
str: "\"" <alnum_+> "\"" | "\"" "\""
num: <digits+>
)BNF";

const char* kLispBnf = R"BNF(# lisp-like language; spaces next to parens are optional
start: sexpr
sexpr: atom | "(" osp ")" | "(" osp items osp ")"
items: sexpr | items sp sexpr
osp: | sp
sp: " " | sp " "
atom: <letters+> | <digits+>
)BNF";

const char* kCondBnf = R"BNF(# if/else toy language; the else branch is optional
start: stmt
stmt: ifstmt | asgn
ifstmt: "if" "(" cond ")" " " asgn | "if" "(" cond ")" " " asgn " " "else" " " asgn
cond: numexpr "==" numexpr | numexpr
numexpr: numexpr "+" numexpr | "(" numexpr ")" | <letters+> | <digits+>
asgn: <letters+> "=" numexpr ";"
)BNF";

}  // namespace

const std::vector<GoldenLanguage>& bundled_languages() {
  static const std::vector<GoldenLanguage> langs = {
      {"while", kWhileBnf, 25, 100},
      {"json", kJsonBnf, 15, 100},
      {"lisp", kLispBnf, 15, 100},
      {"cond", kCondBnf, 15, 100},
  };
  return langs;
}

const GoldenLanguage& bundled_language(const std::string& name) {
  for (const auto& l : bundled_languages())
    if (l.name == name) return l;
  throw std::runtime_error("unknown bundled language: " + name);
}

Grammar golden_grammar(const std::string& name) {
  return parse_grammar_file(bundled_language(name).bnf);
}

std::vector<std::string> make_seeds(const Grammar& g, int n, std::uint64_t seed,
                                    std::size_t max_chars) {
  if (n <= 0) return {};
  std::vector<std::string> out;
  std::set<std::string> seen;

  std::string minimal = minimal_string(g);
  out.push_back(minimal);
  seen.insert(minimal);

  Rng rng(seed);
  const int max_depth = 16;
  int attempts = 0;
  const int attempt_cap = n * 500;
  int depth = 2;
  while (static_cast<int>(out.size()) < n && attempts < attempt_cap) {
    ++attempts;
    auto strings = sample_from_grammar(g, 1, rng, depth);
    depth = depth >= max_depth ? 2 : depth + 1;  // stratify derivation depth
    if (strings[0].size() > max_chars) continue;
    if (seen.insert(strings[0]).second) out.push_back(strings[0]);
  }
  if (static_cast<int>(out.size()) < n)
    throw InsufficientDiversity("could not generate " + std::to_string(n) +
                                " distinct strings (got " + std::to_string(out.size()) + ")");
  return out;
}

int acceptor_main(const std::string& grammar_path) {
  Grammar g;
  try {
    g = parse_grammar_file(read_file(grammar_path));
  } catch (const std::exception& e) {
    std::cerr << "acceptor: " << e.what() << '\n';
    return 2;
  }
  EarleyRecognizer recognizer(g);
  std::string candidate((std::istreambuf_iterator<char>(std::cin)),
                        std::istreambuf_iterator<char>());
  return recognizer.accepts(candidate) ? 0 : 1;
}

}  // namespace gramforge
