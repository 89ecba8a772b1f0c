#include "gramforge/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "gramforge/parse_tree.hpp"

namespace gramforge {

bool char_in_class(char c, CharClassKind k) {
  auto uc = static_cast<unsigned char>(c);
  switch (k) {
    case CharClassKind::Digits1Plus:
      return uc >= '0' && uc <= '9';
    case CharClassKind::Letters1Plus:
      return (uc >= 'a' && uc <= 'z') || (uc >= 'A' && uc <= 'Z');
    case CharClassKind::AlnumUnderscore1Plus:
      return (uc >= 'a' && uc <= 'z') || (uc >= 'A' && uc <= 'Z') ||
             (uc >= '0' && uc <= '9') || uc == '_';
    case CharClassKind::AnyPrintable1Plus:
      return uc >= 0x21 && uc <= 0x7e;
  }
  return false;
}

std::string_view char_class_spelling(CharClassKind k) {
  switch (k) {
    case CharClassKind::Digits1Plus:
      return "<digits+>";
    case CharClassKind::Letters1Plus:
      return "<letters+>";
    case CharClassKind::AlnumUnderscore1Plus:
      return "<alnum_+>";
    case CharClassKind::AnyPrintable1Plus:
      return "<print+>";
  }
  return "";
}

void Grammar::add_alternative(const std::string& name, Alternative alt) {
  auto [it, inserted] = productions.try_emplace(name);
  if (inserted) rule_order.push_back(name);
  auto& alts = it->second;
  if (std::find(alts.begin(), alts.end(), alt) == alts.end()) alts.push_back(std::move(alt));
}

const std::vector<Alternative>& Grammar::alternatives(const std::string& name) const {
  auto it = productions.find(name);
  if (it == productions.end()) throw std::runtime_error("unknown non-terminal: " + name);
  return it->second;
}

void Grammar::validate() const {
  if (!has_rule(start)) throw std::runtime_error("grammar has no rule for start symbol '" + start + "'");
  for (const auto& [name, alts] : productions) {
    for (const auto& alt : alts)
      for (const auto& sym : alt)
        if (sym.kind == Symbol::Kind::NonTerminal && !has_rule(sym.text))
          throw std::runtime_error("rule '" + name + "' references undefined non-terminal '" +
                                   sym.text + "'");
  }
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string quote_terminal(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

bool valid_nonterminal_name(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace

std::string serialize(const Grammar& g) {
  std::ostringstream out;
  for (const auto& name : g.rule_order) {
    out << name << ":";
    const auto& alts = g.productions.at(name);
    if (alts.size() == 1 && alts[0].empty()) {
      // a lone epsilon alternative needs the separator to stay parseable
      out << " |\n";
      continue;
    }
    for (std::size_t i = 0; i < alts.size(); ++i) {
      if (i > 0) out << " |";
      for (const auto& sym : alts[i]) {
        out << ' ';
        switch (sym.kind) {
          case Symbol::Kind::Terminal:
            out << quote_terminal(sym.text);
            break;
          case Symbol::Kind::NonTerminal:
            out << sym.text;
            break;
          case Symbol::Kind::CharClass:
            out << char_class_spelling(sym.char_class);
            break;
        }
      }
    }
    out << '\n';
  }
  return out.str();
}

namespace {

struct LineParser {
  std::string_view line;
  int line_no;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw GrammarSyntaxError(msg, line_no, static_cast<int>(pos) + 1);
  }
  bool eof() const { return pos >= line.size(); }
  char peek() const { return line[pos]; }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
  }

  std::string parse_quoted() {
    ++pos;  // opening quote
    std::string text;
    while (true) {
      if (eof()) fail("unterminated terminal");
      char c = line[pos++];
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("dangling escape");
        char e = line[pos++];
        switch (e) {
          case '"':
            text.push_back('"');
            break;
          case '\\':
            text.push_back('\\');
            break;
          case 'n':
            text.push_back('\n');
            break;
          case 't':
            text.push_back('\t');
            break;
          default:
            fail(std::string("unknown escape \\") + e);
        }
      } else {
        text.push_back(c);
      }
    }
    if (text.empty()) fail("terminal must be non-empty");
    return text;
  }

  Symbol parse_symbol() {
    if (peek() == '"') return Symbol::terminal(parse_quoted());
    if (peek() == '<') {
      auto end = line.find('>', pos);
      if (end == std::string_view::npos) fail("unterminated character class");
      std::string_view cls = line.substr(pos, end - pos + 1);
      pos = end + 1;
      for (auto k : {CharClassKind::Digits1Plus, CharClassKind::Letters1Plus,
                     CharClassKind::AlnumUnderscore1Plus, CharClassKind::AnyPrintable1Plus})
        if (cls == char_class_spelling(k)) return Symbol::charclass(k);
      fail("unknown character class " + std::string(cls));
    }
    std::size_t start = pos;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos;
    if (pos == start) fail("expected symbol");
    return Symbol::nonterminal(std::string(line.substr(start, pos - start)));
  }
};

}  // namespace

Grammar parse_grammar_file(std::string_view text, const std::string& start) {
  Grammar g;
  g.start = start;
  int line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(begin, end - begin);
    begin = end + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

    LineParser p{raw, line_no};
    p.skip_ws();
    if (p.eof()) continue;

    std::size_t name_start = p.pos;
    while (!p.eof() && p.peek() != ':') ++p.pos;
    if (p.eof()) p.fail("missing ':' after rule name");
    std::string name(raw.substr(name_start, p.pos - name_start));
    while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
    if (!valid_nonterminal_name(name)) p.fail("invalid rule name '" + name + "'");
    ++p.pos;  // ':'

    if (g.has_rule(name)) p.fail("duplicate rule '" + name + "'");
    g.productions[name];  // create even if all alternatives are empty
    g.rule_order.push_back(name);

    Alternative alt;
    bool any_symbol_or_pipe = false;
    auto flush = [&] {
      auto& alts = g.productions[name];
      if (std::find(alts.begin(), alts.end(), alt) == alts.end()) alts.push_back(alt);
      alt.clear();
    };
    while (true) {
      p.skip_ws();
      if (p.eof()) break;
      if (p.peek() == '|') {
        ++p.pos;
        any_symbol_or_pipe = true;
        flush();
        continue;
      }
      alt.push_back(p.parse_symbol());
      any_symbol_or_pipe = true;
    }
    if (!any_symbol_or_pipe) p.fail("rule '" + name + "' has no right-hand side");
    flush();
  }
  if (!g.has_rule(start))
    throw GrammarSyntaxError("grammar does not define start symbol '" + start + "'", line_no, 1);
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// Earley recognizer

namespace {

struct Item {
  std::int32_t prod;
  std::int32_t dot;
  std::int32_t origin;
  bool operator==(const Item&) const = default;
};

struct ItemHash {
  std::size_t operator()(const Item& it) const {
    std::size_t h = static_cast<std::size_t>(it.prod);
    h = h * 1000003u ^ static_cast<std::size_t>(it.dot);
    h = h * 1000003u ^ static_cast<std::size_t>(it.origin);
    return h;
  }
};

}  // namespace

EarleyRecognizer::EarleyRecognizer(const Grammar& g) {
  // Pre-resolve every non-terminal to an id so the chart loop never touches
  // strings.
  for (const auto& name : g.rule_order) nt_ids_.emplace(name, static_cast<int>(nt_ids_.size()));
  prods_by_lhs_.resize(nt_ids_.size());
  for (const auto& name : g.rule_order) {
    int lhs = nt_ids_.at(name);
    for (const auto& alt : g.productions.at(name)) {
      prods_by_lhs_[static_cast<std::size_t>(lhs)].push_back(static_cast<int>(prods_.size()));
      prods_.push_back({lhs, alt});
    }
  }
  start_id_ = nt_ids_.at(g.start);
}

bool EarleyRecognizer::accepts(std::string_view input) const {
  const int n = static_cast<int>(input.size());
  const int nts = static_cast<int>(nt_ids_.size());

  // Pre-resolved dot symbols: -1 terminal/class, else the awaited nt id.
  // Computed once per call but reused heavily; kept simple because prods_
  // stores resolved Alternatives already.
  auto awaited_nt = [&](const Item& it) -> int {
    const auto& alt = prods_[static_cast<std::size_t>(it.prod)].alt;
    if (it.dot >= static_cast<int>(alt.size())) return -1;
    const Symbol& sym = alt[static_cast<std::size_t>(it.dot)];
    return sym.kind == Symbol::Kind::NonTerminal ? nt_ids_.at(sym.text) : -1;
  };

  std::vector<std::vector<Item>> sets(static_cast<std::size_t>(n) + 1);
  std::vector<std::unordered_set<Item, ItemHash>> seen(static_cast<std::size_t>(n) + 1);
  // wants[k][nt]: indices of items in set k whose dot awaits nt
  std::vector<std::vector<std::vector<std::int32_t>>> wants(static_cast<std::size_t>(n) + 1);
  std::vector<std::vector<bool>> nulled(static_cast<std::size_t>(n) + 1);
  std::vector<bool> predicted(static_cast<std::size_t>(nts), false);

  auto ensure_pos = [&](int k) {
    auto uk = static_cast<std::size_t>(k);
    if (wants[uk].empty()) {
      wants[uk].assign(static_cast<std::size_t>(nts), {});
      nulled[uk].assign(static_cast<std::size_t>(nts), false);
    }
  };

  std::function<void(int, Item)> add_item = [&](int k, Item item) {
    auto uk = static_cast<std::size_t>(k);
    if (!seen[uk].insert(item).second) return;
    ensure_pos(k);
    sets[uk].push_back(item);
    int nt = awaited_nt(item);
    if (nt >= 0) {
      wants[uk][static_cast<std::size_t>(nt)].push_back(
          static_cast<std::int32_t>(sets[uk].size() - 1));
      if (nulled[uk][static_cast<std::size_t>(nt)])
        add_item(k, Item{item.prod, item.dot + 1, item.origin});
    }
  };

  ensure_pos(0);
  for (int p : prods_by_lhs_[static_cast<std::size_t>(start_id_)])
    add_item(0, Item{p, 0, 0});

  for (int k = 0; k <= n; ++k) {
    auto uk = static_cast<std::size_t>(k);
    ensure_pos(k);
    std::fill(predicted.begin(), predicted.end(), false);
    auto& set = sets[uk];
    for (std::size_t idx = 0; idx < set.size(); ++idx) {
      Item item = set[idx];
      const auto& prod = prods_[static_cast<std::size_t>(item.prod)];
      const auto& alt = prod.alt;
      if (item.dot == static_cast<int>(alt.size())) {
        // completion; a zero-width completion also unblocks later arrivals
        if (item.origin == k) nulled[uk][static_cast<std::size_t>(prod.lhs)] = true;
        const auto& parents = wants[static_cast<std::size_t>(item.origin)]
                                   [static_cast<std::size_t>(prod.lhs)];
        for (std::size_t j = 0; j < parents.size(); ++j) {
          Item parent = sets[static_cast<std::size_t>(item.origin)]
                            [static_cast<std::size_t>(parents[j])];
          add_item(k, Item{parent.prod, parent.dot + 1, parent.origin});
        }
        continue;
      }
      const Symbol& sym = alt[static_cast<std::size_t>(item.dot)];
      switch (sym.kind) {
        case Symbol::Kind::NonTerminal: {
          int nt = nt_ids_.at(sym.text);
          if (!predicted[static_cast<std::size_t>(nt)]) {
            predicted[static_cast<std::size_t>(nt)] = true;
            for (int p : prods_by_lhs_[static_cast<std::size_t>(nt)]) add_item(k, Item{p, 0, k});
          }
          break;
        }
        case Symbol::Kind::Terminal: {
          const auto len = sym.text.size();
          if (static_cast<std::size_t>(k) + len <= input.size() &&
              input.substr(static_cast<std::size_t>(k), len) == sym.text)
            add_item(k + static_cast<int>(len), Item{item.prod, item.dot + 1, item.origin});
          break;
        }
        case Symbol::Kind::CharClass: {
          int run = 0;
          while (static_cast<std::size_t>(k + run) < input.size() &&
                 char_in_class(input[static_cast<std::size_t>(k + run)], sym.char_class))
            ++run;
          for (int len = 1; len <= run; ++len)
            add_item(k + len, Item{item.prod, item.dot + 1, item.origin});
          break;
        }
      }
    }
  }

  for (const Item& item : sets[static_cast<std::size_t>(n)]) {
    const auto& prod = prods_[static_cast<std::size_t>(item.prod)];
    if (prod.lhs == start_id_ && item.origin == 0 && item.dot == static_cast<int>(prod.alt.size()))
      return true;
  }
  return false;
}

bool earley_accepts(const Grammar& g, std::string_view input) {
  return EarleyRecognizer(g).accepts(input);
}

}  // namespace gramforge
