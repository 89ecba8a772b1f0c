#include "gramforge/bubbling.hpp"

#include <algorithm>
#include <functional>

namespace gramforge {

namespace {

std::string ref_text(const ClassRef& c) { return (c.is_terminal ? "'" : "") + c.text; }

std::string seq_text(const std::vector<std::string>& seq) {
  std::string s;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) s += ' ';
    s += seq[i];
  }
  return s;
}

}  // namespace

std::vector<NodeRef> BubbleEngine::class_occurrences(const ClassRef& c) const {
  return forest_.occurrences_of_label(c.text, c.is_terminal);
}

std::vector<std::string> BubbleEngine::sample_swapped_strings(const ClassRef& a, const ClassRef& b,
                                                              int cap) {
  if (cap <= 0) return {};
  auto occs_a = class_occurrences(a);
  auto occs_b = class_occurrences(b);
  if (occs_a.empty() || occs_b.empty()) return {};

  auto cap_occurrences = [&](std::vector<NodeRef>& occs) {
    if (static_cast<int>(occs.size()) <= opts_.per_side_occurrence_cap) return;
    std::shuffle(occs.begin(), occs.end(), rng_);
    occs.resize(static_cast<std::size_t>(opts_.per_side_occurrence_cap));
  };
  cap_occurrences(occs_a);
  cap_occurrences(occs_b);

  struct Swap {
    const NodeRef* site;
    const std::vector<NodeRef>* donors;
  };
  std::vector<Swap> swaps;
  swaps.reserve(occs_a.size() + occs_b.size());
  for (const auto& o : occs_a) swaps.push_back({&o, &occs_b});
  for (const auto& o : occs_b) swaps.push_back({&o, &occs_a});
  if (static_cast<int>(swaps.size()) > cap) {
    std::shuffle(swaps.begin(), swaps.end(), rng_);
    swaps.resize(static_cast<std::size_t>(cap));
  }

  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& swap : swaps) {
    const NodeRef& donor = (*swap.donors)[rand_index(rng_, swap.donors->size())];
    std::string donor_yield = yield_string(*donor.node);
    const ParseTree& tree = forest_.trees[static_cast<std::size_t>(swap.site->tree_index)];
    std::string s = yield_with_override(*tree.root, swap.site->node, donor_yield);
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

BubbleEngine::Materialized BubbleEngine::materialize(const Bubble& b) {
  int tree_index = -1;
  ParseNode* parent = forest_.find(b.parent_id, &tree_index);
  if (!parent || tree_index != b.tree_index) return {};
  int arity = static_cast<int>(parent->children.size());
  if (b.start < 0 || b.end < b.start || b.end >= arity) return {};
  bool full_span = b.start == 0 && b.end == arity - 1;
  bool is_root = forest_.trees[static_cast<std::size_t>(b.tree_index)].root.get() == parent;
  if (full_span && is_root) return {};  // would duplicate the start class

  auto group = std::make_unique<ParseNode>();
  group->label = forest_.fresh_label();
  group->id = forest_.new_node_id();
  for (int i = b.start; i <= b.end; ++i)
    group->children.push_back(std::move(parent->children[static_cast<std::size_t>(i)]));
  parent->children.erase(parent->children.begin() + b.start, parent->children.begin() + b.end + 1);
  ParseNode* raw = group.get();
  parent->children.insert(parent->children.begin() + b.start, std::move(group));
  return {raw, true};
}

std::string BubbleEngine::decide_label(const ClassRef& a, const ClassRef& b,
                                       const std::string& yield_a, const std::string& yield_b) {
  // Merging into the start class never renames it: roots must keep their
  // shared label.
  if (!a.is_terminal && a.text == forest_.start_label) return a.text;
  if (!b.is_terminal && b.text == forest_.start_label) return b.text;

  if (labeler_) {
    // Leaf texts count as taken too: a label equal to a terminal would make
    // sequence matching ambiguous.
    std::set<std::string> taken;
    std::function<void(const ParseNode&)> collect = [&](const ParseNode& n) {
      taken.insert(n.label);
      for (const auto& c : n.children) collect(*c);
    };
    for (const auto& t : forest_.trees) collect(*t.root);
    if (!a.is_terminal) taken.erase(a.text);
    if (!b.is_terminal) taken.erase(b.text);
    std::string suggested = labeler_->suggest_label(yield_a, yield_b, taken);
    if (!suggested.empty()) return suggested;
  }
  if (!a.is_terminal && !b.is_terminal) return std::min(a.text, b.text);
  if (!a.is_terminal) return a.text;
  if (!b.is_terminal) return b.text;
  return forest_.fresh_label();
}

void BubbleEngine::relabel_class(const ClassRef& c, const std::string& unified) {
  if (!c.is_terminal) {
    if (c.text == unified) return;
    std::function<void(ParseNode&)> walk = [&](ParseNode& n) {
      if (!n.is_leaf() && n.label == c.text) n.label = unified;
      for (auto& ch : n.children) walk(*ch);
    };
    for (auto& t : forest_.trees) walk(*t.root);
    if (forest_.start_label == c.text) forest_.start_label = unified;
    return;
  }
  // Terminal class: wrap each bare leaf occurrence under a unified node.
  std::function<void(ParseNode&)> walk = [&](ParseNode& n) {
    for (auto& ch : n.children) {
      if (ch->is_leaf() && ch->label == c.text) {
        if (n.label == unified && n.children.size() == 1) continue;  // already wrapped
        auto wrapper = std::make_unique<ParseNode>();
        wrapper->label = unified;
        wrapper->id = forest_.new_node_id();
        wrapper->children.push_back(std::move(ch));
        ch = std::move(wrapper);
      } else {
        walk(*ch);
      }
    }
  };
  for (auto& t : forest_.trees) walk(*t.root);
}

CheckOutcome BubbleEngine::check_bubble(const MergeCandidate& cand) {
  ParseForest snapshot = forest_.clone();

  // Materialize spans right-to-left when both live under one parent so the
  // second span's indices stay valid.
  const Bubble* bub_a = std::get_if<Bubble>(&cand.a);
  const Bubble* bub_b = std::get_if<Bubble>(&cand.b);
  if (bub_a && bub_b && bub_a->parent_id == bub_b->parent_id) {
    if (!(bub_a->end < bub_b->start || bub_b->end < bub_a->start)) return {};  // overlap
  }

  auto rollback = [&]() { forest_ = std::move(snapshot); };

  // A full-span bubble merged with its own parent's class would just wrap a
  // node in itself (P -> U -> children with U == P's class): vacuously true
  // for the oracle and structurally useless, so reject it outright.
  auto is_self_wrap = [&](const Bubble& b, const MergeSide& other) -> bool {
    const auto* cls = std::get_if<ClassRef>(&other);
    if (!cls || cls->is_terminal) return false;
    ParseNode* parent = forest_.find(b.parent_id);
    if (!parent) return false;
    bool full = b.start == 0 && b.end == static_cast<int>(parent->children.size()) - 1;
    return full && parent->label == cls->text;
  };
  if (bub_a && is_self_wrap(*bub_a, cand.b)) return {};
  if (bub_b && is_self_wrap(*bub_b, cand.a)) return {};

  ClassRef class_a, class_b;
  std::string yield_a, yield_b;
  auto realize_side = [&](const MergeSide& side, ClassRef& cls, std::string& yld,
                          const MergeSide* other_first) -> bool {
    if (const auto* b = std::get_if<Bubble>(&side)) {
      Bubble adjusted = *b;
      // If the other side was already materialized inside the same parent to
      // the left, this span shifted right by (span length - 1) fewer nodes.
      if (other_first) {
        if (const auto* ob = std::get_if<Bubble>(other_first)) {
          if (ob->parent_id == b->parent_id && ob->end < b->start) {
            int collapsed = ob->end - ob->start;
            adjusted.start -= collapsed;
            adjusted.end -= collapsed;
          }
        }
      }
      auto mat = materialize(adjusted);
      if (!mat.ok) return false;
      cls = ClassRef{false, mat.node->label};
      yld = yield_string(*mat.node);
      return true;
    }
    cls = std::get<ClassRef>(side);
    auto occs = class_occurrences(cls);
    if (occs.empty()) return false;
    yld = yield_string(*occs.front().node);
    return true;
  };

  if (!realize_side(cand.a, class_a, yield_a, nullptr)) {
    rollback();
    return {};
  }
  if (!realize_side(cand.b, class_b, yield_b, &cand.a)) {
    rollback();
    return {};
  }
  if (class_a == class_b) {
    rollback();
    return {};
  }

  auto samples = sample_swapped_strings(class_a, class_b, opts_.sample_cap);
  int checked = 0;
  for (const auto& s : samples) {
    ++checked;
    if (!oracle_.accepts(s)) {
      rollback();
      trace_line("reject a=" + ref_text(class_a) + " b=" + ref_text(class_b) +
                 " queries=" + std::to_string(checked));
      return {false, "", checked};
    }
  }

  std::string unified = decide_label(class_a, class_b, yield_a, yield_b);
  relabel_class(class_a, unified);
  relabel_class(class_b, unified);

  // A vacuous merge (already one class, e.g. a fully wrapped terminal against
  // its wrapper) must count as a reject or callers would loop on it.
  if (dump_forest(forest_, true) == dump_forest(snapshot, true)) {
    forest_ = std::move(snapshot);
    trace_line("noop a=" + ref_text(class_a) + " b=" + ref_text(class_b));
    return {false, unified, checked};
  }

  trace_line("accept a=" + ref_text(class_a) + " b=" + ref_text(class_b) + " label=" + unified +
             " queries=" + std::to_string(checked) + " ya='" + yield_a + "' yb='" + yield_b + "'");
  return {true, unified, checked};
}

ClassInventory BubbleEngine::classes() const {
  ClassInventory inv;
  std::set<std::string> labels;
  std::set<std::string> terminals;
  std::function<void(const ParseNode&, const ParseNode*)> walk = [&](const ParseNode& n,
                                                                     const ParseNode* parent) {
    if (n.is_leaf()) {
      // A leaf whose parent wraps only it already belongs to the parent's
      // class; listing it again would just re-wrap.
      if (!(parent && parent->children.size() == 1)) terminals.insert(n.label);
      return;
    }
    labels.insert(n.label);
    for (const auto& c : n.children) walk(*c, &n);
  };
  for (const auto& t : forest_.trees) walk(*t.root, nullptr);
  inv.labels.assign(labels.begin(), labels.end());
  inv.terminals.assign(terminals.begin(), terminals.end());
  return inv;
}

int BubbleEngine::merge_all_valid(const std::vector<std::uint64_t>& bracket_ids) {
  int accepted = 0;
  for (std::uint64_t id : bracket_ids) {
    int tree_index = -1;
    ParseNode* node = forest_.find(id, &tree_index);
    if (!node) continue;
    ClassRef self{false, node->label};

    ClassInventory inv = classes();
    std::vector<ClassRef> partners;
    for (const auto& l : inv.labels)
      if (l != self.text) partners.push_back(ClassRef{false, l});
    for (const auto& t : inv.terminals) partners.push_back(ClassRef{true, t});

    for (const auto& partner : partners) {
      node = forest_.find(id);  // label may have changed in an earlier merge
      if (!node) break;
      self.text = node->label;
      if (!partner.is_terminal && partner.text == self.text) continue;
      if (class_occurrences(partner).empty()) continue;
      auto outcome = check_bubble(MergeCandidate{self, partner});
      if (outcome.accepted) ++accepted;
    }
  }
  return accepted;
}

std::vector<std::vector<std::string>> BubbleEngine::bracket_bubble_candidates() const {
  std::set<std::vector<std::string>> seqs;

  std::function<void(const ParseNode&)> walk = [&](const ParseNode& n) {
    // Matched pairs among this node's direct children, per bracket kind.
    std::vector<std::pair<char, std::size_t>> stack;
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      const ParseNode& c = *n.children[i];
      if (c.is_leaf()) {
        const std::string& l = c.label;
        if (l == "(" || l == "[" || l == "{") {
          stack.emplace_back(l[0], i);
        } else if (l == ")" || l == "]" || l == "}") {
          char open = l == ")" ? '(' : (l == "]" ? '[' : '{');
          if (!stack.empty() && stack.back().first == open) {
            std::size_t from = stack.back().second;
            stack.pop_back();
            if (i > from + 1) {
              std::vector<std::string> seq;
              for (std::size_t k = from + 1; k < i; ++k) seq.push_back(n.children[k]->label);
              seqs.insert(std::move(seq));
            }
          }
        }
      }
      if (!c.is_leaf()) walk(c);
    }
  };
  for (const auto& t : forest_.trees) walk(*t.root);

  std::vector<std::vector<std::string>> out(seqs.begin(), seqs.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::vector<Bubble> BubbleEngine::find_sequence_spans(const std::vector<std::string>& seq) const {
  // Only strict subranges: a full child span is just its parent's content,
  // and re-wrapping it adds a unary level per pass without ever converging.
  // That case belongs to class-vs-class merges instead.
  std::vector<Bubble> out;
  if (seq.empty()) return out;
  std::function<void(int, const ParseNode&)> walk = [&](int ti, const ParseNode& n) {
    int arity = static_cast<int>(n.children.size());
    int len = static_cast<int>(seq.size());
    for (int i = 0; i + len <= arity; ++i) {
      bool match = true;
      for (int k = 0; k < len; ++k)
        if (n.children[static_cast<std::size_t>(i + k)]->label != seq[static_cast<std::size_t>(k)]) {
          match = false;
          break;
        }
      if (!match) continue;
      if (i == 0 && len == arity) continue;
      out.push_back(Bubble{ti, n.id, i, i + len - 1});
    }
    for (const auto& c : n.children)
      if (!c->is_leaf()) walk(ti, *c);
  };
  for (std::size_t i = 0; i < forest_.trees.size(); ++i)
    walk(static_cast<int>(i), *forest_.trees[i].root);
  return out;
}

int BubbleEngine::apply_rule_everywhere(const std::vector<std::string>& seq,
                                        const std::string& target) {
  // Guard against a self-recursive fold: a unary sequence equal to the
  // target label would wrap forever.
  if (seq.size() == 1 && seq[0] == target) return 0;
  int folds = 0;
  for (;;) {
    auto spans = find_sequence_spans(seq);
    if (spans.empty()) break;
    auto mat = materialize(spans.front());
    if (!mat.ok) break;
    mat.node->label = target;
    ++folds;
  }
  return folds;
}

std::optional<ClassRef> BubbleEngine::materialize_sequence_class(
    const std::vector<std::string>& seq) {
  // A single-node sequence is not a new span, it is its node's class.
  if (seq.size() == 1) {
    ClassInventory inv = classes();
    bool as_label = std::find(inv.labels.begin(), inv.labels.end(), seq[0]) != inv.labels.end();
    bool as_term =
        std::find(inv.terminals.begin(), inv.terminals.end(), seq[0]) != inv.terminals.end();
    if (!as_label && !as_term) return std::nullopt;
    return ClassRef{!as_label, seq[0]};
  }
  // Fold every occurrence under one tentative class so the bubble check
  // samples swaps at all of them, not just a single anchor.
  std::string tentative = forest_.fresh_label();
  if (apply_rule_everywhere(seq, tentative) == 0) return std::nullopt;
  return ClassRef{false, tentative};
}

std::optional<std::string> BubbleEngine::try_sequence_merge_with(
    const std::vector<std::string>& seq, const ClassRef& partner) {
  ParseForest snapshot = forest_.clone();
  auto cls = materialize_sequence_class(seq);
  if (!cls || *cls == partner) {
    forest_ = std::move(snapshot);
    return std::nullopt;
  }
  auto outcome = check_bubble(MergeCandidate{*cls, partner});
  if (!outcome.accepted) {
    forest_ = std::move(snapshot);
    return std::nullopt;
  }
  return outcome.unified_label;
}

std::optional<std::string> BubbleEngine::try_sequence_merge(const std::vector<std::string>& seq) {
  ParseForest snapshot = forest_.clone();
  auto cls = materialize_sequence_class(seq);
  if (!cls) {
    forest_ = std::move(snapshot);
    return std::nullopt;
  }

  ClassInventory inv = classes();
  std::vector<ClassRef> partners;
  for (const auto& label : inv.labels) partners.push_back(ClassRef{false, label});
  for (const auto& term : inv.terminals) partners.push_back(ClassRef{true, term});

  for (const auto& partner : partners) {
    if (partner == *cls) continue;
    auto outcome = check_bubble(MergeCandidate{*cls, partner});
    if (outcome.accepted) return outcome.unified_label;
  }
  forest_ = std::move(snapshot);
  return std::nullopt;
}

std::optional<std::string> BubbleEngine::try_sequence_pair_merge(
    const std::vector<std::string>& seq_a, const std::vector<std::string>& seq_b) {
  if (seq_a == seq_b) return std::nullopt;
  if (seq_a.size() < 2 || seq_b.size() < 2) return std::nullopt;
  ParseForest snapshot = forest_.clone();
  auto cls_a = materialize_sequence_class(seq_a);
  if (!cls_a) {
    forest_ = std::move(snapshot);
    return std::nullopt;
  }
  auto cls_b = materialize_sequence_class(seq_b);
  if (!cls_b || *cls_b == *cls_a) {
    forest_ = std::move(snapshot);
    return std::nullopt;
  }
  auto outcome = check_bubble(MergeCandidate{*cls_a, *cls_b});
  if (!outcome.accepted) {
    forest_ = std::move(snapshot);
    return std::nullopt;
  }
  return outcome.unified_label;
}

void BubbleEngine::trace_line(const std::string& line) {
  if (trace_) *trace_ << line << '\n';
}

}  // namespace gramforge
