#include "gramforge/heuristics.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace gramforge {

namespace {

using Context = std::pair<std::string, std::string>;
using ContextBag = std::map<Context, int>;  // multiset

struct SpanStats {
  int frequency = 0;
  int depth = 0;
  ContextBag contexts;
};

double jaccard(const ContextBag& a, const ContextBag& b) {
  if (a.empty() && b.empty()) return 0.0;
  int inter = 0, uni = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      uni += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      uni += ib->second;
      ++ib;
    } else {
      inter += std::min(ia->second, ib->second);
      uni += std::max(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

Context context_at(const ParseNode& parent, int start, int end) {
  std::string left = start > 0 ? parent.children[static_cast<std::size_t>(start - 1)]->label : "^";
  std::string right = end + 1 < static_cast<int>(parent.children.size())
                          ? parent.children[static_cast<std::size_t>(end + 1)]->label
                          : "$";
  return {std::move(left), std::move(right)};
}

}  // namespace

std::vector<RankedCandidate> rank_bubbles(const ParseForest& forest, const HeuristicOptions& opts) {
  // Pass 1: every sibling n-gram with its occurrence contexts, plus the
  // contexts of each node class (labels and bare terminals).
  std::map<std::vector<std::string>, SpanStats> spans;
  std::map<std::string, ContextBag> label_contexts;
  std::map<std::string, ContextBag> terminal_contexts;

  std::function<void(const ParseNode&, const ParseNode*, int, int, bool)> walk =
      [&](const ParseNode& node, const ParseNode* parent, int index, int depth, bool is_root) {
        if (parent) {
          Context ctx = context_at(*parent, index, index);
          if (node.is_leaf()) {
            if (parent->children.size() > 1) ++terminal_contexts[node.label][ctx];
          } else {
            ++label_contexts[node.label][ctx];
          }
        }
        int arity = static_cast<int>(node.children.size());
        for (int n = opts.ngram_min; n <= std::min(opts.ngram_max, arity); ++n) {
          for (int i = 0; i + n <= arity; ++i) {
            if (i == 0 && n == arity) continue;  // full spans are not bubbles
            std::vector<std::string> seq;
            seq.reserve(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k)
              seq.push_back(node.children[static_cast<std::size_t>(i + k)]->label);
            auto& st = spans[std::move(seq)];
            ++st.frequency;
            st.depth = std::max(st.depth, depth + 1);
            ++st.contexts[context_at(node, i, i + n - 1)];
          }
        }
        for (std::size_t i = 0; i < node.children.size(); ++i)
          walk(*node.children[i], &node, static_cast<int>(i), depth + 1, false);
      };
  for (const auto& t : forest.trees) walk(*t.root, nullptr, -1, 0, true);

  // Pass 2: score each (span, class) pairing. Pairings that share no context
  // at all never rank anywhere useful and only bloat the list.
  std::vector<RankedCandidate> out;
  for (const auto& [seq, st] : spans) {
    for (const auto& [label, ctxs] : label_contexts) {
      if (seq.size() == 1 && seq[0] == label) continue;
      double sim = jaccard(st.contexts, ctxs);
      if (sim <= 0.0) continue;
      out.push_back(RankedCandidate{seq, ClassRef{false, label}, sim, st.frequency, st.depth});
    }
    for (const auto& [term, ctxs] : terminal_contexts) {
      if (seq.size() == 1 && seq[0] == term) continue;
      double sim = jaccard(st.contexts, ctxs);
      if (sim <= 0.0) continue;
      out.push_back(RankedCandidate{seq, ClassRef{true, term}, sim, st.frequency, st.depth});
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    if (a.depth != b.depth) return a.depth > b.depth;
    if (a.seq.size() != b.seq.size()) return a.seq.size() < b.seq.size();
    if (a.seq != b.seq) return a.seq < b.seq;
    if (a.partner.is_terminal != b.partner.is_terminal) return !a.partner.is_terminal;
    return a.partner.text < b.partner.text;
  });
  if (out.size() > opts.max_candidates) out.resize(opts.max_candidates);
  return out;
}

int refine_with_heuristics(BubbleEngine& engine, int budget, const HeuristicOptions& opts) {
  int accepts = 0;
  int consecutive_rejects = 0;
  bool progressed = true;
  while (progressed && consecutive_rejects < budget) {
    progressed = false;
    auto ranked = rank_bubbles(engine.forest(), opts);
    for (const auto& cand : ranked) {
      if (consecutive_rejects >= budget) break;
      if (engine.try_sequence_merge_with(cand.seq, cand.partner)) {
        ++accepts;
        consecutive_rejects = 0;
        progressed = true;
        break;  // re-rank on the updated forest
      }
      ++consecutive_rejects;
    }
  }
  return accepts;
}

}  // namespace gramforge
