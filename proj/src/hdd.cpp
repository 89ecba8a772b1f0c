#include "gramforge/hdd.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace gramforge {

namespace {

void collect_internal(ParseNode& node, std::vector<ParseNode*>& out) {
  if (node.is_leaf()) return;
  out.push_back(&node);
  for (auto& c : node.children) collect_internal(*c, out);
}

std::string fingerprint(const ParseTree& tree) {
  std::ostringstream ss;
  dump_tree(ss, *tree.root, /*with_ids=*/false);
  return ss.str();
}

}  // namespace

bool passes_sample_criterion(const ParseTree& tree, const ParseForest& forest,
                             OracleClient& oracle, int n, std::uint64_t seed) {
  if (!oracle.accepts(yield_string(*tree.root))) return false;

  std::vector<ParseNode*> nodes;
  collect_internal(*tree.root, nodes);
  if (nodes.empty() || n <= 1) return true;

  Rng rng(seed);
  for (int i = 1; i < n; ++i) {
    ParseNode* site = nodes[rand_index(rng, nodes.size())];
    auto donors = forest.occurrences_of_label(site->label, false);
    if (donors.empty()) continue;
    const NodeRef& donor = donors[rand_index(rng, donors.size())];
    std::string s =
        yield_with_override(*tree.root, site, yield_string(*donor.node));
    if (!oracle.accepts(s)) return false;
  }
  return true;
}

std::vector<ParseTree> hdd_decompose(const ParseForest& forest, OracleClient& oracle,
                                     const HddOptions& opts) {
  std::vector<ParseTree> out;
  std::set<std::string> seen;

  for (const auto& original : forest.trees) {
    out.push_back(original.clone());
    seen.insert(fingerprint(original));
  }

  for (const auto& original : forest.trees) {
    ParseTree working = original.clone();
    std::uint64_t seed = opts.rng_seed + static_cast<std::uint64_t>(original.tree_id) * 7919;

    auto keep_if_new = [&](const ParseTree& t) {
      std::string fp = fingerprint(t);
      if (seen.insert(fp).second) out.push_back(t.clone());
    };

    // Tests a pruned variant of `working` where `parent` keeps only the
    // children at `keep` (indices into the current child list).
    auto test_config = [&](std::uint64_t parent_id,
                           const std::vector<std::size_t>& keep) -> bool {
      if (keep.empty()) return false;  // internal nodes need a child
      ParseTree candidate = working.clone();
      std::function<ParseNode*(ParseNode*)> find = [&](ParseNode* n) -> ParseNode* {
        if (n->id == parent_id) return n;
        for (auto& c : n->children)
          if (ParseNode* hit = find(c.get())) return hit;
        return nullptr;
      };
      ParseNode* parent = find(candidate.root.get());
      if (!parent) return false;
      std::vector<std::unique_ptr<ParseNode>> pruned;
      for (std::size_t idx : keep) pruned.push_back(std::move(parent->children[idx]));
      parent->children = std::move(pruned);
      if (!passes_sample_criterion(candidate, forest, oracle, opts.samples, seed)) return false;
      keep_if_new(candidate);
      return true;
    };

    // Root-down over parents by id; ids survive pruning, and children are
    // enqueued only after their parent was minimized.
    std::deque<std::uint64_t> queue;
    queue.push_back(working.root->id);

    while (!queue.empty()) {
      std::uint64_t parent_id = queue.front();
      queue.pop_front();

      std::function<ParseNode*(ParseNode*)> find = [&](ParseNode* n) -> ParseNode* {
        if (n->id == parent_id) return n;
        for (auto& c : n->children)
          if (ParseNode* hit = find(c.get())) return hit;
        return nullptr;
      };
      ParseNode* parent = find(working.root.get());
      if (!parent) continue;
      if (parent->children.size() < 2) {
        for (const auto& c : parent->children)
          if (!c->is_leaf()) queue.push_back(c->id);
        continue;
      }

      // ddmin over the child index list.
      std::vector<std::size_t> current(parent->children.size());
      for (std::size_t i = 0; i < current.size(); ++i) current[i] = i;
      std::size_t granularity = 2;

      while (current.size() >= 2) {
        std::vector<std::vector<std::size_t>> chunks;
        std::size_t per = (current.size() + granularity - 1) / granularity;
        for (std::size_t i = 0; i < current.size(); i += per)
          chunks.emplace_back(current.begin() + static_cast<std::ptrdiff_t>(i),
                              current.begin() + static_cast<std::ptrdiff_t>(
                                                    std::min(i + per, current.size())));

        bool reduced = false;
        for (const auto& chunk : chunks) {
          if (chunk.size() == current.size()) continue;
          if (test_config(parent_id, chunk)) {
            current = chunk;
            granularity = 2;
            reduced = true;
            break;
          }
        }
        if (!reduced && granularity > 2) {
          for (const auto& chunk : chunks) {
            std::vector<std::size_t> complement;
            std::set_difference(current.begin(), current.end(), chunk.begin(), chunk.end(),
                                std::back_inserter(complement));
            if (complement.empty() || complement.size() == current.size()) continue;
            if (test_config(parent_id, complement)) {
              current = complement;
              granularity = std::max<std::size_t>(granularity - 1, 2);
              reduced = true;
              break;
            }
          }
        }
        if (!reduced) {
          if (granularity >= current.size()) break;
          granularity = std::min(current.size(), granularity * 2);
        }
      }

      if (current.size() < parent->children.size()) {
        std::vector<std::unique_ptr<ParseNode>> kept;
        for (std::size_t idx : current) kept.push_back(std::move(parent->children[idx]));
        parent->children = std::move(kept);
      }
      for (const auto& c : parent->children)
        if (!c->is_leaf()) queue.push_back(c->id);
    }
  }
  return out;
}

}  // namespace gramforge
