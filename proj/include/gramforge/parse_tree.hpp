#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "gramforge/token.hpp"

namespace gramforge {

/// Ordered labeled tree node. Leaves carry a token text as label; internal
/// nodes carry a non-terminal name and have at least one child. Node ids are
/// unique across a forest and survive cloning, which is what makes exact
/// rollback checks possible.
struct ParseNode {
  std::string label;
  std::uint64_t id = 0;
  std::vector<std::unique_ptr<ParseNode>> children;

  bool is_leaf() const { return children.empty(); }
  std::unique_ptr<ParseNode> clone() const;
};

struct ParseTree {
  std::unique_ptr<ParseNode> root;
  std::string source_id;
  int tree_id = 0;

  ParseTree clone() const;
};

struct NodeRef {
  int tree_index = -1;
  ParseNode* node = nullptr;
  ParseNode* parent = nullptr;  // null for roots
  int child_index = -1;         // position within parent
};

class EmptySeedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseForest {
  std::vector<ParseTree> trees;
  std::string start_label;
  std::uint64_t next_node_id = 1;
  std::uint64_t next_fresh_label = 1;

  ParseForest clone() const;

  std::uint64_t new_node_id() { return next_node_id++; }
  std::string fresh_label() { return "t" + std::to_string(next_fresh_label++); }

  ParseNode* find(std::uint64_t id, int* tree_index = nullptr) const;

  /// All nodes labeled `label`; when `leaves_only` is set, only leaves with
  /// that text. Deterministic order: tree index, then pre-order position.
  std::vector<NodeRef> occurrences_of_label(const std::string& label, bool leaves_only) const;
};

/// One flat tree per sequence: the root holds one leaf per token.
ParseForest create_naive_trees(const std::vector<TokenSeq>& seqs, const std::string& start_label);

/// Reparents every well-matched []/()/{} span (brackets included) under a
/// fresh node, innermost first. Unmatched brackets stay plain leaves; a
/// closing bracket of the wrong kind never pops an open one.
/// Returns ids of the created nodes in creation order.
std::vector<std::uint64_t> prestructure_brackets(ParseForest& forest);

/// Depth-indexed label listing, each level rendered "[a b c]". Whitespace
/// leaf labels are shown as <sp>/<nl>/<tab> so prompts stay readable.
std::vector<std::string> tree_levels(const ParseTree& tree);

std::string yield_string(const ParseNode& node);

/// Yield of `root` with the subtree at `target` replaced by `replacement`.
std::string yield_with_override(const ParseNode& root, const ParseNode* target,
                                std::string_view replacement);

std::size_t leaf_count(const ParseNode& node);
std::size_t node_depth_max(const ParseNode& node);

/// Indented one-node-per-line dump. With ids it is an exact structural
/// fingerprint used by the rollback tests.
void dump_tree(std::ostream& os, const ParseNode& node, bool with_ids = false, int indent = 0);
std::string dump_forest(const ParseForest& forest, bool with_ids = false);

}  // namespace gramforge
