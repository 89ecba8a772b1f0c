#include "gramforge/parse_tree.hpp"

#include <functional>
#include <sstream>

namespace gramforge {

std::unique_ptr<ParseNode> ParseNode::clone() const {
  auto copy = std::make_unique<ParseNode>();
  copy->label = label;
  copy->id = id;
  copy->children.reserve(children.size());
  for (const auto& c : children) copy->children.push_back(c->clone());
  return copy;
}

ParseTree ParseTree::clone() const {
  ParseTree t;
  t.root = root ? root->clone() : nullptr;
  t.source_id = source_id;
  t.tree_id = tree_id;
  return t;
}

ParseForest ParseForest::clone() const {
  ParseForest f;
  f.start_label = start_label;
  f.next_node_id = next_node_id;
  f.next_fresh_label = next_fresh_label;
  f.trees.reserve(trees.size());
  for (const auto& t : trees) f.trees.push_back(t.clone());
  return f;
}

ParseNode* ParseForest::find(std::uint64_t id, int* tree_index) const {
  std::function<ParseNode*(ParseNode*)> walk = [&](ParseNode* n) -> ParseNode* {
    if (n->id == id) return n;
    for (auto& c : n->children)
      if (ParseNode* hit = walk(c.get())) return hit;
    return nullptr;
  };
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (ParseNode* hit = walk(trees[i].root.get())) {
      if (tree_index) *tree_index = static_cast<int>(i);
      return hit;
    }
  }
  return nullptr;
}

std::vector<NodeRef> ParseForest::occurrences_of_label(const std::string& label,
                                                       bool leaves_only) const {
  std::vector<NodeRef> out;
  std::function<void(int, ParseNode*, ParseNode*, int)> walk = [&](int ti, ParseNode* n,
                                                                   ParseNode* parent, int idx) {
    bool match = n->label == label && (leaves_only ? n->is_leaf() : !n->is_leaf());
    if (match) out.push_back(NodeRef{ti, n, parent, idx});
    for (std::size_t i = 0; i < n->children.size(); ++i)
      walk(ti, n->children[i].get(), n, static_cast<int>(i));
  };
  for (std::size_t i = 0; i < trees.size(); ++i)
    walk(static_cast<int>(i), trees[i].root.get(), nullptr, -1);
  return out;
}

ParseForest create_naive_trees(const std::vector<TokenSeq>& seqs, const std::string& start_label) {
  ParseForest forest;
  forest.start_label = start_label;
  int tree_id = 0;
  for (const auto& seq : seqs) {
    if (seq.tokens.empty()) throw EmptySeedError("seed '" + seq.source_id + "' has no tokens");
    ParseTree tree;
    tree.source_id = seq.source_id;
    tree.tree_id = tree_id++;
    tree.root = std::make_unique<ParseNode>();
    tree.root->label = start_label;
    tree.root->id = forest.new_node_id();
    for (const auto& tok : seq.tokens) {
      auto leaf = std::make_unique<ParseNode>();
      leaf->label = tok.text;
      leaf->id = forest.new_node_id();
      tree.root->children.push_back(std::move(leaf));
    }
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

namespace {

char open_bracket_for(const std::string& label) {
  if (label == ")") return '(';
  if (label == "]") return '[';
  if (label == "}") return '{';
  return 0;
}

bool is_open_bracket(const std::string& label) {
  return label == "(" || label == "[" || label == "{";
}

}  // namespace

std::vector<std::uint64_t> prestructure_brackets(ParseForest& forest) {
  std::vector<std::uint64_t> created;

  // Bottom-up per node: rebuild the child list, folding each matched pair
  // (plus everything between) into a fresh node. A mismatched closer is left
  // in place without popping the stack.
  std::function<void(ParseNode*)> restructure = [&](ParseNode* node) {
    for (auto& c : node->children) restructure(c.get());
    if (node->children.size() < 2) return;

    std::vector<std::unique_ptr<ParseNode>> rebuilt;
    std::vector<std::pair<char, std::size_t>> stack;  // (open char, index in rebuilt)
    for (auto& child : node->children) {
      const std::string& label = child->label;
      bool leaf = child->is_leaf();
      if (leaf && is_open_bracket(label)) {
        stack.emplace_back(label[0], rebuilt.size());
        rebuilt.push_back(std::move(child));
        continue;
      }
      char open = leaf ? open_bracket_for(label) : 0;
      if (open != 0 && !stack.empty() && stack.back().first == open) {
        std::size_t from = stack.back().second;
        stack.pop_back();
        auto group = std::make_unique<ParseNode>();
        group->label = forest.fresh_label();
        group->id = forest.new_node_id();
        for (std::size_t i = from; i < rebuilt.size(); ++i)
          group->children.push_back(std::move(rebuilt[i]));
        group->children.push_back(std::move(child));
        rebuilt.resize(from);
        created.push_back(group->id);
        rebuilt.push_back(std::move(group));
        continue;
      }
      rebuilt.push_back(std::move(child));
    }
    node->children = std::move(rebuilt);
  };

  for (auto& tree : forest.trees) restructure(tree.root.get());
  return created;
}

namespace {

std::string render_label(const std::string& label) {
  if (label == " ") return "<sp>";
  if (label == "\n") return "<nl>";
  if (label == "\t") return "<tab>";
  if (label == "\r") return "<cr>";
  bool all_ws = !label.empty();
  for (char c : label)
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') all_ws = false;
  if (all_ws) return "<ws" + std::to_string(label.size()) + ">";
  return label;
}

}  // namespace

std::vector<std::string> tree_levels(const ParseTree& tree) {
  std::vector<std::vector<const ParseNode*>> levels;
  std::function<void(const ParseNode*, std::size_t)> walk = [&](const ParseNode* n,
                                                                std::size_t depth) {
    if (levels.size() <= depth) levels.resize(depth + 1);
    levels[depth].push_back(n);
    for (const auto& c : n->children) walk(c.get(), depth + 1);
  };
  walk(tree.root.get(), 0);

  std::vector<std::string> out;
  out.reserve(levels.size());
  for (const auto& level : levels) {
    std::string s = "[";
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (i > 0) s += ' ';
      s += render_label(level[i]->label);
    }
    s += ']';
    out.push_back(std::move(s));
  }
  return out;
}

std::string yield_string(const ParseNode& node) {
  if (node.is_leaf()) return node.label;
  std::string out;
  for (const auto& c : node.children) out += yield_string(*c);
  return out;
}

std::string yield_with_override(const ParseNode& root, const ParseNode* target,
                                std::string_view replacement) {
  if (&root == target) return std::string(replacement);
  if (root.is_leaf()) return root.label;
  std::string out;
  for (const auto& c : root.children) out += yield_with_override(*c, target, replacement);
  return out;
}

std::size_t leaf_count(const ParseNode& node) {
  if (node.is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : node.children) n += leaf_count(*c);
  return n;
}

std::size_t node_depth_max(const ParseNode& node) {
  std::size_t deepest = 0;
  for (const auto& c : node.children) deepest = std::max(deepest, node_depth_max(*c) + 1);
  return deepest;
}

void dump_tree(std::ostream& os, const ParseNode& node, bool with_ids, int indent) {
  for (int i = 0; i < indent; ++i) os << "  ";
  if (node.is_leaf())
    os << '\'' << render_label(node.label) << '\'';
  else
    os << node.label;
  if (with_ids) os << " #" << node.id;
  os << '\n';
  for (const auto& c : node.children) dump_tree(os, *c, with_ids, indent + 1);
}

std::string dump_forest(const ParseForest& forest, bool with_ids) {
  std::ostringstream ss;
  for (const auto& tree : forest.trees) {
    ss << "== " << tree.source_id << " ==\n";
    dump_tree(ss, *tree.root, with_ids);
  }
  return ss.str();
}

}  // namespace gramforge
