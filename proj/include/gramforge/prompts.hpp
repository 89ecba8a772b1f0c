#pragma once

namespace gramforge::prompts {

// Version tag recorded alongside replay stores; bump when any template text
// changes so stale fixtures fail loudly instead of replaying garbage.
inline constexpr const char* kPromptVersion = "v1";

inline constexpr const char* kLabelPrompt = R"(You are an AI assistant. You will label the internal nodes in the parse tree of any arbitrary program. The root node of the parse tree has label stmt. You will be given a pair of substrings derivable from the same non-terminal symbol. Your job is to label the non-terminal symbol. Look at some example substring pairs and their labels:

# Examples:
    - '(n+n)','n'
    -> numexpr, this non-terminal can derive both the substrings (n+n) and n.
    - 'x=1;','y=2;'
    -> assign, this non-terminal can derive simple assignment statements.

Reply with a single lowercase identifier and nothing else.

# Substring pair:
)";

inline constexpr const char* kOneBubblePrompt = R"(You are an AI assistant. You will help to build parse trees from flat tree levels. You will combine adjacent nodes from a tree level. Those nodes will be placed under a new parent node at that position. You will suggest node groups in a way that will build the complete parse tree iteratively.

# Input: A list of tree levels separated by square brackets.
# Output: A list of unique groups as json: {"bubbles": [["tok", "tok"], ...]}

# Workflow:
    - Break an input level into smaller independent units.
    - Think what smallest units represent a language construct, free of recursion.
    - Avoid overly long groupings; prefer small, common constructs.
    - Suggest at most 20 groups.

)";

inline constexpr const char* kTwoBubblePrompt = R"(You are an AI assistant. You will help to build parse trees from flat tree levels. You will suggest pairs of node groups that could derive from the same non-terminal, so the two groups in a pair can be merged with each other. Each group is a list of adjacent nodes from a tree level.

# Input: A list of tree levels separated by square brackets.
# Output: Pairs of groups as json: {"pairs": [[["tok"], ["tok", "tok"]], ...]}

# Workflow:
    - Find two sibling sequences that play the same syntactic role.
    - Keep groups small and recursion-free.
    - Suggest at most 20 pairs.

)";

inline constexpr const char* kZeroShotPrompt = R"(You will derive a context-free grammar (CFG) in Backus-Naur Form (BNF) for the given example programs:

Ensure that,
- The Production rules must be enclosed within <production-rules> and </production-rules> tags.
- The start rule should be <stmt>.
- One rule per line, written as `name: alternative | alternative`.
- Terminals are double-quoted; whitespace is an explicit quoted token.
- No explanatory text is added.

# Example programs:
)";

}  // namespace gramforge::prompts
