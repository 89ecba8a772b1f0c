#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "gramforge/bubbling.hpp"
#include "gramforge/grammar.hpp"

namespace gramforge {

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw text-completion channel. Implementations must be deterministic per
/// prompt (the HTTP provider pins temperature 0 and a fixed sampling seed).
class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

struct HttpProviderConfig {
  std::string endpoint_url;  // full chat-completions URL
  std::string model;
  std::string api_key_env = "GRAM_FORGE_API_KEY";
  int timeout_s = 60;
};

/// Generic chat-completion POST: {model, messages, temperature: 0, seed: 101}.
class HttpProvider : public LlmProvider {
 public:
  explicit HttpProvider(HttpProviderConfig cfg) : cfg_(std::move(cfg)) {}
  std::string complete(const std::string& prompt) override;

 private:
  HttpProviderConfig cfg_;
};

/// Replays recorded responses keyed by sha256(prompt); total over recorded
/// prompts, throws ProviderError on a miss.
class ReplayProvider : public LlmProvider {
 public:
  static ReplayProvider from_file(const std::string& path);
  explicit ReplayProvider(std::map<std::string, std::string> store) : store_(std::move(store)) {}
  std::string complete(const std::string& prompt) override;

 private:
  std::map<std::string, std::string> store_;
};

/// Collects prompt/response pairs for later replay.
class ReplayRecorder {
 public:
  void record(const std::string& prompt, const std::string& response);
  void save(const std::string& path) const;
  std::size_t size() const { return store_.size(); }

 private:
  std::map<std::string, std::string> store_;
};

struct BubbleProposal {
  std::vector<std::vector<std::string>> groups;                          // 1-bubbles
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> pairs;  // 2-bubbles
};

struct AdvisorStats {
  std::uint64_t bubble_calls = 0;  // 1- and 2-bubble proposal calls
  std::uint64_t label_calls = 0;
};

/// The pipeline-facing guidance channel: candidate bubbles, non-terminal
/// names, and the zero-shot baseline grammar.
class BubbleAdvisor : public Labeler {
 public:
  ~BubbleAdvisor() override = default;

  /// At most max_groups unique label sequences, sorted ascending by length.
  /// Provider failures yield an empty proposal; malformed entries are
  /// dropped while the rest are kept.
  virtual BubbleProposal propose_1_bubbles(const std::vector<std::string>& levels,
                                           const std::string& prior_state,
                                           const ParseForest& forest) = 0;
  virtual BubbleProposal propose_2_bubbles(const std::vector<std::string>& levels,
                                           const std::string& prior_state,
                                           const ParseForest& forest) = 0;

  virtual Grammar zero_shot_grammar(const std::vector<std::string>& seeds) = 0;

  const AdvisorStats& advisor_stats() const { return stats_; }

 protected:
  AdvisorStats stats_;
};

/// Lowercases, strips everything outside [a-z0-9_], enforces a leading
/// letter and a 20-character cap. Returns "" when nothing survives.
std::string sanitize_label(const std::string& raw);

/// Applies _1, _2, ... until the name avoids `taken`.
std::string uniquify_label(const std::string& base, const std::set<std::string>& taken);

/// Builds prompts, sends them through an LlmProvider, and parses the JSON
/// replies. An optional recorder tees every exchange into a replay store.
class TextModelAdvisor : public BubbleAdvisor {
 public:
  TextModelAdvisor(std::shared_ptr<LlmProvider> provider, int max_groups = 20,
                   ReplayRecorder* recorder = nullptr)
      : provider_(std::move(provider)), max_groups_(max_groups), recorder_(recorder) {}

  BubbleProposal propose_1_bubbles(const std::vector<std::string>& levels,
                                   const std::string& prior_state,
                                   const ParseForest& forest) override;
  BubbleProposal propose_2_bubbles(const std::vector<std::string>& levels,
                                   const std::string& prior_state,
                                   const ParseForest& forest) override;
  std::string suggest_label(const std::string& yield_a, const std::string& yield_b,
                            const std::set<std::string>& taken) override;
  Grammar zero_shot_grammar(const std::vector<std::string>& seeds) override;

  static std::string build_bubble_prompt(bool pairs, const std::vector<std::string>& levels,
                                         const std::string& prior_state);
  static std::string build_label_prompt(const std::string& yield_a, const std::string& yield_b);
  static std::string build_zero_shot_prompt(const std::vector<std::string>& seeds);

  /// Parses {"bubbles": [...]} / {"pairs": [...]} replies, salvaging valid
  /// entries from partially malformed arrays.
  static BubbleProposal parse_bubble_reply(const std::string& reply, bool pairs, int max_groups);

 private:
  std::string complete_logged(const std::string& prompt);

  std::shared_ptr<LlmProvider> provider_;
  int max_groups_;
  ReplayRecorder* recorder_;
};

/// Offline fallback advisor: proposes the most frequent sibling n-grams
/// (n in {2,3,4}) as 1-bubbles, context-sharing n-gram pairs as 2-bubbles,
/// and names labels from the partner yields' first letters. Keeps CI fully
/// offline while exercising the same merge paths.
class HeuristicStubAdvisor : public BubbleAdvisor {
 public:
  explicit HeuristicStubAdvisor(int max_groups = 20, ReplayRecorder* recorder = nullptr)
      : max_groups_(max_groups), recorder_(recorder) {}

  BubbleProposal propose_1_bubbles(const std::vector<std::string>& levels,
                                   const std::string& prior_state,
                                   const ParseForest& forest) override;
  BubbleProposal propose_2_bubbles(const std::vector<std::string>& levels,
                                   const std::string& prior_state,
                                   const ParseForest& forest) override;
  std::string suggest_label(const std::string& yield_a, const std::string& yield_b,
                            const std::set<std::string>& taken) override;
  Grammar zero_shot_grammar(const std::vector<std::string>& seeds) override;

 private:
  void record(const std::string& prompt, const std::string& response);

  int max_groups_;
  ReplayRecorder* recorder_;
};

}  // namespace gramforge
