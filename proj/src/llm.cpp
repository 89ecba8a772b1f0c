#include "gramforge/llm.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "gramforge/prompts.hpp"
#include "gramforge/token.hpp"
#include "gramforge/util.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gramforge {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Providers

std::string HttpProvider::complete(const std::string& prompt) {
  auto slash = cfg_.endpoint_url.find('/', cfg_.endpoint_url.find("://") + 3);
  std::string base = slash == std::string::npos ? cfg_.endpoint_url : cfg_.endpoint_url.substr(0, slash);
  std::string path = slash == std::string::npos ? "/" : cfg_.endpoint_url.substr(slash);

  httplib::Client client(base);
  client.set_read_timeout(cfg_.timeout_s, 0);
  client.set_connection_timeout(cfg_.timeout_s, 0);

  httplib::Headers headers;
  if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  json body = {
      {"model", cfg_.model},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", 0.0},
      {"seed", 101},
  };
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw ProviderError("llm endpoint unreachable: " + cfg_.endpoint_url);
  if (res->status != 200)
    throw ProviderError("llm endpoint returned status " + std::to_string(res->status));
  try {
    json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("unexpected llm response shape: ") + e.what());
  }
}

ReplayProvider ReplayProvider::from_file(const std::string& path) {
  json doc = json::parse(read_file(path));
  std::map<std::string, std::string> store;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() == "__version__") continue;
    store[it.key()] = it.value().get<std::string>();
  }
  return ReplayProvider(std::move(store));
}

std::string ReplayProvider::complete(const std::string& prompt) {
  auto it = store_.find(sha256_hex(prompt));
  if (it == store_.end()) throw ProviderError("replay store has no response for this prompt");
  return it->second;
}

void ReplayRecorder::record(const std::string& prompt, const std::string& response) {
  store_[sha256_hex(prompt)] = response;
}

void ReplayRecorder::save(const std::string& path) const {
  json doc;
  doc["__version__"] = prompts::kPromptVersion;
  for (const auto& [k, v] : store_) doc[k] = v;
  write_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Label sanitization

std::string sanitize_label(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    bool ok = (lc >= 'a' && lc <= 'z') || (lc >= '0' && lc <= '9') || lc == '_';
    if (!ok) continue;
    if (out.empty() && !(lc >= 'a' && lc <= 'z')) continue;  // must start with a letter
    out.push_back(lc);
    if (out.size() == 20) break;
  }
  return out;
}

std::string uniquify_label(const std::string& base, const std::set<std::string>& taken) {
  if (base.empty()) return base;
  if (!taken.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (cand.size() > 20) cand = base.substr(0, 20 - 2 - std::to_string(i).size()) + "_" + std::to_string(i);
    if (!taken.count(cand)) return cand;
  }
}

// ---------------------------------------------------------------------------
// Prompt construction & reply parsing

std::string TextModelAdvisor::build_bubble_prompt(bool pairs, const std::vector<std::string>& levels,
                                                  const std::string& prior_state) {
  std::string prompt = pairs ? prompts::kTwoBubblePrompt : prompts::kOneBubblePrompt;
  prompt += "# Tree levels:\n";
  for (const auto& level : levels) prompt += level + "\n";
  if (!prior_state.empty()) prompt += "\n# Prior tree state:\n" + prior_state + "\n";
  return prompt;
}

std::string TextModelAdvisor::build_label_prompt(const std::string& yield_a,
                                                 const std::string& yield_b) {
  return std::string(prompts::kLabelPrompt) + "    - '" + yield_a + "','" + yield_b + "'\n";
}

std::string TextModelAdvisor::build_zero_shot_prompt(const std::vector<std::string>& seeds) {
  std::string prompt = prompts::kZeroShotPrompt;
  for (const auto& s : seeds) prompt += "<program>\n" + s + "\n</program>\n";
  return prompt;
}

namespace {

std::string strip_code_fences(const std::string& text) {
  if (text.find("```") == std::string::npos) return text;
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("```", 0) == 0) continue;
    out += line + "\n";
  }
  return out;
}

std::optional<json> parse_reply_json(const std::string& reply) {
  std::string text = strip_code_fences(reply);
  try {
    return json::parse(text);
  } catch (const json::exception&) {
  }
  auto open = text.find_first_of("{[");
  auto close = text.find_last_of("}]");
  if (open == std::string::npos || close == std::string::npos || close <= open)
    return std::nullopt;
  try {
    return json::parse(text.substr(open, close - open + 1));
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

std::optional<std::vector<std::string>> as_group(const json& j) {
  if (!j.is_array() || j.empty()) return std::nullopt;
  std::vector<std::string> group;
  for (const auto& el : j) {
    if (!el.is_string()) return std::nullopt;
    std::string s = el.get<std::string>();
    if (s.empty()) return std::nullopt;
    group.push_back(std::move(s));
  }
  return group;
}

}  // namespace

BubbleProposal TextModelAdvisor::parse_bubble_reply(const std::string& reply, bool pairs,
                                                    int max_groups) {
  BubbleProposal proposal;
  auto doc = parse_reply_json(reply);
  if (!doc) return proposal;

  const json* list = nullptr;
  if (doc->is_array()) {
    list = &*doc;
  } else if (doc->is_object()) {
    const char* key = pairs ? "pairs" : "bubbles";
    if (doc->contains(key) && (*doc)[key].is_array()) list = &(*doc)[key];
  }
  if (!list) return proposal;

  if (!pairs) {
    for (const auto& el : *list) {
      if (auto group = as_group(el)) {
        if (std::find(proposal.groups.begin(), proposal.groups.end(), *group) ==
            proposal.groups.end())
          proposal.groups.push_back(std::move(*group));
      }
      if (static_cast<int>(proposal.groups.size()) >= max_groups) break;
    }
    std::stable_sort(proposal.groups.begin(), proposal.groups.end(),
                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
  } else {
    for (const auto& el : *list) {
      if (!el.is_array() || el.size() != 2) continue;  // unpaired groups are dropped
      auto a = as_group(el[0]);
      auto b = as_group(el[1]);
      if (!a || !b) continue;
      auto pair = std::make_pair(std::move(*a), std::move(*b));
      if (std::find(proposal.pairs.begin(), proposal.pairs.end(), pair) == proposal.pairs.end())
        proposal.pairs.push_back(std::move(pair));
      if (static_cast<int>(proposal.pairs.size()) >= max_groups) break;
    }
  }
  return proposal;
}

std::string TextModelAdvisor::complete_logged(const std::string& prompt) {
  std::string response = provider_->complete(prompt);
  if (recorder_) recorder_->record(prompt, response);
  return response;
}

BubbleProposal TextModelAdvisor::propose_1_bubbles(const std::vector<std::string>& levels,
                                                   const std::string& prior_state,
                                                   const ParseForest&) {
  ++stats_.bubble_calls;
  try {
    std::string reply = complete_logged(build_bubble_prompt(false, levels, prior_state));
    return parse_bubble_reply(reply, false, max_groups_);
  } catch (const ProviderError&) {
    return {};
  }
}

BubbleProposal TextModelAdvisor::propose_2_bubbles(const std::vector<std::string>& levels,
                                                   const std::string& prior_state,
                                                   const ParseForest&) {
  ++stats_.bubble_calls;
  try {
    std::string reply = complete_logged(build_bubble_prompt(true, levels, prior_state));
    return parse_bubble_reply(reply, true, max_groups_);
  } catch (const ProviderError&) {
    return {};
  }
}

std::string TextModelAdvisor::suggest_label(const std::string& yield_a, const std::string& yield_b,
                                            const std::set<std::string>& taken) {
  ++stats_.label_calls;
  try {
    std::string reply = complete_logged(build_label_prompt(yield_a, yield_b));
    std::istringstream in(reply);
    std::string word;
    in >> word;
    return uniquify_label(sanitize_label(word), taken);
  } catch (const ProviderError&) {
    return "";
  }
}

Grammar TextModelAdvisor::zero_shot_grammar(const std::vector<std::string>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("zero-shot inference needs at least one seed");
  std::string reply = complete_logged(build_zero_shot_prompt(seeds));
  auto open = reply.find("<production-rules>");
  auto close = reply.find("</production-rules>");
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ProviderError("zero-shot reply is missing <production-rules> tags");
  std::string body = reply.substr(open + 18, close - open - 18);
  return parse_grammar_file(body, "stmt");
}

// ---------------------------------------------------------------------------
// Heuristic stub

namespace {

struct NgramInfo {
  int count = 0;
  std::set<std::pair<std::string, std::string>> contexts;  // (left, right) neighbor labels
};

std::map<std::vector<std::string>, NgramInfo> sibling_ngrams(const ParseForest& forest, int n_min,
                                                             int n_max) {
  std::map<std::vector<std::string>, NgramInfo> out;
  std::function<void(const ParseNode&, bool)> walk = [&](const ParseNode& node, bool is_root) {
    int arity = static_cast<int>(node.children.size());
    for (int n = n_min; n <= n_max; ++n) {
      for (int i = 0; i + n <= arity; ++i) {
        if (i == 0 && n == arity) continue;  // full spans are not bubbles
        std::vector<std::string> seq;
        seq.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) seq.push_back(node.children[static_cast<std::size_t>(i + k)]->label);
        auto& info = out[std::move(seq)];
        ++info.count;
        std::string left = i > 0 ? node.children[static_cast<std::size_t>(i - 1)]->label : "^";
        std::string right =
            i + n < arity ? node.children[static_cast<std::size_t>(i + n)]->label : "$";
        info.contexts.emplace(std::move(left), std::move(right));
      }
    }
    for (const auto& c : node.children)
      if (!c->is_leaf()) walk(*c, false);
  };
  for (const auto& t : forest.trees) walk(*t.root, true);
  return out;
}

std::string encode_groups_json(const std::vector<std::vector<std::string>>& groups) {
  json arr = json::array();
  for (const auto& g : groups) arr.push_back(g);
  return json{{"bubbles", arr}}.dump();
}

std::string encode_pairs_json(
    const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& pairs) {
  json arr = json::array();
  for (const auto& [a, b] : pairs) arr.push_back(json::array({a, b}));
  return json{{"pairs", arr}}.dump();
}

char first_alnum(const std::string& s) {
  for (char c : s)
    if (std::isalnum(static_cast<unsigned char>(c)))
      return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return 0;
}

}  // namespace

void HeuristicStubAdvisor::record(const std::string& prompt, const std::string& response) {
  if (recorder_) recorder_->record(prompt, response);
}

BubbleProposal HeuristicStubAdvisor::propose_1_bubbles(const std::vector<std::string>& levels,
                                                       const std::string& prior_state,
                                                       const ParseForest& forest) {
  ++stats_.bubble_calls;
  auto ngrams = sibling_ngrams(forest, 2, 4);

  // Most-frequent grams per length: short grams dominate raw frequency, so a
  // flat top-k would propose almost no construct-sized groups.
  BubbleProposal proposal;
  int per_length = std::max(1, max_groups_ / 3);
  for (int n = 2; n <= 4; ++n) {
    std::vector<std::pair<std::vector<std::string>, int>> ranked;
    for (auto& [seq, info] : ngrams)
      if (static_cast<int>(seq.size()) == n) ranked.emplace_back(seq, info.count);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    for (int i = 0; i < per_length && i < static_cast<int>(ranked.size()); ++i)
      proposal.groups.push_back(ranked[static_cast<std::size_t>(i)].first);
  }
  std::stable_sort(proposal.groups.begin(), proposal.groups.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  if (static_cast<int>(proposal.groups.size()) > max_groups_)
    proposal.groups.resize(static_cast<std::size_t>(max_groups_));

  record(TextModelAdvisor::build_bubble_prompt(false, levels, prior_state),
         encode_groups_json(proposal.groups));
  return proposal;
}

BubbleProposal HeuristicStubAdvisor::propose_2_bubbles(const std::vector<std::string>& levels,
                                                       const std::string& prior_state,
                                                       const ParseForest& forest) {
  ++stats_.bubble_calls;
  auto ngrams = sibling_ngrams(forest, 2, 4);

  // Candidate pool ordered by frequency; pairs must share a (left,right)
  // context, which is the cheap signal that they fill the same hole.
  std::vector<std::pair<std::vector<std::string>, const NgramInfo*>> pool;
  for (auto& [seq, info] : ngrams) pool.emplace_back(seq, &info);
  std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
    if (a.second->count != b.second->count) return a.second->count > b.second->count;
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  if (pool.size() > 60) pool.resize(60);

  BubbleProposal proposal;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      if (pool[i].first == pool[j].first) continue;
      bool shares = false;
      for (const auto& ctx : pool[i].second->contexts)
        if (pool[j].second->contexts.count(ctx)) {
          shares = true;
          break;
        }
      if (!shares) continue;
      proposal.pairs.emplace_back(pool[i].first, pool[j].first);
      if (static_cast<int>(proposal.pairs.size()) >= max_groups_) break;
    }
    if (static_cast<int>(proposal.pairs.size()) >= max_groups_) break;
  }

  record(TextModelAdvisor::build_bubble_prompt(true, levels, prior_state),
         encode_pairs_json(proposal.pairs));
  return proposal;
}

std::string HeuristicStubAdvisor::suggest_label(const std::string& yield_a,
                                                const std::string& yield_b,
                                                const std::set<std::string>& taken) {
  ++stats_.label_calls;
  std::string base;
  if (char c = first_alnum(yield_a)) base.push_back(c);
  if (char c = first_alnum(yield_b)) base.push_back(c);
  base = sanitize_label(base);
  record(TextModelAdvisor::build_label_prompt(yield_a, yield_b), base);
  return uniquify_label(base, taken);
}

Grammar HeuristicStubAdvisor::zero_shot_grammar(const std::vector<std::string>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("zero-shot inference needs at least one seed");
  Grammar g;
  g.start = "stmt";
  for (const auto& s : seeds) {
    Alternative alt;
    for (const auto& tok : pretokenize(s).tokens) alt.push_back(Symbol::terminal(tok.text));
    if (!alt.empty()) g.add_alternative("stmt", std::move(alt));
  }
  record(TextModelAdvisor::build_zero_shot_prompt(seeds),
         "<production-rules>\n" + serialize(g) + "</production-rules>");
  return g;
}

}  // namespace gramforge
