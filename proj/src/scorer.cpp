#include "recdec/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace recdec {

namespace {

constexpr double kSumTolerance = 1e-6;

/// Scale log-weights by 1/T and renormalize (log-sum-exp).
TokenDistribution normalize_with_temperature(std::map<Token, double> log_weights, double temperature) {
  if (!(temperature > 0.0)) throw Error("temperature must be positive");
  double max_lw = -std::numeric_limits<double>::infinity();
  for (auto& [tok, lw] : log_weights) {
    lw /= temperature;
    max_lw = std::max(max_lw, lw);
  }
  double sum = 0.0;
  for (const auto& [tok, lw] : log_weights) sum += std::exp(lw - max_lw);
  const double log_z = max_lw + std::log(sum);
  for (auto& [tok, lw] : log_weights) lw -= log_z;
  return log_weights;
}

const TrieNode& live_node(const Catalog& catalog, const TokenSeq& prefix) {
  const TrieNode* node = catalog.node_at(prefix);
  if (!node || node->children.empty()) throw Error("dead prefix passed to scorer");
  return *node;
}

}  // namespace

DecodingContext DecodingContext::from_history(const Catalog& catalog, std::string context_id,
                                              std::vector<ItemId> history) {
  DecodingContext ctx;
  ctx.context_id = std::move(context_id);
  for (const ItemId& id : history) {
    for (const Token& t : catalog.item(id).tokens) ++ctx.rendered_history_tokens[t];
  }
  ctx.user_history = std::move(history);
  return ctx;
}

TokenDistribution SyntheticCopyLM::next_token_logprobs(const DecodingContext& context,
                                                       const TokenSeq& prefix,
                                                       const Catalog& catalog,
                                                       const ScorerConfig& config) const {
  const TrieNode& node = live_node(catalog, prefix);
  std::map<Token, double> log_weights;
  for (const auto& [tok, child] : node.children) {
    double lw = std::log(static_cast<double>(child->subtree_size()));
    if (context.rendered_history_tokens.count(tok)) lw += config.copy_bonus;
    log_weights.emplace(tok, lw);
  }
  return normalize_with_temperature(std::move(log_weights), config.temperature);
}

void TableScorer::add(std::string context_id, TokenSeq prefix, std::map<Token, double> probs) {
  double sum = 0.0;
  for (const auto& [tok, p] : probs) {
    if (!(p >= 0.0)) throw Error("table scorer: negative or NaN probability for token '" + tok + "'");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error("table scorer: distribution sums to " + std::to_string(sum) + ", expected 1");
  }
  entries_[{std::move(context_id), std::move(prefix)}] = std::move(probs);
}

TableScorer TableScorer::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open table scorer file: " + path);
  TableScorer scorer;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("context") || !j.contains("prefix") ||
        !j.contains("dist") || !j["context"].is_string() || !j["prefix"].is_array() ||
        !j["dist"].is_object()) {
      throw Error("malformed table scorer line " + std::to_string(lineno) + " in " + path);
    }
    TokenSeq prefix;
    for (const auto& t : j["prefix"]) {
      if (!t.is_string()) throw Error("malformed table scorer line " + std::to_string(lineno));
      prefix.push_back(t.get<std::string>());
    }
    std::map<Token, double> probs;
    for (const auto& [tok, p] : j["dist"].items()) {
      if (!p.is_number()) throw Error("malformed table scorer line " + std::to_string(lineno));
      probs[tok] = p.get<double>();
    }
    try {
      scorer.add(j["context"].get<std::string>(), std::move(prefix), std::move(probs));
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " (line " + std::to_string(lineno) + ")");
    }
  }
  return scorer;
}

TokenDistribution TableScorer::next_token_logprobs(const DecodingContext& context,
                                                   const TokenSeq& prefix, const Catalog& catalog,
                                                   const ScorerConfig& config) const {
  const TrieNode& node = live_node(catalog, prefix);
  std::map<Token, double> log_weights;

  auto it = entries_.find({context.context_id, prefix});
  if (it == entries_.end()) {
    for (const auto& [tok, child] : node.children) log_weights.emplace(tok, 0.0);
  } else {
    const auto& probs = it->second;
    if (probs.size() != node.children.size()) {
      throw Error("table scorer entry support does not match legal continuations");
    }
    for (const auto& [tok, p] : probs) {
      if (!node.children.count(tok)) {
        throw Error("table scorer entry lists illegal token '" + tok + "'");
      }
      log_weights.emplace(tok, std::log(p));
    }
  }
  return normalize_with_temperature(std::move(log_weights), config.temperature);
}

GhostAnalysis probabilistic_ghost_positions(const Scorer& scorer, const DecodingContext& context,
                                            const Catalog& catalog, const ItemId& id, double tau,
                                            const ScorerConfig& config) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error("tau must lie in (0,1)");
  const Item& item = catalog.item(id);
  GhostAnalysis out;
  out.raw_length = static_cast<int>(item.tokens.size());
  TokenSeq prefix;
  int ghosts = 0;
  for (const Token& tok : item.tokens) {
    const TokenDistribution dist = scorer.next_token_logprobs(context, prefix, catalog, config);
    const bool ghost = std::exp(dist.at(tok)) > tau;
    out.mask.push_back(ghost);
    if (ghost) ++ghosts;
    prefix.push_back(tok);
  }
  out.effective_length = out.raw_length - ghosts;
  return out;
}

}  // namespace recdec
