#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "recdec/catalog.hpp"

namespace recdec {

struct ScorerConfig {
  double temperature = 1.0;  // logits are divided by T, then renormalized
  double copy_bonus = 2.0;   // beta; SyntheticCopyLM only
};

/**
 * The conditioning side of a decode call: which user we are decoding for
 * and the token multiset rendered from their history item titles (what the
 * copy mechanism can latch onto).
 */
struct DecodingContext {
  std::string context_id;  // keys TableScorer entries; typically the user id
  std::vector<ItemId> user_history;
  std::map<Token, int> rendered_history_tokens;  // token -> multiplicity

  static DecodingContext from_history(const Catalog& catalog, std::string context_id,
                                      std::vector<ItemId> history);
};

/// token -> log probability over exactly the legal continuations at a
/// prefix (trie children, which include the end-of-item edge where legal).
/// Probabilities sum to 1 within 1e-9.
using TokenDistribution = std::map<Token, double>;

class Scorer {
public:
  virtual ~Scorer() = default;

  /// Next-token distribution restricted to the legal continuations of
  /// prefix. Throws Error on a dead prefix (the decoder never expands one).
  virtual TokenDistribution next_token_logprobs(const DecodingContext& context,
                                                const TokenSeq& prefix, const Catalog& catalog,
                                                const ScorerConfig& config) const = 0;
};

/**
 * Closed-form stand-in for a fine-tuned language model.
 *
 * At a node, a child's base weight is the number of catalog items in its
 * subtree (the end-of-item edge therefore weighs 1), multiplied by
 * exp(copy_bonus) when the child token occurs among the rendered history
 * tokens. This deliberately reproduces the match-and-copy behaviour that
 * makes beam search favour items textually similar to the history, so the
 * homogeneity effect is observable on small catalogs.
 */
class SyntheticCopyLM final : public Scorer {
public:
  TokenDistribution next_token_logprobs(const DecodingContext& context, const TokenSeq& prefix,
                                        const Catalog& catalog,
                                        const ScorerConfig& config) const override;
};

/**
 * Exact-oracle scorer for tests: conditional distributions listed in a
 * table keyed by (context id, prefix). A missing key yields the uniform
 * distribution over legal continuations.
 *
 * File format: JSON Lines, {"context": "<id>", "prefix": ["tok",...],
 * "dist": {"tok": p, ...}}. Distributions must sum to 1 within 1e-6.
 */
class TableScorer final : public Scorer {
public:
  static TableScorer load(const std::string& path);

  /// Programmatic entry registration (same validation as load).
  void add(std::string context_id, TokenSeq prefix, std::map<Token, double> probs);

  TokenDistribution next_token_logprobs(const DecodingContext& context, const TokenSeq& prefix,
                                        const Catalog& catalog,
                                        const ScorerConfig& config) const override;

private:
  std::map<std::pair<std::string, TokenSeq>, std::map<Token, double>> entries_;
};

/**
 * Scorer-dependent ghost analysis: position j is a ghost when the scorer
 * assigns more than `tau` probability to the item's actual token there.
 * Complements Catalog::ghost_positions, whose structural definition
 * (forced continuation) is scorer-independent; the two coincide for any
 * scorer that concentrates on forced edges.
 */
GhostAnalysis probabilistic_ghost_positions(const Scorer& scorer, const DecodingContext& context,
                                            const Catalog& catalog, const ItemId& id,
                                            double tau = 0.99, const ScorerConfig& config = {});

}  // namespace recdec
