#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "recdec/catalog.hpp"

namespace recdec {

/**
 * Item-level scores from a text-free model, covering the full catalog.
 * Values are non-negative and need not be normalized: the per-step
 * log-ratio is scale-invariant. An applied group mask zeroes every item
 * outside the group (no renormalization).
 */
struct AssistantDistribution {
  std::map<ItemId, double> p;
  std::optional<std::set<ItemId>> group_mask;
  bool mask_degenerate = false;  // warning: the mask removed all positive mass

  double total_mass() const;
};

class TextFreeModel {
public:
  virtual ~TextFreeModel() = default;

  /// Item distribution given the user's history (most recent last).
  virtual AssistantDistribution score_items(const std::vector<ItemId>& history) const = 0;

  virtual std::string kind() const = 0;
  virtual void save(const std::string& path) const = 0;
};

/// Popularity with add-one smoothing: p(i) proportional to count(i) + 1,
/// independent of history. Throws Error on an empty training set.
std::unique_ptr<TextFreeModel> train_popularity(const Catalog& catalog,
                                                const std::vector<ItemId>& train_interactions);

/// First-order transition model with add-one smoothing:
/// p(j | last = i) = (count(i->j) + 1) / (sum_k count(i->k) + |catalog|).
/// An empty history falls back to the popularity distribution of the same
/// training data. Throws Error on an empty training set.
std::unique_ptr<TextFreeModel> train_markov(const Catalog& catalog,
                                            const std::vector<std::vector<ItemId>>& train_sequences);

/// Load a model persisted with TextFreeModel::save (JSON with the model
/// kind, smoothing constant, and count tables).
std::unique_ptr<TextFreeModel> load_text_free_model(const Catalog& catalog, const std::string& path);

/// Zero the distribution outside `group` (which must be non-empty); values
/// inside are untouched. Sets mask_degenerate when nothing positive is left.
AssistantDistribution apply_group_mask(AssistantDistribution dist, const std::set<ItemId>& group);

/// Experimental escape hatch for fully-masked decodes: raise every value
/// below `epsilon` to `epsilon`. Off by default everywhere; note that a
/// floored distribution no longer excludes non-group items exactly.
AssistantDistribution apply_epsilon_floor(AssistantDistribution dist, double epsilon);

/**
 * Per-decode cache of subtree masses. One pass over the item order makes
 * every step log-ratio an O(1) prefix-sum difference, which is what keeps
 * per-step fusion affordable inside the beam loop.
 */
class PrefixMassCache {
public:
  PrefixMassCache(const Catalog& catalog, const AssistantDistribution& dist);

  double mass(const TrieNode& node) const;

  /// log( mass below node.children[next] / mass below node ).
  /// Zero numerator -> -inf. Zero denominator -> -inf with the degenerate
  /// prefix counter bumped (possible only under masking).
  double step_logratio(const TrieNode& node, const Token& next) const;

  int degenerate_prefixes() const { return degenerate_; }

private:
  std::vector<double> prefix_sum_;  // size = items + 1, over dense item order
  mutable int degenerate_ = 0;
};

/// Convenience form of the per-step score; builds a transient cache.
/// `prefix` must be live in the trie.
double step_logratio(const Catalog& catalog, const AssistantDistribution& dist,
                     const TokenSeq& prefix, const Token& token);

/// Extended-real accumulation of step scores; -inf absorbs.
double accumulate_tf(double score_so_far, double logratio);

}  // namespace recdec
