#pragma once

#include <optional>
#include <string>
#include <vector>

#include "recdec/catalog.hpp"
#include "recdec/decoder.hpp"

namespace recdec {

/// Hit Ratio at k: 1 when the target appears in the first k recommendations.
int hr_at_k(const std::vector<ItemId>& recommendations, const ItemId& target, int k);

/// NDCG at k for the single-relevant-item protocol: 1/log2(rank + 1) when
/// the 1-based rank is within k, else 0.
double ndcg_at_k(const std::vector<ItemId>& recommendations, const ItemId& target, int k);

/// Sentence BLEU with add-one smoothing on every n-gram precision
/// (matches+1)/(total+1), n up to min(max_n, hypothesis length), and the
/// standard brevity penalty.
double sentence_bleu(const TokenSeq& hypothesis, const TokenSeq& reference, int max_n = 4);

/// Mean sentence BLEU over all ordered pairs (i != j) of recommendations,
/// each side truncated to its first `first_m` tokens. Absent (nullopt) when
/// fewer than two recommendations exist.
std::optional<double> pairwise_bleu(const std::vector<ItemId>& recommendations,
                                    const Catalog& catalog, int first_m = 5, int max_n = 4);

/// Shannon entropy (bits) of the category histogram of the recommendations.
double category_entropy(const std::vector<ItemId>& recommendations, const Catalog& catalog);

struct HistoryRepetition {
  double history_bleu = 0.0;           // mean BLEU of recs vs concatenated history tokens
  double category_repeat_ratio = 0.0;  // share of recs whose category occurs in the history
};

/// Similarity of the recommendations to the user's history. Throws Error on
/// an empty history.
HistoryRepetition history_repetition(const std::vector<ItemId>& recommendations,
                                     const std::vector<ItemId>& history, const Catalog& catalog,
                                     int first_m = 5);

/// One evaluation unit of the all-ranking protocol.
struct EvalRecord {
  std::string user;
  RecommendationList recommendations;
  ItemId target;
  std::vector<ItemId> history;
};

struct MetricsReport {
  double hr5 = 0.0;
  double hr10 = 0.0;
  double ndcg5 = 0.0;
  double ndcg10 = 0.0;
  std::optional<double> pairwise_bleu;
  double category_entropy_bits = 0.0;
  std::optional<double> history_bleu;
  double category_repeat_ratio = 0.0;
  std::optional<double> target_group_ratio;  // set when a target category is given
  int users = 0;
};

/**
 * Aggregate per-record metrics into per-user means, then a mean over users
 * in ascending user-id order (the documented, reproducible summation
 * order). `target_category`, when given, adds the share of recommendations
 * falling in that category.
 */
MetricsReport aggregate_metrics(const std::vector<EvalRecord>& records, const Catalog& catalog,
                                const std::optional<std::string>& target_category = std::nullopt);

}  // namespace recdec
