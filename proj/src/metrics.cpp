#include "recdec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace recdec {

namespace {

/// 1-based rank of target, or 0 when absent.
int rank_of(const std::vector<ItemId>& recs, const ItemId& target) {
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i] == target) return static_cast<int>(i) + 1;
  }
  return 0;
}

std::map<TokenSeq, int> ngram_counts(const TokenSeq& tokens, int n) {
  std::map<TokenSeq, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[TokenSeq(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

TokenSeq first_m_tokens(const TokenSeq& tokens, int m) {
  if (static_cast<int>(tokens.size()) <= m) return tokens;
  return TokenSeq(tokens.begin(), tokens.begin() + m);
}

std::vector<ItemId> rec_ids(const RecommendationList& recs) {
  std::vector<ItemId> out;
  out.reserve(recs.size());
  for (const ScoredItem& r : recs) out.push_back(r.id);
  return out;
}

/// Running mean that tracks whether any sample arrived.
struct Mean {
  double sum = 0.0;
  int n = 0;
  void add(double x) {
    sum += x;
    ++n;
  }
  std::optional<double> value() const {
    if (n == 0) return std::nullopt;
    return sum / n;
  }
};

}  // namespace

int hr_at_k(const std::vector<ItemId>& recommendations, const ItemId& target, int k) {
  if (k < 1) throw Error("hr_at_k: k must be >= 1");
  const int rank = rank_of(recommendations, target);
  return rank >= 1 && rank <= k ? 1 : 0;
}

double ndcg_at_k(const std::vector<ItemId>& recommendations, const ItemId& target, int k) {
  if (k < 1) throw Error("ndcg_at_k: k must be >= 1");
  const int rank = rank_of(recommendations, target);
  if (rank < 1 || rank > k) return 0.0;
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

double sentence_bleu(const TokenSeq& hypothesis, const TokenSeq& reference, int max_n) {
  if (hypothesis.empty()) return 0.0;
  const int n_max = std::min<int>(max_n, static_cast<int>(hypothesis.size()));
  double log_precision_sum = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const auto hyp_counts = ngram_counts(hypothesis, n);
    const auto ref_counts = ngram_counts(reference, n);
    int total = 0;
    int matched = 0;
    for (const auto& [gram, c] : hyp_counts) {
      total += c;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(c, it->second);
    }
    log_precision_sum += std::log(static_cast<double>(matched + 1) / static_cast<double>(total + 1));
  }
  const double geo_mean = std::exp(log_precision_sum / n_max);
  const double c = static_cast<double>(hypothesis.size());
  const double r = static_cast<double>(reference.size());
  const double brevity = c > r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * geo_mean;
}

std::optional<double> pairwise_bleu(const std::vector<ItemId>& recommendations,
                                    const Catalog& catalog, int first_m, int max_n) {
  if (recommendations.size() < 2) return std::nullopt;
  std::vector<TokenSeq> prefixes;
  prefixes.reserve(recommendations.size());
  for (const ItemId& id : recommendations) {
    prefixes.push_back(first_m_tokens(catalog.item(id).tokens, first_m));
  }
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    for (std::size_t j = 0; j < prefixes.size(); ++j) {
      if (i == j) continue;
      sum += sentence_bleu(prefixes[i], prefixes[j], max_n);
      ++pairs;
    }
  }
  return sum / pairs;
}

double category_entropy(const std::vector<ItemId>& recommendations, const Catalog& catalog) {
  if (recommendations.empty()) throw Error("category_entropy: no recommendations");
  std::map<std::string, int> histogram;
  for (const ItemId& id : recommendations) ++histogram[catalog.item(id).category];
  const double n = static_cast<double>(recommendations.size());
  double entropy = 0.0;
  for (const auto& [cat, count] : histogram) {
    const double q = count / n;
    entropy -= q * std::log2(q);
  }
  return entropy;
}

HistoryRepetition history_repetition(const std::vector<ItemId>& recommendations,
                                     const std::vector<ItemId>& history, const Catalog& catalog,
                                     int first_m) {
  if (history.empty()) throw Error("history_repetition: empty history");
  if (recommendations.empty()) throw Error("history_repetition: no recommendations");

  TokenSeq history_tokens;
  std::set<std::string> history_categories;
  for (const ItemId& id : history) {
    const Item& item = catalog.item(id);
    history_tokens.insert(history_tokens.end(), item.tokens.begin(), item.tokens.end());
    history_categories.insert(item.category);
  }

  HistoryRepetition out;
  int repeats = 0;
  double bleu_sum = 0.0;
  for (const ItemId& id : recommendations) {
    const Item& item = catalog.item(id);
    bleu_sum += sentence_bleu(first_m_tokens(item.tokens, first_m), history_tokens);
    if (history_categories.count(item.category)) ++repeats;
  }
  out.history_bleu = bleu_sum / static_cast<double>(recommendations.size());
  out.category_repeat_ratio =
      static_cast<double>(repeats) / static_cast<double>(recommendations.size());
  return out;
}

MetricsReport aggregate_metrics(const std::vector<EvalRecord>& records, const Catalog& catalog,
                                const std::optional<std::string>& target_category) {
  // Group by user; std::map keeps the documented ascending-user-id order.
  std::map<std::string, std::vector<const EvalRecord*>> by_user;
  for (const EvalRecord& r : records) by_user[r.user].push_back(&r);

  Mean hr5, hr10, ndcg5, ndcg10, pbleu, entropy, hbleu, repeat, group_ratio;
  for (const auto& [user, recs] : by_user) {
    Mean u_hr5, u_hr10, u_ndcg5, u_ndcg10, u_pbleu, u_entropy, u_hbleu, u_repeat, u_group;
    for (const EvalRecord* rec : recs) {
      const std::vector<ItemId> ids = rec_ids(rec->recommendations);
      u_hr5.add(hr_at_k(ids, rec->target, 5));
      u_hr10.add(hr_at_k(ids, rec->target, 10));
      u_ndcg5.add(ndcg_at_k(ids, rec->target, 5));
      u_ndcg10.add(ndcg_at_k(ids, rec->target, 10));
      if (auto b = pairwise_bleu(ids, catalog)) u_pbleu.add(*b);
      if (!ids.empty()) u_entropy.add(category_entropy(ids, catalog));
      if (!rec->history.empty() && !ids.empty()) {
        const HistoryRepetition h = history_repetition(ids, rec->history, catalog);
        u_hbleu.add(h.history_bleu);
        u_repeat.add(h.category_repeat_ratio);
      }
      if (target_category && !ids.empty()) {
        int in_group = 0;
        for (const ItemId& id : ids) {
          if (catalog.item(id).category == *target_category) ++in_group;
        }
        u_group.add(static_cast<double>(in_group) / static_cast<double>(ids.size()));
      }
    }
    if (auto v = u_hr5.value()) hr5.add(*v);
    if (auto v = u_hr10.value()) hr10.add(*v);
    if (auto v = u_ndcg5.value()) ndcg5.add(*v);
    if (auto v = u_ndcg10.value()) ndcg10.add(*v);
    if (auto v = u_pbleu.value()) pbleu.add(*v);
    if (auto v = u_entropy.value()) entropy.add(*v);
    if (auto v = u_hbleu.value()) hbleu.add(*v);
    if (auto v = u_repeat.value()) repeat.add(*v);
    if (auto v = u_group.value()) group_ratio.add(*v);
  }

  MetricsReport report;
  report.users = static_cast<int>(by_user.size());
  report.hr5 = hr5.value().value_or(0.0);
  report.hr10 = hr10.value().value_or(0.0);
  report.ndcg5 = ndcg5.value().value_or(0.0);
  report.ndcg10 = ndcg10.value().value_or(0.0);
  report.pairwise_bleu = pbleu.value();
  report.category_entropy_bits = entropy.value().value_or(0.0);
  report.history_bleu = hbleu.value();
  report.category_repeat_ratio = repeat.value().value_or(0.0);
  report.target_group_ratio = group_ratio.value();
  return report;
}

}  // namespace recdec
