#include "recdec/assistant.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace recdec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class PopularityModel final : public TextFreeModel {
public:
  PopularityModel(const Catalog& catalog, std::map<ItemId, std::int64_t> counts)
      : counts_(std::move(counts)) {
    std::int64_t total = 0;
    for (const auto& [id, item] : catalog.items()) total += counts_[id] + 1;
    for (const auto& [id, item] : catalog.items()) {
      probs_[id] = static_cast<double>(counts_[id] + 1) / static_cast<double>(total);
    }
  }

  AssistantDistribution score_items(const std::vector<ItemId>&) const override {
    AssistantDistribution dist;
    dist.p = probs_;
    return dist;
  }

  std::string kind() const override { return "popularity"; }

  void save(const std::string& path) const override {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [id, c] : counts_) {
      if (c > 0) counts[id] = c;
    }
    nlohmann::json j{{"kind", "popularity"}, {"smoothing", 1}, {"counts", counts}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file: " + path);
    out << j.dump(2) << "\n";
  }

private:
  std::map<ItemId, std::int64_t> counts_;
  std::map<ItemId, double> probs_;
};

class MarkovModel final : public TextFreeModel {
public:
  MarkovModel(const Catalog& catalog, std::map<ItemId, std::map<ItemId, std::int64_t>> transitions,
              const std::map<ItemId, std::int64_t>& item_counts)
      : catalog_(&catalog),
        transitions_(std::move(transitions)),
        fallback_counts_(item_counts),
        fallback_(catalog, item_counts) {}

  AssistantDistribution score_items(const std::vector<ItemId>& history) const override {
    if (history.empty()) return fallback_.score_items(history);
    const ItemId& last = history.back();

    const std::map<ItemId, std::int64_t>* row = nullptr;
    std::int64_t row_total = 0;
    auto it = transitions_.find(last);
    if (it != transitions_.end()) {
      row = &it->second;
      for (const auto& [to, c] : *row) row_total += c;
    }

    const double denom = static_cast<double>(row_total) + static_cast<double>(catalog_->size());
    AssistantDistribution dist;
    for (const auto& [id, item] : catalog_->items()) {
      std::int64_t c = 0;
      if (row) {
        auto jt = row->find(id);
        if (jt != row->end()) c = jt->second;
      }
      dist.p[id] = static_cast<double>(c + 1) / denom;
    }
    return dist;
  }

  std::string kind() const override { return "markov"; }

  void save(const std::string& path) const override {
    nlohmann::json trans = nlohmann::json::object();
    for (const auto& [from, row] : transitions_) {
      nlohmann::json r = nlohmann::json::object();
      for (const auto& [to, c] : row) r[to] = c;
      trans[from] = r;
    }
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [id, c] : fallback_counts_) {
      if (c > 0) counts[id] = c;
    }
    nlohmann::json j{{"kind", "markov"}, {"smoothing", 1}, {"transitions", trans}, {"counts", counts}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file: " + path);
    out << j.dump(2) << "\n";
  }

private:
  const Catalog* catalog_;
  std::map<ItemId, std::map<ItemId, std::int64_t>> transitions_;
  std::map<ItemId, std::int64_t> fallback_counts_;  // kept so persistence round-trips
  PopularityModel fallback_;
};

void validate_known(const Catalog& catalog, const ItemId& id) {
  if (!catalog.has_item(id)) throw Error("training interaction references unknown item: " + id);
}

}  // namespace

double AssistantDistribution::total_mass() const {
  double sum = 0.0;
  for (const auto& [id, v] : p) sum += v;
  return sum;
}

std::unique_ptr<TextFreeModel> train_popularity(const Catalog& catalog,
                                                const std::vector<ItemId>& train_interactions) {
  if (train_interactions.empty()) throw Error("popularity model: empty training set");
  std::map<ItemId, std::int64_t> counts;
  for (const ItemId& id : train_interactions) {
    validate_known(catalog, id);
    ++counts[id];
  }
  return std::make_unique<PopularityModel>(catalog, std::move(counts));
}

std::unique_ptr<TextFreeModel> train_markov(const Catalog& catalog,
                                            const std::vector<std::vector<ItemId>>& train_sequences) {
  std::map<ItemId, std::map<ItemId, std::int64_t>> transitions;
  std::map<ItemId, std::int64_t> item_counts;
  std::size_t interactions = 0;
  for (const auto& seq : train_sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      validate_known(catalog, seq[i]);
      ++item_counts[seq[i]];
      ++interactions;
      if (i + 1 < seq.size()) ++transitions[seq[i]][seq[i + 1]];
    }
  }
  if (interactions == 0) throw Error("markov model: empty training set");
  return std::make_unique<MarkovModel>(catalog, std::move(transitions), item_counts);
}

std::unique_ptr<TextFreeModel> load_text_free_model(const Catalog& catalog, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("kind")) {
    throw Error("malformed model file: " + path);
  }
  const std::string kind = j["kind"].get<std::string>();
  if (j.contains("smoothing") && j["smoothing"].get<std::int64_t>() != 1) {
    throw Error("model file " + path + ": only add-one smoothing is supported");
  }
  std::map<ItemId, std::int64_t> counts;
  if (j.contains("counts")) {
    for (const auto& [id, c] : j["counts"].items()) {
      validate_known(catalog, id);
      counts[id] = c.get<std::int64_t>();
    }
  }
  if (kind == "popularity") {
    return std::make_unique<PopularityModel>(catalog, std::move(counts));
  }
  if (kind == "markov") {
    std::map<ItemId, std::map<ItemId, std::int64_t>> transitions;
    if (j.contains("transitions")) {
      for (const auto& [from, row] : j["transitions"].items()) {
        validate_known(catalog, from);
        for (const auto& [to, c] : row.items()) {
          validate_known(catalog, to);
          transitions[from][to] = c.get<std::int64_t>();
        }
      }
    }
    return std::make_unique<MarkovModel>(catalog, std::move(transitions), counts);
  }
  throw Error("unknown model kind in " + path + ": " + kind);
}

AssistantDistribution apply_group_mask(AssistantDistribution dist, const std::set<ItemId>& group) {
  if (group.empty()) throw Error("group mask must be non-empty");
  double kept = 0.0;
  for (auto& [id, v] : dist.p) {
    if (group.count(id)) {
      kept += v;
    } else {
      v = 0.0;
    }
  }
  dist.group_mask = group;
  dist.mask_degenerate = !(kept > 0.0);
  return dist;
}

AssistantDistribution apply_epsilon_floor(AssistantDistribution dist, double epsilon) {
  if (!(epsilon > 0.0)) throw Error("epsilon floor must be positive");
  for (auto& [id, v] : dist.p) {
    if (v < epsilon) v = epsilon;
  }
  dist.mask_degenerate = false;
  return dist;
}

PrefixMassCache::PrefixMassCache(const Catalog& catalog, const AssistantDistribution& dist) {
  const std::size_t n = catalog.size();
  prefix_sum_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Item& item = catalog.item_at_index(static_cast<int>(i));
    auto it = dist.p.find(item.id);
    const double v = it == dist.p.end() ? 0.0 : it->second;
    if (v < 0.0) throw Error("assistant distribution has a negative value for item " + item.id);
    prefix_sum_[i + 1] = prefix_sum_[i] + v;
  }
}

double PrefixMassCache::mass(const TrieNode& node) const {
  return prefix_sum_[static_cast<std::size_t>(node.item_end)] -
         prefix_sum_[static_cast<std::size_t>(node.item_begin)];
}

double PrefixMassCache::step_logratio(const TrieNode& node, const Token& next) const {
  const double denom = mass(node);
  if (!(denom > 0.0)) {
    ++degenerate_;
    return kNegInf;
  }
  auto it = node.children.find(next);
  if (it == node.children.end()) return kNegInf;  // empty item set after the step
  const double num = mass(*it->second);
  if (!(num > 0.0)) return kNegInf;
  return std::log(num / denom);
}

double step_logratio(const Catalog& catalog, const AssistantDistribution& dist,
                     const TokenSeq& prefix, const Token& token) {
  const TrieNode* node = catalog.node_at(prefix);
  if (!node) throw Error("step_logratio: prefix is not live in the trie");
  PrefixMassCache cache(catalog, dist);
  return cache.step_logratio(*node, token);
}

double accumulate_tf(double score_so_far, double logratio) {
  if (std::isinf(score_so_far) && score_so_far < 0.0) return kNegInf;
  if (std::isinf(logratio) && logratio < 0.0) return kNegInf;
  return score_so_far + logratio;
}

}  // namespace recdec
