#include "recdec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

namespace recdec {

namespace {

/// history_by_position: take everything before target_idx in sequence order
/// (the per-user fallback, where timestamps may tie); otherwise take
/// interactions with a strictly earlier timestamp (the global split's
/// no-leakage rule).
void append_case(const UserRecord& user, std::size_t target_idx, int max_history,
                 bool history_by_position, std::vector<EvalCase>& out, int& skipped) {
  const Interaction& target = user.interactions[target_idx];
  std::vector<ItemId> history;
  if (history_by_position) {
    for (std::size_t i = 0; i < target_idx; ++i) history.push_back(user.interactions[i].item);
  } else {
    for (const Interaction& it : user.interactions) {
      if (it.ts < target.ts) history.push_back(it.item);
    }
  }
  if (history.empty()) {
    ++skipped;
    return;
  }
  if (static_cast<int>(history.size()) > max_history) {
    history.erase(history.begin(), history.end() - max_history);
  }
  out.push_back(EvalCase{user.user, std::move(history), target.item, target.ts});
}

}  // namespace

std::vector<UserRecord> read_interactions_jsonl(const std::string& path, const Catalog& catalog,
                                                std::size_t* dropped_out, std::size_t* total_out) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open interactions file: " + path);

  std::map<std::string, std::vector<Interaction>> by_user;
  std::size_t dropped = 0;
  std::size_t total = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("user") || !j.contains("item") ||
        !j.contains("ts") || !j["user"].is_string() || !j["item"].is_string() ||
        !j["ts"].is_number_integer()) {
      throw Error("malformed interaction line " + std::to_string(lineno) + " in " + path);
    }
    ++total;
    const ItemId item = j["item"].get<std::string>();
    if (!catalog.has_item(item)) {
      ++dropped;
      continue;
    }
    by_user[j["user"].get<std::string>()].push_back({item, j["ts"].get<std::int64_t>()});
  }
  if (total > 0 && static_cast<double>(dropped) > 0.10 * static_cast<double>(total)) {
    throw Error("interactions file " + path + ": " + std::to_string(dropped) + " of " +
                std::to_string(total) + " interactions reference unknown items (>10%)");
  }

  std::vector<UserRecord> users;
  users.reserve(by_user.size());
  for (auto& [id, interactions] : by_user) {
    std::stable_sort(interactions.begin(), interactions.end(),
                     [](const Interaction& a, const Interaction& b) { return a.ts < b.ts; });
    users.push_back(UserRecord{id, std::move(interactions)});
  }
  if (dropped_out) *dropped_out = dropped;
  if (total_out) *total_out = total;
  return users;
}

void write_interactions_jsonl(const std::string& path, const std::vector<UserRecord>& users) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write interactions file: " + path);
  for (const UserRecord& u : users) {
    for (const Interaction& it : u.interactions) {
      nlohmann::json j{{"user", u.user}, {"item", it.item}, {"ts", it.ts}};
      out << j.dump() << "\n";
    }
  }
}

IngestResult ingest(const std::string& catalog_path, const std::string& interactions_path,
                    const CatalogOptions& catalog_opts) {
  IngestResult result{Catalog::build(read_catalog_jsonl(catalog_path), catalog_opts), {}, 0, 0};
  std::size_t dropped = 0;
  std::size_t total = 0;
  result.users = read_interactions_jsonl(interactions_path, result.catalog, &dropped, &total);
  result.interactions_dropped = dropped;
  result.interactions_kept = total - dropped;
  return result;
}

SplitDataset temporal_split(const std::vector<UserRecord>& users, const SplitConfig& config) {
  const double ratio_sum = config.ratios[0] + config.ratios[1] + config.ratios[2];
  if (std::abs(ratio_sum - 1.0) > 1e-9) throw Error("split ratios must sum to 1");
  for (double r : config.ratios) {
    if (!(r > 0.0)) throw Error("split ratios must be positive");
  }
  if (config.max_history < 1) throw Error("max_history must be >= 1");

  std::vector<std::int64_t> all_ts;
  for (const UserRecord& u : users) {
    for (const Interaction& it : u.interactions) all_ts.push_back(it.ts);
  }
  if (all_ts.size() < 10) throw Error("temporal_split requires at least 10 interactions");

  SplitDataset split;

  if (config.per_user_fallback) {
    // Leave-last-out per user: last interaction -> test, the one before ->
    // valid (when the user has >= 3), the rest train.
    for (const UserRecord& u : users) {
      const std::size_t n = u.interactions.size();
      std::size_t train_end = n;
      if (n >= 2) {
        append_case(u, n - 1, config.max_history, true, split.test_cases, split.skipped_empty_history);
        train_end = n - 1;
      }
      if (n >= 3) {
        append_case(u, n - 2, config.max_history, true, split.valid_cases, split.skipped_empty_history);
        train_end = n - 2;
      }
      UserRecord train_user{u.user, {u.interactions.begin(), u.interactions.begin() + train_end}};
      if (!train_user.interactions.empty()) split.train_users.push_back(std::move(train_user));
    }
    return split;
  }

  std::sort(all_ts.begin(), all_ts.end());
  if (all_ts.front() == all_ts.back()) {
    throw Error("temporal_split: all timestamps are equal; use the per-user "
                "leave-last fallback (per_user_fallback)");
  }
  const auto n = static_cast<long long>(all_ts.size());
  auto boundary = [&](double cumulative) {
    long long idx = std::llround(cumulative * static_cast<double>(n));
    idx = std::max(1ll, std::min(idx, n));
    return all_ts[static_cast<std::size_t>(idx - 1)];
  };
  split.train_boundary = boundary(config.ratios[0]);
  split.valid_boundary = boundary(config.ratios[0] + config.ratios[1]);

  for (const UserRecord& u : users) {
    UserRecord train_user{u.user, {}};
    for (std::size_t i = 0; i < u.interactions.size(); ++i) {
      const std::int64_t ts = u.interactions[i].ts;
      if (ts <= split.train_boundary) {
        train_user.interactions.push_back(u.interactions[i]);
      } else if (ts <= split.valid_boundary) {
        append_case(u, i, config.max_history, false, split.valid_cases, split.skipped_empty_history);
      } else {
        append_case(u, i, config.max_history, false, split.test_cases, split.skipped_empty_history);
      }
    }
    if (!train_user.interactions.empty()) split.train_users.push_back(std::move(train_user));
  }
  return split;
}

}  // namespace recdec
