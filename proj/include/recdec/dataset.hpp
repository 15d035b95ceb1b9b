#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "recdec/catalog.hpp"

namespace recdec {

struct Interaction {
  ItemId item;
  std::int64_t ts = 0;  // seconds
};

/// A user's interactions, timestamps non-decreasing.
struct UserRecord {
  std::string user;
  std::vector<Interaction> interactions;
};

/// One evaluation case: the interactions strictly before the target
/// (truncated to the configured maximum, most recent kept) and the target.
struct EvalCase {
  std::string user;
  std::vector<ItemId> history;  // oldest first
  ItemId target;
  std::int64_t ts = 0;
};

struct SplitConfig {
  std::array<double, 3> ratios{0.8, 0.1, 0.1};
  int max_history = 10;
  /// Fallback for degenerate timestamps: per-user leave-last-out instead of
  /// global timestamp boundaries.
  bool per_user_fallback = false;
};

struct SplitDataset {
  std::vector<UserRecord> train_users;  // per-user train-split interactions, order kept
  std::vector<EvalCase> valid_cases;
  std::vector<EvalCase> test_cases;
  int skipped_empty_history = 0;
  std::int64_t train_boundary = 0;  // train: ts <= train_boundary (global split only)
  std::int64_t valid_boundary = 0;  // valid: train_boundary < ts <= valid_boundary
};

struct IngestResult {
  Catalog catalog;
  std::vector<UserRecord> users;  // ascending user id
  std::size_t interactions_kept = 0;
  std::size_t interactions_dropped = 0;
};

/// Interactions file interface: JSON Lines, one
/// {"user": "<id>", "item": "<id>", "ts": <integer seconds>} per line.
/// Interactions referencing unknown items are dropped and counted; more
/// than 10% dropped is a hard error. Errors carry 1-based line numbers.
IngestResult ingest(const std::string& catalog_path, const std::string& interactions_path,
                    const CatalogOptions& catalog_opts = {});

std::vector<UserRecord> read_interactions_jsonl(const std::string& path, const Catalog& catalog,
                                                std::size_t* dropped_out = nullptr,
                                                std::size_t* total_out = nullptr);
void write_interactions_jsonl(const std::string& path, const std::vector<UserRecord>& users);

/**
 * Split by global timestamp quantiles at the given ratios; each valid/test
 * interaction becomes an evaluation case whose history is everything the
 * user did strictly before it. Users with an empty history at a case are
 * skipped and counted. All-equal timestamps are an error (use the per-user
 * fallback flag for such data). Requires >= 10 interactions.
 */
SplitDataset temporal_split(const std::vector<UserRecord>& users, const SplitConfig& config = {});

}  // namespace recdec
