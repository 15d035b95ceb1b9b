#pragma once

#include <cstdint>
#include <vector>

#include "recdec/catalog.hpp"
#include "recdec/dataset.hpp"

namespace recdec {

/**
 * Parameters of the synthetic benchmark generator.
 *
 * Item titles are "<series name tokens> <variant number>", so within a
 * series every name token after the first is structurally forced (a ghost
 * position). The per-series name length is name_token_length +
 * (series_index mod name_token_length), spanning [L, 2L-1]: raw token
 * lengths vary across series while effective lengths stay uniform, the
 * length profile that makes length normalization misbehave.
 *
 * Users are assigned a home category round-robin and draw each history item
 * from it with probability category_skew, otherwise uniformly from the
 * whole catalog.
 */
struct SyntheticSpec {
  int categories = 2;
  int series_per_category = 2;
  int items_per_series = 3;
  int name_token_length = 3;
  int users = 100;
  int history_length = 10;
  double category_skew = 0.5;
  std::uint64_t seed = 0;
};

struct SyntheticDataset {
  Catalog catalog;
  std::vector<UserRecord> users;
};

/// Deterministic given the seed: same spec -> byte-identical catalogs,
/// users, and timestamps.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace recdec
