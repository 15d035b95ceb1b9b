#include "recdec/synthetic.hpp"

#include <string>

#include "recdec/rng.hpp"

namespace recdec {

namespace {

void validate(const SyntheticSpec& spec) {
  if (spec.categories < 1 || spec.series_per_category < 1 || spec.items_per_series < 1 ||
      spec.name_token_length < 1 || spec.users < 1 || spec.history_length < 1) {
    throw Error("synthetic spec: all counts must be positive");
  }
  if (!(spec.category_skew >= 0.0 && spec.category_skew <= 1.0)) {
    throw Error("synthetic spec: category_skew must be in [0,1]");
  }
}

std::string padded(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);

  std::vector<RawItem> raw;
  std::vector<std::vector<ItemId>> by_category(spec.categories);
  std::vector<ItemId> all_items;
  for (int c = 0; c < spec.categories; ++c) {
    const std::string category = "cat" + std::to_string(c);
    for (int s = 0; s < spec.series_per_category; ++s) {
      const int series_index = c * spec.series_per_category + s;
      const int name_len = spec.name_token_length + (series_index % spec.name_token_length);
      std::string name;
      for (int j = 0; j < name_len; ++j) {
        if (j > 0) name += ' ';
        name += "c" + std::to_string(c) + "s" + std::to_string(s) + "n" + std::to_string(j);
      }
      for (int v = 1; v <= spec.items_per_series; ++v) {
        RawItem item;
        item.id = "i-c" + std::to_string(c) + "-s" + std::to_string(s) + "-" + std::to_string(v);
        item.title = name + " " + std::to_string(v);
        item.category = category;
        by_category[c].push_back(item.id);
        all_items.push_back(item.id);
        raw.push_back(std::move(item));
      }
    }
  }

  SyntheticDataset out{Catalog::build(raw), {}};

  DeterministicRng rng(spec.seed);
  const int user_width = static_cast<int>(std::to_string(spec.users - 1).size());
  out.users.reserve(spec.users);
  for (int u = 0; u < spec.users; ++u) {
    UserRecord user;
    user.user = "u" + padded(u, user_width);
    const int home = u % spec.categories;
    user.interactions.reserve(spec.history_length);
    for (int t = 0; t < spec.history_length; ++t) {
      const bool from_home = rng.unit() < spec.category_skew;
      const std::vector<ItemId>& pool = from_home ? by_category[home] : all_items;
      const ItemId& item = pool[rng.below(pool.size())];
      // Interleaved timestamps: every user's t-th interaction lands in the
      // same global time band, so quantile splits cut all histories near
      // the same relative position.
      const std::int64_t ts = static_cast<std::int64_t>(t) * spec.users + u + 1;
      user.interactions.push_back({item, ts});
    }
    out.users.push_back(std::move(user));
  }
  return out;
}

}  // namespace recdec
