#include "recdec/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace recdec {

const Token Catalog::kEndOfItem = "</item>";

TokenSeq tokenize(const std::string& title) {
  TokenSeq tokens;
  std::string current;
  for (unsigned char c : title) {
    if (std::isspace(c)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  if (tokens.empty()) throw Error("invalid item: title is empty after trimming");
  return tokens;
}

namespace {

void dfs_assign(TrieNode& node, int& next_index, std::vector<ItemId>& order) {
  node.item_begin = next_index;
  if (node.terminal_item) {
    order.push_back(*node.terminal_item);
    ++next_index;
  }
  for (auto& [tok, child] : node.children) {
    dfs_assign(*child, next_index, order);
  }
  node.item_end = next_index;
}

int branching_max(const TrieNode& node) {
  int best = static_cast<int>(node.children.size());
  for (const auto& [tok, child] : node.children) {
    best = std::max(best, branching_max(*child));
  }
  return best;
}

std::pair<double, double> mean_and_population_variance(const std::vector<int>& xs) {
  double mean = 0.0;
  for (int x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (int x : xs) {
    const double d = x - mean;
    var += d * d;
  }
  var /= static_cast<double>(xs.size());
  return {mean, var};
}

}  // namespace

Catalog Catalog::build(const std::vector<RawItem>& raw_items, const CatalogOptions& opts) {
  if (raw_items.empty()) throw Error("cannot build catalog from an empty item list");

  const TokenizerFn tok = opts.tokenizer ? opts.tokenizer : TokenizerFn(&tokenize);

  Catalog cat;
  cat.root_ = std::make_unique<TrieNode>();

  std::map<TokenSeq, ItemId> seen_sequences;
  for (const RawItem& raw : raw_items) {
    if (cat.items_.count(raw.id)) throw Error("duplicate item id: " + raw.id);

    TokenSeq tokens;
    try {
      tokens = tok(raw.title);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " (item " + raw.id + ")");
    }
    if (tokens.empty()) throw Error("tokenizer produced no tokens for item " + raw.id);
    for (const Token& t : tokens) {
      if (t == kEndOfItem) {
        throw Error("item " + raw.id + " uses the reserved end-of-item token '" + kEndOfItem + "'");
      }
    }

    auto collision = seen_sequences.find(tokens);
    if (collision != seen_sequences.end()) {
      if (opts.collisions == CollisionPolicy::reject) {
        throw Error("title collision: items " + collision->second + " and " + raw.id +
                    " share the token sequence; enable the suffix policy or fix the input");
      }
      // Suffix policy: append "#2", "#3", ... until the sequence is unique.
      for (int n = 2;; ++n) {
        TokenSeq candidate = tokens;
        candidate.push_back("#" + std::to_string(n));
        if (!seen_sequences.count(candidate)) {
          tokens = std::move(candidate);
          break;
        }
      }
    }
    seen_sequences.emplace(tokens, raw.id);

    Item item;
    item.id = raw.id;
    item.title = raw.title;
    item.category = raw.category;
    item.tokens = tokens;
    cat.categories_.insert(raw.category);
    cat.max_item_tokens_ = std::max(cat.max_item_tokens_, static_cast<int>(tokens.size()));

    TrieNode* node = cat.root_.get();
    for (const Token& t : tokens) {
      auto& child = node->children[t];
      if (!child) child = std::make_unique<TrieNode>();
      node = child.get();
    }
    auto& leaf = node->children[kEndOfItem];
    if (!leaf) leaf = std::make_unique<TrieNode>();
    leaf->terminal_item = raw.id;

    cat.items_.emplace(raw.id, std::move(item));
  }

  int next_index = 0;
  dfs_assign(*cat.root_, next_index, cat.dfs_items_);
  for (int i = 0; i < static_cast<int>(cat.dfs_items_.size()); ++i) {
    cat.items_.at(cat.dfs_items_[i]).dense_index = i;
  }
  cat.max_branching_ = branching_max(*cat.root_);
  return cat;
}

const Item& Catalog::item(const ItemId& id) const {
  auto it = items_.find(id);
  if (it == items_.end()) throw Error("unknown item id: " + id);
  return it->second;
}

const Item& Catalog::item_at_index(int dense_index) const {
  if (dense_index < 0 || dense_index >= static_cast<int>(dfs_items_.size())) {
    throw Error("item index out of range");
  }
  return items_.at(dfs_items_[static_cast<std::size_t>(dense_index)]);
}

std::vector<ItemId> Catalog::items_in_category(const std::string& category) const {
  std::vector<ItemId> out;
  for (const auto& [id, item] : items_) {
    if (item.category == category) out.push_back(id);
  }
  return out;
}

const TrieNode* Catalog::node_at(const TokenSeq& prefix) const {
  const TrieNode* node = root_.get();
  for (const Token& t : prefix) {
    auto it = node->children.find(t);
    if (it == node->children.end()) return nullptr;
    node = it->second.get();
  }
  return node;
}

std::vector<ItemId> Catalog::subtree_items(const TrieNode& node) const {
  std::vector<ItemId> out(dfs_items_.begin() + node.item_begin, dfs_items_.begin() + node.item_end);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ItemId> Catalog::items_with_prefix(const TokenSeq& prefix) const {
  const TrieNode* node = node_at(prefix);
  if (!node) return {};
  return subtree_items(*node);
}

GhostAnalysis Catalog::ghost_positions(const ItemId& id) const {
  const Item& it = item(id);  // throws on unknown item
  GhostAnalysis out;
  out.raw_length = static_cast<int>(it.tokens.size());
  out.mask.reserve(it.tokens.size());
  const TrieNode* node = root_.get();
  int ghosts = 0;
  for (const Token& t : it.tokens) {
    // The end-of-item edge is a real child, so the out-degree is just the
    // child count; a lone edge means the continuation is forced.
    const bool forced = node->children.size() == 1;
    out.mask.push_back(forced);
    if (forced) ++ghosts;
    node = node->children.at(t).get();
  }
  out.effective_length = out.raw_length - ghosts;
  return out;
}

LengthStats Catalog::length_stats() const {
  std::vector<int> raw;
  std::vector<int> effective;
  raw.reserve(items_.size());
  effective.reserve(items_.size());
  for (const auto& [id, item] : items_) {
    GhostAnalysis g = ghost_positions(id);
    raw.push_back(g.raw_length);
    effective.push_back(g.effective_length);
  }
  LengthStats out;
  std::tie(out.raw_mean, out.raw_variance) = mean_and_population_variance(raw);
  std::tie(out.effective_mean, out.effective_variance) = mean_and_population_variance(effective);
  return out;
}

std::uint64_t Catalog::fingerprint() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  for (const auto& [id, item] : items_) {
    mix(id);
    mix(item.title);
    mix(item.category);
  }
  return h;
}

std::vector<RawItem> read_catalog_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open catalog file: " + path);
  std::vector<RawItem> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("title") ||
        !j.contains("category") || !j["id"].is_string() || !j["title"].is_string() ||
        !j["category"].is_string()) {
      throw Error("malformed catalog line " + std::to_string(lineno) + " in " + path);
    }
    out.push_back({j["id"].get<std::string>(), j["title"].get<std::string>(),
                   j["category"].get<std::string>()});
  }
  return out;
}

void write_catalog_jsonl(const std::string& path, const Catalog& catalog) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write catalog file: " + path);
  for (const auto& [id, item] : catalog.items()) {
    nlohmann::json j{{"id", item.id}, {"title", item.title}, {"category", item.category}};
    out << j.dump() << "\n";
  }
}

}  // namespace recdec
