#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "recdec/error.hpp"

namespace recdec {

using Token = std::string;
using TokenSeq = std::vector<Token>;
using ItemId = std::string;

/// Default tokenizer: trim, lowercase, split on runs of whitespace.
/// Throws Error when the title is empty after trimming.
TokenSeq tokenize(const std::string& title);

using TokenizerFn = std::function<TokenSeq(const std::string&)>;

struct RawItem {
  ItemId id;
  std::string title;
  std::string category;
};

struct Item {
  ItemId id;
  std::string title;
  std::string category;
  TokenSeq tokens;      // title tokens; never includes the end-of-item marker
  int dense_index = 0;  // position in the catalog's trie-DFS item order
};

/**
 * One node of the catalog's prefix trie.
 *
 * The end-of-item marker is a real edge: each item's path is its title
 * tokens followed by the marker, ending at a leaf whose terminal_item is
 * the item id. [item_begin, item_end) is the contiguous slice of the
 * catalog's DFS item order reachable below this node, which makes subtree
 * masses a prefix-sum difference.
 */
struct TrieNode {
  std::map<Token, std::unique_ptr<TrieNode>> children;
  std::optional<ItemId> terminal_item;
  int item_begin = 0;
  int item_end = 0;

  int subtree_size() const { return item_end - item_begin; }
};

/// Per-item ghost-token analysis. Position j is a ghost when the node
/// reached by tokens[0..j) has exactly one outgoing edge, i.e. the
/// continuation is forced within the catalog. The end-of-item marker is
/// never a position.
struct GhostAnalysis {
  std::vector<bool> mask;   // true = ghost
  int raw_length = 0;       // mask.size()
  int effective_length = 0; // raw_length - number of ghosts
};

struct LengthStats {
  double raw_mean = 0.0;
  double raw_variance = 0.0;  // population variance
  double effective_mean = 0.0;
  double effective_variance = 0.0;
};

enum class CollisionPolicy {
  reject,  // identical full token sequences are a build error (default)
  suffix,  // disambiguate with an appended "#2", "#3", ... token
};

struct CatalogOptions {
  CollisionPolicy collisions = CollisionPolicy::reject;
  TokenizerFn tokenizer;  // empty -> default tokenize()
};

/**
 * The item generation space: items plus the prefix trie that constrains
 * decoding to catalog members. Immutable after build; safe for concurrent
 * reads from any number of decoding workers.
 */
class Catalog {
public:
  /// Reserved terminal token; kept outside the title vocabulary (build
  /// rejects titles that tokenize to it).
  static const Token kEndOfItem;

  static Catalog build(const std::vector<RawItem>& raw_items, const CatalogOptions& opts = {});

  Catalog(Catalog&&) noexcept = default;
  Catalog& operator=(Catalog&&) noexcept = default;
  Catalog(const Catalog&) = delete;
  Catalog& operator=(const Catalog&) = delete;

  std::size_t size() const { return items_.size(); }
  bool has_item(const ItemId& id) const { return items_.count(id) != 0; }
  const Item& item(const ItemId& id) const;
  const std::map<ItemId, Item>& items() const { return items_; }
  const Item& item_at_index(int dense_index) const;
  const std::set<std::string>& categories() const { return categories_; }
  std::vector<ItemId> items_in_category(const std::string& category) const;

  const TrieNode& root() const { return *root_; }
  /// Walk the trie along prefix; nullptr when the prefix leaves the trie.
  const TrieNode* node_at(const TokenSeq& prefix) const;
  /// Item ids below the node reached by prefix (ascending id), empty when
  /// the prefix is dead.
  std::vector<ItemId> items_with_prefix(const TokenSeq& prefix) const;
  std::vector<ItemId> subtree_items(const TrieNode& node) const;

  GhostAnalysis ghost_positions(const ItemId& id) const;
  LengthStats length_stats() const;

  int max_branching() const { return max_branching_; }
  int max_item_tokens() const { return max_item_tokens_; }

  /// FNV-1a over (id, title, category) in ascending id order; used to make
  /// experiment reports traceable to the exact catalog.
  std::uint64_t fingerprint() const;

private:
  Catalog() = default;

  std::map<ItemId, Item> items_;
  std::unique_ptr<TrieNode> root_;
  std::set<std::string> categories_;
  std::vector<ItemId> dfs_items_;  // item ids in trie-DFS order (dense_index order)
  int max_branching_ = 0;
  int max_item_tokens_ = 0;
};

/// Catalog file interface: JSON Lines, one {"id","title","category"} object
/// per line, UTF-8. Errors carry 1-based line numbers.
std::vector<RawItem> read_catalog_jsonl(const std::string& path);
void write_catalog_jsonl(const std::string& path, const Catalog& catalog);

}  // namespace recdec
