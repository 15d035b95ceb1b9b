#include <doctest.h>

#include <algorithm>

#include "recdec/catalog.hpp"
#include "recdec/rng.hpp"
#include "recdec/synthetic.hpp"

using namespace recdec;

namespace {

// Three-item fixture used throughout: shared "play station" prefix plus a
// single-token item.
Catalog three_item_catalog() {
  return Catalog::build({
      {"ps3", "Play Station 3", "console"},
      {"ps4", "Play Station 4", "console"},
      {"guitar", "Guitar", "instrument"},
  });
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on whitespace") {
  CHECK(tokenize("PlayStation 4") == TokenSeq{"playstation", "4"});
  CHECK(tokenize("Guitar") == TokenSeq{"guitar"});
  CHECK(tokenize("  Fender   Strat ") == TokenSeq{"fender", "strat"});
  CHECK_THROWS_AS(tokenize("   "), Error);
  CHECK_THROWS_AS(tokenize(""), Error);
}

TEST_CASE("build_catalog constructs the expected trie") {
  Catalog cat = three_item_catalog();
  CHECK(cat.size() == 3);

  const TrieNode& root = cat.root();
  REQUIRE(root.children.size() == 2);
  CHECK(root.children.count("play") == 1);
  CHECK(root.children.count("guitar") == 1);

  const TrieNode* ps = cat.node_at({"play", "station"});
  REQUIRE(ps != nullptr);
  CHECK(ps->children.size() == 2);
  CHECK(ps->children.count("3") == 1);
  CHECK(ps->children.count("4") == 1);
}

TEST_CASE("build_catalog rejects bad input") {
  CHECK_THROWS_AS(Catalog::build({}), Error);
  CHECK_THROWS_AS(Catalog::build({{"a", "Guitar", "x"}, {"a", "Bass", "x"}}), Error);

  // Identical titles with distinct ids collide under the default policy and
  // the error names both ids.
  try {
    Catalog::build({{"a", "Guitar", "x"}, {"b", "Guitar", "x"}});
    FAIL("expected collision error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("a") != std::string::npos);
    CHECK(msg.find("b") != std::string::npos);
  }
}

TEST_CASE("suffix collision policy disambiguates") {
  CatalogOptions opts;
  opts.collisions = CollisionPolicy::suffix;
  Catalog cat = Catalog::build({{"a", "Guitar", "x"}, {"b", "Guitar", "x"}, {"c", "Guitar", "x"}},
                               opts);
  CHECK(cat.item("a").tokens == TokenSeq{"guitar"});
  CHECK(cat.item("b").tokens == TokenSeq{"guitar", "#2"});
  CHECK(cat.item("c").tokens == TokenSeq{"guitar", "#3"});
  CHECK(cat.items_with_prefix({"guitar"}) == std::vector<ItemId>{"a", "b", "c"});
}

TEST_CASE("reserved end-of-item token is rejected in titles") {
  CHECK_THROWS_AS(Catalog::build({{"a", "</item>", "x"}}), Error);
}

TEST_CASE("items_with_prefix") {
  Catalog cat = three_item_catalog();
  CHECK(cat.items_with_prefix({}) == std::vector<ItemId>{"guitar", "ps3", "ps4"});
  CHECK(cat.items_with_prefix({"play"}) == std::vector<ItemId>{"ps3", "ps4"});
  CHECK(cat.items_with_prefix({"play", "guitar"}).empty());
}

TEST_CASE("every item traces to its own terminal") {
  Catalog cat = three_item_catalog();
  for (const auto& [id, item] : cat.items()) {
    TokenSeq path = item.tokens;
    path.push_back(Catalog::kEndOfItem);
    const TrieNode* leaf = cat.node_at(path);
    REQUIRE(leaf != nullptr);
    REQUIRE(leaf->terminal_item.has_value());
    CHECK(*leaf->terminal_item == id);
  }
}

TEST_CASE("prefix refinement is monotone on a synthetic catalog") {
  SyntheticSpec spec;
  spec.categories = 3;
  spec.series_per_category = 3;
  spec.items_per_series = 4;
  spec.seed = 5;
  Catalog cat = generate_synthetic(spec).catalog;

  CHECK(cat.items_with_prefix({}).size() == cat.size());

  DeterministicRng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Item& item = cat.item_at_index(static_cast<int>(rng.below(cat.size())));
    TokenSeq prefix(item.tokens.begin(),
                    item.tokens.begin() + static_cast<long>(rng.below(item.tokens.size() + 1)));
    auto base = cat.items_with_prefix(prefix);
    prefix.push_back(item.tokens.size() > prefix.size() ? item.tokens[prefix.size()] : "zzz");
    auto refined = cat.items_with_prefix(prefix);
    CHECK(std::includes(base.begin(), base.end(), refined.begin(), refined.end()));
  }
}

TEST_CASE("subtree ranges partition parents") {
  SyntheticSpec spec;
  spec.categories = 2;
  spec.series_per_category = 3;
  spec.items_per_series = 3;
  Catalog cat = generate_synthetic(spec).catalog;

  // DFS: each node's item count equals the sum over children (plus itself
  // for terminals).
  std::vector<const TrieNode*> stack{&cat.root()};
  while (!stack.empty()) {
    const TrieNode* node = stack.back();
    stack.pop_back();
    int child_sum = node->terminal_item ? 1 : 0;
    for (const auto& [tok, child] : node->children) {
      child_sum += child->subtree_size();
      stack.push_back(child.get());
    }
    if (!node->children.empty()) CHECK(node->subtree_size() == child_sum);
  }
}

TEST_CASE("ghost positions on the three-item catalog") {
  Catalog cat = three_item_catalog();

  GhostAnalysis ps3 = cat.ghost_positions("ps3");
  CHECK(ps3.mask == std::vector<bool>{false, true, false});
  CHECK(ps3.raw_length == 3);
  CHECK(ps3.effective_length == 2);

  GhostAnalysis guitar = cat.ghost_positions("guitar");
  CHECK(guitar.mask == std::vector<bool>{false});
  CHECK(guitar.effective_length == 1);

  CHECK_THROWS_AS(cat.ghost_positions("nope"), Error);
}

TEST_CASE("single-item catalog is all ghosts") {
  Catalog cat = Catalog::build({{"gh", "Guitar Hero", "game"}});
  GhostAnalysis g = cat.ghost_positions("gh");
  CHECK(g.mask == std::vector<bool>{true, true});
  CHECK(g.effective_length == 0);
}

TEST_CASE("length_stats matches hand computation") {
  Catalog cat = three_item_catalog();
  LengthStats s = cat.length_stats();
  // raw lengths [3,3,1]; effective [2,2,1]; population variance.
  CHECK(s.raw_mean == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
  CHECK(s.raw_variance == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(s.effective_mean == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(s.effective_variance == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
  CHECK(s.raw_mean == doctest::Approx(2.3333).epsilon(1e-4));
  CHECK(s.raw_variance == doctest::Approx(0.8889).epsilon(1e-4));
}

TEST_CASE("ghost-free identical-length catalog has zero variance") {
  Catalog cat = Catalog::build({
      {"ab", "alpha bravo", "x"},
      {"ac", "alpha charlie", "x"},
      {"bd", "bravo delta", "x"},
      {"be", "bravo echo", "x"},
  });
  // Every node branches, so nothing is forced.
  for (const auto& [id, item] : cat.items()) {
    CHECK(cat.ghost_positions(id).effective_length == 2);
  }
  LengthStats s = cat.length_stats();
  CHECK(s.raw_variance == 0.0);
  CHECK(s.effective_variance == 0.0);
  CHECK(s.effective_mean == s.raw_mean);
}

TEST_CASE("a registered tokenizer replaces the default") {
  CatalogOptions opts;
  opts.tokenizer = [](const std::string& title) {
    TokenSeq out;
    for (char c : title) {
      if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(std::string(1, c));
    }
    if (out.empty()) throw Error("empty title");
    return out;
  };
  Catalog cat = Catalog::build({{"ab", "ab", "x"}, {"ac", "ac", "x"}}, opts);
  CHECK(cat.item("ab").tokens == TokenSeq{"a", "b"});
  CHECK(cat.items_with_prefix({"a"}) == std::vector<ItemId>{"ab", "ac"});
}

TEST_CASE("catalog jsonl round-trip") {
  Catalog cat = three_item_catalog();
  const std::string path = "test_catalog_rt.jsonl";
  write_catalog_jsonl(path, cat);
  Catalog back = Catalog::build(read_catalog_jsonl(path));
  CHECK(back.size() == cat.size());
  CHECK(back.fingerprint() == cat.fingerprint());
  std::remove(path.c_str());
}
