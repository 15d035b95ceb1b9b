#include <doctest.h>

#include <cmath>

#include "recdec/metrics.hpp"

using namespace recdec;

namespace {

Catalog metrics_catalog() {
  // Ten single-letter items across three categories, plus two items sharing
  // their first five tokens.
  std::vector<RawItem> raw;
  const std::string cats[3] = {"red", "green", "blue"};
  for (int i = 0; i < 10; ++i) {
    raw.push_back({"m" + std::to_string(i), "tok" + std::to_string(i), cats[i % 3]});
  }
  raw.push_back({"twin1", "w1 w2 w3 w4 w5 left", "red"});
  raw.push_back({"twin2", "w1 w2 w3 w4 w5 right", "green"});
  return Catalog::build(raw);
}

}  // namespace

TEST_CASE("hr_at_k") {
  std::vector<ItemId> recs{"m1", "m2", "m3", "m4", "m5", "m6"};
  CHECK(hr_at_k(recs, "m1", 5) == 1);
  CHECK(hr_at_k(recs, "m6", 5) == 0);
  CHECK(hr_at_k({}, "m1", 5) == 0);
}

TEST_CASE("ndcg_at_k") {
  std::vector<ItemId> recs;
  for (int i = 1; i <= 12; ++i) recs.push_back("m" + std::to_string(i));
  CHECK(ndcg_at_k(recs, "m1", 5) == doctest::Approx(1.0));
  CHECK(ndcg_at_k(recs, "m3", 5) == doctest::Approx(0.5).epsilon(1e-12));  // 1/log2(4)
  CHECK(ndcg_at_k(recs, "m11", 10) == 0.0);
  CHECK(ndcg_at_k(recs, "absent", 10) == 0.0);
}

TEST_CASE("smoothed sentence BLEU hand values") {
  // hyp=[a,b] ref=[c,d]: p1=1/3, p2=1/2, BP=1 -> sqrt(1/6).
  CHECK(sentence_bleu({"a", "b"}, {"c", "d"}) == doctest::Approx(0.40825).epsilon(1e-5));
  // Identity still reaches 1.0 under uniform smoothing.
  CHECK(sentence_bleu({"a", "b"}, {"a", "b"}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pairwise BLEU") {
  Catalog cat = metrics_catalog();

  // Identical first-5-token prefixes -> 1.0 even though the items differ.
  auto same = pairwise_bleu({"twin1", "twin2"}, cat);
  REQUIRE(same.has_value());
  CHECK(*same == doctest::Approx(1.0).epsilon(1e-12));

  // Two single-token items with different tokens: per direction
  // p1 = (0+1)/(1+1) = 1/2, n_max = 1, BP = 1.
  auto diff = pairwise_bleu({"m0", "m1"}, cat);
  REQUIRE(diff.has_value());
  CHECK(*diff == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_FALSE(pairwise_bleu({"m0"}, cat).has_value());
}

TEST_CASE("category entropy") {
  Catalog cat = metrics_catalog();
  // All one category.
  CHECK(category_entropy({"m0", "m3", "m6", "m9"}, cat) == doctest::Approx(0.0));
  // 5/5 over two categories -> 1 bit. m0,m3 red; m1,m4 green.
  CHECK(category_entropy({"m0", "m3", "m6", "m9", "twin1", "m1", "m4", "m7", "m1", "m4"}, cat) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // 4/2/2 over three categories among 8 -> 1.5 bits.
  CHECK(category_entropy({"m0", "m3", "m6", "m9", "m1", "m4", "m2", "m5"}, cat) ==
        doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("entropy is bounded by min(recs, categories)") {
  Catalog cat = metrics_catalog();
  const std::vector<ItemId> recs{"m0", "m1", "m2", "m3", "m4", "m5", "m6"};
  const double h = category_entropy(recs, cat);
  CHECK(h <= std::log2(3.0) + 1e-12);
  CHECK(h <= std::log2(static_cast<double>(recs.size())) + 1e-12);
}

TEST_CASE("history repetition") {
  Catalog cat = metrics_catalog();

  // m6 is red (6%3=0); recs m0 (red), m3 (red): both repeat history categories.
  HistoryRepetition rep = history_repetition({"m0", "m3"}, {"m6"}, cat);
  CHECK(rep.category_repeat_ratio == doctest::Approx(1.0));

  // Disjoint categories.
  HistoryRepetition none = history_repetition({"m1", "m4"}, {"m0"}, cat);
  CHECK(none.category_repeat_ratio == doctest::Approx(0.0));

  // Recommendation identical to the single history item's tokens -> BLEU 1.
  HistoryRepetition ident = history_repetition({"m2"}, {"m2"}, cat);
  CHECK(ident.history_bleu == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(history_repetition({"m0"}, {}, cat), Error);
}

TEST_CASE("aggregation is a mean over users in id order") {
  Catalog cat = metrics_catalog();
  auto rec = [](std::initializer_list<const char*> ids) {
    RecommendationList out;
    double s = 0.0;
    for (const char* id : ids) {
      out.push_back(ScoredItem{id, s});
      s -= 1.0;
    }
    return out;
  };

  std::vector<EvalRecord> records;
  // user b has two cases (hr 1 and 0 -> user mean 0.5); user a has one (hr 1).
  records.push_back({"b", rec({"m0", "m1"}), "m0", {"m2"}});
  records.push_back({"b", rec({"m0", "m1"}), "m9", {"m2"}});
  records.push_back({"a", rec({"m3", "m4"}), "m3", {"m5"}});

  MetricsReport report = aggregate_metrics(records, cat);
  CHECK(report.users == 2);
  CHECK(report.hr5 == doctest::Approx((1.0 + 0.5) / 2.0).epsilon(1e-12));
  REQUIRE(report.pairwise_bleu.has_value());
  REQUIRE(report.history_bleu.has_value());

  // Target-category share.
  MetricsReport grouped = aggregate_metrics(records, cat, std::string("red"));
  REQUIRE(grouped.target_group_ratio.has_value());
  // user a: recs m3 (red), m4 (green) -> 0.5; user b: m0 red, m1 green -> 0.5.
  CHECK(*grouped.target_group_ratio == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("hr and ndcg agree at the extremes") {
  std::vector<ItemId> recs{"m0", "m1"};
  CHECK(hr_at_k(recs, "m0", 5) == 1);
  CHECK(ndcg_at_k(recs, "m0", 5) == doctest::Approx(1.0));
  CHECK(hr_at_k(recs, "gone", 5) == 0);
  CHECK(ndcg_at_k(recs, "gone", 5) == doctest::Approx(0.0));
}
