#include "recdec/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace recdec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// alpha * lm + (1 - alpha) * tf without 0 * inf pitfalls.
double fuse(double alpha, double lm, double tf) {
  if (alpha >= 1.0) return lm;
  if (alpha <= 0.0) return tf;
  if (std::isinf(lm) || std::isinf(tf)) return kNegInf;
  return alpha * lm + (1.0 - alpha) * tf;
}

struct Beam {
  Hypothesis hyp;
  const TrieNode* node = nullptr;  // current trie position; null once finished
  double selection = 0.0;          // accumulated selection score
};

bool worse_by_selection(const Beam& a, const Beam& b) {
  if (a.selection != b.selection) return a.selection < b.selection;
  return a.hyp.tokens > b.hyp.tokens;
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::baseline: return "baseline";
    case Strategy::baseline_temp: return "baseline-temp";
    case Strategy::d3: return "d3";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "baseline") return Strategy::baseline;
  if (s == "baseline-temp" || s == "baseline_temp") return Strategy::baseline_temp;
  if (s == "d3") return Strategy::d3;
  throw Error("unknown strategy: " + s);
}

DecodeConfig DecodeConfig::normalized() const {
  DecodeConfig c = *this;
  if (c.beam_width < 1) throw Error("beam_width must be >= 1");
  if (c.expansion_width < 1) throw Error("expansion_width must be >= 1");
  if (!(c.temperature > 0.0)) throw Error("temperature must be positive");
  if (!(c.fusion_alpha >= 0.0 && c.fusion_alpha <= 1.0)) throw Error("alpha must be in [0,1]");
  if (!(c.length_penalty >= 0.0)) throw Error("lambda must be >= 0");
  if (c.max_steps < 0 || c.finished_target < 0) throw Error("negative step/target");
  switch (c.strategy) {
    case Strategy::d3:
      c.length_penalty = 0.0;
      break;
    case Strategy::baseline:
      c.fusion_alpha = 1.0;
      c.temperature = 1.0;
      break;
    case Strategy::baseline_temp:
      c.fusion_alpha = 1.0;
      break;
  }
  return c;
}

double combined_score(const Hypothesis& h, const DecodeConfig& config) {
  if (config.strategy == Strategy::d3) {
    return fuse(config.fusion_alpha, h.lm_score, h.tf_score);
  }
  if (!h.finished) return h.lm_score;
  return h.lm_score / std::pow(static_cast<double>(h.length()), config.length_penalty);
}

RecommendationList decode(const Catalog& catalog, const Scorer& scorer,
                          const DecodingContext& context, const AssistantDistribution* assistant,
                          const DecodeConfig& raw_config, const ScorerConfig& scorer_defaults) {
  const DecodeConfig config = raw_config.normalized();
  const bool uses_assistant = config.strategy == Strategy::d3 && config.fusion_alpha < 1.0;
  if (uses_assistant && !assistant) {
    throw Error("d3 with alpha < 1 requires an assistant distribution");
  }
  const bool step_fusion =
      config.strategy == Strategy::d3 && config.fusion_mode == FusionMode::per_step;

  const int max_steps = config.max_steps > 0 ? config.max_steps : catalog.max_item_tokens() + 1;
  const std::size_t finished_target = config.finished_target > 0
                                          ? static_cast<std::size_t>(config.finished_target)
                                          : 2 * static_cast<std::size_t>(config.beam_width);

  ScorerConfig scfg = scorer_defaults;
  scfg.temperature = config.temperature;

  std::optional<PrefixMassCache> masses;
  if (uses_assistant) masses.emplace(catalog, *assistant);

  std::vector<Beam> live;
  live.push_back(Beam{Hypothesis{}, &catalog.root(), 0.0});
  std::vector<Beam> finished;

  struct Candidate {
    Beam beam;
    double increment;  // selection increment of the step that produced it
  };

  for (int step = 0; step < max_steps && !live.empty(); ++step) {
    std::vector<Candidate> pool;
    for (const Beam& parent : live) {
      const TokenDistribution dist =
          scorer.next_token_logprobs(context, parent.hyp.tokens, catalog, scfg);

      std::vector<Candidate> expansions;
      expansions.reserve(dist.size());
      for (const auto& [tok, lm_inc] : dist) {
        const TrieNode& child = *parent.node->children.at(tok);
        const double tf_inc = uses_assistant ? masses->step_logratio(*parent.node, tok) : 0.0;
        const double sel_inc = step_fusion ? fuse(config.fusion_alpha, lm_inc, tf_inc) : lm_inc;

        Candidate cand;
        cand.increment = sel_inc;
        cand.beam.selection = parent.selection + sel_inc;
        cand.beam.hyp.lm_score = parent.hyp.lm_score + lm_inc;
        cand.beam.hyp.tf_score = accumulate_tf(parent.hyp.tf_score, tf_inc);
        if (tok == Catalog::kEndOfItem) {
          cand.beam.hyp.tokens = parent.hyp.tokens;
          cand.beam.hyp.finished = true;
          cand.beam.node = &child;
        } else {
          cand.beam.hyp.tokens = parent.hyp.tokens;
          cand.beam.hyp.tokens.push_back(tok);
          cand.beam.node = &child;
        }
        expansions.push_back(std::move(cand));
      }

      // Per-hypothesis top-k by the step increment (ties toward the smaller
      // token sequence, i.e. the smaller appended token).
      std::sort(expansions.begin(), expansions.end(), [](const Candidate& a, const Candidate& b) {
        if (a.increment != b.increment) return a.increment > b.increment;
        return a.beam.hyp.tokens < b.beam.hyp.tokens;
      });
      const std::size_t keep = std::min<std::size_t>(expansions.size(),
                                                     static_cast<std::size_t>(config.expansion_width));
      for (std::size_t i = 0; i < keep; ++i) pool.push_back(std::move(expansions[i]));
    }

    // Hypotheses that can never finish with a finite score are dropped now.
    // Covers both fusion modes: a -inf selection, or a -inf final score in
    // final_rerank mode where the selection side stays finite.
    pool.erase(std::remove_if(pool.begin(), pool.end(),
                              [&config](const Candidate& c) {
                                return std::isinf(c.beam.selection) ||
                                       std::isinf(combined_score(c.beam.hyp, config));
                              }),
               pool.end());
    if (pool.empty()) {
      if (finished.empty()) {
        throw Error("decode: every candidate hypothesis has score -inf "
                    "(degenerate assistant mask?)");
      }
      break;
    }

    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
      return worse_by_selection(b.beam, a.beam);
    });
    const std::size_t survivors =
        std::min<std::size_t>(pool.size(), static_cast<std::size_t>(config.beam_width));

    live.clear();
    for (std::size_t i = 0; i < survivors; ++i) {
      Beam& b = pool[i].beam;
      if (b.hyp.finished) {
        finished.push_back(std::move(b));
      } else {
        live.push_back(std::move(b));
      }
    }
    if (finished.size() >= finished_target) break;
  }

  if (finished.empty()) {
    throw Error("decode: no finished hypothesis within max_steps=" + std::to_string(max_steps));
  }

  std::sort(finished.begin(), finished.end(), [&config](const Beam& a, const Beam& b) {
    const double sa = combined_score(a.hyp, config);
    const double sb = combined_score(b.hyp, config);
    if (sa != sb) return sa > sb;
    return a.hyp.tokens < b.hyp.tokens;
  });

  RecommendationList out;
  const std::size_t n = std::min<std::size_t>(finished.size(),
                                              static_cast<std::size_t>(config.beam_width));
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Beam& b = finished[i];
    out.push_back(ScoredItem{*b.node->terminal_item, combined_score(b.hyp, config)});
  }
  return out;
}

RecommendationList brute_force_rank(const Catalog& catalog, const Scorer& scorer,
                                    const DecodingContext& context,
                                    const AssistantDistribution* assistant,
                                    const DecodeConfig& raw_config,
                                    const ScorerConfig& scorer_defaults) {
  if (catalog.size() > 10000) {
    throw Error("brute_force_rank: catalog exceeds the 10,000-item guard");
  }
  const DecodeConfig config = raw_config.normalized();
  const bool uses_assistant = config.strategy == Strategy::d3 && config.fusion_alpha < 1.0;
  if (uses_assistant && !assistant) {
    throw Error("d3 with alpha < 1 requires an assistant distribution");
  }

  ScorerConfig scfg = scorer_defaults;
  scfg.temperature = config.temperature;

  std::optional<PrefixMassCache> masses;
  if (uses_assistant) masses.emplace(catalog, *assistant);

  struct Entry {
    Hypothesis hyp;
    ItemId id;
    double score;
  };
  std::vector<Entry> entries;
  entries.reserve(catalog.size());

  for (const auto& [id, item] : catalog.items()) {
    Hypothesis h;
    const TrieNode* node = &catalog.root();
    TokenSeq path = item.tokens;
    path.push_back(Catalog::kEndOfItem);
    TokenSeq prefix;
    for (const Token& tok : path) {
      const TokenDistribution dist = scorer.next_token_logprobs(context, prefix, catalog, scfg);
      h.lm_score += dist.at(tok);
      if (uses_assistant) {
        h.tf_score = accumulate_tf(h.tf_score, masses->step_logratio(*node, tok));
      }
      node = node->children.at(tok).get();
      if (tok != Catalog::kEndOfItem) prefix.push_back(tok);
    }
    h.tokens = item.tokens;
    h.finished = true;
    entries.push_back(Entry{std::move(h), id, 0.0});
    entries.back().score = combined_score(entries.back().hyp, config);
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.hyp.tokens < b.hyp.tokens;
  });

  RecommendationList out;
  out.reserve(entries.size());
  for (const Entry& e : entries) out.push_back(ScoredItem{e.id, e.score});
  return out;
}

}  // namespace recdec
