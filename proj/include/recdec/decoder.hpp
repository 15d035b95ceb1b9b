#pragma once

#include <string>
#include <vector>

#include "recdec/assistant.hpp"
#include "recdec/catalog.hpp"
#include "recdec/scorer.hpp"

namespace recdec {

enum class Strategy {
  baseline,       // unnormalized beam search, length normalization at the end
  baseline_temp,  // baseline with temperature scaling
  d3,             // no length normalization, per-step text-free fusion
};

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

enum class FusionMode {
  per_step,      // hypotheses selected by the fused score at every step
  final_rerank,  // selected by the language-model score, fused only at the end
};

struct DecodeConfig {
  Strategy strategy = Strategy::baseline;
  int beam_width = 10;          // B
  int expansion_width = 10;     // k: per-hypothesis top-k continuations
  double fusion_alpha = 1.0;    // alpha in [0,1]; d3 only
  double length_penalty = 1.0;  // lambda >= 0; baseline only
  double temperature = 1.0;     // T > 0
  int max_steps = 0;            // 0 -> longest item token count + 1
  int finished_target = 0;      // 0 -> 2 * beam_width
  FusionMode fusion_mode = FusionMode::per_step;

  /// Strategy forcings: d3 -> lambda = 0; baseline/baseline_temp -> alpha = 1;
  /// baseline -> T = 1. Validates ranges; throws Error when invalid.
  DecodeConfig normalized() const;
};

/// A partial or complete token sequence under search. `tokens` never
/// contains the end-of-item marker, so h_L is tokens.size().
struct Hypothesis {
  TokenSeq tokens;
  double lm_score = 0.0;  // accumulated log p over steps taken
  double tf_score = 0.0;  // accumulated text-free step log-ratios
  bool finished = false;

  int length() const { return static_cast<int>(tokens.size()); }
};

struct ScoredItem {
  ItemId id;
  double score;
};

/// Final recommendations, best first; scores non-increasing, items distinct.
using RecommendationList = std::vector<ScoredItem>;

/// Final ranking score of a hypothesis.
///   d3:        alpha * lm + (1 - alpha) * tf   (no length normalization)
///   baseline:  lm / h_L^lambda once finished, plain lm while generating
double combined_score(const Hypothesis& h, const DecodeConfig& config);

/**
 * Catalog-constrained beam search.
 *
 * Every live hypothesis expands over its top-k legal continuations ranked
 * by the selection increment (fused for d3 per-step mode, plain LM log
 * probability otherwise); the top B expansions survive; survivors that
 * emitted the end-of-item marker move to the finished pool and release
 * their beam slots. The loop ends when the finished pool reaches
 * finished_target, no live hypotheses remain, or max_steps is hit. Output
 * is the top B finished hypotheses by combined_score; ties break toward
 * the lexicographically smaller token sequence.
 *
 * `assistant` may be null unless strategy is d3 with alpha < 1.
 * `scorer_defaults` forwards scorer knobs (copy_bonus); its temperature is
 * superseded by the normalized config temperature.
 */
RecommendationList decode(const Catalog& catalog, const Scorer& scorer,
                          const DecodingContext& context, const AssistantDistribution* assistant,
                          const DecodeConfig& config, const ScorerConfig& scorer_defaults = {});

/// Exact oracle over the finite constrained space: scores every item by
/// walking its full path and returns the complete ranking with the same
/// tie-break as decode. Guarded to catalogs of at most 10,000 items.
RecommendationList brute_force_rank(const Catalog& catalog, const Scorer& scorer,
                                    const DecodingContext& context,
                                    const AssistantDistribution* assistant,
                                    const DecodeConfig& config,
                                    const ScorerConfig& scorer_defaults = {});

}  // namespace recdec
