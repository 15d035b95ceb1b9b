#include "recdec/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "recdec/assistant.hpp"

namespace recdec {

const char* kCsvHeader =
    "dataset,strategy,alpha,lambda,T,B,k,hr@5,hr@10,ndcg@5,ndcg@10,pairwise_bleu,"
    "category_entropy,history_bleu,category_repeat_ratio,target_group_ratio,seed,config_hash";

namespace {

const char* to_string(FusionMode m) {
  return m == FusionMode::per_step ? "per-step" : "final-rerank";
}

FusionMode fusion_mode_from_string(const std::string& s) {
  if (s == "per-step" || s == "per_step") return FusionMode::per_step;
  if (s == "final-rerank" || s == "final_rerank") return FusionMode::final_rerank;
  throw Error("unknown fusion mode: " + s);
}

/// Shortest round-trip decimal form, for parameter columns.
std::string fmt_param(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Fixed six decimals, for metric columns.
std::string fmt_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return std::string(buf);
}

std::string fmt_metric_opt(const std::optional<double>& v) {
  return v ? fmt_metric(*v) : std::string();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

SyntheticSpec synthetic_from_json(const nlohmann::json& j) {
  SyntheticSpec spec;
  spec.categories = j.value("categories", spec.categories);
  spec.series_per_category = j.value("series_per_category", spec.series_per_category);
  spec.items_per_series = j.value("items_per_series", spec.items_per_series);
  spec.name_token_length = j.value("name_token_length", spec.name_token_length);
  spec.users = j.value("users", spec.users);
  spec.history_length = j.value("history_length", spec.history_length);
  spec.category_skew = j.value("category_skew", spec.category_skew);
  return spec;
}

nlohmann::json synthetic_to_json(const SyntheticSpec& spec) {
  return {{"categories", spec.categories},
          {"series_per_category", spec.series_per_category},
          {"items_per_series", spec.items_per_series},
          {"name_token_length", spec.name_token_length},
          {"users", spec.users},
          {"history_length", spec.history_length},
          {"category_skew", spec.category_skew}};
}

}  // namespace

std::uint64_t fnv1a_hash(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (!j.is_object()) throw Error("experiment config must be a JSON object");

  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    cfg.dataset_name = d.value("name", cfg.dataset_name);
    if (d.contains("synthetic")) cfg.synthetic = synthetic_from_json(d["synthetic"]);
    if (d.contains("catalog")) cfg.catalog_path = d["catalog"].get<std::string>();
    if (d.contains("interactions")) cfg.interactions_path = d["interactions"].get<std::string>();
  }
  if (j.contains("split")) {
    const auto& s = j["split"];
    if (s.contains("ratios")) {
      const auto& r = s["ratios"];
      if (!r.is_array() || r.size() != 3) throw Error("split.ratios must be an array of 3");
      for (int i = 0; i < 3; ++i) cfg.split.ratios[static_cast<std::size_t>(i)] = r[i].get<double>();
    }
    cfg.split.max_history = s.value("max_history", cfg.split.max_history);
    cfg.split.per_user_fallback = s.value("per_user_fallback", cfg.split.per_user_fallback);
  }
  cfg.eval_split = j.value("eval_split", cfg.eval_split);
  cfg.assistant = j.value("assistant", cfg.assistant);
  if (j.contains("scorer")) {
    const auto& s = j["scorer"];
    cfg.scorer_kind = s.value("kind", cfg.scorer_kind);
    if (s.contains("path")) cfg.scorer_table_path = s["path"].get<std::string>();
    cfg.copy_bonus = s.value("copy_bonus", cfg.copy_bonus);
  }
  cfg.beam_width = j.value("beam", cfg.beam_width);
  cfg.expansion_width = j.value("expand_k", cfg.expansion_width);
  cfg.top_k = j.value("topk", cfg.top_k);
  cfg.max_steps = j.value("max_steps", cfg.max_steps);
  if (j.contains("fusion_mode")) {
    cfg.fusion_mode = fusion_mode_from_string(j["fusion_mode"].get<std::string>());
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out_dir = j.value("out", cfg.out_dir);

  if (!j.contains("grid") || !j["grid"].is_array() || j["grid"].empty()) {
    throw Error("experiment config: strategy grid is empty");
  }
  for (const auto& c : j["grid"]) {
    GridCell cell;
    cell.strategy = strategy_from_string(c.at("strategy").get<std::string>());
    cell.alpha = c.value("alpha", cell.alpha);
    cell.lambda = c.value("lambda", cell.lambda);
    cell.temperature = c.value("temp", cell.temperature);
    if (c.contains("mask_category")) cell.mask_category = c["mask_category"].get<std::string>();
    cfg.grid.push_back(std::move(cell));
  }
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json dataset{{"name", dataset_name}};
  if (synthetic) {
    nlohmann::json s = synthetic_to_json(*synthetic);
    dataset["synthetic"] = s;
  }
  if (catalog_path) dataset["catalog"] = *catalog_path;
  if (interactions_path) dataset["interactions"] = *interactions_path;

  nlohmann::json grid_json = nlohmann::json::array();
  for (const GridCell& c : grid) {
    nlohmann::json cell{{"strategy", recdec::to_string(c.strategy)},
                        {"alpha", c.alpha},
                        {"lambda", c.lambda},
                        {"temp", c.temperature}};
    if (c.mask_category) cell["mask_category"] = *c.mask_category;
    grid_json.push_back(std::move(cell));
  }

  nlohmann::json scorer{{"kind", scorer_kind}, {"copy_bonus", copy_bonus}};
  if (scorer_table_path) scorer["path"] = *scorer_table_path;

  return {{"dataset", dataset},
          {"split",
           {{"ratios", {split.ratios[0], split.ratios[1], split.ratios[2]}},
            {"max_history", split.max_history},
            {"per_user_fallback", split.per_user_fallback}}},
          {"eval_split", eval_split},
          {"assistant", assistant},
          {"scorer", scorer},
          {"beam", beam_width},
          {"expand_k", expansion_width},
          {"topk", top_k},
          {"max_steps", max_steps},
          {"fusion_mode", to_string(fusion_mode)},
          {"seed", seed},
          {"grid", grid_json}};
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open experiment config: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error("experiment config is not valid JSON: " + path);
  return ExperimentConfig::from_json(j);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.grid.empty()) throw Error("experiment config: strategy grid is empty");
  if (config.eval_split != "test" && config.eval_split != "valid") {
    throw Error("eval_split must be 'test' or 'valid'");
  }
  if (config.top_k < 1 || config.top_k > config.beam_width) {
    throw Error("topk must be in [1, beam]");
  }

  // Dataset.
  std::optional<Catalog> catalog;
  std::vector<UserRecord> users;
  if (config.synthetic) {
    SyntheticSpec spec = *config.synthetic;
    spec.seed = config.seed;
    SyntheticDataset data = generate_synthetic(spec);
    catalog.emplace(std::move(data.catalog));
    users = std::move(data.users);
  } else if (config.catalog_path && config.interactions_path) {
    IngestResult in = ingest(*config.catalog_path, *config.interactions_path);
    catalog.emplace(std::move(in.catalog));
    users = std::move(in.users);
  } else {
    throw Error("experiment config needs either dataset.synthetic or dataset.catalog + "
                "dataset.interactions");
  }

  const SplitDataset split = temporal_split(users, config.split);
  const std::vector<EvalCase>& cases =
      config.eval_split == "valid" ? split.valid_cases : split.test_cases;
  if (cases.empty()) throw Error("no evaluation cases in the " + config.eval_split + " split");

  // Scorer.
  SyntheticCopyLM copy_lm;
  std::optional<TableScorer> table;
  const Scorer* scorer = &copy_lm;
  if (config.scorer_kind == "table") {
    if (!config.scorer_table_path) throw Error("table scorer requires scorer.path");
    table.emplace(TableScorer::load(*config.scorer_table_path));
    scorer = &*table;
  } else if (config.scorer_kind != "copy_lm") {
    throw Error("unknown scorer kind: " + config.scorer_kind);
  }
  ScorerConfig scorer_defaults;
  scorer_defaults.copy_bonus = config.copy_bonus;

  // Assistant, trained on the train split only; built lazily.
  std::unique_ptr<TextFreeModel> assistant_model;
  auto assistant = [&]() -> const TextFreeModel& {
    if (!assistant_model) {
      if (config.assistant == "popularity") {
        std::vector<ItemId> flat;
        for (const UserRecord& u : split.train_users) {
          for (const Interaction& it : u.interactions) flat.push_back(it.item);
        }
        assistant_model = train_popularity(*catalog, flat);
      } else if (config.assistant == "markov") {
        std::vector<std::vector<ItemId>> seqs;
        for (const UserRecord& u : split.train_users) {
          std::vector<ItemId> seq;
          for (const Interaction& it : u.interactions) seq.push_back(it.item);
          seqs.push_back(std::move(seq));
        }
        assistant_model = train_markov(*catalog, seqs);
      } else {
        throw Error("unknown assistant kind: " + config.assistant);
      }
    }
    return *assistant_model;
  };

  // Hash the canonical config form (out_dir excluded: where results land
  // must not change what they claim to be).
  const std::uint64_t config_hash = fnv1a_hash(config.to_json().dump());

  ExperimentResult result;
  result.config_hash = config_hash;
  result.catalog_fingerprint = catalog->fingerprint();

  for (const GridCell& cell : config.grid) {
    DecodeConfig dc;
    dc.strategy = cell.strategy;
    dc.beam_width = config.beam_width;
    dc.expansion_width = config.expansion_width;
    dc.fusion_alpha = cell.alpha;
    dc.length_penalty = cell.lambda;
    dc.temperature = cell.temperature;
    dc.max_steps = config.max_steps;
    dc.fusion_mode = config.fusion_mode;

    const bool uses_assistant = cell.strategy == Strategy::d3 && cell.alpha < 1.0;
    std::optional<std::set<ItemId>> group;
    if (cell.mask_category) {
      const std::vector<ItemId> in_cat = catalog->items_in_category(*cell.mask_category);
      if (in_cat.empty()) {
        throw Error("mask category '" + *cell.mask_category + "' matches no catalog item");
      }
      group.emplace(in_cat.begin(), in_cat.end());
    }

    std::vector<EvalRecord> records;
    records.reserve(cases.size());
    for (const EvalCase& c : cases) {
      DecodingContext ctx = DecodingContext::from_history(*catalog, c.user, c.history);
      std::optional<AssistantDistribution> dist;
      if (uses_assistant) {
        dist = assistant().score_items(c.history);
        if (group) dist = apply_group_mask(std::move(*dist), *group);
      }
      RecommendationList recs;
      try {
        recs = decode(*catalog, *scorer, ctx, dist ? &*dist : nullptr, dc, scorer_defaults);
      } catch (const Error& e) {
        throw Error("decode failed for case user=" + c.user + " ts=" + std::to_string(c.ts) +
                    ": " + e.what());
      }
      if (static_cast<int>(recs.size()) > config.top_k) {
        recs.resize(static_cast<std::size_t>(config.top_k));
      }
      records.push_back(EvalRecord{c.user, std::move(recs), c.target, c.history});
    }

    CellResult cr;
    cr.cell = cell;
    cr.cases = static_cast<int>(records.size());
    cr.report = aggregate_metrics(records, *catalog, cell.mask_category);
    if (cell.mask_category) {
      std::vector<EvalRecord> in_group;
      for (const EvalRecord& r : records) {
        if (catalog->item(r.target).category == *cell.mask_category) in_group.push_back(r);
      }
      if (!in_group.empty()) {
        cr.hr10_in_group = aggregate_metrics(in_group, *catalog).hr10;
      }
    }
    result.cells.push_back(std::move(cr));
  }

  // Reports.
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  result.csv_path = (fs::path(config.out_dir) / "results.csv").string();
  result.summary_path = (fs::path(config.out_dir) / "summary.json").string();

  std::ofstream csv(result.csv_path);
  if (!csv) throw Error("cannot write " + result.csv_path);
  csv << kCsvHeader << "\n";
  for (const CellResult& cr : result.cells) {
    const DecodeConfig normalized = [&] {
      DecodeConfig dc;
      dc.strategy = cr.cell.strategy;
      dc.fusion_alpha = cr.cell.alpha;
      dc.length_penalty = cr.cell.lambda;
      dc.temperature = cr.cell.temperature;
      return dc.normalized();
    }();
    csv << config.dataset_name << ',' << recdec::to_string(cr.cell.strategy) << ','
        << fmt_param(normalized.fusion_alpha) << ',' << fmt_param(normalized.length_penalty) << ','
        << fmt_param(normalized.temperature) << ',' << config.beam_width << ','
        << config.expansion_width << ',' << fmt_metric(cr.report.hr5) << ','
        << fmt_metric(cr.report.hr10) << ',' << fmt_metric(cr.report.ndcg5) << ','
        << fmt_metric(cr.report.ndcg10) << ',' << fmt_metric_opt(cr.report.pairwise_bleu) << ','
        << fmt_metric(cr.report.category_entropy_bits) << ','
        << fmt_metric_opt(cr.report.history_bleu) << ','
        << fmt_metric(cr.report.category_repeat_ratio) << ','
        << fmt_metric_opt(cr.report.target_group_ratio) << ',' << config.seed << ','
        << hex64(config_hash) << "\n";
  }
  csv.close();

  nlohmann::json summary;
  summary["config"] = config.to_json();
  summary["config_hash"] = hex64(config_hash);
  summary["catalog_fingerprint"] = hex64(result.catalog_fingerprint);
  summary["catalog_items"] = catalog->size();
  summary["eval_cases"] = cases.size();
  summary["skipped_empty_history"] = split.skipped_empty_history;
  nlohmann::json rows = nlohmann::json::array();
  for (const CellResult& cr : result.cells) {
    DecodeConfig cell_dc;
    cell_dc.strategy = cr.cell.strategy;
    cell_dc.fusion_alpha = cr.cell.alpha;
    cell_dc.length_penalty = cr.cell.lambda;
    cell_dc.temperature = cr.cell.temperature;
    const DecodeConfig eff = cell_dc.normalized();
    nlohmann::json row{{"strategy", recdec::to_string(cr.cell.strategy)},
                       {"alpha", eff.fusion_alpha},
                       {"lambda", eff.length_penalty},
                       {"temp", eff.temperature},
                       {"cases", cr.cases},
                       {"hr@5", cr.report.hr5},
                       {"hr@10", cr.report.hr10},
                       {"ndcg@5", cr.report.ndcg5},
                       {"ndcg@10", cr.report.ndcg10},
                       {"category_entropy", cr.report.category_entropy_bits},
                       {"category_repeat_ratio", cr.report.category_repeat_ratio}};
    if (cr.report.pairwise_bleu) row["pairwise_bleu"] = *cr.report.pairwise_bleu;
    if (cr.report.history_bleu) row["history_bleu"] = *cr.report.history_bleu;
    if (cr.report.target_group_ratio) row["target_group_ratio"] = *cr.report.target_group_ratio;
    if (cr.cell.mask_category) row["mask_category"] = *cr.cell.mask_category;
    if (cr.hr10_in_group) row["hr@10_in_group"] = *cr.hr10_in_group;
    rows.push_back(std::move(row));
  }
  summary["rows"] = rows;
  std::ofstream sj(result.summary_path);
  if (!sj) throw Error("cannot write " + result.summary_path);
  sj << summary.dump(2) << "\n";

  return result;
}

}  // namespace recdec
