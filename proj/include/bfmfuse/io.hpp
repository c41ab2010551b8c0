#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "bfmfuse/dataset.hpp"
#include "bfmfuse/errors.hpp"
#include "bfmfuse/measure.hpp"
#include "bfmfuse/metrics.hpp"
#include "bfmfuse/objective.hpp"
#include "bfmfuse/optimizer.hpp"
#include "bfmfuse/random.hpp"
#include "bfmfuse/synthetic.hpp"

/*!
  \file io.hpp
  \brief JSON and CSV encodings of measures, datasets and results

  Measures:  {"source_count": S, "values": [v_0, ..., v_{2^S-1}]}
             {"source_count": S, "minimal_winning": [[i, j], ...]}  (BFM only,
             zero-based source indices)
  Datasets:  {"source_count": S,
              "bags": [{"label": 0|1, "candidate_sets": [[[s_1..s_S], ...], ...]}],
              "instance_truth": [[[0|1, ...], ...], ...]}   (optional)
*/

namespace bfmfuse {

using json = nlohmann::json;

inline constexpr const char* tool_name = "bfmfuse";
inline constexpr const char* tool_version = "0.1.0";

// ---------------------------------------------------------------------------
// Files

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Refuses to replace an existing file unless `force`.
inline void write_text_file(const std::filesystem::path& path, const std::string& content,
                            bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw IoError(path.string() + " exists; pass --force to overwrite");
  }
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

/// Parses JSON text; syntax errors report line and column.
inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": JSON parse error: " + e.what());
  }
}

inline json load_json(const std::filesystem::path& path) {
  return parse_json_text(read_text_file(path), path.string());
}

/// Shortest representation that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[std::size_t(i)] = digits[h & 15];
  return out;
}

inline std::string config_hash(const json& config) {
  return hash_hex(detail::fnv1a(config.dump()));
}

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

inline const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema_error(where, std::string("missing \"") + key + "\"");
  return *it;
}

inline int require_int(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number_integer()) schema_error(where + "." + key, "expected an integer");
  return v.get<int>();
}

inline double require_number(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) schema_error(where + "." + key, "expected a number");
  return v.get<double>();
}

inline const json& require_array(const json& v, const std::string& where) {
  if (!v.is_array()) schema_error(where, "expected an array");
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Measures

inline json to_json(const BinaryFuzzyMeasure& g) {
  json values = json::array();
  for (std::size_t m = 0; m < g.size(); ++m) values.push_back(g.test(Mask(m)) ? 1 : 0);
  return {{"source_count", g.source_count()}, {"values", std::move(values)}};
}

inline json to_antichain_json(const BinaryFuzzyMeasure& g) {
  json sets = json::array();
  for (const auto& c : minimal_winning_coalitions(g)) sets.push_back(c.members());
  return {{"source_count", g.source_count()}, {"minimal_winning", std::move(sets)}};
}

inline json to_json(const RealFuzzyMeasure& g) {
  return {{"source_count", g.source_count()}, {"values", g.values()}};
}

using AnyMeasure = std::variant<BinaryFuzzyMeasure, RealFuzzyMeasure>;

inline int source_count_of(const AnyMeasure& g) {
  return std::visit([](const auto& m) { return m.source_count(); }, g);
}

/// Accepts the full-table form (integer 0/1 values make a BFM, anything
/// else a real measure) or the BFM antichain form.
inline AnyMeasure measure_from_json(const json& j, const std::string& where = "measure") {
  const int s = detail::require_int(j, "source_count", where);
  check_source_count(s);
  if (j.contains("minimal_winning")) {
    std::vector<SourceSet> sets;
    const json& arr = detail::require_array(j.at("minimal_winning"), where + ".minimal_winning");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string at = where + ".minimal_winning[" + std::to_string(k) + "]";
      std::vector<int> members;
      for (const auto& v : detail::require_array(arr[k], at)) {
        if (!v.is_number_integer()) detail::schema_error(at, "expected source indices");
        members.push_back(v.get<int>());
      }
      sets.push_back(SourceSet::of(s, members));
    }
    return from_minimal_winning(s, sets);
  }
  const json& arr = detail::require_array(detail::require(j, "values", where), where + ".values");
  bool binary = true;
  for (const auto& v : arr) {
    if (!v.is_number()) detail::schema_error(where + ".values", "expected numbers");
    if (!v.is_number_integer()) binary = false;
  }
  if (binary) {
    std::vector<std::uint8_t> bits;
    for (const auto& v : arr) {
      const auto x = v.get<long long>();
      bits.push_back(x == 0 ? 0 : x == 1 ? 1 : 2);  // 2 trips the range check
    }
    return BinaryFuzzyMeasure::from_values(s, bits);
  }
  return RealFuzzyMeasure::from_values(s, arr.get<std::vector<double>>());
}

inline BinaryFuzzyMeasure binary_measure_from_json(const json& j) {
  auto g = measure_from_json(j);
  if (auto* b = std::get_if<BinaryFuzzyMeasure>(&g)) return std::move(*b);
  throw ValidationError("expected a binary measure (0/1 values)");
}

// ---------------------------------------------------------------------------
// Datasets

inline json to_json(const Dataset& data) {
  json bags = json::array();
  for (const auto& bag : data.bags) {
    json sets = json::array();
    for (const auto& set : bag.candidate_sets) sets.push_back(set.instances);
    bags.push_back({{"label", static_cast<int>(bag.label)}, {"candidate_sets", std::move(sets)}});
  }
  json out = {{"source_count", data.source_count}, {"bags", std::move(bags)}};
  if (data.has_truth()) {
    json truth = json::array();
    for (const auto& bag : data.bags) {
      json per_bag = json::array();
      for (const auto& set : bag.candidate_sets) per_bag.push_back(set.truth);
      truth.push_back(std::move(per_bag));
    }
    out["instance_truth"] = std::move(truth);
  }
  return out;
}

/// One bag per line; deterministic for a given dataset.
inline std::string dataset_to_string(const Dataset& data) {
  const json j = to_json(data);
  std::string out = "{\"source_count\":" + std::to_string(data.source_count) + ",\"bags\":[\n";
  const auto& bags = j.at("bags");
  for (std::size_t b = 0; b < bags.size(); ++b) {
    out += bags[b].dump();
    out += b + 1 < bags.size() ? ",\n" : "\n";
  }
  out += "]";
  if (j.contains("instance_truth")) {
    out += ",\"instance_truth\":[\n";
    const auto& truth = j.at("instance_truth");
    for (std::size_t b = 0; b < truth.size(); ++b) {
      out += truth[b].dump();
      out += b + 1 < truth.size() ? ",\n" : "\n";
    }
    out += "]";
  }
  out += "}\n";
  return out;
}

/// Decodes and validates; errors name the offending bag / set / instance.
inline Dataset dataset_from_json(const json& j) {
  Dataset data;
  data.source_count = detail::require_int(j, "source_count", "dataset");
  check_source_count(data.source_count);
  const json& bags = detail::require_array(detail::require(j, "bags", "dataset"), "bags");
  for (std::size_t b = 0; b < bags.size(); ++b) {
    const std::string at = "bags[" + std::to_string(b) + "]";
    Bag bag;
    const int label = detail::require_int(bags[b], "label", at);
    if (label != 0 && label != 1) detail::schema_error(at + ".label", "must be 0 or 1");
    bag.label = static_cast<BagLabel>(label);
    const json& sets = detail::require_array(detail::require(bags[b], "candidate_sets", at),
                                             at + ".candidate_sets");
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const std::string sat = at + ".candidate_sets[" + std::to_string(s) + "]";
      CandidateSet set;
      for (const auto& inst : detail::require_array(sets[s], sat)) {
        const std::string iat = sat + "[" + std::to_string(set.instances.size()) + "]";
        Instance h;
        for (const auto& v : detail::require_array(inst, iat)) {
          if (!v.is_number()) detail::schema_error(iat, "expected numbers");
          h.push_back(v.get<double>());
        }
        set.instances.push_back(std::move(h));
      }
      bag.candidate_sets.push_back(std::move(set));
    }
    data.bags.push_back(std::move(bag));
  }
  if (j.contains("instance_truth") && !j.at("instance_truth").is_null()) {
    const json& truth = detail::require_array(j.at("instance_truth"), "instance_truth");
    if (truth.size() != data.bags.size()) {
      detail::schema_error("instance_truth", "must have one entry per bag");
    }
    for (std::size_t b = 0; b < truth.size(); ++b) {
      const std::string at = "instance_truth[" + std::to_string(b) + "]";
      const json& sets = detail::require_array(truth[b], at);
      auto& bag_sets = data.bags[b].candidate_sets;
      if (sets.size() != bag_sets.size()) {
        detail::schema_error(at, "must have one entry per candidate set");
      }
      for (std::size_t s = 0; s < sets.size(); ++s) {
        for (const auto& v : detail::require_array(sets[s], at + "[" + std::to_string(s) + "]")) {
          if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
            detail::schema_error(at + "[" + std::to_string(s) + "]", "labels must be 0 or 1");
          }
          bag_sets[s].truth.push_back(static_cast<std::uint8_t>(v.get<int>()));
        }
      }
    }
  }
  validate_dataset(data);
  return data;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  const json j = load_json(path);
  try {
    return dataset_from_json(j);
  } catch (const StructuralError& e) {
    throw StructuralError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline void save_dataset(const std::filesystem::path& path, const Dataset& data, bool force) {
  validate_dataset(data);
  write_text_file(path, dataset_to_string(data), force);
}

// ---------------------------------------------------------------------------
// Synthetic specs

inline json to_json(const SynthSpec& spec) {
  return {{"source_count", spec.source_count},
          {"n_pos_bags", spec.n_pos_bags},
          {"n_neg_bags", spec.n_neg_bags},
          {"sets_per_bag", {spec.sets_per_bag.min, spec.sets_per_bag.max}},
          {"instances_per_set", {spec.instances_per_set.min, spec.instances_per_set.max}},
          {"noise_sigma", spec.noise_sigma},
          {"truth_measure", to_antichain_json(spec.truth_measure)},
          {"seed", spec.seed}};
}

inline SynthSpec synth_spec_from_json(const json& j) {
  auto range = [&](const char* key) {
    const json& r = detail::require_array(detail::require(j, key, "spec"), std::string("spec.") + key);
    if (r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
      detail::schema_error(std::string("spec.") + key, "expected [min, max] integers");
    }
    return IntRange{r[0].get<int>(), r[1].get<int>()};
  };
  const json& seed = detail::require(j, "seed", "spec");
  if (!seed.is_number_unsigned()) detail::schema_error("spec.seed", "expected a non-negative integer");
  SynthSpec spec{detail::require_int(j, "source_count", "spec"),
                 detail::require_int(j, "n_pos_bags", "spec"),
                 detail::require_int(j, "n_neg_bags", "spec"),
                 range("sets_per_bag"),
                 range("instances_per_set"),
                 detail::require_number(j, "noise_sigma", "spec"),
                 binary_measure_from_json(detail::require(j, "truth_measure", "spec")),
                 seed.get<std::uint64_t>()};
  validate_spec(spec);
  return spec;
}

// ---------------------------------------------------------------------------
// Results

inline json to_json(const ObjectiveBreakdown& b) {
  json per_bag = json::array();
  for (const auto& c : b.per_bag) {
    per_bag.push_back({{"bag", c.bag_index},
                       {"label", static_cast<int>(c.label)},
                       {"contribution", c.contribution},
                       {"selected_set", c.selected_set}});
  }
  return {{"total", b.total},
          {"negative_term", b.negative_term},
          {"positive_term", b.positive_term},
          {"per_bag", std::move(per_bag)}};
}

/// Everything that influences results; `threads` does not, so it is left out.
inline json to_json(const EAConfig& cfg) {
  return {{"population_size", cfg.population_size},
          {"elite_count", cfg.elite_count},
          {"small_mutation_rate", cfg.small_mutation_rate},
          {"large_mutation_rate", cfg.large_mutation_rate},
          {"crossover_rate", cfg.crossover_rate},
          {"max_generations", cfg.max_generations},
          {"stall_generations", cfg.stall_generations},
          {"fitness_tolerance", cfg.fitness_tolerance},
          {"init_density", cfg.init_density},
          {"seed", cfg.seed},
          {"time_cap_seconds",
           cfg.time_cap_seconds ? json(*cfg.time_cap_seconds) : json(nullptr)}};
}

/// Overrides fields of `base` with those present in `j`.
inline EAConfig ea_config_from_json(const json& j, EAConfig base = {}) {
  if (!j.is_object()) detail::schema_error("config", "expected an object");
  auto get_int = [&](const char* key, int& out) {
    if (j.contains(key)) out = detail::require_int(j, key, "config");
  };
  auto get_num = [&](const char* key, double& out) {
    if (j.contains(key)) out = detail::require_number(j, key, "config");
  };
  get_int("population_size", base.population_size);
  get_int("elite_count", base.elite_count);
  get_num("small_mutation_rate", base.small_mutation_rate);
  get_num("large_mutation_rate", base.large_mutation_rate);
  get_num("crossover_rate", base.crossover_rate);
  get_int("max_generations", base.max_generations);
  get_int("stall_generations", base.stall_generations);
  get_num("fitness_tolerance", base.fitness_tolerance);
  get_num("init_density", base.init_density);
  get_int("threads", base.threads);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) detail::schema_error("config.seed", "expected a non-negative integer");
    base.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("time_cap_seconds")) {
    const json& v = j.at("time_cap_seconds");
    if (v.is_null()) {
      base.time_cap_seconds.reset();
    } else {
      base.time_cap_seconds = detail::require_number(j, "time_cap_seconds", "config");
    }
  }
  base.validate();
  return base;
}

inline json to_json(const TrainResult<BinaryFuzzyMeasure>& r) {
  return {{"best_objective", r.best_objective},
          {"generations_run", r.generations_run},
          {"wall_time_seconds", r.wall_time_seconds},
          {"terminated_by", to_string(r.terminated_by)},
          {"evaluations", r.evaluations},
          {"objective_trace", r.objective_trace},
          {"measure", to_json(r.best_measure)},
          {"measure_antichain", to_antichain_json(r.best_measure)}};
}

inline json to_json(const TrainResult<RealFuzzyMeasure>& r) {
  return {{"best_objective", r.best_objective},
          {"generations_run", r.generations_run},
          {"wall_time_seconds", r.wall_time_seconds},
          {"terminated_by", to_string(r.terminated_by)},
          {"evaluations", r.evaluations},
          {"objective_trace", r.objective_trace},
          {"measure", to_json(r.best_measure)}};
}

/// psnr is written as the string "inf" when rmse is 0.
inline json to_json(const ScoreReport& r) {
  json points = json::array();
  for (const auto& p : r.roc_points) points.push_back({p.fpr, p.tpr});
  return {{"auc", r.auc ? json(*r.auc) : json(nullptr)},
          {"rmse", r.rmse},
          {"psnr", std::isinf(r.psnr) ? json("inf") : json(r.psnr)},
          {"positives", r.positives},
          {"negatives", r.negatives},
          {"roc_points", std::move(points)}};
}

inline std::string roc_to_csv(std::span<const RocPoint> points) {
  std::string out = "fpr,tpr\n";
  for (const auto& p : points) out += format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
  return out;
}

/// One row per instance in storage order.
inline std::string fusion_to_csv(const Dataset& data, const FusionMap& map) {
  if (map.scores.size() != data.instance_count()) {
    throw StructuralError("fusion map does not match the dataset");
  }
  const bool truth = data.has_truth();
  std::string out = truth ? "bag,candidate_set,instance,score,truth\n"
                          : "bag,candidate_set,instance,score\n";
  std::size_t k = 0;
  data.for_each_instance([&](std::span<const double>, std::size_t b, std::size_t s, std::size_t i) {
    out += std::to_string(b) + "," + std::to_string(s) + "," + std::to_string(i) + "," +
           format_double(map.scores[k]);
    if (truth) out += "," + std::to_string(int(data.bags[b].candidate_sets[s].truth[i]));
    out += "\n";
    ++k;
  });
  return out;
}

}  // namespace bfmfuse
