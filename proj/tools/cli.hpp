#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "bfmfuse/bfmfuse.hpp"

namespace bfmfuse::cli {

enum ExitCode : int { ok = 0, validation_failure = 1, io_failure = 2, refused = 3 };

namespace detail {

inline json meta(const char* command, std::uint64_t seed, const json& config) {
  return {{"tool", tool_name},
          {"version", tool_version},
          {"command", command},
          {"seed", seed},
          {"config_hash", config_hash(config)}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Checked before any expensive work so a run is not wasted on a refusal.
inline void refuse_existing(const std::filesystem::path& path, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw IoError(path.string() + " exists; pass --force to overwrite");
  }
}

inline std::string antichain_text(const BinaryFuzzyMeasure& g) {
  std::string out;
  for (const auto& c : minimal_winning_coalitions(g)) {
    if (!out.empty()) out += " ";
    out += c.to_string(1);
  }
  return out;
}

/// Plain measure file, or a `train` result carrying one under "measure".
inline AnyMeasure load_measure(const std::filesystem::path& path) {
  const json j = load_json(path);
  try {
    if (j.is_object() && j.contains("measure")) return measure_from_json(j.at("measure"));
    return measure_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline std::string bench_cell(const BenchCell& cell, double cap) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  if (cell.censored_count() == cell.runs.size()) return ">" + format_double(cap) + " s";
  os << cell.mean_seconds() << "(" << cell.sd_seconds() << ")";
  if (cell.censored_count() > 0) {
    os << " [" << cell.censored_count() << "/" << cell.runs.size() << " censored]";
  }
  return os.str();
}

inline std::string bench_csv(const BenchTable& t) {
  std::string out = "method,metric";
  for (int s : t.spec.source_counts) out += ",S=" + std::to_string(s);
  out += "\n";
  auto row = [&](const char* method, const char* metric, const std::vector<BenchCell>& cells,
                 bool timing) {
    out += std::string(method) + "," + metric;
    for (const auto& c : cells) {
      if (timing) {
        out += "," + bench_cell(c, t.spec.cap_seconds);
      } else {
        std::ostringstream os;
        os.setf(std::ios::fixed);
        os.precision(6);
        os << c.mean_objective();
        out += "," + os.str();
      }
    }
    out += "\n";
  };
  row("real-fm", "train_seconds", t.real_fm, true);
  row("bfm", "train_seconds", t.bfm, true);
  row("real-fm", "best_objective", t.real_fm, false);
  row("bfm", "best_objective", t.bfm, false);
  return out;
}

inline json bench_json(const BenchTable& t) {
  json cells = json::array();
  for (const auto* group : {&t.bfm, &t.real_fm}) {
    for (const auto& c : *group) {
      json runs = json::array();
      for (const auto& r : c.runs) {
        runs.push_back({{"seconds", r.seconds},
                        {"best_objective", r.best_objective},
                        {"generations", r.generations},
                        {"terminated_by", to_string(r.terminated_by)},
                        {"censored", r.censored()},
                        {"cap_too_small", r.cap_too_small()}});
      }
      cells.push_back({{"method", c.method},
                       {"source_count", c.source_count},
                       {"mean_seconds", c.mean_seconds()},
                       {"sd_seconds", c.sd_seconds()},
                       {"mean_objective", c.mean_objective()},
                       {"censored", c.censored_count()},
                       {"runs", std::move(runs)}});
    }
  }
  return cells;
}

}  // namespace detail

struct Options {
  bool force = false;

  // synth
  std::string spec_path;
  std::string out_path;

  // train
  std::string data_path;
  std::string mode = "bfm";
  std::uint64_t seed = 0;
  bool explain = false;
  std::string config_path;
  std::optional<int> population;
  std::optional<int> generations;
  std::optional<int> stall;
  std::optional<double> cap_seconds;
  int threads = 1;

  // fuse-eval
  std::string measure_path;
  std::string naive;

  // bench
  std::vector<int> sources{6, 8, 10, 12};
  int repeats = 5;
  double bench_cap = 120.0;
  int pos_bags = 30;
  int neg_bags = 30;
  double noise = 0.05;
};

inline EAConfig build_config(const Options& o) {
  EAConfig cfg;
  if (!o.config_path.empty()) cfg = ea_config_from_json(load_json(o.config_path));
  cfg.seed = o.seed;
  if (o.population) cfg.population_size = *o.population;
  if (o.generations) cfg.max_generations = *o.generations;
  if (o.stall) cfg.stall_generations = *o.stall;
  if (o.cap_seconds) cfg.time_cap_seconds = *o.cap_seconds;
  cfg.threads = o.threads;
  cfg.validate();
  return cfg;
}

inline int cmd_synth(const Options& o, std::ostream& out) {
  const json spec_json = load_json(o.spec_path);
  SynthSpec spec = [&] {
    try {
      return synth_spec_from_json(spec_json);
    } catch (const ValidationError& e) {
      throw ValidationError(o.spec_path + ": " + e.what());
    }
  }();
  detail::refuse_existing(o.out_path, o.force);
  detail::refuse_existing(o.out_path + ".manifest.json", o.force);
  const Dataset data = generate_synthetic(spec);
  save_dataset(o.out_path, data, o.force);

  json manifest = detail::meta("synth", spec.seed, to_json(spec));
  manifest["spec"] = to_json(spec);
  manifest["truth_measure"] = to_json(spec.truth_measure);
  manifest["dataset"] = std::filesystem::path(o.out_path).filename().string();
  manifest["bags"] = data.bags.size();
  manifest["instances"] = data.instance_count();
  write_text_file(o.out_path + ".manifest.json", detail::dump(manifest), o.force);

  out << "wrote " << o.out_path << " (" << data.bags.size() << " bags, "
      << data.instance_count() << " instances)\n";
  return ok;
}

inline int cmd_train(const Options& o, std::ostream& out) {
  detail::refuse_existing(o.out_path, o.force);
  const Dataset data = load_dataset(o.data_path);
  const EAConfig cfg = build_config(o);
  json config = to_json(cfg);
  config["mode"] = o.mode;

  json result;
  std::string summary;
  if (o.mode == "bfm" || o.mode == "bfm-exhaustive") {
    const auto r = o.mode == "bfm" ? train_bfm(data, cfg) : train_exhaustive(data);
    result = to_json(r);
    if (o.explain) result["explain"] = to_json(objective(r.best_measure, data));
    summary = "minimal winning coalitions (sources numbered from 1): " +
              detail::antichain_text(r.best_measure) + "\n";
    out << "best objective " << format_double(r.best_objective) << " ("
        << to_string(r.terminated_by) << ", " << r.generations_run << " generations, "
        << r.evaluations << " evaluations)\n";
  } else if (o.mode == "real") {
    const auto r = train_real_fm(data, cfg);
    result = to_json(r);
    if (o.explain) result["explain"] = to_json(objective(r.best_measure, data));
    out << "best objective " << format_double(r.best_objective) << " ("
        << to_string(r.terminated_by) << ", " << r.generations_run << " generations, "
        << r.evaluations << " evaluations)\n";
  } else {
    throw ValidationError("unknown mode " + o.mode);
  }
  out << summary;

  const std::size_t bags = data.bags.size();
  result["mean_objective_per_bag"] = result["best_objective"].get<double>() / double(bags);
  json doc = detail::meta("train", cfg.seed, config);
  doc["mode"] = o.mode;
  doc["config"] = to_json(cfg);
  doc["dataset"] = o.data_path;
  doc["result"] = std::move(result);
  doc["measure"] = doc["result"]["measure"];
  write_text_file(o.out_path, detail::dump(doc), o.force);
  return ok;
}

inline int cmd_fuse_eval(const Options& o, std::ostream& out, std::ostream& err) {
  const std::filesystem::path dir(o.out_path);
  for (const char* name : {"fusion.csv", "score.json", "roc.csv", "manifest.json"}) {
    detail::refuse_existing(dir / name, o.force);
  }
  const Dataset data = load_dataset(o.data_path);
  FusionMap map;
  json provenance;
  if (!o.naive.empty()) {
    NaiveMode mode;
    if (o.naive == "min") {
      mode = NaiveMode::min;
    } else if (o.naive == "max") {
      mode = NaiveMode::max;
    } else if (o.naive == "mean") {
      mode = NaiveMode::mean;
    } else {
      throw ValidationError("unknown naive mode " + o.naive);
    }
    map = fuse_naive(data, mode);
    provenance = {{"aggregation", map.provenance}};
  } else {
    const AnyMeasure g = detail::load_measure(o.measure_path);
    map = std::visit([&](const auto& m) { return fuse(data, m); }, g);
    provenance = {{"aggregation", map.provenance},
                  {"measure_file", o.measure_path},
                  {"measure", std::visit([](const auto& m) { return to_json(m); }, g)}};
  }

  write_text_file(dir / "fusion.csv", fusion_to_csv(data, map), o.force);
  json manifest = detail::meta("fuse-eval", 0, provenance);
  manifest["dataset"] = o.data_path;
  manifest["provenance"] = provenance;
  manifest["instances"] = map.scores.size();

  if (!data.has_truth()) {
    err << "warning: dataset has no instance_truth; wrote fusion only, scoring skipped\n";
    manifest["scored"] = false;
    write_text_file(dir / "manifest.json", detail::dump(manifest), o.force);
    out << "wrote " << (dir / "fusion.csv").string() << "\n";
    return ok;
  }
  const auto truth = data.flattened_truth();
  const ScoreReport report = score(map, truth);
  if (!report.auc) err << "warning: truth has a single class; AUC undefined\n";
  json score_json = to_json(report);
  score_json["provenance"] = provenance;
  write_text_file(dir / "score.json", detail::dump(score_json), o.force);
  write_text_file(dir / "roc.csv", roc_to_csv(report.roc_points), o.force);
  manifest["scored"] = true;
  write_text_file(dir / "manifest.json", detail::dump(manifest), o.force);

  out << "auc " << (report.auc ? format_double(*report.auc) : std::string("undefined"))
      << "  rmse " << format_double(report.rmse) << "  psnr "
      << (std::isinf(report.psnr) ? std::string("inf") : format_double(report.psnr))
      << " dB\n";
  return ok;
}

inline int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  BenchSpec spec;
  spec.source_counts = o.sources;
  spec.repeats = o.repeats;
  spec.cap_seconds = o.bench_cap;
  spec.seed = o.seed;
  spec.n_pos_bags = o.pos_bags;
  spec.n_neg_bags = o.neg_bags;
  spec.noise_sigma = o.noise;
  Options base = o;
  base.cap_seconds.reset();
  spec.config = build_config(base);

  detail::refuse_existing(o.out_path, o.force);
  const BenchTable table = run_bench(spec, [&](const BenchCell& cell, const BenchRun& run) {
    out << "S=" << cell.source_count << " " << cell.method << " run " << cell.runs.size() << ": "
        << format_double(run.seconds) << " s, J=" << format_double(run.best_objective) << " ("
        << to_string(run.terminated_by) << ")\n";
    if (run.cap_too_small()) {
      err << "warning: cap of " << o.bench_cap << " s expired before the first generation\n";
    }
  });

  json config = to_json(spec.config);
  config["sources"] = spec.source_counts;
  config["repeats"] = spec.repeats;
  config["cap_seconds"] = spec.cap_seconds;
  config["pos_bags"] = spec.n_pos_bags;
  config["neg_bags"] = spec.n_neg_bags;
  config["noise_sigma"] = spec.noise_sigma;
  json doc = detail::meta("bench", spec.seed, config);
  doc["config"] = config;
  doc["cells"] = detail::bench_json(table);

  const std::string csv = detail::bench_csv(table);
  write_text_file(o.out_path, csv, o.force);
  write_text_file(o.out_path + ".json", detail::dump(doc), o.force);
  out << csv;
  return ok;
}

/// Entry point shared by the executable and the tests. Exit codes:
/// 0 success, 1 validation failure, 2 I/O failure, 3 cap or refusal.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn binary fuzzy measures for multi-resolution MIL fusion"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--spec", o.spec_path, "synthetic spec JSON")->required();
  synth->add_option("--out", o.out_path, "dataset output path")->required();
  synth->add_flag("--force", o.force, "overwrite existing outputs");

  auto* train = app.add_subcommand("train", "learn a measure");
  train->add_option("--data", o.data_path, "dataset JSON")->required();
  train->add_option("--mode", o.mode, "bfm | bfm-exhaustive | real")
      ->check(CLI::IsMember({"bfm", "bfm-exhaustive", "real"}));
  train->add_option("--seed", o.seed, "random seed");
  train->add_option("--out", o.out_path, "result JSON")->required();
  train->add_flag("--explain", o.explain, "include the per-bag objective breakdown");
  train->add_option("--config", o.config_path, "EA config overrides (JSON)");
  train->add_option("--population", o.population);
  train->add_option("--generations", o.generations, "max generations");
  train->add_option("--stall", o.stall, "stall generations");
  train->add_option("--cap-seconds", o.cap_seconds, "wall-time cap");
  train->add_option("--threads", o.threads, "fitness evaluation workers");
  train->add_flag("--force", o.force, "overwrite existing outputs");

  auto* fuse_eval = app.add_subcommand("fuse-eval", "fuse a dataset and score it");
  fuse_eval->add_option("--data", o.data_path, "dataset JSON")->required();
  auto* measure_opt = fuse_eval->add_option("--measure", o.measure_path, "measure or train result JSON");
  auto* naive_opt = fuse_eval->add_option("--naive", o.naive, "min | max | mean")
                        ->check(CLI::IsMember({"min", "max", "mean"}));
  measure_opt->excludes(naive_opt);
  fuse_eval->add_option("--out", o.out_path, "output directory")->required();
  fuse_eval->add_flag("--force", o.force, "overwrite existing outputs");

  auto* bench = app.add_subcommand("bench", "BFM vs real-valued training time");
  bench->add_option("--sources", o.sources, "source counts, e.g. 6,8,10,12")->delimiter(',');
  bench->add_option("--repeats", o.repeats);
  bench->add_option("--cap-seconds", o.bench_cap, "per-run wall-time cap");
  bench->add_option("--seed", o.seed);
  bench->add_option("--pos-bags", o.pos_bags);
  bench->add_option("--neg-bags", o.neg_bags);
  bench->add_option("--noise", o.noise);
  bench->add_option("--config", o.config_path, "EA config overrides (JSON)");
  bench->add_option("--threads", o.threads);
  bench->add_option("--out", o.out_path, "CSV output path")->required();
  bench->add_flag("--force", o.force, "overwrite existing outputs");

  std::vector<const char*> argv{"bfmfuse"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << tool_version << "\n";
    return ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return validation_failure;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, out);
    if (train->parsed()) return cmd_train(o, out);
    if (fuse_eval->parsed()) {
      if (o.measure_path.empty() && o.naive.empty()) {
        throw ValidationError("fuse-eval needs --measure or --naive");
      }
      return cmd_fuse_eval(o, out, err);
    }
    if (bench->parsed()) return cmd_bench(o, out, err);
  } catch (const CapError& e) {
    err << "refused: " << e.what() << "\n";
    return refused;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return io_failure;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return validation_failure;
  }
  return validation_failure;
}

}  // namespace bfmfuse::cli
