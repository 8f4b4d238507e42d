#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dla/config.hpp"
#include "dla/dataset.hpp"
#include "dla/engine.hpp"
#include "dla/htm.hpp"

namespace dla {

// How a dataset argument resolves: a loader, a schema, quantization defaults,
// the baseline's minimum-overlap default, and the shapes accepted at load.
struct DatasetSpec {
  enum class Kind { Csv, WordSimilarity };
  std::string name;
  std::string path;
  Kind kind = Kind::Csv;
  CsvSchema schema;
  bool quant_fixed_scale10 = false;  // iris-style x10; otherwise min-max
  bool wordsim_score_scale10 = false;
  long long htm_minimum_overlap = 90;
  bool has_class_column = false;
  std::vector<std::pair<std::size_t, std::size_t>> accepted_shapes;  // empty = any
};

inline DatasetSpec resolve_dataset(const std::string& arg,
                                   const std::string& data_dir) {
  DatasetSpec spec;
  if (arg == "iris") {
    spec.name = "iris";
    spec.path = data_dir + "/iris.csv";
    spec.schema = CsvSchema{',', false, 4};
    spec.quant_fixed_scale10 = true;
    spec.htm_minimum_overlap = 90;
    spec.has_class_column = true;
    spec.accepted_shapes = {{150, 5}};
  } else if (arg == "heart") {
    spec.name = "heart";
    spec.path = data_dir + "/heart.csv";
    spec.schema = CsvSchema{',', false, -1};
    spec.htm_minimum_overlap = 210;
    spec.has_class_column = true;  // disease indicator in the last column
    spec.accepted_shapes = {{270, 14}, {303, 14}};
  } else if (arg == "wordsim") {
    spec.name = "wordsim";
    spec.path = data_dir + "/wordsim.csv";
    spec.kind = DatasetSpec::Kind::WordSimilarity;
    spec.wordsim_score_scale10 = true;
    spec.htm_minimum_overlap = 123;
    spec.accepted_shapes = {{353, 2}};
  } else {
    // a user-supplied file; min-max quantization, no shape expectations
    spec.name = std::filesystem::path(arg).stem().string();
    spec.path = arg;
    spec.schema = CsvSchema{',', false, -1};
  }
  return spec;
}

// Loads and quantizes one dataset, resolving the effective quantization and
// baseline overlap threshold into `cfg` so the serialized config (and its
// hash) reflect what actually ran.
inline QuantizedDataset load_dataset(const DatasetSpec& spec, RunConfig& cfg) {
  RawDataset raw;
  if (spec.kind == DatasetSpec::Kind::WordSimilarity) {
    raw = load_word_similarity_csv(spec.path, spec.name);
  } else {
    raw = load_csv(spec.path, spec.schema, spec.name);
  }
  if (!spec.accepted_shapes.empty()) {
    bool ok = false;
    for (const auto& [r, c] : spec.accepted_shapes) {
      if (raw.rows.size() == r && raw.columns == c) ok = true;
    }
    if (!ok) {
      std::ostringstream msg;
      msg << "dataset '" << spec.name << "': unexpected shape "
          << raw.rows.size() << "x" << raw.columns << " (expected";
      for (const auto& [r, c] : spec.accepted_shapes) msg << " " << r << "x" << c;
      msg << ")";
      throw io_error(msg.str());
    }
  }
  if (cfg.exclude_class_column && spec.has_class_column) {
    for (auto& row : raw.rows) row.pop_back();
    raw.columns -= 1;
    raw.col_min.pop_back();
    raw.col_max.pop_back();
  }

  if (!cfg.quant_explicit) {
    QuantizationSpec q;
    if (spec.quant_fixed_scale10) {
      q.mode = QuantizationSpec::Mode::FixedScale;
      q.scale = 10.0;
      q.offset = 0.0;
    } else {
      q.mode = QuantizationSpec::Mode::MinMax;
      q.minmax_upper = cfg.dla.learning_extent - 1;
    }
    if (spec.wordsim_score_scale10) {
      // pair index min-maxed, human score kept on a fixed x10 scale
      q.per_feature = resolve_quantizers(raw, QuantizationSpec{
                                                  QuantizationSpec::Mode::MinMax,
                                                  10.0, 0.0,
                                                  cfg.dla.learning_extent - 1,
                                                  {}});
      q.per_feature.back() = FeatureQuantizer{10.0, 0.0};
    }
    cfg.dla.quantization = q;
  }
  if (cfg.htm_min_overlap_auto) {
    cfg.htm.minimum_overlap = spec.htm_minimum_overlap;
    cfg.htm_min_overlap_auto = false;  // serialized config shows the resolved value
  }
  cfg.htm.seed = cfg.dla.seed;
  return quantize(raw, cfg.dla.quantization);
}

struct RunOptions {
  std::vector<std::string> datasets{"iris"};
  std::string algo = "dla";  // dla | htm | both
  RunConfig config;
  std::string data_dir = "data";
  std::string out_dir = ".";
  std::vector<int> extents{50, 100, 150, 200, 250};
};

struct Experiment1Row {
  std::string dataset;
  std::string algorithm;
  double mapca_percent = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string report;
};

// One run's provenance: everything needed to recompute its outputs.
struct RunManifest {
  std::string dataset;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string config_text;            // full effective config snapshot
  std::vector<std::string> outputs;   // file names relative to the out dir
};

inline std::string render_manifest(const std::vector<RunManifest>& manifests) {
  std::ostringstream out;
  for (const auto& m : manifests) {
    out << "[" << m.dataset << "]\n"
        << "algorithm = " << m.algorithm << "\n"
        << "seed = " << m.seed << "\n"
        << "config_hash = " << m.config_hash << "\n"
        << "outputs =";
    for (const auto& o : m.outputs) out << " " << o;
    out << "\n" << m.config_text << "\n";
  }
  return out.str();
}

namespace detail {

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw io_error("cannot write '" + path + "'");
  }
  out << text;
}

}  // namespace detail

// Human-readable one-line run summary: accuracy, rating endpoints, winner-set
// size, memory rows.
inline std::string emit_report(const std::vector<PredictionRecord>& records,
                               const std::string& dataset,
                               const std::string& algorithm, double mapca_percent,
                               std::size_t winner_count, std::size_t memory_rows) {
  if (records.empty()) {
    throw std::invalid_argument("emit_report: no records");
  }
  std::ostringstream out;
  out << dataset << " " << algorithm << ": mapca="
      << detail::format_fixed(mapca_percent, 2)
      << " records=" << records.size()
      << " k_r_first=" << detail::format_fixed(records.front().rating, 4)
      << " k_r_last=" << detail::format_fixed(records.back().rating, 4)
      << " winners=" << winner_count << " memory_rows=" << memory_rows;
  return out.str();
}

// Runs the classification benchmark for the requested datasets/algorithms.
// Writes one results row per (dataset, algorithm) plus a manifest, and
// returns the rows. Output is byte-stable for a fixed config and seed.
inline std::vector<Experiment1Row> run_experiment1(const RunOptions& options) {
  if (options.algo != "dla" && options.algo != "htm" && options.algo != "both") {
    throw io_error("unknown algorithm '" + options.algo + "' (expected dla|htm|both)");
  }
  std::filesystem::create_directories(options.out_dir);
  std::vector<Experiment1Row> rows;
  std::vector<RunManifest> manifests;
  for (const auto& ds : options.datasets) {
    const DatasetSpec spec = resolve_dataset(ds, options.data_dir);
    RunConfig cfg = options.config;
    const QuantizedDataset data = load_dataset(spec, cfg);
    const std::string hash = hash_hex(config_hash(cfg));
    manifests.push_back(RunManifest{spec.name, options.algo, cfg.dla.seed, hash,
                                    serialize_config(cfg),
                                    {"experiment1_results.csv"}});

    if (options.algo == "dla" || options.algo == "both") {
      const auto fit = fit_predict(data, cfg.dla);
      const double acc =
          fit.records.empty()
              ? 0.0
              : mapca_for_records(fit.records, data.quantizers, cfg.dla.tolerance);
      Experiment1Row row{spec.name, "dla", acc, cfg.dla.seed, hash, ""};
      row.report = fit.records.empty()
                       ? spec.name + " dla: no predictions (winner set never formed)"
                       : emit_report(fit.records, spec.name, "dla", acc,
                                     fit.state.winners.size(),
                                     fit.state.memory.counter());
      rows.push_back(std::move(row));
    }
    if (options.algo == "htm" || options.algo == "both") {
      const auto fit = htm_fit_predict(data, cfg.htm);
      Experiment1Row row{spec.name, "htm", fit.mapca_percent, cfg.htm.seed, hash, ""};
      std::ostringstream rep;
      rep << spec.name << " htm: mapca="
          << detail::format_fixed(fit.mapca_percent, 2)
          << " records=" << fit.records.size();
      row.report = rep.str();
      rows.push_back(std::move(row));
    }
  }

  std::ostringstream table;
  table << "dataset,algorithm,mapca_percent,seed,config_hash\n";
  for (const auto& row : rows) {
    table << row.dataset << "," << row.algorithm << ","
          << detail::format_fixed(row.mapca_percent, 2) << "," << row.seed << ","
          << row.config_hash << "\n";
  }
  detail::write_text_file(options.out_dir + "/experiment1_results.csv", table.str());
  detail::write_text_file(options.out_dir + "/manifest_experiment1.txt",
                          render_manifest(manifests));
  return rows;
}

struct Experiment2Output {
  int extent = 0;
  std::string file;  // relative to out_dir
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// Learning-extent sweep over one dataset. Emits one headerless numeric grid
// per extent (rows = prediction steps, cols = features) and an index file.
inline std::vector<Experiment2Output> run_experiment2(const RunOptions& options) {
  if (options.datasets.empty()) {
    throw io_error("experiment 2 needs a dataset");
  }
  if (options.extents.empty()) {
    throw io_error("experiment 2 needs at least one extent");
  }
  std::filesystem::create_directories(options.out_dir);
  const DatasetSpec spec = resolve_dataset(options.datasets.front(), options.data_dir);
  RunConfig cfg = options.config;
  const QuantizedDataset data = load_dataset(spec, cfg);
  const auto sweep = sweep_learning_extent(data, cfg.dla, options.extents);

  std::vector<Experiment2Output> outputs;
  std::ostringstream index;
  index << "extent,file,rows,cols\n";
  for (const auto& entry : sweep) {
    char name[64];
    std::snprintf(name, sizeof(name), "experiment2_extent_%03d.csv", entry.extent);
    std::ostringstream grid;
    for (const auto& row : entry.matrix) {
      for (std::size_t f = 0; f < row.size(); ++f) {
        if (f > 0) grid << ",";
        grid << detail::format_fixed(row[f], 6);
      }
      grid << "\n";
    }
    detail::write_text_file(options.out_dir + "/" + name, grid.str());
    const std::size_t cols = entry.matrix.empty() ? 0 : entry.matrix.front().size();
    outputs.push_back({entry.extent, name, entry.matrix.size(), cols});
    index << entry.extent << "," << name << "," << entry.matrix.size() << ","
          << cols << "\n";
  }
  detail::write_text_file(options.out_dir + "/experiment2_index.csv", index.str());

  RunManifest manifest{spec.name, "dla", cfg.dla.seed,
                       hash_hex(config_hash(cfg)), serialize_config(cfg),
                       {"experiment2_index.csv"}};
  for (const auto& o : outputs) manifest.outputs.push_back(o.file);
  detail::write_text_file(options.out_dir + "/manifest_experiment2.txt",
                          render_manifest({manifest}));
  return outputs;
}

}  // namespace dla
