#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dla/mismatch.hpp"

namespace dla {

// File and parse errors; the CLI maps these to the usage/I-O exit code.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvSchema {
  char delimiter = ',';
  bool has_header = false;
  int label_column = -1;  // -1 = none; otherwise parsed as a categorical code
};

// Real-valued rectangular dataset with per-column stats. A label column, when
// present, is encoded by first appearance and appended as the last column.
struct RawDataset {
  std::string name;
  std::size_t columns = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> col_min;
  std::vector<double> col_max;
  std::vector<std::string> label_levels;  // empty when no label column
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(t, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == t.size();
}

inline std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> fields;
  if (delim == ' ') {
    // whitespace-delimited: collapse runs of blanks
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) fields.push_back(tok);
    return fields;
  }
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline void update_stats(RawDataset& d) {
  d.col_min.assign(d.columns, std::numeric_limits<double>::infinity());
  d.col_max.assign(d.columns, -std::numeric_limits<double>::infinity());
  for (const auto& row : d.rows) {
    for (std::size_t c = 0; c < d.columns; ++c) {
      d.col_min[c] = std::min(d.col_min[c], row[c]);
      d.col_max[c] = std::max(d.col_max[c], row[c]);
    }
  }
}

}  // namespace detail

// Loads a delimited numeric file. Errors name the offending row and column
// (1-based, counting the header if present).
inline RawDataset load_csv(const std::string& path, const CsvSchema& schema,
                           const std::string& name = "") {
  std::ifstream in(path);
  if (!in) {
    throw io_error("load_csv: cannot open '" + path + "'");
  }
  RawDataset d;
  d.name = name.empty() ? path : name;
  std::string line;
  std::size_t line_no = 0;
  bool skipped_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (schema.has_header && !skipped_header) {
      skipped_header = true;
      continue;
    }
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_fields(line, schema.delimiter);
    std::vector<double> row;
    row.reserve(fields.size());
    int label_code = -1;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (schema.label_column >= 0 &&
          c == static_cast<std::size_t>(schema.label_column)) {
        const std::string lab = detail::trim(fields[c]);
        auto it = std::find(d.label_levels.begin(), d.label_levels.end(), lab);
        if (it == d.label_levels.end()) {
          d.label_levels.push_back(lab);
          label_code = static_cast<int>(d.label_levels.size()) - 1;
        } else {
          label_code = static_cast<int>(it - d.label_levels.begin());
        }
        continue;
      }
      double v = 0.0;
      if (!detail::parse_double(fields[c], v)) {
        throw io_error("load_csv: '" + path + "' line " +
                       std::to_string(line_no) + " column " +
                       std::to_string(c + 1) + ": not a number: '" +
                       detail::trim(fields[c]) + "'");
      }
      row.push_back(v);
    }
    if (label_code >= 0) row.push_back(static_cast<double>(label_code));
    if (d.rows.empty()) {
      d.columns = row.size();
    } else if (row.size() != d.columns) {
      throw io_error("load_csv: '" + path + "' line " + std::to_string(line_no) +
                     ": expected " + std::to_string(d.columns) +
                     " values, got " + std::to_string(row.size()));
    }
    d.rows.push_back(std::move(row));
  }
  if (d.rows.empty()) {
    throw io_error("load_csv: '" + path + "' contains no data rows");
  }
  detail::update_stats(d);
  return d;
}

// Word-similarity ingestion: a header line plus rows of
// word1,word2,mean_score. Emits (pair index, score); the words themselves are
// not embedded.
inline RawDataset load_word_similarity_csv(const std::string& path,
                                           const std::string& name = "wordsim") {
  std::ifstream in(path);
  if (!in) {
    throw io_error("load_word_similarity_csv: cannot open '" + path + "'");
  }
  RawDataset d;
  d.name = name;
  d.columns = 2;
  std::string line;
  std::size_t line_no = 0;
  bool skipped_header = false;
  double index = 1.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_fields(line, ',');
    if (fields.size() != 3) {
      throw io_error("load_word_similarity_csv: '" + path + "' line " +
                     std::to_string(line_no) + ": expected 3 fields, got " +
                     std::to_string(fields.size()));
    }
    double score = 0.0;
    if (!detail::parse_double(fields[2], score)) {
      throw io_error("load_word_similarity_csv: '" + path + "' line " +
                     std::to_string(line_no) + " column 3: not a number: '" +
                     detail::trim(fields[2]) + "'");
    }
    d.rows.push_back({index, score});
    index += 1.0;
  }
  if (d.rows.empty()) {
    throw io_error("load_word_similarity_csv: '" + path + "' contains no data rows");
  }
  detail::update_stats(d);
  return d;
}

// Per-feature affine map into integer space: q = round((v - offset) * scale).
struct FeatureQuantizer {
  double scale = 1.0;
  double offset = 0.0;
};

struct QuantizationSpec {
  enum class Mode { FixedScale, MinMax };
  Mode mode = Mode::FixedScale;
  double scale = 10.0;   // FixedScale
  double offset = 0.0;   // FixedScale
  int minmax_upper = 199;  // MinMax target range is [0, minmax_upper]
  // Optional explicit per-feature override; when non-empty it wins.
  std::vector<FeatureQuantizer> per_feature;
};

// Quantized dataset plus the quantizers used, so metrics can map predictions
// back to original units.
struct QuantizedDataset {
  std::string name;
  std::size_t columns = 0;
  std::vector<InputVector> rows;
  std::vector<FeatureQuantizer> quantizers;
  long long clamped_cells = 0;  // negatives clamped to 0
};

inline std::vector<FeatureQuantizer> resolve_quantizers(
    const RawDataset& raw, const QuantizationSpec& spec) {
  if (!spec.per_feature.empty()) {
    if (spec.per_feature.size() != raw.columns) {
      throw std::invalid_argument("quantize: per_feature override has " +
                                  std::to_string(spec.per_feature.size()) +
                                  " entries for " + std::to_string(raw.columns) +
                                  " columns");
    }
    return spec.per_feature;
  }
  std::vector<FeatureQuantizer> qs(raw.columns);
  for (std::size_t c = 0; c < raw.columns; ++c) {
    if (spec.mode == QuantizationSpec::Mode::FixedScale) {
      if (spec.scale <= 0.0) {
        throw std::invalid_argument("quantize: scale must be > 0");
      }
      qs[c] = {spec.scale, spec.offset};
    } else {
      const double range = raw.col_max[c] - raw.col_min[c];
      const double scale =
          range > 0.0 ? static_cast<double>(spec.minmax_upper) / range : 1.0;
      qs[c] = {scale, raw.col_min[c]};
    }
  }
  return qs;
}

inline QuantizedDataset quantize(const RawDataset& raw,
                                 const QuantizationSpec& spec) {
  QuantizedDataset q;
  q.name = raw.name;
  q.columns = raw.columns;
  q.quantizers = resolve_quantizers(raw, spec);
  q.rows.reserve(raw.rows.size());
  for (const auto& row : raw.rows) {
    InputVector out(raw.columns);
    for (std::size_t c = 0; c < raw.columns; ++c) {
      const double mapped = (row[c] - q.quantizers[c].offset) * q.quantizers[c].scale;
      long long v = std::llround(mapped);
      if (v < 0) {
        v = 0;
        q.clamped_cells += 1;
      }
      out[c] = static_cast<int>(v);
    }
    q.rows.push_back(std::move(out));
  }
  return q;
}

// Mean absolute percentage classification accuracy: the share of positions
// where |y - yhat| < tol (strict), times 100.
inline double mapca(std::span<const double> y, std::span<const double> yhat,
                    double tol) {
  if (y.size() != yhat.size()) {
    throw std::invalid_argument("mapca: length mismatch");
  }
  if (y.empty()) {
    throw std::invalid_argument("mapca: empty observation vector");
  }
  if (tol <= 0.0) {
    throw std::invalid_argument("mapca: tolerance must be > 0");
  }
  long long hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::abs(y[i] - yhat[i]) < tol) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(y.size());
}

}  // namespace dla
