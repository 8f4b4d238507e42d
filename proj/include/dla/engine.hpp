#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dla/badc.hpp"
#include "dla/dataset.hpp"
#include "dla/memory.hpp"
#include "dla/mismatch.hpp"
#include "dla/overlap.hpp"
#include "dla/rng.hpp"

namespace dla {

// All knobs of a training run. Defaults are the benchmark parameter set:
// learning extent 200, time limit 70, initial permanence 0, store threshold
// 120, tolerance 0.05.
struct DlaConfig {
  int learning_extent = 200;
  long long time_limit = 70;
  double initial_permanence = 0.0;
  long long store_threshold = 120;
  double tolerance = 0.05;
  // Fixed count by default: once a standard's overlap count crosses the
  // threshold it stays a winner, so the learned set grows with the store.
  // 400 is calibrated on the iris benchmark. AUTO keeps only the maximal
  // counts instead, which collapses the winner set to a handful of integers.
  WinnerThreshold winner_threshold = WinnerThreshold::fixed(400);
  double rho2 = 0.0;
  double rho2_lim = 1.0;
  double noise_scale = 0.01;
  std::uint64_t seed = 42;
  bool shuffle = false;  // seeded shuffle of exemplar order (off: file order)
  QuantizationSpec quantization{};

  void validate() const {
    if (learning_extent < 1) {
      throw std::invalid_argument("DlaConfig: learning_extent must be >= 1");
    }
    if (time_limit < 1) {
      throw std::invalid_argument("DlaConfig: time_limit must be >= 1");
    }
    if (initial_permanence < 0.0) {
      throw std::invalid_argument("DlaConfig: initial_permanence must be >= 0");
    }
    if (store_threshold < 1) {
      throw std::invalid_argument("DlaConfig: store_threshold must be >= 1");
    }
    if (tolerance <= 0.0) {
      throw std::invalid_argument("DlaConfig: tolerance must be > 0");
    }
    if (rho2_lim < 0.0 || rho2_lim > 1.0) {
      throw std::invalid_argument("DlaConfig: rho2_lim must be in [0, 1]");
    }
    if (rho2 < 0.0 || rho2 > rho2_lim) {
      throw std::invalid_argument("DlaConfig: rho2 must be in [0, rho2_lim]");
    }
    if (noise_scale < 0.0) {
      throw std::invalid_argument("DlaConfig: noise_scale must be >= 0");
    }
    if (!winner_threshold.is_auto && winner_threshold.value < 1) {
      throw std::invalid_argument("DlaConfig: winner_threshold must be >= 1 or auto");
    }
  }
};

struct PostMatchSummary {
  std::size_t matched_count = 0;
  long long first_row = -1;  // -1 when nothing matched
};

// One step's prediction of the next exemplar. `input` is the observed
// exemplar the prediction refers to; `selected` holds the per-feature causal
// integers and `predicted` their interpolated values.
struct PredictionRecord {
  std::size_t timestep = 0;  // index of the exemplar that produced it
  InputVector input;
  std::vector<int> selected;
  std::vector<double> predicted;
  PostMatchSummary post_match;
  double rating = 0.0;  // k_r snapshot after this step
  std::size_t winner_count = 0;
};

// Everything the loop owns. Single writer; snapshot to read concurrently.
struct TrainedState {
  StandardsList standards;
  OverlapStore store;
  PermanenceState permanence;
  WinnerSet winners;
  MemoryStore memory;
  RatingState rating;
  SplitMix64 rng{0};
  std::size_t feature_count = 0;  // fixed by the first exemplar
  std::size_t steps_without_winners = 0;
};

inline TrainedState init(const DlaConfig& config) {
  config.validate();
  TrainedState st;
  st.standards = make_standards(config.learning_extent);
  st.store = make_overlap_store(st.standards.values.size());
  st.permanence.rho1 = config.initial_permanence;
  st.rng = SplitMix64(config.seed);
  return st;
}

// One pass of the loop body: level-1 mismatch with the current tolerance,
// overlap accumulation, winner selection, permanence update; then, when a
// next exemplar exists and winners are known, the level-2 inference chain
// (mismatch, rating, interpolation), memorization of the selected integers,
// and the backward post-prediction pass over the current exemplar.
inline std::optional<PredictionRecord> step(TrainedState& st,
                                            const InputVector& exemplar,
                                            const InputVector* next_exemplar,
                                            const DlaConfig& config) {
  if (st.feature_count == 0) {
    st.feature_count = exemplar.size();
  }
  if (exemplar.size() != st.feature_count) {
    throw std::invalid_argument("step: exemplar has " +
                                std::to_string(exemplar.size()) +
                                " features, run expects " +
                                std::to_string(st.feature_count));
  }
  const auto matches =
      first_order_mismatch(exemplar, st.standards.values, st.permanence.rho1);
  accumulate_overlap(st.store, matches);
  st.winners = select_winners(st.store, st.standards, config.winner_threshold);
  update_permanence(st.permanence, max_overlap(st.store),
                    {config.time_limit, config.store_threshold, config.noise_scale},
                    st.rng);

  const std::size_t t = static_cast<std::size_t>(st.store.exemplars_seen) - 1;
  if (next_exemplar == nullptr) return std::nullopt;
  if (st.winners.empty()) {
    st.steps_without_winners += 1;
    return std::nullopt;
  }
  const InputVector& next = *next_exemplar;
  if (next.size() != st.feature_count) {
    throw std::invalid_argument("step: next exemplar feature count mismatch");
  }

  PredictionRecord rec;
  rec.timestep = t;
  rec.input = next;
  rec.selected.resize(st.feature_count);
  rec.predicted.resize(st.feature_count);
  double avg_sum = 0.0;
  for (std::size_t f = 0; f < st.feature_count; ++f) {
    const auto k2 = second_order_mismatch(next[f], st.winners.integers);
    avg_sum += mismatch_average(k2);
    const auto pred = predictive_interpolation(st.winners, k2, next[f]);
    rec.selected[f] = pred.selected;
    rec.predicted[f] = pred.interpolated;
  }
  st.rating = rating_update(st.rating,
                            avg_sum / static_cast<double>(st.feature_count));
  memorize(st.memory, rec.selected);
  const auto post = extract_memory(st.memory, exemplar, config.rho2, config.rho2_lim);
  rec.post_match.matched_count = post.matched_rows.size();
  rec.post_match.first_row =
      post.empty() ? -1 : static_cast<long long>(post.matched_rows.front());
  rec.rating = st.rating.value();
  rec.winner_count = st.winners.size();
  return rec;
}

struct FitResult {
  std::vector<PredictionRecord> records;
  TrainedState state;
};

// Runs the loop over the dataset in order, predicting each exemplar from the
// state after its predecessor.
inline FitResult fit_predict(const QuantizedDataset& dataset,
                             const DlaConfig& config) {
  if (dataset.rows.empty()) {
    throw std::invalid_argument("fit_predict: empty dataset");
  }
  FitResult result;
  result.state = init(config);
  std::vector<std::size_t> order(dataset.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (config.shuffle) {
    SplitMix64 shuffle_rng(config.seed ^ 0x9d2c5680aa11d3e7ULL);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const InputVector* next =
        i + 1 < order.size() ? &dataset.rows[order[i + 1]] : nullptr;
    auto rec = step(result.state, dataset.rows[order[i]], next, config);
    if (rec) result.records.push_back(std::move(*rec));
  }
  return result;
}

// Flattens records into (observed, predicted) pairs in original units and
// scores them; columns may be restricted (e.g. to exclude a class column).
inline double mapca_for_records(const std::vector<PredictionRecord>& records,
                                const std::vector<FeatureQuantizer>& quantizers,
                                double tol,
                                std::span<const std::size_t> columns = {}) {
  std::vector<double> y;
  std::vector<double> yhat;
  for (const auto& rec : records) {
    for (std::size_t f = 0; f < rec.input.size(); ++f) {
      if (!columns.empty() &&
          std::find(columns.begin(), columns.end(), f) == columns.end()) {
        continue;
      }
      const double scale = quantizers[f].scale;
      y.push_back(static_cast<double>(rec.input[f]) / scale);
      yhat.push_back(rec.predicted[f] / scale);
    }
  }
  return mapca(y, yhat, tol);
}

// Share of (record, column) cells whose exact next value was in the winner
// set when predicted (selected == observed).
inline double exact_coverage(const std::vector<PredictionRecord>& records,
                             std::span<const std::size_t> columns = {}) {
  long long covered = 0;
  long long total = 0;
  for (const auto& rec : records) {
    for (std::size_t f = 0; f < rec.input.size(); ++f) {
      if (!columns.empty() &&
          std::find(columns.begin(), columns.end(), f) == columns.end()) {
        continue;
      }
      total += 1;
      if (rec.selected[f] == rec.input[f]) covered += 1;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
}

// First record index from which every later record covers all listed columns
// exactly; records.size() when no such tail exists.
inline std::size_t full_coverage_tail(const std::vector<PredictionRecord>& records,
                                      std::span<const std::size_t> columns) {
  std::size_t tail = records.size();
  for (std::size_t i = records.size(); i > 0; --i) {
    const auto& rec = records[i - 1];
    bool all = true;
    for (std::size_t f : columns) {
      if (rec.selected[f] != rec.input[f]) {
        all = false;
        break;
      }
    }
    if (!all) break;
    tail = i - 1;
  }
  return tail;
}

struct SweepEntry {
  int extent = 0;
  std::vector<std::vector<double>> matrix;  // records x features of p_r_t
  std::size_t winner_count = 0;             // final winner-set size
  std::size_t standards_with_overlap = 0;   // counts > 0 at the end
  double coverage = 0.0;                    // exact coverage over all columns
  std::size_t record_count = 0;
};

// Reruns the full pass per learning extent with everything else fixed.
// Quantization is taken from the dataset as given, independent of extent.
inline std::vector<SweepEntry> sweep_learning_extent(
    const QuantizedDataset& dataset, const DlaConfig& base_config,
    std::span<const int> extents) {
  if (extents.empty()) {
    throw std::invalid_argument("sweep_learning_extent: no extents given");
  }
  std::vector<SweepEntry> out;
  out.reserve(extents.size());
  for (int extent : extents) {
    if (extent < 1) {
      throw std::invalid_argument("sweep_learning_extent: extents must be >= 1");
    }
    DlaConfig cfg = base_config;
    cfg.learning_extent = extent;
    auto fit = fit_predict(dataset, cfg);
    SweepEntry e;
    e.extent = extent;
    e.record_count = fit.records.size();
    e.matrix.reserve(fit.records.size());
    for (const auto& rec : fit.records) e.matrix.push_back(rec.predicted);
    e.winner_count = fit.state.winners.size();
    for (long long c : fit.state.store.counts) {
      if (c > 0) e.standards_with_overlap += 1;
    }
    e.coverage = exact_coverage(fit.records);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace dla
