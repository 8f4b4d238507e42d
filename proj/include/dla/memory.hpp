#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dla/mismatch.hpp"
#include "dla/overlap.hpp"

namespace dla {

// One per-feature prediction: the selected causal integer, the interpolated
// value (midpoint of winner and input), and where the winner sat.
struct Prediction {
  int selected = 0;           // p_r
  double interpolated = 0.0;  // p_r_t
  std::size_t source_index = 0;
};

// Selects the winner with minimal level-2 mismatch (first index on ties) and
// interpolates halfway towards the input element.
inline Prediction predictive_interpolation(const WinnerSet& winners,
                                           const MismatchVector& k2,
                                           int input_element) {
  if (winners.empty()) {
    throw std::invalid_argument("predictive_interpolation: no winners learned");
  }
  if (winners.size() != k2.size()) {
    throw std::invalid_argument(
        "predictive_interpolation: winners/mismatch size mismatch");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < k2.size(); ++i) {
    if (k2[i] < k2[best]) best = i;
  }
  Prediction p;
  p.selected = winners.integers[best];
  p.source_index = best;
  p.interpolated = (static_cast<double>(p.selected) + input_element) / 2.0;
  return p;
}

// Memorized prediction vectors, one row per time step; counter() is the next
// row index.
struct MemoryStore {
  std::size_t width = 0;  // fixed on first memorize
  std::vector<InputVector> rows;

  std::size_t counter() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

inline void memorize(MemoryStore& store, InputVector prediction_vector) {
  if (store.width == 0 && store.rows.empty()) {
    store.width = prediction_vector.size();
  }
  if (prediction_vector.size() != store.width) {
    throw std::invalid_argument(
        "memorize: vector length " + std::to_string(prediction_vector.size()) +
        " does not match store width " + std::to_string(store.width));
  }
  store.rows.push_back(std::move(prediction_vector));
}

// Per-row popcount of level-3 match rows.
inline std::vector<long long> row_overlap(
    const std::vector<std::vector<std::uint8_t>>& k3_rows) {
  std::vector<long long> out;
  out.reserve(k3_rows.size());
  std::size_t expected = k3_rows.empty() ? 0 : k3_rows.front().size();
  for (const auto& row : k3_rows) {
    if (row.size() != expected) {
      throw std::invalid_argument("row_overlap: ragged rows");
    }
    long long c = 0;
    for (std::uint8_t v : row) c += v;
    out.push_back(c);
  }
  return out;
}

// Match threshold from the deviant length: floor(lo / 2). Floored so that a
// single-element deviant can still match.
inline long long compute_th3(std::size_t lo) {
  if (lo == 0) {
    throw std::invalid_argument("compute_th3: deviant length must be >= 1");
  }
  return static_cast<long long>(lo / 2);
}

// Rows retrieved by the post-prediction pass, in ascending row order.
struct PostPredictionResult {
  std::vector<std::size_t> matched_rows;
  std::vector<InputVector> matched_vectors;

  bool empty() const { return matched_rows.empty(); }
};

// Prefix-search extraction: level-3 mismatch against every memorized row,
// row-wise overlap, then keep rows with overlap >= floor(len/2), scanned in
// ascending row order. An empty result is a valid outcome.
inline PostPredictionResult extract_memory(const MemoryStore& store,
                                           const InputVector& current_input,
                                           double rho2, double rho2_lim) {
  PostPredictionResult result;
  if (store.empty()) return result;
  const long long th3 = compute_th3(current_input.size());
  for (std::size_t i = 0; i < store.rows.size(); ++i) {
    const auto k3 = third_order_mismatch(current_input, store.rows[i], rho2, rho2_lim);
    long long overlap = 0;
    for (std::uint8_t v : k3) overlap += v;
    if (overlap >= th3) {
      result.matched_rows.push_back(i);
      result.matched_vectors.push_back(store.rows[i]);
    }
  }
  return result;
}

}  // namespace dla
