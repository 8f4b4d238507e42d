#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dla {

// One quantized exemplar: a non-negative integer per feature.
using InputVector = std::vector<int>;

// Per-winner absolute deviations at level 2.
using MismatchVector = std::vector<int>;

// Level-1 match grid. rows = input elements, cols = standards, cells in {0,1}.
struct BinaryMatchMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> cells;  // row-major

  std::uint8_t at(std::size_t r, std::size_t c) const {
    return cells[r * cols + c];
  }
  void set(std::size_t r, std::size_t c, std::uint8_t v) {
    cells[r * cols + c] = v;
  }
};

// Running mean of per-step level-2 averages; value() is the rating factor.
struct RatingState {
  double running_sum = 0.0;
  std::size_t count = 0;

  double value() const {
    return count == 0 ? 0.0 : running_sum / static_cast<double>(count);
  }
};

// Elementwise absolute deviation |a[j] - b|.
inline std::vector<int> rad(std::span<const int> a, int b) {
  std::vector<int> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    out[j] = std::abs(a[j] - b);
  }
  return out;
}

// Level-1 mismatch: cell (i, l) = 1 iff |input[i] - standards[l]| <= rho1.
inline BinaryMatchMatrix first_order_mismatch(const InputVector& input,
                                              std::span<const int> standards,
                                              double rho1) {
  if (standards.empty()) {
    throw std::invalid_argument("first_order_mismatch: no generative standards");
  }
  if (rho1 < 0.0) {
    throw std::invalid_argument("first_order_mismatch: rho1 must be >= 0");
  }
  BinaryMatchMatrix m;
  m.rows = input.size();
  m.cols = standards.size();
  m.cells.assign(m.rows * m.cols, 0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t l = 0; l < m.cols; ++l) {
      const double dev = std::abs(static_cast<double>(input[i]) - standards[l]);
      if (dev <= rho1) m.set(i, l, 1);
    }
  }
  return m;
}

// Level-2 mismatch of the next input element against each winning integer.
inline MismatchVector second_order_mismatch(int next_input_element,
                                            std::span<const int> winners) {
  if (winners.empty()) {
    throw std::invalid_argument("second_order_mismatch: no winners learned");
  }
  return rad(winners, next_input_element);
}

// Arithmetic mean of a level-2 mismatch vector.
inline double mismatch_average(const MismatchVector& k2) {
  if (k2.empty()) {
    throw std::invalid_argument("mismatch_average: empty mismatch vector");
  }
  long long sum = 0;
  for (int v : k2) sum += v;
  return static_cast<double>(sum) / static_cast<double>(k2.size());
}

// Folds one per-step average into the cumulative rating.
inline RatingState rating_update(RatingState state, double avg) {
  if (avg < 0.0) {
    throw std::invalid_argument("rating_update: average mismatch must be >= 0");
  }
  state.running_sum += avg;
  state.count += 1;
  return state;
}

// Level-3 mismatch of the current input against one memorized row.
// Gate: element j = 1 iff |current[j] - row[j]| <= rho2, with rho2 capped
// by rho2_lim in [0, 1].
inline std::vector<std::uint8_t> third_order_mismatch(
    const InputVector& current_input, std::span<const int> memory_row,
    double rho2, double rho2_lim) {
  if (rho2_lim > 1.0 || rho2_lim < 0.0) {
    throw std::invalid_argument("third_order_mismatch: rho2_lim must be in [0, 1]");
  }
  if (rho2 < 0.0 || rho2 > rho2_lim) {
    throw std::invalid_argument("third_order_mismatch: rho2 must be in [0, rho2_lim]");
  }
  if (current_input.size() != memory_row.size()) {
    throw std::invalid_argument(
        "third_order_mismatch: length mismatch (" +
        std::to_string(current_input.size()) + " vs " +
        std::to_string(memory_row.size()) + ")");
  }
  std::vector<std::uint8_t> out(current_input.size(), 0);
  for (std::size_t j = 0; j < current_input.size(); ++j) {
    const double dev =
        std::abs(static_cast<double>(current_input[j]) - memory_row[j]);
    if (dev <= rho2) out[j] = 1;
  }
  return out;
}

}  // namespace dla
