#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dla/memory.hpp"

namespace dla {

// Memorized sequence chunks in memorization order; the last chunk is the
// deviant, earlier ones are its standards.
struct DeviantSequence {
  std::vector<double> chunks;
};

// Mean absolute deviation of the last chunk from all previous chunks,
// divided by the chunk count (the last chunk contributes a zero term).
inline double aggregated_deviant(const DeviantSequence& seq) {
  if (seq.chunks.empty()) {
    throw std::invalid_argument("aggregated_deviant: empty sequence");
  }
  const double last = seq.chunks.back();
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < seq.chunks.size(); ++j) {
    sum += std::abs(last - seq.chunks[j]);
  }
  return sum / static_cast<double>(seq.chunks.size());
}

// Feed-forward numeric prediction: last chunk plus the aggregated deviation.
inline double numeric_prediction(double k_avg, double k_n) {
  return k_avg + k_n;
}

// Builds the deviant sequence from one feature column of the memory store and
// extrapolates one step ahead.
inline double extrapolate(const MemoryStore& memory, std::size_t column) {
  if (memory.empty()) {
    throw std::invalid_argument("extrapolate: empty memory store");
  }
  if (column >= memory.width) {
    throw std::invalid_argument("extrapolate: column out of range");
  }
  DeviantSequence seq;
  seq.chunks.reserve(memory.rows.size());
  for (const auto& row : memory.rows) {
    seq.chunks.push_back(static_cast<double>(row[column]));
  }
  return numeric_prediction(aggregated_deviant(seq), seq.chunks.back());
}

// Memory field effect: averages the extrapolation with the first retrieved
// row's value when the post-prediction pass matched anything; falls back to
// the extrapolation alone otherwise.
inline double memory_field_effect(double badc_prediction,
                                  const PostPredictionResult& post_match,
                                  std::size_t column) {
  if (post_match.empty()) return badc_prediction;
  const auto& first = post_match.matched_vectors.front();
  if (column >= first.size()) {
    throw std::invalid_argument("memory_field_effect: column out of range");
  }
  return (badc_prediction + static_cast<double>(first[column])) / 2.0;
}

}  // namespace dla
