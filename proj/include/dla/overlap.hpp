#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dla/mismatch.hpp"
#include "dla/rng.hpp"

namespace dla {

// The generative standards: consecutive integers 0 .. extent-1. The learning
// extent bounds what the model can represent; raising it remembers more,
// lowering it forgets.
struct StandardsList {
  int extent = 0;
  std::vector<int> values;
};

inline StandardsList make_standards(int learning_extent) {
  if (learning_extent <= 0) {
    throw std::invalid_argument("make_standards: learning_extent must be >= 1");
  }
  StandardsList s;
  s.extent = learning_extent;
  s.values.resize(static_cast<std::size_t>(learning_extent));
  std::iota(s.values.begin(), s.values.end(), 0);
  return s;
}

// Virtual store of per-standard binary-match counts, superimposed over all
// exemplars seen so far.
struct OverlapStore {
  std::vector<long long> counts;
  long long exemplars_seen = 0;
};

inline OverlapStore make_overlap_store(std::size_t n_standards) {
  OverlapStore s;
  s.counts.assign(n_standards, 0);
  return s;
}

// Adds one exemplar's level-1 matches: counts[l] += column-sum l.
inline void accumulate_overlap(OverlapStore& store,
                               const BinaryMatchMatrix& matches) {
  if (matches.cols != store.counts.size()) {
    throw std::invalid_argument(
        "accumulate_overlap: match matrix has " + std::to_string(matches.cols) +
        " columns, store has " + std::to_string(store.counts.size()));
  }
  for (std::size_t i = 0; i < matches.rows; ++i) {
    for (std::size_t l = 0; l < matches.cols; ++l) {
      store.counts[l] += matches.at(i, l);
    }
  }
  store.exemplars_seen += 1;
}

inline long long max_overlap(const OverlapStore& store) {
  long long best = 0;
  for (long long c : store.counts) best = std::max(best, c);
  return best;
}

// Winner selection threshold: a fixed count, or AUTO meaning "the current
// maximum count" (only maximally responsible integers survive inhibition).
struct WinnerThreshold {
  bool is_auto = false;
  long long value = 1;

  static WinnerThreshold automatic() { return WinnerThreshold{true, 0}; }
  static WinnerThreshold fixed(long long v) {
    if (v < 1) {
      throw std::invalid_argument("WinnerThreshold: fixed threshold must be >= 1");
    }
    return WinnerThreshold{false, v};
  }
};

// Standards whose overlap count survived inhibition, with their counts.
struct WinnerSet {
  std::vector<int> integers;
  std::vector<long long> source_counts;

  bool empty() const { return integers.empty(); }
  std::size_t size() const { return integers.size(); }
};

// All standards with count >= threshold. AUTO resolves the threshold to the
// current maximum; an all-zero store yields an empty set either way.
inline WinnerSet select_winners(const OverlapStore& store,
                                const StandardsList& standards,
                                WinnerThreshold threshold) {
  if (store.counts.size() != standards.values.size()) {
    throw std::invalid_argument("select_winners: store/standards size mismatch");
  }
  long long th = threshold.is_auto ? max_overlap(store) : threshold.value;
  WinnerSet w;
  if (th <= 0) return w;  // nothing observed yet
  for (std::size_t l = 0; l < store.counts.size(); ++l) {
    if (store.counts[l] >= th) {
      w.integers.push_back(standards.values[l]);
      w.source_counts.push_back(store.counts[l]);
    }
  }
  return w;
}

// Bounded odd squashing activation used by the permanence update. The default
// is the standard hyperbolic tangent; update_permanence accepts any
// replacement with the same shape.
inline double activation_sigma(double x) { return std::tanh(x); }

// Level-1 tolerance and its update bookkeeping. rho1 only grows while the
// learning gate is open; last_increment is the most recent applied step.
struct PermanenceState {
  double rho1 = 0.0;
  double last_increment = 0.0;
  long long t_i = 0;
};

struct PermanenceUpdateParams {
  long long time_limit = 70;      // t_lim
  long long store_threshold = 120;  // gate on the store maximum
  double noise_scale = 0.01;      // epsilon drawn uniformly from [0, noise_scale)
};

// Hebbian-style update: while t_i < time_limit and the store maximum has not
// crossed store_threshold, rho1 grows by sigma(s_o_max) plus fresh noise,
// applied twice per call (two Monte-Carlo passes). t_i advances every call.
template <typename Activation>
inline void update_permanence(PermanenceState& state, long long s_o_max,
                              const PermanenceUpdateParams& params,
                              SplitMix64& rng, Activation&& sigma) {
  if (state.t_i < params.time_limit && s_o_max <= params.store_threshold) {
    for (int pass = 0; pass < 2; ++pass) {
      const double eps = rng.next_double(params.noise_scale);
      const double inc = sigma(static_cast<double>(s_o_max)) + eps;
      state.rho1 += inc;
      state.last_increment = inc;
    }
  }
  state.t_i += 1;
}

inline void update_permanence(PermanenceState& state, long long s_o_max,
                              const PermanenceUpdateParams& params,
                              SplitMix64& rng) {
  update_permanence(state, s_o_max, params, rng, activation_sigma);
}

}  // namespace dla
