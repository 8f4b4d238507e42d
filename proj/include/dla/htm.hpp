#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dla/dataset.hpp"
#include "dla/rng.hpp"

namespace dla {

// Fixed-size binary vector stored as 64-bit words.
struct Sdr {
  std::size_t bits = 0;
  std::vector<std::uint64_t> words;

  explicit Sdr(std::size_t n = 0) : bits(n), words((n + 63) / 64, 0) {}

  void set(std::size_t i) { words[i >> 6] |= 1ULL << (i & 63); }
  bool test(std::size_t i) const { return (words[i >> 6] >> (i & 63)) & 1; }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : words) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  static std::size_t dot(const Sdr& a, const Sdr& b) {
    std::size_t c = 0;
    const std::size_t n = std::min(a.words.size(), b.words.size());
    for (std::size_t i = 0; i < n; ++i) {
      c += static_cast<std::size_t>(std::popcount(a.words[i] & b.words[i]));
    }
    return c;
  }

  bool operator==(const Sdr& other) const {
    return bits == other.bits && words == other.words;
  }
};

// Block scalar encoder: a contiguous run of active_bits 1s whose position
// tracks the bucketed value. Adjacent buckets overlap by active_bits - 1.
struct EncoderSpec {
  int total_bits = 0;
  int active_bits = 0;
  double minimum = 0.0;
  double maximum = 0.0;

  int buckets() const { return total_bits - active_bits + 1; }

  void validate() const {
    if (active_bits < 1 || total_bits < active_bits) {
      throw std::invalid_argument("EncoderSpec: need 1 <= active_bits <= total_bits");
    }
    if (maximum < minimum) {
      throw std::invalid_argument("EncoderSpec: maximum < minimum");
    }
  }
};

inline int bucket_for(double value, const EncoderSpec& spec) {
  spec.validate();
  if (value < spec.minimum || value > spec.maximum) {
    throw std::invalid_argument("encode_scalar: value " + std::to_string(value) +
                                " outside encodable range [" +
                                std::to_string(spec.minimum) + ", " +
                                std::to_string(spec.maximum) + "]");
  }
  const double range = spec.maximum - spec.minimum;
  if (range <= 0.0) return 0;
  const double pos = (value - spec.minimum) / range;
  return static_cast<int>(std::lround(pos * (spec.buckets() - 1)));
}

inline double decode_bucket(int bucket, const EncoderSpec& spec) {
  const double range = spec.maximum - spec.minimum;
  if (spec.buckets() <= 1 || range <= 0.0) return spec.minimum;
  return spec.minimum + static_cast<double>(bucket) * range / (spec.buckets() - 1);
}

inline Sdr encode_scalar(double value, const EncoderSpec& spec) {
  const int b = bucket_for(value, spec);
  Sdr out(static_cast<std::size_t>(spec.total_bits));
  for (int i = 0; i < spec.active_bits; ++i) {
    out.set(static_cast<std::size_t>(b + i));
  }
  return out;
}

// Baseline comparator parameters. The first five mirror the benchmark table;
// the rest are construction choices of this stand-in (pool geometry, encoder
// sizing, permanence adaptation).
struct HtmParams {
  int desired_local_activity = 3;
  long long minimum_overlap = 90;
  double initial_permanence = 0.4;
  int mc_runs = 1000;
  double tolerance = 0.05;

  int columns = 48;
  double potential_fraction = 0.85;
  int active_bits = 0;     // 0 = derive from minimum_overlap and feature count
  int bits_per_active = 4; // per-feature total bits = bits_per_active * active_bits
  double permanence_increment = 0.05;
  double permanence_decrement = 0.01;
  std::uint64_t seed = 42;

  void validate() const {
    if (desired_local_activity < 1) {
      throw std::invalid_argument("HtmParams: desired_local_activity must be >= 1");
    }
    if (minimum_overlap < 1) {
      throw std::invalid_argument("HtmParams: minimum_overlap must be >= 1");
    }
    if (initial_permanence < 0.0 || initial_permanence > 1.0) {
      throw std::invalid_argument("HtmParams: initial_permanence must be in [0, 1]");
    }
    if (mc_runs < 1) {
      throw std::invalid_argument("HtmParams: mc_runs must be >= 1");
    }
    if (tolerance <= 0.0) {
      throw std::invalid_argument("HtmParams: tolerance must be > 0");
    }
    if (columns < 1) {
      throw std::invalid_argument("HtmParams: columns must be >= 1");
    }
    if (potential_fraction <= 0.0 || potential_fraction > 1.0) {
      throw std::invalid_argument("HtmParams: potential_fraction must be in (0, 1]");
    }
    if (bits_per_active < 2) {
      throw std::invalid_argument("HtmParams: bits_per_active must be >= 2");
    }
  }

  // Encoder block width sized so the expected sampled overlap of a full
  // input clears minimum_overlap with headroom.
  int resolve_active_bits(std::size_t feature_count) const {
    if (active_bits > 0) return active_bits;
    const double per_feature =
        2.5 * static_cast<double>(minimum_overlap) / static_cast<double>(feature_count);
    return std::max(4, static_cast<int>(std::ceil(per_feature)));
  }
};

// Columns with potential synapses onto input bit positions; each synapse
// carries a permanence in [0, 1] and connects stochastically with that
// probability during a Monte-Carlo run.
struct ColumnPool {
  struct Column {
    std::vector<std::uint32_t> potential;  // input bit indices, ascending
    std::vector<double> permanence;        // parallel to potential
  };
  std::size_t input_bits = 0;
  std::vector<Column> columns;
};

inline ColumnPool make_column_pool(std::size_t input_bits, const HtmParams& params,
                                   SplitMix64& rng) {
  params.validate();
  if (input_bits == 0) {
    throw std::invalid_argument("make_column_pool: input_bits must be >= 1");
  }
  ColumnPool pool;
  pool.input_bits = input_bits;
  pool.columns.resize(static_cast<std::size_t>(params.columns));
  const auto target = static_cast<std::size_t>(
      std::max(1.0, std::floor(params.potential_fraction * static_cast<double>(input_bits))));
  for (auto& col : pool.columns) {
    // invariant sampling: shuffle indices, take a prefix, sort
    std::vector<std::uint32_t> idx(input_bits);
    for (std::size_t i = 0; i < input_bits; ++i) idx[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = input_bits; i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.next_below(i)]);
    }
    idx.resize(target);
    std::sort(idx.begin(), idx.end());
    col.potential = std::move(idx);
    col.permanence.assign(target, params.initial_permanence);
  }
  return pool;
}

namespace detail {

// 64 independent Bernoulli(k / 65536) draws by bitwise 16-bit comparison;
// returns the number of successes among the first `lanes` lanes.
inline int bernoulli_block(SplitMix64& rng, int lanes, std::uint32_t k) {
  if (k == 0) return 0;
  if (k >= 65536) return lanes;
  std::uint64_t lt = 0;
  std::uint64_t eq = ~0ULL;
  for (int bit = 15; bit >= 0 && eq != 0; --bit) {
    const std::uint64_t r = rng.next_u64();
    if ((k >> bit) & 1) {
      lt |= eq & ~r;
      eq &= r;
    } else {
      eq &= ~r;
    }
  }
  const std::uint64_t mask = lanes >= 64 ? ~0ULL : ((1ULL << lanes) - 1);
  return std::popcount(lt & mask);
}

// Binomial(n, k / 65536) by lane blocks.
inline long long binomial_draw(SplitMix64& rng, long long n, std::uint32_t k) {
  long long total = 0;
  while (n > 0) {
    const int lanes = static_cast<int>(std::min<long long>(64, n));
    total += bernoulli_block(rng, lanes, k);
    n -= lanes;
  }
  return total;
}

inline std::uint32_t permanence_key(double p) {
  const double clamped = std::clamp(p, 0.0, 1.0);
  return static_cast<std::uint32_t>(std::lround(clamped * 65536.0));
}

}  // namespace detail

// Aggregated spatial pooling result: the surviving columns after inhibition
// plus per-column win counts over the Monte-Carlo runs.
struct PoolActivation {
  std::vector<int> active;          // ascending column indices, capped
  std::vector<long long> win_counts;  // one per column
};

// Monte-Carlo spatial pooling. Per run, synapse connectivity is sampled with
// probability equal to its permanence; a column's overlap is its count of
// connected synapses on active input bits; columns clearing minimum_overlap
// compete and the top desired_local_activity win. Wins are aggregated over
// mc_runs and the final active set is the top desired_local_activity columns
// by win count (ties to the lower index).
inline PoolActivation mc_spatial_pool(const Sdr& input, const ColumnPool& pool,
                                      const HtmParams& params, SplitMix64& rng) {
  params.validate();
  const std::size_t n_cols = pool.columns.size();
  PoolActivation result;
  result.win_counts.assign(n_cols, 0);

  // Group each column's active potential synapses by quantized permanence.
  struct Bucket {
    std::uint32_t key;
    long long count;
  };
  std::vector<std::vector<Bucket>> buckets(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) {
    const auto& col = pool.columns[c];
    auto& bs = buckets[c];
    for (std::size_t s = 0; s < col.potential.size(); ++s) {
      if (!input.test(col.potential[s])) continue;
      const std::uint32_t key = detail::permanence_key(col.permanence[s]);
      bool found = false;
      for (auto& b : bs) {
        if (b.key == key) {
          b.count += 1;
          found = true;
          break;
        }
      }
      if (!found) bs.push_back({key, 1});
    }
  }

  std::vector<long long> overlap(n_cols, 0);
  std::vector<std::size_t> passers;
  passers.reserve(n_cols);
  for (int run = 0; run < params.mc_runs; ++run) {
    passers.clear();
    for (std::size_t c = 0; c < n_cols; ++c) {
      long long o = 0;
      for (const auto& b : buckets[c]) {
        o += detail::binomial_draw(rng, b.count, b.key);
      }
      overlap[c] = o;
      if (o >= params.minimum_overlap) passers.push_back(c);
    }
    // top desired_local_activity by overlap, ties to the lower index
    std::stable_sort(passers.begin(), passers.end(),
                     [&](std::size_t a, std::size_t b) {
                       return overlap[a] > overlap[b];
                     });
    const std::size_t winners =
        std::min<std::size_t>(passers.size(),
                              static_cast<std::size_t>(params.desired_local_activity));
    for (std::size_t i = 0; i < winners; ++i) {
      result.win_counts[passers[i]] += 1;
    }
  }

  // final set: top desired_local_activity win counts, ties to the lower index
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (result.win_counts[c] > 0) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.win_counts[a] > result.win_counts[b];
  });
  if (order.size() > static_cast<std::size_t>(params.desired_local_activity)) {
    order.resize(static_cast<std::size_t>(params.desired_local_activity));
  }
  std::sort(order.begin(), order.end());
  for (std::size_t c : order) result.active.push_back(static_cast<int>(c));
  return result;
}

// Classic clamped adaptation: winning columns strengthen synapses on active
// bits and weaken the rest.
inline void adapt_permanences(ColumnPool& pool, const Sdr& input,
                              const std::vector<int>& active_columns,
                              const HtmParams& params) {
  for (int c : active_columns) {
    auto& col = pool.columns[static_cast<std::size_t>(c)];
    for (std::size_t s = 0; s < col.potential.size(); ++s) {
      double& p = col.permanence[s];
      if (input.test(col.potential[s])) {
        p = std::min(1.0, p + params.permanence_increment);
      } else {
        p = std::max(0.0, p - params.permanence_decrement);
      }
    }
  }
}

// One predicted step of the baseline run.
struct HtmRecord {
  std::size_t timestep = 0;
  std::vector<double> observed;   // original units
  std::vector<double> predicted;  // original units
  std::size_t active_columns = 0;
  std::size_t neighbor = 0;  // stored exemplar chosen as nearest
};

struct HtmRunResult {
  std::vector<HtmRecord> records;
  double mapca_percent = 0.0;
};

// One-step-ahead baseline: encode the quantized exemplars, pool them through
// the Monte-Carlo columns (with permanence adaptation on the winners), and
// predict each next exemplar by decoding the nearest stored SDR under
// dot-product overlap. Scored with the same accuracy metric and comparison
// scale as the main engine.
inline HtmRunResult htm_fit_predict(const QuantizedDataset& dataset,
                                    const HtmParams& params) {
  params.validate();
  if (dataset.rows.empty()) {
    throw std::invalid_argument("htm_fit_predict: empty dataset");
  }
  const std::size_t n_features = dataset.columns;
  const int w = params.resolve_active_bits(n_features);
  const int bits = w * params.bits_per_active;

  // per-feature encoder specs over the quantized value range
  std::vector<EncoderSpec> specs(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    int lo = dataset.rows.front()[f];
    int hi = lo;
    for (const auto& row : dataset.rows) {
      lo = std::min(lo, row[f]);
      hi = std::max(hi, row[f]);
    }
    specs[f] = EncoderSpec{bits, w, static_cast<double>(lo), static_cast<double>(hi)};
  }
  const std::size_t input_bits = static_cast<std::size_t>(bits) * n_features;

  SplitMix64 rng(params.seed);
  ColumnPool pool = make_column_pool(input_bits, params, rng);

  struct Stored {
    Sdr sdr{0};
    std::vector<int> bucket;
  };
  std::vector<Stored> store;
  store.reserve(dataset.rows.size());

  auto encode_row = [&](const InputVector& row) {
    Stored s;
    s.sdr = Sdr(input_bits);
    s.bucket.resize(n_features);
    for (std::size_t f = 0; f < n_features; ++f) {
      const int b = bucket_for(static_cast<double>(row[f]), specs[f]);
      s.bucket[f] = b;
      const std::size_t base = f * static_cast<std::size_t>(bits);
      for (int i = 0; i < w; ++i) s.sdr.set(base + static_cast<std::size_t>(b) + i);
    }
    return s;
  };

  HtmRunResult result;
  std::vector<double> y;
  std::vector<double> yhat;
  for (std::size_t t = 0; t < dataset.rows.size(); ++t) {
    Stored cur = encode_row(dataset.rows[t]);
    const auto activation = mc_spatial_pool(cur.sdr, pool, params, rng);
    adapt_permanences(pool, cur.sdr, activation.active, params);

    if (t > 0) {
      // predict exemplar t from the store of exemplars 0..t-1
      std::size_t best = 0;
      std::size_t best_dot = 0;
      for (std::size_t s = 0; s < store.size(); ++s) {
        const std::size_t d = Sdr::dot(cur.sdr, store[s].sdr);
        if (d > best_dot) {
          best_dot = d;
          best = s;
        }
      }
      HtmRecord rec;
      rec.timestep = t - 1;
      rec.active_columns = activation.active.size();
      rec.neighbor = best;
      rec.observed.resize(n_features);
      rec.predicted.resize(n_features);
      for (std::size_t f = 0; f < n_features; ++f) {
        const double scale = dataset.quantizers[f].scale;
        rec.observed[f] = static_cast<double>(dataset.rows[t][f]) / scale;
        rec.predicted[f] = decode_bucket(store[best].bucket[f], specs[f]) / scale;
        y.push_back(rec.observed[f]);
        yhat.push_back(rec.predicted[f]);
      }
      result.records.push_back(std::move(rec));
    }
    store.push_back(std::move(cur));
  }
  if (!y.empty()) result.mapca_percent = mapca(y, yhat, params.tolerance);
  return result;
}

}  // namespace dla
