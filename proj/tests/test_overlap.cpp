#include <doctest.h>

#include <vector>

#include "dla/overlap.hpp"
#include "oracles.hpp"

using namespace dla;

TEST_CASE("make_standards generates consecutive integers") {
  auto s = make_standards(5);
  CHECK(s.values == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(s.extent == 5);
  CHECK_THROWS_AS(make_standards(0), std::invalid_argument);
}

TEST_CASE("accumulate_overlap adds column sums") {
  auto store = make_overlap_store(3);

  BinaryMatchMatrix zeros{2, 3, std::vector<std::uint8_t>(6, 0)};
  accumulate_overlap(store, zeros);
  CHECK(store.counts == std::vector<long long>{0, 0, 0});
  CHECK(store.exemplars_seen == 1);

  BinaryMatchMatrix only2{1, 3, {0, 0, 1}};
  accumulate_overlap(store, only2);
  accumulate_overlap(store, only2);
  CHECK(store.counts == std::vector<long long>{0, 0, 2});
  CHECK(store.exemplars_seen == 3);

  auto single = make_overlap_store(1);
  BinaryMatchMatrix both{2, 1, {1, 1}};
  accumulate_overlap(single, both);
  CHECK(single.counts == std::vector<long long>{2});
}

TEST_CASE("accumulate_overlap rejects dimension mismatch") {
  auto store = make_overlap_store(2);
  BinaryMatchMatrix wide{1, 3, {1, 1, 1}};
  CHECK_THROWS_AS(accumulate_overlap(store, wide), std::invalid_argument);
}

TEST_CASE("max_overlap") {
  OverlapStore s;
  s.counts = {0, 0, 0};
  CHECK(max_overlap(s) == 0);
  s.counts = {0, 2, 5, 5};
  CHECK(max_overlap(s) == 5);
  s.counts = {7};
  CHECK(max_overlap(s) == 7);
  s.counts = {};
  CHECK(max_overlap(s) == 0);
}

TEST_CASE("select_winners with AUTO keeps only maximal counts") {
  auto standards = make_standards(4);
  OverlapStore store;
  store.counts = {0, 2, 5, 5};
  auto w = select_winners(store, standards, WinnerThreshold::automatic());
  CHECK(w.integers == std::vector<int>{2, 3});
  CHECK(w.source_counts == std::vector<long long>{5, 5});
}

TEST_CASE("select_winners with a fixed threshold filters counts") {
  auto standards = make_standards(2);
  OverlapStore store;
  store.counts = {1, 3};
  auto w = select_winners(store, standards, WinnerThreshold::fixed(1));
  CHECK(w.integers == std::vector<int>{0, 1});

  store.counts = {0, 0};
  CHECK(select_winners(store, standards, WinnerThreshold::fixed(1)).empty());
  CHECK(select_winners(store, standards, WinnerThreshold::automatic()).empty());
  CHECK_THROWS_AS(WinnerThreshold::fixed(0), std::invalid_argument);

  store.counts = {1, 1, 1};  // three counts against two standards
  CHECK_THROWS_AS(select_winners(store, standards, WinnerThreshold::fixed(1)),
                  std::invalid_argument);
}

TEST_CASE("winners are a subset of the standards; AUTO equals the argmax set") {
  SplitMix64 rng(67);
  for (int iter = 0; iter < 100; ++iter) {
    const int extent = 1 + static_cast<int>(rng.next_below(40));
    auto standards = make_standards(extent);
    OverlapStore store = make_overlap_store(standards.values.size());
    for (auto& c : store.counts) c = static_cast<long long>(rng.next_below(6));

    auto w = select_winners(store, standards, WinnerThreshold::automatic());
    const long long m = oracles::max_count_naive(store.counts);
    auto expected = oracles::winners_naive(store.counts, standards.values, m);
    CHECK(w.integers == expected);
    for (std::size_t i = 0; i < w.integers.size(); ++i) {
      CHECK(w.integers[i] >= 0);
      CHECK(w.integers[i] < extent);
      CHECK(w.source_counts[i] >= m);
    }
  }
}

TEST_CASE("store counts only grow and extending the extent preserves a prefix") {
  // fixed rho1 trajectory so the two extents see identical match behavior
  SplitMix64 rng(71);
  const std::vector<double> rho1_per_step{0.0, 1.0, 2.0, 4.0, 8.0};
  std::vector<InputVector> stream;
  for (int t = 0; t < 5; ++t) {
    InputVector x(4);
    for (auto& v : x) v = static_cast<int>(rng.next_below(30));
    stream.push_back(x);
  }

  auto run = [&](int extent) {
    auto standards = make_standards(extent);
    auto store = make_overlap_store(standards.values.size());
    std::vector<long long> prev(store.counts);
    for (std::size_t t = 0; t < stream.size(); ++t) {
      auto m = first_order_mismatch(stream[t], standards.values, rho1_per_step[t]);
      accumulate_overlap(store, m);
      for (std::size_t l = 0; l < store.counts.size(); ++l) {
        CHECK(store.counts[l] >= prev[l]);  // non-decreasing
      }
      prev = store.counts;
    }
    return store;
  };

  auto small = run(20);
  auto big = run(35);
  for (std::size_t l = 0; l < small.counts.size(); ++l) {
    CHECK(small.counts[l] == big.counts[l]);
  }
}

TEST_CASE("activation_sigma is odd, bounded, and saturates") {
  CHECK(activation_sigma(0.0) == doctest::Approx(0.0));
  for (double x : {0.5, 1.0, 2.0, 7.0, 15.0}) {
    CHECK(activation_sigma(x) == doctest::Approx(-activation_sigma(-x)));
    CHECK(activation_sigma(x) < 1.0);
    CHECK(activation_sigma(x) > 0.0);
  }
  CHECK(activation_sigma(3.0) > 0.99);
  CHECK(activation_sigma(100.0) <= 1.0);  // saturates to 1.0 in doubles
  CHECK(activation_sigma(1.0) == doctest::Approx(std::tanh(1.0)));
}

TEST_CASE("update_permanence respects its gates") {
  PermanenceUpdateParams params{70, 120, 0.0};

  SUBCASE("closed time gate leaves rho1 unchanged") {
    PermanenceState st;
    st.t_i = 70;
    SplitMix64 rng(1);
    update_permanence(st, 10, params, rng);
    CHECK(st.rho1 == doctest::Approx(0.0));
    CHECK(st.t_i == 71);
  }

  SUBCASE("store threshold gate") {
    PermanenceState st;
    SplitMix64 rng(1);
    update_permanence(st, 121, params, rng);
    CHECK(st.rho1 == doctest::Approx(0.0));
  }

  SUBCASE("zero overlap and zero noise leave rho1 unchanged") {
    PermanenceState st;
    SplitMix64 rng(1);
    update_permanence(st, 0, params, rng);
    CHECK(st.rho1 == doctest::Approx(0.0));
    CHECK(st.t_i == 1);
  }

  SUBCASE("open gate applies two passes") {
    PermanenceState st;
    SplitMix64 rng(1);
    update_permanence(st, 3, params, rng);
    CHECK(st.rho1 == doctest::Approx(2.0 * std::tanh(3.0)));
  }
}

TEST_CASE("update_permanence is deterministic and non-decreasing") {
  PermanenceUpdateParams params{70, 120, 0.01};
  auto trajectory = [&](std::uint64_t seed) {
    PermanenceState st;
    SplitMix64 rng(seed);
    std::vector<double> out;
    for (int t = 0; t < 90; ++t) {
      update_permanence(st, t % 130, params, rng);
      out.push_back(st.rho1);
    }
    return out;
  };
  auto a = trajectory(7);
  auto b = trajectory(7);
  CHECK(a == b);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] >= a[i - 1]);
}

TEST_CASE("update_permanence accepts a custom activation") {
  PermanenceState st;
  SplitMix64 rng(2);
  PermanenceUpdateParams params{10, 100, 0.0};
  update_permanence(st, 4, params, rng, [](double) { return 0.25; });
  CHECK(st.rho1 == doctest::Approx(0.5));
  CHECK(st.last_increment == doctest::Approx(0.25));
}
