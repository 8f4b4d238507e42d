#include <doctest.h>

#include <cmath>
#include <vector>

#include "dla/badc.hpp"
#include "dla/rng.hpp"

using namespace dla;

TEST_CASE("aggregated_deviant worked example") {
  DeviantSequence seq{{2.0, 4.0, 6.0}};
  CHECK(aggregated_deviant(seq) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(numeric_prediction(aggregated_deviant(seq), 6.0) ==
        doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("aggregated_deviant degenerate cases") {
  CHECK(aggregated_deviant(DeviantSequence{{10.0}}) == doctest::Approx(0.0));
  CHECK(aggregated_deviant(DeviantSequence{{3.0, 3.0, 3.0, 3.0}}) ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(aggregated_deviant(DeviantSequence{}), std::invalid_argument);
}

TEST_CASE("numeric_prediction identities") {
  CHECK(numeric_prediction(2.0, 6.0) == doctest::Approx(8.0));
  CHECK(numeric_prediction(0.0, 10.0) == doctest::Approx(10.0));
  CHECK(numeric_prediction(0.0, -3.5) == doctest::Approx(-3.5));
}

TEST_CASE("translation equivariance and bounds") {
  SplitMix64 rng(113);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t n = 1 + rng.next_below(16);
    DeviantSequence seq;
    for (std::size_t i = 0; i < n; ++i) {
      seq.chunks.push_back(static_cast<double>(rng.next_below(200)) - 100.0);
    }
    const double c = static_cast<double>(rng.next_below(100)) - 50.0;
    DeviantSequence shifted = seq;
    for (auto& v : shifted.chunks) v += c;

    const double kp = numeric_prediction(aggregated_deviant(seq), seq.chunks.back());
    const double kp_shifted =
        numeric_prediction(aggregated_deviant(shifted), shifted.chunks.back());
    CHECK(kp_shifted == doctest::Approx(kp + c).epsilon(1e-12));

    CHECK(aggregated_deviant(seq) >= 0.0);
    CHECK(kp >= seq.chunks.back());  // additive non-negative correction
  }
}

TEST_CASE("extrapolate composes the column pipeline") {
  MemoryStore memory;
  memorize(memory, {2, 5});
  memorize(memory, {4, 5});
  memorize(memory, {6, 5});
  CHECK(extrapolate(memory, 0) == doctest::Approx(8.0));
  CHECK(extrapolate(memory, 1) == doctest::Approx(5.0));  // constant column

  MemoryStore single;
  memorize(single, {9});
  CHECK(extrapolate(single, 0) == doctest::Approx(9.0));

  MemoryStore empty;
  CHECK_THROWS_AS(extrapolate(empty, 0), std::invalid_argument);
  CHECK_THROWS_AS(extrapolate(memory, 2), std::invalid_argument);
}

TEST_CASE("memory_field_effect combines or falls back") {
  PostPredictionResult none;
  CHECK(memory_field_effect(8.0, none, 0) == doctest::Approx(8.0));

  PostPredictionResult hit;
  hit.matched_rows = {0};
  hit.matched_vectors = {{6, 1}};
  CHECK(memory_field_effect(8.0, hit, 0) == doctest::Approx(7.0));

  PostPredictionResult same;
  same.matched_rows = {0};
  same.matched_vectors = {{4}};
  CHECK(memory_field_effect(4.0, same, 0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(memory_field_effect(1.0, hit, 5), std::invalid_argument);
}
