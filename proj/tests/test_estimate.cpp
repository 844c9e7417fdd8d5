#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gronwall/analytic.hpp"
#include "gronwall/estimate.hpp"

using namespace gronwall;

TEST_CASE("normal quantile sanity") {
  CHECK(detail::normal_quantile(0.975) == Catch::Approx(1.959964).margin(1e-4));
  CHECK(detail::normal_quantile(0.5) == Catch::Approx(0.0).margin(1e-9));
  CHECK(detail::normal_quantile(0.9995) == Catch::Approx(3.2905).margin(1e-3));
}

TEST_CASE("estimate_mean on a constant sampler") {
  const auto est = estimate_mean([](RngStream&) { return 3.25; },
                                 RngStream(1, 0), 1000, Method::clt());
  CHECK(est.mean == 3.25);
  CHECK(est.half_width == 0.0);
  CHECK(est.n == 1000);
}

TEST_CASE("estimate_mean covers the uniform mean") {
  const auto est = estimate_mean([](RngStream& r) { return r.uniform(); },
                                 RngStream(2, 0), 1000000, Method::clt());
  CHECK(std::abs(est.mean - 0.5) <= est.half_width);
  // Known variance 1/12: the 0.999 half width is about 0.00095.
  CHECK(est.half_width == Catch::Approx(3.2905 * std::sqrt(1.0 / 12.0) / 1000.0)
                              .epsilon(0.01));
  CHECK_THROWS_AS(estimate_mean([](RngStream& r) { return r.uniform(); },
                                RngStream(2, 0), 50, Method::clt()),
                  std::invalid_argument);
}

TEST_CASE("stopped-sup p = 0.25 intervals cover the truth across seeds") {
  const double truth = pi_p_over_sin(Exponent(0.25));
  int covered = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto est = estimate_mean(
        [](RngStream& r) {
          return std::pow(sample_stopped_sup_exact(r, 1.0), 0.25);
        },
        RngStream(1000 + seed, 0), 100000, Method::clt());
    if (std::abs(est.mean - truth) <= est.half_width) ++covered;
  }
  CHECK(covered >= 99);
}

TEST_CASE("select_estimator switches on the tail exponent") {
  CHECK(select_estimator(Exponent(0.25), LawTag::StoppedSupPower).kind ==
        EstimatorKind::Clt);
  CHECK(select_estimator(Exponent(0.6), LawTag::StoppedSupPower).kind ==
        EstimatorKind::MedianOfMeans);
  CHECK(select_estimator(Exponent(0.5), LawTag::StoppedSupPower).kind ==
        EstimatorKind::MedianOfMeans);
  CHECK(select_estimator(Exponent(0.9), LawTag::Bounded).kind ==
        EstimatorKind::Clt);
}

TEST_CASE("median-of-means block sizing") {
  CHECK(median_of_means_blocks(0.999, 1000000) == 13);
  CHECK(median_of_means_blocks(0.999, 10) % 2 == 1);
  CHECK(median_of_means_blocks(0.999, 10) <= 5);
}

TEST_CASE("median-of-means handles the infinite-variance moment") {
  // p = 0.6: E (sup)^{1.2} is infinite, so CLT variance does not exist.
  const double truth = pi_p_over_sin(Exponent(0.6));
  int within = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto est = estimate_mean(
        [](RngStream& r) {
          return std::pow(sample_stopped_sup_exact(r, 1.0), 0.6);
        },
        RngStream(5000 + seed, 0), 1000000,
        Method::median_of_means(13));
    if (std::abs(est.mean - truth) <= 0.05 * truth) ++within;
  }
  CHECK(within >= 95);
}

TEST_CASE("CLT coverage calibration on a bounded law") {
  const double confidence = 0.999;
  int covered = 0;
  const int seeds = 200;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto est =
        estimate_mean([](RngStream& r) { return r.uniform(); },
                      RngStream(7000 + seed, 0), 10000, Method::clt(),
                      confidence);
    if (std::abs(est.mean - 0.5) <= est.half_width) ++covered;
  }
  CHECK(static_cast<double>(covered) / seeds >= confidence - 0.02);
}

TEST_CASE("estimates are deterministic and worker-order insensitive") {
  const auto sampler = [](RngStream& r) {
    return std::pow(sample_stopped_sup_exact(r, 1.0), 0.25);
  };
  const auto a =
      estimate_mean(sampler, RngStream(9, 4), 10000, Method::clt());
  const auto b =
      estimate_mean(sampler, RngStream(9, 4), 10000, Method::clt());
  CHECK(a.mean == b.mean);
  CHECK(a.half_width == b.half_width);

  const auto c = estimate_mean(sampler, RngStream(9, 4), 10000,
                               Method::clt(), 0.999, 4);
  const auto d = estimate_mean(sampler, RngStream(9, 4), 10000,
                               Method::clt(), 0.999, 4);
  CHECK(c.mean == d.mean);
  CHECK(c.half_width == d.half_width);
}

TEST_CASE("median-of-means rejects even or oversized block counts") {
  std::vector<double> samples(1000, 1.0);
  CHECK_THROWS_AS(
      estimate_from_samples(samples, Method::median_of_means(4)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      estimate_from_samples(samples, Method::median_of_means(1001)),
      std::invalid_argument);
}

TEST_CASE("ladder chain bound dominates the exact moment") {
  const RngStream rng(77, 0);
  {
    const Exponent p(0.25);
    const GeometricLadder ladder(0.1, 2.0, 64);
    const auto res = estimate_ladder_chain(p, ladder, 100000, rng);
    CHECK(res.lhs.lower() <= res.chain_bound);
    CHECK(res.chain_bound >= pi_p_over_sin(p));
  }
  {
    // gamma at the proof's optimizer vs a mild ratio; both bounds valid.
    const Exponent p(0.5);
    const GeometricLadder tight(0.1, std::pow(2.0, 2.0), 64);
    const GeometricLadder mild(0.1, 1.1, 64);
    const auto a = estimate_ladder_chain(p, tight, 100000, rng);
    const auto b = estimate_ladder_chain(p, mild, 100000, rng.substream(1));
    CHECK(a.lhs.lower() <= a.chain_bound);
    CHECK(b.lhs.lower() <= b.chain_bound);
  }
}

TEST_CASE("ladder chain reports depth exhaustion") {
  const GeometricLadder shallow(0.1, 1.5, 2);  // tops out at 0.225 < 1
  CHECK_THROWS_AS(estimate_ladder_chain(Exponent(0.25), shallow, 1000,
                                        RngStream(1, 0)),
                  std::invalid_argument);
}
