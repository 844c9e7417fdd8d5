#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "gronwall/verify.hpp"

using namespace gronwall;

TEST_CASE("prop1 on the stopped-BM extremal model") {
  const InequalityReport rep = verify_prop1(
      MartingaleModel{StoppedBm{}}, Exponent(0.25), 200000, RngStream(3, 0));
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.rhs.mean == 1.0);
  CHECK(rep.rhs.half_width == 0.0);
  CHECK(std::abs(rep.lhs.mean - pi_p_over_sin(Exponent(0.25))) <=
        rep.lhs.half_width);
  CHECK(rep.constant == Catch::Approx(burkholder_constant(Exponent(0.25))));
  CHECK(rep.margin > 0.0);  // visible slack: ratio 1.11 vs c_p 4.44
}

TEST_CASE("prop1 on the sigma-integral model") {
  SigmaIntegral model;
  model.sigma = PiecewiseConstant::constant(1.0);
  model.horizon = 1.0;
  model.dt = 1e-3;
  const InequalityReport rep = verify_prop1(
      MartingaleModel{model}, Exponent(0.5), 5000, RngStream(4, 0));
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.bias_notes.find("truncated fraction") != std::string::npos);
}

TEST_CASE("prop1 on the bounded exit model") {
  ExitBm model;
  model.dt = 1e-3;
  const InequalityReport rep = verify_prop1(
      MartingaleModel{model}, Exponent(0.5), 5000, RngStream(5, 0));
  CHECK(rep.verdict == Verdict::Pass);
  // Both sides bounded by the barriers.
  CHECK(rep.lhs.mean <= 1.0);
  CHECK(rep.rhs.mean <= 1.0);
}

TEST_CASE("sharpness ratio and the branch-factor identity") {
  {
    const auto res = sharpness_ratio(Exponent(0.25), 200000, RngStream(6, 0));
    CHECK(res.gap_factor == Catch::Approx(4.0).margin(1e-12));
    CHECK(std::abs(res.c_p - res.gap_factor * res.ratio_truth) <= 1e-12);
    CHECK(std::abs(res.ratio.mean - res.ratio_truth) <= res.ratio.half_width);
  }
  {
    const auto res = sharpness_ratio(Exponent(0.5), 200000, RngStream(7, 0));
    CHECK(res.gap_factor == Catch::Approx(2.0).margin(1e-12));
    CHECK(res.ratio_truth == Catch::Approx(std::numbers::pi / 2));
  }
  // Analytic identity c_p = (4 min 1/p) ratio_truth across the grid.
  for (int i = 1; i <= 99; ++i) {
    const double pv = i / 100.0;
    const Exponent p(pv);
    CHECK(std::abs(burkholder_constant(p) -
                   std::min(4.0, 1.0 / pv) * pi_p_over_sin(p)) <= 1e-12);
  }
}

TEST_CASE("divergence table tracks log(1+K)") {
  const std::vector<double> grid = {std::exp(1.0) - 1.0, std::exp(2.0) - 1.0,
                                    std::exp(3.0) - 1.0};
  const auto rows = divergence_demo(grid, 100000, RngStream(8, 0));
  REQUIRE(rows.size() == 3);
  double prev = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    CHECK(rows[j].analytic == Catch::Approx(double(j + 1)).margin(1e-9));
    CHECK(std::abs(rows[j].truncated_mean.mean - rows[j].analytic) <=
          rows[j].truncated_mean.half_width);
    CHECK(rows[j].truncated_mean.mean > prev);
    prev = rows[j].truncated_mean.mean;
  }
}

TEST_CASE("jump scan flags q >= 1 as bounded, q < 1 as growing") {
  std::vector<double> deltas;
  for (int i = 1; i <= 9; ++i) deltas.push_back(i / 10.0);
  deltas.push_back(1.0 - 1e-4);
  deltas.push_back(1.0 - 1e-6);
  const auto rows =
      jump_necessity_scan(Exponent(0.5), {0.5, 0.9, 1.0, 1.5}, deltas);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].unbounded_trend);
  CHECK(rows[1].unbounded_trend);
  CHECK_FALSE(rows[2].unbounded_trend);
  CHECK(rows[2].grid_supremum <= 1.0 + 1e-12);
  CHECK_FALSE(rows[3].unbounded_trend);
  CHECK(jump_counterexample_ratio(0.5, Exponent(0.5), 1.0) ==
        Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gronwall bounds on the psi = 0 scenario") {
  GronwallScenario scn;
  scn.x0 = 1.0;
  scn.horizon = 1.0;
  scn.dt = 1e-3;
  const auto reps = verify_gronwall(scn, Exponent(0.5), std::nullopt, 20000,
                                    RngStream(9, 0));
  CHECK_FALSE(reps.eins.has_value());  // no Holder pair given
  REQUIRE(reps.zwei.has_value());
  REQUIRE(reps.drei.has_value());
  CHECK(reps.zwei->verdict == Verdict::Pass);
  CHECK(reps.drei->verdict == Verdict::Pass);
  // (zwei): E sup Z^{1/2} <= (pi + 1) sqrt(2), with visible slack.
  CHECK(reps.zwei->constant * reps.zwei->rhs.mean ==
        Catch::Approx((std::numbers::pi + 1.0) * std::sqrt(2.0))
            .epsilon(1e-12));
  CHECK(reps.zwei->margin > 0.5);
  // (drei) is the equality case: E Z(1) = 2 = bound.
  CHECK(reps.drei->constant * reps.drei->rhs.mean ==
        Catch::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(reps.drei->lhs.mean - 2.0) <= reps.drei->lhs.half_width);
}

TEST_CASE("gronwall rejects p nu >= 1") {
  GronwallScenario scn;
  CHECK_THROWS_AS(verify_gronwall(scn, Exponent(0.5), HolderPair(2.0, 2.0),
                                  1000, RngStream(1, 0)),
                  std::invalid_argument);
}

TEST_CASE("gronwall (eins) with deterministic and feedback psi") {
  {
    GronwallScenario scn;
    scn.drift = PiecewiseConstant::constant(0.5);
    scn.dt = 1e-3;
    const auto reps = verify_gronwall(scn, Exponent(0.25),
                                      HolderPair(2.0, 2.0), 10000,
                                      RngStream(10, 0));
    REQUIRE(reps.eins.has_value());
    CHECK(reps.eins->verdict == Verdict::Pass);
    CHECK(reps.eins->rhs.half_width == 0.0);  // both factors closed form
    REQUIRE(reps.zwei.has_value());
    CHECK(reps.zwei->verdict == Verdict::Pass);
  }
  {
    GronwallScenario scn;
    scn.sign_feedback = true;
    scn.feedback_rate = 1.0;
    scn.dt = 1e-3;
    const auto reps = verify_gronwall(scn, Exponent(0.2),
                                      HolderPair(2.0, 2.0), 10000,
                                      RngStream(11, 0));
    REQUIRE(reps.eins.has_value());
    CHECK(reps.eins->verdict == Verdict::Pass);
    CHECK(reps.eins->rhs.half_width > 0.0);  // exp factor estimated
    CHECK_FALSE(reps.zwei.has_value());
    CHECK_FALSE(reps.drei.has_value());
  }
}

TEST_CASE("random psi without a Holder pair is rejected") {
  GronwallScenario scn;
  scn.sign_feedback = true;
  scn.feedback_rate = 1.0;
  CHECK_THROWS_AS(verify_gronwall(scn, Exponent(0.2), std::nullopt, 1000,
                                  RngStream(1, 0)),
                  std::invalid_argument);
}

TEST_CASE("slack noise keeps the bounds valid with an estimated H*") {
  GronwallScenario scn;
  scn.slack_noise = 0.5;
  scn.dt = 1e-3;
  const auto reps = verify_gronwall(scn, Exponent(0.25),
                                    HolderPair(2.0, 2.0), 5000,
                                    RngStream(12, 0));
  REQUIRE(reps.zwei.has_value());
  CHECK(reps.zwei->rhs.half_width > 0.0);
  CHECK(reps.zwei->verdict == Verdict::Pass);
  CHECK(reps.drei->verdict == Verdict::Pass);
}

TEST_CASE("pathwise integrating-factor defect shrinks with dt") {
  GronwallScenario scn;
  scn.drift = PiecewiseConstant::constant(0.5);
  const auto rows =
      verify_estim_pathwise(scn, {1e-2, 1e-3, 1e-4}, 300, RngStream(13, 0));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].max_violation < rows[0].max_violation);
  CHECK(rows[2].max_violation < rows[1].max_violation);
  CHECK(rows[2].max_violation < 0.08);
}
