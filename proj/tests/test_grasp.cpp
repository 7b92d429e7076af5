#include <doctest.h>

#include <cmath>

#include "gearbox/grasp.hpp"

using namespace gearbox;

namespace {

PoseEstimate peg_estimate() {
  PoseEstimate est;
  est.label = PartClass::Peg1;
  return est;
}

}  // namespace

TEST_CASE("plan_peg_grasp returns the configured grasp") {
  const PegGrasp g =
      plan_peg_grasp(peg_estimate(), part_geometry(PartClass::Peg1));
  CHECK(g.x_p_mm == doctest::Approx(20.0));
  CHECK(g.f_p_n == doctest::Approx(8.0));
}

TEST_CASE("plan_peg_grasp rejects bad inputs") {
  PoseEstimate gear;
  gear.label = PartClass::GearLarge;
  CHECK_THROWS_AS(plan_peg_grasp(gear, part_geometry(PartClass::GearLarge)),
                  std::invalid_argument);

  PegGraspConfig no_moment;
  no_moment.x_p_mm = 0.0;
  CHECK_THROWS_AS(plan_peg_grasp(peg_estimate(),
                                 part_geometry(PartClass::Peg1), no_moment),
                  std::invalid_argument);

  PegGraspConfig off_peg;
  off_peg.x_p_mm = 45.0;
  CHECK_THROWS_AS(plan_peg_grasp(peg_estimate(),
                                 part_geometry(PartClass::Peg1), off_peg),
                  std::invalid_argument);
}

TEST_CASE("pivot rule") {
  const PivotConstants c;

  // Default grasp satisfies the pivot inequality.
  const PegGrasp g =
      plan_peg_grasp(peg_estimate(), part_geometry(PartClass::Peg1));
  CHECK(simulate_reorientation(g, c));

  // Zero moment arm never reorients.
  CHECK(!simulate_reorientation(PegGrasp{0.0, 7.0, 8.0}, c));

  // Twice the holding torque reorients.
  const double holding = c.friction_mu * 8.0 * c.pad_radius_mm;
  const double x_needed = 2.0 * holding / (c.mass_kg * c.gravity_mps2);
  CHECK(simulate_reorientation(PegGrasp{x_needed, 7.0, 8.0}, c));

  // Crushing grip force never lets the peg pivot.
  CHECK(!simulate_reorientation(PegGrasp{20.0, 7.0, 1e9}, c));
}

TEST_CASE("pivot rule is monotone in force and moment arm") {
  const PivotConstants c;
  RngStream rng(66, "grasp/pivot");
  for (int trial = 0; trial < 200; ++trial) {
    const double x = rng.uniform(0.0, 30.0);
    const double f = rng.uniform(0.1, 30.0);
    const bool base = simulate_reorientation(PegGrasp{x, 7.0, f}, c);
    if (!base) {
      // More force can only keep it from pivoting.
      CHECK(!simulate_reorientation(PegGrasp{x, 7.0, f * 2.0}, c));
    } else {
      // A longer arm keeps the pivot.
      CHECK(simulate_reorientation(PegGrasp{x * 1.5, 7.0, f}, c));
    }
  }
}

TEST_CASE("inject_grasp_error range and statistics") {
  RngStream rng(4, "grasp/inject");
  const int n = 10000;
  double sum = 0.0;
  std::array<int, 10> bins{};
  for (int i = 0; i < n; ++i) {
    const double dx = inject_grasp_error(rng);
    CHECK(dx >= -10.0);
    CHECK(dx < 10.0);
    sum += dx;
    bins[static_cast<int>((dx + 10.0) / 2.0)] += 1;
  }
  CHECK(std::abs(sum / n) <= 0.35);
  // Chi-square uniformity over 10 bins; 9 dof, p = 0.999 critical 27.88.
  double chi2 = 0.0;
  for (int b : bins) chi2 += (b - n / 10.0) * (b - n / 10.0) / (n / 10.0);
  CHECK(chi2 < 27.88);
}

TEST_CASE("tactile embedding is injective and deterministic") {
  const TactileObservation h0 = tactile_embedding(0.0);
  RngStream rng(1, "grasp/tactile");
  const TactileObservation noiseless =
      observe_tactile(0.0, TactileModel{0.0}, rng);
  for (int j = 0; j < kTactileFeatureDim; ++j) {
    CHECK(noiseless.features[j] == h0.features[j]);
  }

  const TactileObservation plus = tactile_embedding(5.0);
  const TactileObservation minus = tactile_embedding(-5.0);
  double dist = 0.0;
  for (int j = 0; j < kTactileFeatureDim; ++j) {
    dist += std::abs(plus.features[j] - minus.features[j]);
  }
  CHECK(dist > 0.1);

  RngStream a(2, "grasp/obs");
  RngStream b(2, "grasp/obs");
  const TactileObservation oa = observe_tactile(3.0, TactileModel{}, a);
  const TactileObservation ob = observe_tactile(3.0, TactileModel{}, b);
  for (int j = 0; j < kTactileFeatureDim; ++j) {
    CHECK(oa.features[j] == ob.features[j]);
  }
}

TEST_CASE("estimator with one sample is constant") {
  OffsetEstimator est;
  est.add_sample(tactile_embedding(4.2), 4.2);
  CHECK(est.estimate(tactile_embedding(-9.0)) == doctest::Approx(4.2));
  CHECK(est.estimate(tactile_embedding(8.0)) == doctest::Approx(4.2));
}

TEST_CASE("estimator is symmetric on a symmetric training set") {
  OffsetEstimator est;
  for (double dx : {-4.0, -2.0, 0.0, 2.0, 4.0}) {
    est.add_sample(tactile_embedding(dx), dx);
  }
  // k = 5 covers the whole set, so the prediction is the exact mean.
  CHECK(est.estimate(tactile_embedding(0.0)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("unfitted estimator throws") {
  OffsetEstimator est;
  CHECK_THROWS_AS(est.estimate(tactile_embedding(0.0)), std::runtime_error);
}

TEST_CASE("estimator interpolates its own noiseless training nodes") {
  RngStream rng(10, "grasp/nodes");
  const TactileModel noiseless{0.0};
  OffsetEstimator est = fit_offset_estimator(200, noiseless, rng);
  RngStream probe(10, "grasp/nodes");  // replay the same draws
  for (int i = 0; i < 20; ++i) {
    const double dx = inject_grasp_error(probe);
    const double predicted = est.estimate(tactile_embedding(dx));
    // Nearest neighbors cluster around dx; the local average stays close.
    CHECK(std::abs(predicted - dx) < 0.6);
  }
}

TEST_CASE("estimator error shrinks with training size") {
  const TactileModel model;
  double mae10 = 0.0, mae100 = 0.0, mae1000 = 0.0;
  const int seeds = 3;
  for (int s = 0; s < seeds; ++s) {
    for (int m : {10, 100, 1000}) {
      RngStream fit_rng(900 + s, "grasp/ablation-fit-" + std::to_string(m));
      const OffsetEstimator est = fit_offset_estimator(m, model, fit_rng);
      RngStream eval_rng(900 + s, "grasp/ablation-eval");
      const double mae = evaluate_offset_mae(est, 200, model, eval_rng);
      (m == 10 ? mae10 : m == 100 ? mae100 : mae1000) += mae / seeds;
    }
  }
  CHECK(mae1000 < mae100);
  CHECK(mae100 < mae10);
  CHECK(mae1000 <= 0.3);
}

TEST_CASE("insert_peg clearance rule") {
  const double clearance = radial_clearance_mm();
  CHECK(!insert_peg(7.0, 0.0, clearance));        // baseline miss
  CHECK(insert_peg(7.0, 6.8, clearance));         // corrected
  CHECK(insert_peg(0.5, 0.0, clearance));         // boundary inclusive
  CHECK(!insert_peg(0.5000001, 0.0, clearance));  // just outside

  GraspState state;
  state.offset_mm = -3.2;
  CHECK(insert_peg(state, -3.0, clearance));
}
