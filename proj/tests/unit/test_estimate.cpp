#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mttbd/estimate.hpp"
#include "mttbd/filter.hpp"

using namespace mttbd;

namespace {

Eigen::VectorXd vec4(double x, double vx, double y, double vy) {
  Eigen::VectorXd v(4);
  v << x, vx, y, vy;
  return v;
}

// Particle set over two target models with hand-chosen weights.
// Weights are stored in log domain, as the filter produces them.
ParticleSet make_set(const std::vector<double>& weights,
                     const std::vector<std::vector<TargetState>>& targets) {
  ParticleSet set;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    Particle p;
    p.state.targets = targets[k];
    p.log_weight = std::log(weights[k]);
    set.particles.push_back(std::move(p));
  }
  return set;
}

}  // namespace

TEST_CASE("estimate computes activity mass and conditional means by hand") {
  // Three particles, weights 0.5 / 0.3 / 0.2. Target 0 is active in the
  // first two (mass 0.8), target 1 only in the last (mass 0.2).
  const ParticleSet set = make_set(
      {0.5, 0.3, 0.2},
      {
          {{vec4(1, 0, 2, 0), true}, {vec4(9, 9, 9, 9), false}},
          {{vec4(3, 0, 4, 0), true}, {vec4(9, 9, 9, 9), false}},
          {{vec4(5, 5, 5, 5), false}, {vec4(7, 0, 8, 0), true}},
      });
  const MultiTargetEstimate est = estimate(set);
  REQUIRE(est.targets.size() == 2);

  CHECK(est.targets[0].activity_prob == doctest::Approx(0.8));
  CHECK(est.targets[0].present);
  // Conditional mean: (0.5 * [1,0,2,0] + 0.3 * [3,0,4,0]) / 0.8.
  CHECK(est.targets[0].state(0) == doctest::Approx(1.75));
  CHECK(est.targets[0].state(2) == doctest::Approx(2.75));

  CHECK(est.targets[1].activity_prob == doctest::Approx(0.2));
  CHECK(!est.targets[1].present);
  CHECK(est.targets[1].state.size() == 0);

  CHECK(est.present_count() == 1);
  const auto pos = est.positions();
  REQUIRE(pos.size() == 1);
  CHECK(pos[0].x() == doctest::Approx(1.75));
  CHECK(pos[0].y() == doctest::Approx(2.75));
}

TEST_CASE("a mass exactly at the threshold counts as present") {
  const ParticleSet set = make_set(
      {0.5, 0.5},
      {
          {{vec4(2, 0, 2, 0), true}},
          {{vec4(4, 0, 4, 0), false}},
      });
  const MultiTargetEstimate est = estimate(set, 0.5);
  CHECK(est.targets[0].activity_prob == doctest::Approx(0.5));
  CHECK(est.targets[0].present);
  CHECK(est.targets[0].state(0) == doctest::Approx(2.0));

  // A slightly higher threshold flips the declaration.
  CHECK(!estimate(set, 0.5 + 1e-9).targets[0].present);
}

TEST_CASE("negligible activity mass yields an absent estimate at any threshold") {
  ParticleSet set = make_set(
      {1.0, 1e-300},
      {
          {{vec4(0, 0, 0, 0), false}},
          {{vec4(1, 1, 1, 1), true}},
      });
  // Threshold zero would otherwise declare it present on 1e-300 mass.
  const MultiTargetEstimate est = estimate(set, 0.0);
  CHECK(!est.targets[0].present);
  CHECK(est.targets[0].state.size() == 0);
}

TEST_CASE("weights are normalized internally") {
  // Same set twice, once with weights scaled by 1000: identical estimates.
  const std::vector<std::vector<TargetState>> targets = {
      {{vec4(1, 0, 1, 0), true}},
      {{vec4(3, 0, 3, 0), true}},
  };
  const MultiTargetEstimate a = estimate(make_set({0.25, 0.75}, targets));
  const MultiTargetEstimate b = estimate(make_set({250.0, 750.0}, targets));
  CHECK(a.targets[0].activity_prob == doctest::Approx(b.targets[0].activity_prob));
  CHECK(a.targets[0].state(0) == doctest::Approx(b.targets[0].state(0)));
  CHECK(a.targets[0].state(0) == doctest::Approx(2.5));
}

TEST_CASE("positions can read other state components") {
  const ParticleSet set = make_set({1.0}, {{{vec4(10, 20, 30, 40), true}}});
  const auto pos = estimate(set).positions(1, 3);
  REQUIRE(pos.size() == 1);
  CHECK(pos[0].x() == doctest::Approx(20.0));
  CHECK(pos[0].y() == doctest::Approx(40.0));
}

TEST_CASE("estimate rejects malformed particle sets") {
  CHECK_THROWS_AS(estimate(ParticleSet{}), std::invalid_argument);

  // Inconsistent per-particle target counts.
  ParticleSet bad = make_set(
      {0.5, 0.5},
      {
          {{vec4(0, 0, 0, 0), true}},
          {{vec4(0, 0, 0, 0), true}, {vec4(0, 0, 0, 0), false}},
      });
  CHECK_THROWS_AS(estimate(bad), std::invalid_argument);
}

TEST_CASE("all-inactive sets give zero probabilities and no positions") {
  const ParticleSet set = make_set(
      {0.6, 0.4},
      {
          {{vec4(1, 2, 3, 4), false}, {vec4(5, 6, 7, 8), false}},
          {{vec4(1, 2, 3, 4), false}, {vec4(5, 6, 7, 8), false}},
      });
  const MultiTargetEstimate est = estimate(set);
  CHECK(est.present_count() == 0);
  CHECK(est.positions().empty());
  for (const auto& t : est.targets) CHECK(t.activity_prob == 0.0);
}
