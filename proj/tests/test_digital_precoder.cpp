// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "hbf/digital_precoder.hpp"
#include "hbf/errors.hpp"
#include "oracles.hpp"

using namespace hbf;

namespace {

ChannelState nominal(int n_tx, double theta = 0.0) {
  ChannelState s;
  s.theta = theta;
  s.geom = UlaGeometry(n_tx);
  return s;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an hbf::Error");
  return ErrorCode::kInvalidArgument;
}

constexpr double kFrozenSingleGridObjective = 0.043171248883392452;

}  // namespace

TEST_CASE("uncertainty grid") {
  const UncertaintySet ue{0.0, deg_to_rad(5.0)};
  const auto g2 = ue.grid(2);
  REQUIRE(g2.size() == 2);
  CHECK(g2[0] == doctest::Approx(deg_to_rad(-5.0)));
  CHECK(g2[1] == doctest::Approx(0.0));
  const auto g10 = ue.grid(10);
  CHECK(g10.back() == doctest::Approx(deg_to_rad(4.0)));
  CHECK_THROWS_AS(ue.grid(0), Error);
  const UncertaintySet edge{deg_to_rad(88.0), deg_to_rad(5.0)};
  CHECK_THROWS_AS(edge.grid(10), Error);
}

TEST_CASE("codebook structure") {
  const UlaGeometry geom(8);
  SUBCASE("single UE, two pilots") {
    const UncertaintySet ue{0.0, deg_to_rad(5.0)};
    const auto cb = build_codebook(geom, std::span(&ue, 1), 2);
    REQUIRE(cb.size() == 2);
    CHECK(cb.grid_per_ue == 1);
    const double t1 = deg_to_rad(-5.0);
    CHECK(cb.grid_angles[0] == doctest::Approx(t1));
    CHECK((cb.beams.col(0) - steering(geom, t1)).norm() < 1e-14);
    CHECK((cb.beams.col(1) - steering_deriv_theta(geom, t1)).norm() < 1e-14);
  }
  SUBCASE("two UEs, twenty pilots") {
    const std::vector<UncertaintySet> ues{{0.0, deg_to_rad(5.0)}, {deg_to_rad(60.0), deg_to_rad(5.0)}};
    const auto cb = build_codebook(geom, ues, 20);
    REQUIRE(cb.size() == 20);
    CHECK(cb.ue_count == 2);
    CHECK(cb.grid_per_ue == 5);
    for (int l = 0; l < 2; ++l) {
      const auto grid = ues[static_cast<size_t>(l)].grid(5);
      for (int g = 0; g < 5; ++g) {
        CHECK((cb.beams.col(10 * l + g) - steering(geom, grid[static_cast<size_t>(g)])).norm() < 1e-14);
        CHECK((cb.beams.col(10 * l + 5 + g) - steering_deriv_theta(geom, grid[static_cast<size_t>(g)]))
                  .norm() < 1e-14);
        CHECK(cb.grid_angles[static_cast<size_t>(5 * l + g)] == grid[static_cast<size_t>(g)]);
      }
    }
  }
  SUBCASE("pilot count errors") {
    const UncertaintySet ue{0.0, deg_to_rad(5.0)};
    CHECK(code_of([&] { build_codebook(geom, std::span(&ue, 1), 3); }) == ErrorCode::kTooFewPilots);
    CHECK(code_of([&] { build_codebook(geom, std::span(&ue, 1), 0); }) == ErrorCode::kTooFewPilots);
    const std::vector<UncertaintySet> ues(2, ue);
    CHECK(code_of([&] { build_codebook(geom, ues, 2); }) == ErrorCode::kTooFewPilots);
    CHECK(code_of([&] { build_codebook(geom, ues, 6); }) == ErrorCode::kTooFewPilots);
  }
}

TEST_CASE("assemble f_opt") {
  const UlaGeometry geom(6);
  const UncertaintySet ue{0.0, deg_to_rad(5.0)};
  const auto cb = build_codebook(geom, std::span(&ue, 1), 4);
  const double p = 2.0;
  const RealVector power = cb.column_power();

  RealVector q = RealVector::Zero(4);
  q(0) = p / power(0);
  const auto f1 = assemble_f_opt(cb, q);
  CHECK((f1.col(0) - std::sqrt(q(0)) * cb.beams.col(0)).norm() < 1e-14);
  CHECK(f1.rightCols(3).norm() == 0.0);

  const RealVector uni = uniform_allocation(cb, p);
  const auto fu = assemble_f_opt(cb, uni);
  CHECK(fu.squaredNorm() == doctest::Approx(p).epsilon(1e-12));
  for (int m = 0; m < 4; ++m) {
    CHECK((fu.col(m) - std::sqrt(uni(m)) * cb.beams.col(m)).norm() < 1e-14);
    CHECK(uni(m) * power(m) == doctest::Approx(p / 4));
  }

  CHECK_THROWS_AS(assemble_f_opt(cb, RealVector::Ones(3)), Error);
  RealVector neg = uni;
  neg(2) = -1e-3;
  CHECK_THROWS_AS(assemble_f_opt(cb, neg), Error);
}

TEST_CASE("power allocation improves on uniform and meets the power budget") {
  const UlaGeometry geom(16);
  for (int m : {2, 4, 8, 20}) {
    const UncertaintySet ue{deg_to_rad(10.0), deg_to_rad(5.0)};
    const auto cb = build_codebook(geom, std::span(&ue, 1), m);
    const auto states = design_states(cb, nominal(16));
    const double p = 0.01;
    const auto alloc = optimize_power_allocation(cb, states, p);
    CHECK(alloc.objective <= alloc.uniform_objective);
    CHECK((alloc.q.array() >= 0.0).all());
    const auto f = assemble_f_opt(cb, alloc.q);
    CHECK(std::abs(f.squaredNorm() - p) <= 1e-9 * p);
    CHECK(robust_objective(cb, states, alloc.q) == doctest::Approx(alloc.objective).epsilon(1e-12));
    CHECK(robust_objective(cb, states, uniform_allocation(cb, p)) ==
          doctest::Approx(alloc.uniform_objective).epsilon(1e-12));
    for (size_t i = 1; i < alloc.stage_objectives.size(); ++i) {
      CHECK(alloc.stage_objectives[i] <= alloc.stage_objectives[i - 1]);
    }
  }
}

TEST_CASE("power allocation scales with total power") {
  const UlaGeometry geom(8);
  const UncertaintySet ue{0.0, deg_to_rad(5.0)};
  const auto cb = build_codebook(geom, std::span(&ue, 1), 4);
  const auto states = design_states(cb, nominal(8));
  const auto a1 = optimize_power_allocation(cb, states, 1.0);
  const auto a4 = optimize_power_allocation(cb, states, 4.0);
  CHECK((a4.q - 4.0 * a1.q).norm() <= 1e-6 * a4.q.norm());
  CHECK(a4.objective == doctest::Approx(a1.objective / 2.0).epsilon(1e-6));
}

TEST_CASE("power allocation agrees with a brute-force simplex search") {
  const UlaGeometry geom(8);
  const UncertaintySet ue{deg_to_rad(-20.0), deg_to_rad(6.0)};
  const auto cb = build_codebook(geom, std::span(&ue, 1), 4);
  const auto states = design_states(cb, nominal(8));
  const auto alloc = optimize_power_allocation(cb, states, 1.0);
  const auto brute = oracle::brute_force_allocation(cb, states, 1.0, 50);
  CHECK(std::abs(alloc.objective - brute.objective) <= 0.02 * brute.objective);
}

TEST_CASE("derivative beam power is what makes the angle identifiable") {
  // One grid point on the true angle: directional power alone leaves F rank one.
  const UlaGeometry geom(16);
  const UncertaintySet ue{deg_to_rad(5.0), deg_to_rad(5.0)};
  const auto cb = build_codebook(geom, std::span(&ue, 1), 2);
  const auto states = design_states(cb, nominal(16));
  REQUIRE(states.size() == 1);
  CHECK(states[0].theta == doctest::Approx(0.0));

  const RealVector power = cb.column_power();
  RealVector directional(2);
  directional << 1.0 / power(0), 0.0;
  CHECK(code_of([&] { aeb(assemble_f_opt(cb, directional), states[0]); }) ==
        ErrorCode::kDegenerateBound);

  const auto alloc = optimize_power_allocation(cb, states, 1.0);
  CHECK(alloc.q(1) > 0.0);
  CHECK(std::isfinite(alloc.objective));
  const auto brute = oracle::brute_force_allocation(cb, states, 1.0, 2000);
  CHECK(alloc.objective == doctest::Approx(brute.objective).epsilon(1e-3));
  // Frozen from the first run of this configuration.
  CHECK(alloc.objective == doctest::Approx(kFrozenSingleGridObjective).epsilon(1e-6));
}

TEST_CASE("unidentifiable grid is rejected") {
  const UlaGeometry geom(1);
  const UncertaintySet ue{0.0, deg_to_rad(5.0)};
  const auto cb = build_codebook(geom, std::span(&ue, 1), 2);
  const auto states = design_states(cb, nominal(1));
  CHECK(code_of([&] { optimize_power_allocation(cb, states, 1.0); }) == ErrorCode::kInfeasibleGrid);
}
