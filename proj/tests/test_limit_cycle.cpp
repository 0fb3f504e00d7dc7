#include <algorithm>
#include <random>

#include <doctest.h>

#include "fcsmpc/limit_cycle.hpp"
#include "helpers.hpp"

using fcsmpc::CycleCriterion;
using fcsmpc::CycleNorm;
using fcsmpc::DiscreteSystem;
using fcsmpc::InputVector;
using fcsmpc::LimitCycle;
using fcsmpc::Matrix;
using fcsmpc::Vector;

namespace {

CycleCriterion unit_criterion(double y_ref) {
  CycleCriterion criterion;
  criterion.y_ref = Vector::Constant(1, y_ref);
  criterion.gamma = Matrix::Identity(1, 1);
  criterion.norm = CycleNorm::two_norm;
  return criterion;
}

DiscreteSystem scalar_plant(double a, double b) {
  DiscreteSystem sys;
  sys.A = Matrix::Constant(1, 1, a);
  sys.B = Matrix::Constant(1, 1, b);
  sys.C = Matrix::Constant(1, 1, 1.0);
  sys.sample_period = 1.0;
  return sys;
}

}  // namespace

TEST_CASE("index bijection endpoints") {
  const auto first = fcsmpc::input_sequence_from_index(1, 2, 3);
  for (const InputVector& u : first) {
    CHECK(u.digit() == 0);
  }
  const auto last = fcsmpc::input_sequence_from_index(64, 2, 3);
  for (const InputVector& u : last) {
    CHECK(u.digit() == 3);
  }
  CHECK_THROWS_AS(fcsmpc::input_sequence_from_index(0, 2, 3),
                  fcsmpc::ValidationError);
  CHECK_THROWS_AS(fcsmpc::input_sequence_from_index(65, 2, 3),
                  fcsmpc::ValidationError);
}

TEST_CASE("index 7 at m=2, p=2 decodes to digits (1, 2)") {
  const auto seq = fcsmpc::input_sequence_from_index(7, 2, 2);
  REQUIRE(seq.size() == 2);
  CHECK(seq[0] == InputVector::from_bits({0, 1}));
  CHECK(seq[1] == InputVector::from_bits({1, 0}));
}

TEST_CASE("index bijection round-trips over all sequences at m=2, p=2") {
  for (std::uint64_t c = 1; c <= 16; ++c) {
    const auto seq = fcsmpc::input_sequence_from_index(c, 2, 2);
    CHECK(fcsmpc::index_of_input_sequence(seq) == c);
  }
  // and distinct indices give distinct sequences (pigeonhole via round-trip)
}

TEST_CASE("all-zero inputs induce the origin cycle") {
  const DiscreteSystem& sys = helpers::amplifier_400khz();
  const auto inputs = std::vector<InputVector>(4, InputVector::zero(2));
  const LimitCycle cycle = fcsmpc::cycle_from_inputs(sys, inputs);
  for (const Vector& x : cycle.states) {
    CHECK(x.cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(cycle.index == 1);
}

TEST_CASE("period-1 cycle is the constant-input fixed point") {
  const DiscreteSystem sys = scalar_plant(0.5, 1.0);
  const LimitCycle cycle =
      fcsmpc::cycle_from_inputs(sys, {InputVector::ones(1)});
  // x = (I - A)^{-1} B u = 1 / 0.5
  CHECK(cycle.states[0](0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("published input cycle reproduces the published state cycle") {
  const DiscreteSystem& sys = helpers::amplifier_400khz();
  const LimitCycle cycle =
      fcsmpc::cycle_from_inputs(sys, helpers::published_input_cycle());
  const Matrix& expected = helpers::published_state_cycle();
  for (int phase = 0; phase < 6; ++phase) {
    CHECK((cycle.states[phase] - expected.col(phase)).cwiseAbs().maxCoeff() <
          1e-3);
  }
  CHECK(cycle.index == 2433);
  fcsmpc::verify_periodicity(sys, cycle);
}

TEST_CASE("cycle cost on the published digits matches hand arithmetic") {
  // Feed the printed four-decimal states straight into the cost: the mean
  // two-norm deviation is (0.0003+0.0013+0.0013+0.0003+0.0006+0.0006)/6.
  LimitCycle printed;
  printed.period = 6;
  printed.index = 2433;
  const Matrix& states = helpers::published_state_cycle();
  for (int phase = 0; phase < 6; ++phase) {
    printed.states.push_back(states.col(phase));
  }
  printed.inputs = helpers::published_input_cycle();

  Matrix c_row = Matrix::Zero(1, 5);
  c_row(0, 4) = 1.0;
  const double cost = fcsmpc::cycle_cost(printed, unit_criterion(6.0), c_row);
  CHECK(cost == doctest::Approx(0.0044 / 6.0).epsilon(1e-9));
}

TEST_CASE("cycle cost vanishes on exact tracking and zero weighting") {
  const DiscreteSystem sys = scalar_plant(0.5, 1.0);
  const LimitCycle cycle =
      fcsmpc::cycle_from_inputs(sys, {InputVector::ones(1)});

  CycleCriterion exact = unit_criterion(2.0);
  CHECK(fcsmpc::cycle_cost(cycle, exact, sys.C) == doctest::Approx(0.0));

  CycleCriterion weightless = unit_criterion(-3.0);
  weightless.gamma = Matrix::Zero(1, 1);
  CHECK(fcsmpc::cycle_cost(cycle, weightless, sys.C) == doctest::Approx(0.0));
}

TEST_CASE("optimal cycle for a zero reference is the zero cycle") {
  const DiscreteSystem& sys = helpers::amplifier_400khz();
  const LimitCycle best = fcsmpc::optimal_limit_cycle(sys, unit_criterion(0.0), 2);
  CHECK(best.index == 1);
  for (const Vector& x : best.states) {
    CHECK(x.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("optimal cycle beats every enumerated candidate") {
  const DiscreteSystem sys = scalar_plant(0.5, 1.0);
  const CycleCriterion criterion = unit_criterion(1.0);
  const LimitCycle best = fcsmpc::optimal_limit_cycle(sys, criterion, 2);
  const double best_cost = fcsmpc::cycle_cost(best, criterion, sys.C);

  // m = 1, p = 2: the four candidates admit closed forms. Stationary points
  // of u-sequences (0,0), (1,1) sit at 0 and 2; alternating sequences
  // oscillate between 2/3 and 4/3.
  for (std::uint64_t c = 1; c <= 4; ++c) {
    const LimitCycle candidate = fcsmpc::cycle_from_inputs(
        sys, fcsmpc::input_sequence_from_index(c, 1, 2));
    CHECK(best_cost <= fcsmpc::cycle_cost(candidate, criterion, sys.C) +
                           1e-15);
  }
  // alternating cycles deviate by 1/3 on both phases; constants by 1
  CHECK(best_cost == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(best.index == 2);  // smallest index among the two alternating ties
}

TEST_CASE("amplifier optimal cycle matches the published mode sequence") {
  const DiscreteSystem& sys = helpers::amplifier_400khz();
  const LimitCycle best = fcsmpc::optimal_limit_cycle(sys, unit_criterion(6.0), 6);
  CHECK(best.index == 39);  // smallest-index rotation of the published cycle
  CHECK(helpers::is_rotation_of(fcsmpc::cycle_modes(best),
                                {3, 2, 3, 1, 1, 1}));
  const Vector ripple = fcsmpc::cycle_ripple(best, sys.C);
  CHECK(ripple(0) == doctest::Approx(2.6153e-3).epsilon(0.02));
  // full-precision regression constant
  CHECK(ripple(0) == doctest::Approx(2.615257e-3).epsilon(1e-5));
}

TEST_CASE("period-1 search picks the best constant input") {
  // Constant-input fixed points of the amplifier sit near 0 A (both stages
  // off or both on) and +-36 A (one stage driving the load); a 40 A
  // reference makes the positive-drive input the unique winner.
  const DiscreteSystem& sys = helpers::amplifier_400khz();
  const CycleCriterion criterion = unit_criterion(40.0);
  const LimitCycle best = fcsmpc::optimal_limit_cycle(sys, criterion, 1);
  CHECK(fcsmpc::mode_of_input(best.inputs[0]) == 3);

  double best_brute = std::numeric_limits<double>::infinity();
  std::uint64_t best_index = 0;
  for (std::uint64_t c = 1; c <= 4; ++c) {
    const LimitCycle candidate = fcsmpc::cycle_from_inputs(
        sys, fcsmpc::input_sequence_from_index(c, 2, 1));
    const double cost = fcsmpc::cycle_cost(candidate, criterion, sys.C);
    if (cost < best_brute) {
      best_brute = cost;
      best_index = c;
    }
  }
  CHECK(best.index == best_index);
  CHECK(fcsmpc::cycle_cost(best, criterion, sys.C) ==
        doctest::Approx(best_brute));
}

TEST_CASE("optimal cycle search rejects unstable systems and huge budgets") {
  DiscreteSystem unstable = scalar_plant(1.5, 1.0);
  CHECK_THROWS_AS(fcsmpc::optimal_limit_cycle(unstable, unit_criterion(0.0), 2),
                  fcsmpc::UnstableSystemError);

  const DiscreteSystem& sys = helpers::amplifier_400khz();
  CHECK_THROWS_AS(fcsmpc::optimal_limit_cycle(sys, unit_criterion(6.0), 13),
                  fcsmpc::CapacityError);  // 4^13 > 2^24
}

TEST_CASE("ripple is zero for constant cycles and shift-invariant") {
  const DiscreteSystem sys = scalar_plant(0.5, 1.0);
  const LimitCycle fixed =
      fcsmpc::cycle_from_inputs(sys, {InputVector::ones(1)});
  CHECK(fcsmpc::cycle_ripple(fixed, sys.C)(0) == doctest::Approx(0.0));

  const DiscreteSystem& amp = helpers::amplifier_400khz();
  const LimitCycle cycle =
      fcsmpc::cycle_from_inputs(amp, helpers::published_input_cycle());
  auto rotated_inputs = helpers::published_input_cycle();
  std::rotate(rotated_inputs.begin(), rotated_inputs.begin() + 2,
              rotated_inputs.end());
  const LimitCycle rotated = fcsmpc::cycle_from_inputs(amp, rotated_inputs);
  CHECK(fcsmpc::cycle_ripple(cycle, amp.C)(0) ==
        doctest::Approx(fcsmpc::cycle_ripple(rotated, amp.C)(0))
            .epsilon(1e-12));
}

TEST_CASE("rotating the input sequence rotates the state cycle") {
  const DiscreteSystem& sys = helpers::amplifier_400khz();
  const LimitCycle cycle =
      fcsmpc::cycle_from_inputs(sys, helpers::published_input_cycle());
  auto rotated_inputs = helpers::published_input_cycle();
  std::rotate(rotated_inputs.begin(), rotated_inputs.begin() + 1,
              rotated_inputs.end());
  const LimitCycle rotated = fcsmpc::cycle_from_inputs(sys, rotated_inputs);
  for (int phase = 0; phase < 6; ++phase) {
    CHECK((rotated.states[phase] - cycle.states[(phase + 1) % 6])
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("every enumerated cycle satisfies its periodicity certificate") {
  std::mt19937_64 rng(811);
  fcsmpc::DiscreteSystem sys;
  sys.A = helpers::random_stable(rng, 3);
  sys.B = helpers::random_matrix(rng, 3, 2);
  sys.C = helpers::random_matrix(rng, 1, 3);
  sys.sample_period = 1.0;

  for (int period = 1; period <= 3; ++period) {
    const std::uint64_t total = 1ull << (2 * period);
    for (std::uint64_t c = 1; c <= total; ++c) {
      const LimitCycle cycle = fcsmpc::cycle_from_inputs(
          sys, fcsmpc::input_sequence_from_index(c, 2, period));
      fcsmpc::verify_periodicity(sys, cycle);
    }
  }
}

TEST_CASE("cycle construction surfaces a singular anchor system") {
  DiscreteSystem sys = scalar_plant(1.0, 1.0);  // I - A^p == 0
  CHECK_THROWS_AS(
      fcsmpc::cycle_from_inputs(sys, {InputVector::ones(1)}),
      fcsmpc::SingularMatrixError);
}
