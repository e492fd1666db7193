#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fixiter/problems.hpp"
#include "fixiter/random.hpp"
#include "fixiter/schemes.hpp"

using namespace fixiter;
using Catch::Approx;

namespace {

MappingSpec halving_map() {
    return contraction(AffineMap{Matrix::from_rows({{0.5}}), {0.0}}, 0.5,
                       FixedPointSet(FinitePointSet{{Point{0.0}}}));
}

}  // namespace

TEST_CASE("one-step values on the halving map") {
    // With T: x -> x/2, x = 1, alpha = beta = 1/2, each scheme produces a
    // dyadic rational that can be checked by direct hand evaluation:
    //   picard: 1/2
    //   mann:   1/2 + (1/2)(1/2)         = 3/4
    //   ishikawa: y = 3/4; 1/2 + (1/2)(3/8)            = 11/16
    //   s:      b = 3/4; (1/2)(1/2) + (1/2)(3/8)       = 7/16
    //   normal_s: T(3/4)                               = 3/8
    //   ky:     z = 3/4; y = (1/2)(3/4) + (1/2)(3/8) = 9/16; T(9/16) = 9/32
    MappingSpec t = halving_map();
    Point x{1.0};
    CHECK(picard_step(t, x)[0] == 0.5);
    CHECK(mann_step(t, x, 0.5)[0] == 0.75);
    CHECK(ishikawa_step(t, x, 0.5, 0.5)[0] == 0.6875);
    CHECK(s_step(t, x, 0.5, 0.5)[0] == 0.4375);
    CHECK(normal_s_step(t, x, 0.5)[0] == 0.375);
    CHECK(ky_step(t, x, 0.5, 0.5)[0] == 0.28125);
}

TEST_CASE("steps reject parameters outside (0,1)") {
    MappingSpec t = halving_map();
    Point x{1.0};
    CHECK_THROWS_AS(mann_step(t, x, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mann_step(t, x, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ishikawa_step(t, x, 0.5, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(s_step(t, x, 1.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(normal_s_step(t, x, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ky_step(t, x, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("dispatcher matches the individual step functions") {
    const ProblemSpec& spiral = *find_builtin("spiral3d");
    const MappingSpec& t = spiral.mapping;
    Schedule sched = Schedule::constant(0.6, 0.3, 0.3);
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        Point x = random_point(rng, 3, 4.0);
        CHECK(scheme_step(SchemeId::picard, t, x, sched, 1) == picard_step(t, x));
        CHECK(scheme_step(SchemeId::mann, t, x, sched, 1) == mann_step(t, x, 0.6));
        CHECK(scheme_step(SchemeId::ishikawa, t, x, sched, 1) == ishikawa_step(t, x, 0.6, 0.3));
        CHECK(scheme_step(SchemeId::s, t, x, sched, 1) == s_step(t, x, 0.6, 0.3));
        CHECK(scheme_step(SchemeId::normal_s, t, x, sched, 1) == normal_s_step(t, x, 0.6));
        CHECK(scheme_step(SchemeId::ky, t, x, sched, 1) == ky_step(t, x, 0.6, 0.3));
    }
}

TEST_CASE("near-degenerate parameters reduce one scheme to another") {
    // As beta -> 0, the ky step collapses to the normal_s step; as
    // alpha -> 0, normal_s collapses to picard.
    const ProblemSpec& spiral = *find_builtin("spiral3d");
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 5; ++rep) {
        Point x = random_point(rng, 3, 5.0);
        Point a = ky_step(spiral.mapping, x, 0.5, 1e-12);
        Point b = normal_s_step(spiral.mapping, x, 0.5);
        CHECK(distance(a, b, NormKind::euclidean()) <= 1e-10);
        Point c = normal_s_step(spiral.mapping, x, 1e-12);
        Point d = picard_step(spiral.mapping, x);
        CHECK(distance(c, d, NormKind::euclidean()) <= 1e-10);
    }
}

TEST_CASE("one ky step on the swap map lands on the diagonal") {
    // Averaging x with its swap projects onto the diagonal, so the scheme
    // hits a fixed point after a single step from any start.
    const ProblemSpec& swap = *find_builtin("swap");
    Point out = ky_step(swap.mapping, Point{1.5, -0.5}, 0.5, 0.5);
    CHECK(out == Point{0.5, 0.5});
}

TEST_CASE("picard run on the halving map") {
    MappingSpec t = halving_map();
    StopRule stop{1e-10, 500, std::nullopt};
    IterationTrace trace =
        run_iteration(SchemeId::picard, t, Point{1.0}, Schedule::constant(0.5, 0.5, 0.5), stop);

    CHECK(trace.stop_reason == StopReason::residual_below_tol);
    // x_n = 2^(1-n), residual_n = 2^(-n); the first residual below 1e-10
    // is 2^(-34), so the trace ends at n = 34 with x_34 = 2^(-33).
    CHECK(trace.length() == 34);
    CHECK(trace.residual(trace.length()) < 1e-10);
    CHECK(trace.iterate(trace.length())[0] == std::ldexp(1.0, -33));

    REQUIRE(trace.errors);
    REQUIRE(trace.reference_point);
    CHECK(*trace.reference_point == Point{0.0});
    for (int n = 1; n <= trace.length(); ++n) {
        CHECK(trace.error(n) == std::ldexp(1.0, 1 - n));
        CHECK(trace.residual(n) == 0.5 * trace.error(n));
        CHECK(trace.dist(n) == trace.error(n));
    }
    CHECK(trace.stop.divergence_cap.has_value());
    trace.check_consistent();
}

TEST_CASE("trace records the first iterate as n = 1") {
    MappingSpec t = halving_map();
    StopRule stop{1e-10, 3, std::nullopt};
    IterationTrace trace =
        run_iteration(SchemeId::ky, t, Point{1.0}, Schedule::constant(0.5, 0.5, 0.5), stop);
    CHECK(trace.iterate(1) == Point{1.0});
    CHECK(trace.length() == 3);
    CHECK(trace.stop_reason == StopReason::max_iter);
    CHECK(trace.iterate(2)[0] == 0.28125);
    CHECK(trace.iterate(3)[0] == Approx(0.28125 * 0.28125));
}

TEST_CASE("max_iter stop on a non-convergent run") {
    const ProblemSpec& rq = *find_builtin("rotation_quarter");
    StopRule stop{1e-10, 50, std::nullopt};
    IterationTrace trace = run_iteration(SchemeId::picard, rq.mapping, rq.default_start,
                                         Schedule::constant(0.5, 0.5, 0.5), stop);
    CHECK(trace.stop_reason == StopReason::max_iter);
    CHECK(trace.length() == 50);
    // picard on an isometry keeps the error constant
    CHECK(trace.error(50) == Approx(trace.error(1)));
}

TEST_CASE("divergence cap stops an expanding run") {
    // A doubling map mis-declared nonexpansive: the runner still detects
    // the blow-up via the cap.
    MappingSpec doubling = nonexpansive(AffineMap{Matrix::from_rows({{2.0}}), {0.0}});
    StopRule stop{1e-10, 500, 100.0};
    IterationTrace trace = run_iteration(SchemeId::picard, doubling, Point{1.0},
                                         Schedule::constant(0.5, 0.5, 0.5), stop);
    CHECK(trace.stop_reason == StopReason::diverged);
    CHECK(trace.length() < 12);
    for (int n = 1; n <= trace.length(); ++n) CHECK(std::isfinite(trace.iterate(n)[0]));
}

TEST_CASE("default divergence cap scales with the start") {
    MappingSpec doubling = nonexpansive(AffineMap{Matrix::from_rows({{2.0}}), {0.0}});
    StopRule stop{1e-10, 10000, std::nullopt};
    IterationTrace trace = run_iteration(SchemeId::picard, doubling, Point{1.0},
                                         Schedule::constant(0.5, 0.5, 0.5), stop);
    CHECK(trace.stop_reason == StopReason::diverged);
    REQUIRE(trace.stop.divergence_cap);
    CHECK(*trace.stop.divergence_cap == Approx(2e12));
}

TEST_CASE("run_iteration rejects bad inputs") {
    MappingSpec t = halving_map();
    StopRule bad{0.0, 10, std::nullopt};
    CHECK_THROWS_AS(
        run_iteration(SchemeId::picard, t, Point{1.0}, Schedule::constant(0.5, 0.5, 0.5), bad),
        std::invalid_argument);
}

TEST_CASE("traces without declared fixed points carry no errors") {
    MappingSpec rot = nonexpansive(Rotation2D{1.0});  // fixed set not declared
    StopRule stop{1e-10, 20, std::nullopt};
    IterationTrace trace = run_iteration(SchemeId::ky, rot, Point{1.0, 0.0},
                                         Schedule::constant(0.5, 0.5, 0.5), stop);
    CHECK_FALSE(trace.errors);
    CHECK_FALSE(trace.dist_to_fixed);
    CHECK_FALSE(trace.reference_point);
    CHECK(trace.length() == 20);
}

TEST_CASE("reciprocal schedule drives a convergent mann run") {
    MappingSpec t = halving_map();
    Schedule ramp(ReciprocalRule{0.9, 0.4, 1.0}, ConstantRule{0.5}, 0.5);
    StopRule stop{1e-12, 200, std::nullopt};
    IterationTrace trace = run_iteration(SchemeId::mann, t, Point{1.0}, ramp, stop);
    CHECK(trace.stop_reason == StopReason::residual_below_tol);
    for (int n = 1; n < trace.length(); ++n) CHECK(trace.error(n + 1) < trace.error(n));
}

TEST_CASE("non-euclidean norms thread through the trace") {
    const ProblemSpec& swap = *find_builtin("swap");
    StopRule stop{1e-10, 50, std::nullopt};
    IterationTrace trace = run_iteration(SchemeId::mann, swap.mapping, Point{1.0, 0.0},
                                         Schedule::constant(0.5, 0.5, 0.5), stop, NormKind::max());
    CHECK(trace.norm_kind.name() == "max");
    // mann with alpha=1/2 on the swap map reaches the diagonal in one step
    CHECK(trace.length() >= 2);
    CHECK(trace.residual(2) == Approx(0.0).margin(1e-15));
}
