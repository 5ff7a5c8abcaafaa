#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "greenlab/capacity.hpp"
#include "greenlab/errors.hpp"
#include "greenlab/space.hpp"
#include "helpers.hpp"

using namespace greenlab;
using testutil::annulus;
using testutil::center_vertex;
using testutil::config;
using testutil::rel_err;

TEST_CASE("capacity problems are validated") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 16, 0.0);
    const int c = center_vertex(X);
    const auto dist = distances_from(X, c);

    CapacityProblem pr = annulus(X, c, 0.125, 0.375, 2.0);

    SUBCASE("empty core") {
        pr.core.clear();
        CHECK_THROWS_AS(solve_capacity(X, pr, config(2.0)), InvalidProblem);
    }
    SUBCASE("exponent at the degenerate end") {
        pr.p = 1.0;
        CHECK_THROWS_AS(solve_capacity(X, pr, config(1.0)), InvalidProblem);
    }
    SUBCASE("core escaping the domain") {
        pr.core.push_back(nearest_vertex(X, {0.5, 0.5, 0.0}));
        CHECK_THROWS_AS(solve_capacity(X, pr, config(2.0)), InvalidProblem);
    }
    SUBCASE("domain covering everything") {
        pr.domain.clear();
        for (int v = 0; v < X.vertexCount(); ++v) pr.domain.push_back(v);
        CHECK_THROWS_AS(solve_capacity(X, pr, config(2.0)), InvalidProblem);
    }
    SUBCASE("disconnected domain") {
        pr.domain.clear();
        for (int v = 0; v < X.vertexCount(); ++v)
            if (dist[v] < 0.2) pr.domain.push_back(v);
        pr.domain.push_back(nearest_vertex(X, {0.5, 0.5, 0.0}));
        pr.core = closed_ball_core(X, dist, 0.0625);
        CHECK_THROWS_AS(solve_capacity(X, pr, config(2.0)), DisconnectedDomain);
    }
}

TEST_CASE("annulus capacity approaches the closed form") {
    // Cap_2(B(r), B(R)) = 2*pi / log(R/r) in the plane
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 64, 0.0);
    const int c = center_vertex(X);
    const CapacityResult res =
        solve_capacity(X, annulus(X, c, 0.125, 0.375, 2.0), config(2.0, 1e-10));
    const double expected = 2.0 * M_PI / std::log(3.0);
    CHECK(rel_err(res.value, expected) < 0.05);
}

TEST_CASE("capacity is monotone in core and domain") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 32, 0.0);
    const int c = center_vertex(X);
    const EnergyConfig cfg = config(2.0, 1e-10);

    const double base =
        solve_capacity(X, annulus(X, c, 0.125, 0.375, 2.0), cfg).value;
    const double biggerCore =
        solve_capacity(X, annulus(X, c, 0.1875, 0.375, 2.0), cfg).value;
    const double biggerDomain =
        solve_capacity(X, annulus(X, c, 0.125, 0.4375, 2.0), cfg).value;

    CHECK(biggerCore > base);
    CHECK(biggerDomain < base);
}

TEST_CASE("capacitary potentials stay within their pins") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 32, 0.0);
    const int c = center_vertex(X);
    const CapacityProblem pr = annulus(X, c, 0.125, 0.375, 3.0);
    const CapacityResult res = solve_capacity(X, pr, config(3.0));

    std::vector<char> inCore(X.vertexCount(), 0), inDom(X.vertexCount(), 0);
    for (int v : pr.core) inCore[v] = 1;
    for (int v : pr.domain) inDom[v] = 1;
    for (int v = 0; v < X.vertexCount(); ++v) {
        CHECK(res.potential.values[v] >= 0.0);
        CHECK(res.potential.values[v] <= 1.0);
        if (inCore[v]) CHECK(res.potential.values[v] == 1.0);
        if (!inDom[v] && !inCore[v]) CHECK(res.potential.values[v] == 0.0);
    }
}

TEST_CASE("ring sweep warm starts match cold solves") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 64, 0.0);
    const int c = center_vertex(X);
    const std::vector<double> radii{0.1875, 0.125, 0.0625};
    const EnergyConfig cfg = config(3.0);

    const RingCapacityProfile prof = ring_capacity_sweep(X, c, radii, 0.25, cfg);
    REQUIRE(prof.rows.size() == 3);
    for (std::size_t i = 0; i < prof.rows.size(); ++i) {
        CHECK(prof.rows[i].converged);
        if (i > 0) {
            CHECK(prof.rows[i].r < prof.rows[i - 1].r);
            CHECK(prof.rows[i].capValue < prof.rows[i - 1].capValue);
            CHECK(prof.rows[i].ballMass < prof.rows[i - 1].ballMass);
        }
    }
    CHECK(prof.pointwiseQ == doctest::Approx(2.0).epsilon(0.15));

    const CapacityResult cold =
        solve_capacity(X, annulus(X, c, 0.0625, 0.25, 3.0), cfg);
    CHECK(rel_err(prof.rows.back().capValue, cold.value) < 1e-5);
}

TEST_CASE("ring sweep rejects bad radius lists") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 16, 0.0);
    const int c = center_vertex(X);
    CHECK_THROWS_AS(ring_capacity_sweep(X, c, {}, 0.25, config(2.0)),
                    InvalidInput);
    CHECK_THROWS_AS(ring_capacity_sweep(X, c, {0.25}, 0.25, config(2.0)),
                    InvalidInput);
    CHECK_THROWS_AS(ring_capacity_sweep(X, c, {0.125, 0.1}, 0.25, config(2.0)),
                    InvalidInput);  // 0.1 sits below 4h
}

TEST_CASE("sandwich regimes follow the exponent") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 128, 0.0);
    const int c = center_vertex(X);
    const std::vector<double> radii{0.25, 0.125, 0.0625, 0.03125};

    struct Want {
        double p;
        Regime regime;
    };
    for (const Want w : {Want{1.5, Regime::Below}, Want{2.0, Regime::Conformal},
                         Want{3.0, Regime::Above}}) {
        const RingCapacityProfile prof =
            ring_capacity_sweep(X, c, radii, 0.5, config(w.p));
        const SandwichReport rep = check_capacity_sandwich(prof);
        CHECK(rep.regime == w.regime);
        CHECK(rep.pass);
        CHECK(rep.spread >= 1.0);
        CHECK(rep.spread <= 10.0);
        CHECK(rep.fittedLowerConst > 0.0);
        CHECK(rep.ratios.size() == radii.size());
    }
}

TEST_CASE("sandwich needs four converged rows") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 64, 0.0);
    const int c = center_vertex(X);
    const RingCapacityProfile prof =
        ring_capacity_sweep(X, c, {0.1875, 0.125, 0.0625}, 0.25, config(2.0));
    CHECK_THROWS_AS(check_capacity_sandwich(prof), InsufficientRows);
}

TEST_CASE("singleton capacity trend tracks the exponent") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 128, 0.0);
    const int c = center_vertex(X);
    const std::vector<double> radii{0.25, 0.0625, 0.03125};

    const RingCapacityProfile low =
        ring_capacity_sweep(X, c, radii, 0.3, config(1.5));
    const TrendVerdict lowVerdict = singleton_capacity_trend(low);
    CHECK(lowVerdict.applicable);
    CHECK(lowVerdict.pass);

    const RingCapacityProfile high =
        ring_capacity_sweep(X, c, radii, 0.3, config(3.0));
    const TrendVerdict highVerdict = singleton_capacity_trend(high);
    CHECK_FALSE(highVerdict.applicable);
}

TEST_CASE("level capacities recover the condenser exactly at the ends") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 32, 0.0);
    const int c = center_vertex(X);
    const EnergyConfig cfg = config(2.0, 1e-10);
    const CapacityResult res =
        solve_capacity(X, annulus(X, c, 0.125, 0.375, 2.0), cfg);

    const double full =
        level_set_capacity(X, res.potential, 0.0, 1.0, 2.0, cfg);
    CHECK(rel_err(full, res.value) < 1e-7);
}

TEST_CASE("level capacity law holds at interior levels") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 128, 0.0);
    const int c = center_vertex(X);
    const EnergyConfig cfg = config(2.0, 1e-10);
    const CapacityResult res =
        solve_capacity(X, annulus(X, c, 0.0625, 0.25, 2.0), cfg);

    const double mid =
        level_set_capacity(X, res.potential, 0.25, 0.75, 2.0, cfg);
    CHECK(rel_err(mid * 0.5, res.value) < 0.1);
}

TEST_CASE("level capacity validates its levels") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 32, 0.0);
    const int c = center_vertex(X);
    const EnergyConfig cfg = config(2.0, 1e-10);
    const CapacityResult res =
        solve_capacity(X, annulus(X, c, 0.125, 0.375, 2.0), cfg);

    CHECK_THROWS_AS(
        level_set_capacity(X, res.potential, 0.75, 0.25, 2.0, cfg), InvalidInput);
    CHECK_THROWS_AS(
        level_set_capacity(X, res.potential, 0.0, 1.5, 2.0, cfg), EmptyLevelSet);
}

TEST_CASE("level solves ignore components missing the core") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 32, 0.0);
    const int c = center_vertex(X);
    const EnergyConfig cfg = config(2.0, 1e-10);
    const CapacityResult res =
        solve_capacity(X, annulus(X, c, 0.125, 0.3, 2.0), cfg);

    const double clean =
        level_set_capacity(X, res.potential, 0.5, 0.95, 2.0, cfg);

    // plant a detached superlevel island far from the condenser
    PotentialField bumped = res.potential;
    bumped.values[nearest_vertex(X, {0.4375, 0.4375, 0.0})] = 0.9;
    const double withIsland =
        level_set_capacity(X, bumped, 0.5, 0.95, 2.0, cfg);
    CHECK(rel_err(withIsland, clean) < 1e-12);
}

TEST_CASE("level scaling across pairs") {
    const MetricMeasureSpace X = build_grid(2, 0.5, 1.0 / 256, 0.0);
    const int c = center_vertex(X);
    const EnergyConfig cfg = config(2.0, 1e-10);
    const CapacityResult res =
        solve_capacity(X, annulus(X, c, 0.0625, 0.25, 2.0), cfg);

    const ScalingReport rep = verify_potential_scaling(
        X, res, {{0.25, 0.75}, {0.2, 0.6}}, cfg);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.pass);
    for (const ScalingRow& row : rep.rows) {
        CHECK(row.pass);
        CHECK(row.relError <= 0.05);
        CHECK(row.predicted ==
              doctest::Approx(res.value / (row.betaLevel - row.alphaLevel)));
    }
    CHECK_THROWS_AS(verify_potential_scaling(X, res, {{0.75, 0.25}}, cfg),
                    InvalidInput);
}
