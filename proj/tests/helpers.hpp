#pragma once

// Shared fixtures for the test suites: small spaces and common solves kept
// cheap enough to rebuild per test case.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "greenlab/capacity.hpp"
#include "greenlab/energy.hpp"
#include "greenlab/space.hpp"

namespace testutil {

using namespace greenlab;

// 1-d path on [0,1] with spacing h; mass h per vertex, geodesic metric.
// Finalize accepts hand-built graphs regardless of the generator set.
inline MetricMeasureSpace path_space(int cells, double length = 1.0) {
    MetricMeasureSpace X;
    X.dim = 2;
    X.h = length / cells;
    X.metricMode = MetricMode::GraphGeodesic;
    X.generator = "path";
    for (int i = 0; i <= cells; ++i) {
        X.coords.push_back({i * X.h, 0.0, 0.0});
        X.measure.push_back(X.h);
    }
    for (int i = 0; i < cells; ++i) X.edges.push_back({i, i + 1, X.h});
    X.finalize();
    return X;
}

inline EnergyConfig config(double p, double tol = 1e-8) {
    EnergyConfig cfg;
    cfg.p = p;
    cfg.tolRel = tol;
    cfg.maxIter = 400;
    return cfg;
}

// Annulus condenser on a centered grid: K the mesh-closed ball of radius r,
// Omega the open ball of radius R about the center vertex.
inline CapacityProblem annulus(const MetricMeasureSpace& X, int center, double r,
                               double R, double p) {
    const auto dist = distances_from(X, center);
    CapacityProblem pr;
    pr.p = p;
    pr.core = closed_ball_core(X, dist, r);
    for (int v = 0; v < X.vertexCount(); ++v)
        if (dist[v] < R) pr.domain.push_back(v);
    return pr;
}

inline int center_vertex(const MetricMeasureSpace& X) {
    return nearest_vertex(X, {0.0, 0.0, 0.0});
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

}  // namespace testutil
