#include "greenlab/asympt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "greenlab/errors.hpp"
#include "greenlab/util.hpp"

namespace greenlab {

FitReport fit_local_behavior(const MetricMeasureSpace& X, const GreenFunction& G,
                             const RadialProfile& profile,
                             const DimensionEstimate& dim) {
    const FitModel model = std::abs(G.p - dim.logMassSlope) <= 0.1
                               ? FitModel::Logarithmic
                               : FitModel::PowerLaw;
    const auto dist = distances_from(X, G.x0);
    double R0 = 0.0;
    for (int v : G.domain) R0 = std::max(R0, dist[v]);
    R0 += 0.5 * X.h;

    const double lo = 4.0 * X.h - 1e-12;
    const double hi = 0.25 * R0 + 1e-12;
    std::vector<const RadialRow*> used;
    for (const RadialRow& row : profile.rows) {
        if (row.r < lo || row.r > hi) continue;
        if (!(row.m + row.M > 0.0)) continue;
        if (model == FitModel::PowerLaw && !(row.ballMass > 0.0)) continue;
        used.push_back(&row);
    }
    if (used.size() < 5)
        throw InsufficientShells("fit window must contain at least 5 shells");

    std::vector<double> xs, ys;
    for (const RadialRow* row : used) {
        const double mid = 0.5 * (row->m + row->M);
        if (model == FitModel::PowerLaw) {
            const double scale =
                (G.p * std::log(row->r) - std::log(row->ballMass)) / (G.p - 1.0);
            xs.push_back(scale);
            ys.push_back(std::log(mid));
        } else {
            xs.push_back(std::log(R0 / row->r));
            ys.push_back(mid);
        }
    }
    const LinearFit f = linear_fit(xs, ys);

    FitReport rep;
    rep.model = model;
    rep.fittedSlope = f.slope;
    rep.intercept = f.intercept;
    rep.rSquared = f.rSquared;
    const auto [mn, mx] = std::minmax_element(
        used.begin(), used.end(),
        [](const RadialRow* a, const RadialRow* b) { return a->r < b->r; });
    rep.rMin = (*mn)->r;
    rep.rMax = (*mx)->r;
    if (model == FitModel::PowerLaw) {
        rep.predictedSlope = 1.0;
        rep.pass = std::abs(f.slope - 1.0) <= 0.15 && f.rSquared >= 0.97;
    } else {
        rep.predictedSlope = f.slope;
        rep.pass = f.slope > 0.0 && f.rSquared >= 0.98;
    }
    return rep;
}

namespace {

Trend trend_of(const std::vector<double>& norms) {
    bool increasing = true;
    for (std::size_t i = 1; i < norms.size(); ++i)
        if (!(norms[i] > norms[i - 1])) increasing = false;
    if (increasing && norms.back() > 1.5 * norms.front()) return Trend::Diverging;
    const auto [lo, hi] = std::minmax_element(norms.begin(), norms.end());
    if (*lo > 0.0 && *hi <= 1.15 * *lo) return Trend::Bounded;
    return Trend::Indeterminate;
}

}  // namespace

IntegrabilityReport integrability_scan(
    const std::vector<const MetricMeasureSpace*>& meshes,
    const std::array<double, 3>& center, double r,
    const std::vector<double>& valueExponents,
    const std::vector<double>& gradientExponents, const EnergyConfig& cfg) {
    if (meshes.size() < 3)
        throw InvalidInput("refinement scan needs at least three meshes");
    if (!(r > 0.0)) throw InvalidInput("scan radius must be positive");

    IntegrabilityReport rep;
    rep.p = cfg.p;
    rep.r = r;
    for (double q : valueExponents)
        rep.valueRows.push_back({q, {}, Trend::Indeterminate});
    for (double q : gradientExponents)
        rep.gradientRows.push_back({q, {}, Trend::Indeterminate});

    int x0Fine = -1;
    for (const MetricMeasureSpace* Xp : meshes) {
        const MetricMeasureSpace& X = *Xp;
        rep.meshSteps.push_back(X.h);
        const int x0 = nearest_vertex(X, center);
        x0Fine = x0;
        const auto dist = distances_from(X, x0);
        std::vector<int> domain;
        for (int v = 0; v < X.vertexCount(); ++v)
            if (dist[v] < 2.0 * r) domain.push_back(v);
        const GreenFunction G = solve_singular(X, x0, domain, cfg);

        for (IntegrabilityRow& row : rep.valueRows) {
            KahanSum sum;
            for (int v = 0; v < X.vertexCount(); ++v)
                if (dist[v] < r && G.values[v] != 0.0)
                    sum.add(std::pow(std::abs(G.values[v]), row.q) * X.measure[v]);
            row.norms.push_back(sum.value());
        }
        for (IntegrabilityRow& row : rep.gradientRows) {
            KahanSum sum;
            for (const Edge& e : X.edges) {
                if (dist[e.a] >= r || dist[e.b] >= r) continue;
                const double g = std::abs(G.values[e.a] - G.values[e.b]) / e.len;
                if (g == 0.0) continue;
                sum.add(0.5 * (X.measure[e.a] + X.measure[e.b]) *
                        std::pow(g, row.q));
            }
            row.norms.push_back(sum.value());
        }
    }

    for (IntegrabilityRow& row : rep.valueRows) row.trend = trend_of(row.norms);
    for (IntegrabilityRow& row : rep.gradientRows) row.trend = trend_of(row.norms);

    const MetricMeasureSpace& fine = *meshes.back();
    const DimensionEstimate est =
        estimate_pointwise_dimension(fine, x0Fine, dyadic_radii(r, 0, 3));
    rep.pointwiseQ = est.logMassSlope;
    rep.globalQ = est.globalQ;
    const double Q = rep.pointwiseQ, p = cfg.p;
    rep.criticalValueExponent = p < Q ? Q * (p - 1.0) / (Q - p)
                                      : std::numeric_limits<double>::infinity();
    rep.criticalGradientExponent = Q * (p - 1.0) / (Q - 1.0);
    return rep;
}

HarnackReport harnack_sphere_ratio(const RadialProfile& profile, double bound) {
    if (profile.rows.empty())
        throw InsufficientRows("oscillation check needs at least one shell");
    HarnackReport rep;
    rep.bound = bound;
    for (const RadialRow& row : profile.rows) {
        if (!(row.m > 0.0))
            throw DivisionByZero("shell minimum vanishes, ratio undefined");
        rep.maxRatio = std::max(rep.maxRatio, row.M / row.m);
    }
    rep.pass = rep.maxRatio <= bound;
    return rep;
}

}  // namespace greenlab
