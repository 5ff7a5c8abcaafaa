#include "greenlab/green.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "greenlab/errors.hpp"
#include "greenlab/util.hpp"

namespace greenlab {

namespace {

std::vector<std::uint8_t> domain_mask(const MetricMeasureSpace& X,
                                      const std::vector<int>& domain) {
    std::vector<std::uint8_t> mask(X.vertexCount(), 0);
    for (int v : domain) {
        if (v < 0 || v >= X.vertexCount())
            throw InvalidProblem("domain vertex out of range");
        mask[v] = 1;
    }
    return mask;
}

}  // namespace

GreenFunction solve_singular(const MetricMeasureSpace& X, int x0,
                             const std::vector<int>& domain,
                             const EnergyConfig& cfg, double sourceStrength) {
    const int V = X.vertexCount();
    if (x0 < 0 || x0 >= V) throw InvalidProblem("pole vertex out of range");
    if (!(sourceStrength > 0.0))
        throw InvalidProblem("source strength must be positive");
    auto mask = domain_mask(X, domain);
    if (!mask[x0]) throw SingularityOnBoundary("pole must lie inside the domain");
    for (int k = X.adjOffset[x0]; k < X.adjOffset[x0 + 1]; ++k)
        if (!mask[X.adjVert[k]])
            throw SingularityOnBoundary("pole touches the domain boundary");
    std::size_t domCount = 0;
    for (int v = 0; v < V; ++v) domCount += mask[v];
    if (domCount == std::size_t(V))
        throw InvalidProblem("domain complement must be nonempty");

    PointSource src;
    src.vertex = x0;
    src.strength = sourceStrength;

    GreenFunction G;
    G.field = detail::minimize_masked(X, mask, std::vector<double>(V, 0.0),
                                      src, cfg, {});
    G.values = G.field.values;
    G.x0 = x0;
    G.domain = domain;
    G.p = cfg.p;
    G.sourceStrength = sourceStrength;
    return G;
}

std::vector<double> default_cutoff(const MetricMeasureSpace& X,
                                   const GreenFunction& G,
                                   const EnergyConfig& cfg) {
    const auto dist = distances_from(X, G.x0);
    CapacityProblem pr;
    pr.p = G.p;
    pr.core = closed_ball_core(X, dist, 4.0 * X.h);
    pr.domain = G.domain;
    EnergyConfig ccfg = cfg;
    ccfg.p = G.p;
    return solve_capacity(X, pr, ccfg).potential.values;
}

double compute_K(const MetricMeasureSpace& X, const GreenFunction& G,
                 const std::vector<double>& cutoff) {
    const int V = X.vertexCount();
    if (cutoff.size() != std::size_t(V))
        throw InvalidCutoff("cutoff must cover every vertex");
    auto mask = domain_mask(X, G.domain);
    for (int v = 0; v < V; ++v) {
        if (!mask[v] && std::abs(cutoff[v]) > 1e-12)
            throw InvalidCutoff("cutoff must vanish outside the domain");
        if (cutoff[v] < -1e-9 || cutoff[v] > 1.0 + 1e-9)
            throw InvalidCutoff("cutoff must take values in [0, 1]");
    }
    if (std::abs(cutoff[G.x0] - 1.0) > 1e-12)
        throw InvalidCutoff("cutoff must equal 1 at the pole");
    for (int k = X.adjOffset[G.x0]; k < X.adjOffset[G.x0 + 1]; ++k)
        if (std::abs(cutoff[X.adjVert[k]] - 1.0) > 1e-12)
            throw InvalidCutoff("cutoff must equal 1 on the pole's neighbors");

    KahanSum sum;
    for (const Edge& e : X.edges) {
        const double du = G.values[e.a] - G.values[e.b];
        if (du == 0.0) continue;
        const double dphi = cutoff[e.a] - cutoff[e.b];
        if (dphi == 0.0) continue;
        const double vol = 0.5 * (X.measure[e.a] + X.measure[e.b]);
        const double cond = vol / (e.len * e.len);
        const double s = std::abs(du) / e.len;
        sum.add(cond * std::pow(s, G.p - 2.0) * du * dphi);
    }
    return sum.value();
}

void normalize(GreenFunction& G) {
    if (G.normalized) return;
    if (!std::isfinite(G.kValue) || G.kValue <= 0.0)
        throw InvalidInput("pairing constant must be computed before normalizing");
    const double scale = std::pow(G.kValue, -1.0 / (G.p - 1.0));
    for (double& v : G.values) v *= scale;
    for (double& v : G.field.values) v *= scale;
    G.sourceStrength /= G.kValue;
    G.kValue = 1.0;
    G.normalized = true;
}

RadialProfile radial_extrema(const MetricMeasureSpace& X, const GreenFunction& G,
                             const std::vector<double>& radii,
                             double shellHalfWidth) {
    const bool adaptive = !(shellHalfWidth > 0.0);
    const auto dist = distances_from(X, G.x0);

    RadialProfile prof;
    prof.x0 = G.x0;
    prof.p = G.p;
    prof.shellHalfWidth = adaptive ? X.h : shellHalfWidth;
    const auto scan = [&](double r, double shw, RadialRow& row) {
        bool any = false;
        for (int v = 0; v < X.vertexCount(); ++v) {
            if (std::abs(dist[v] - r) > shw) continue;
            const double g = std::abs(G.values[v]);
            if (!any) {
                row.m = row.M = g;
                any = true;
            } else {
                row.m = std::min(row.m, g);
                row.M = std::max(row.M, g);
            }
        }
        return any;
    };
    for (double r : radii) {
        if (!(r > 0.0)) throw InvalidInput("shell radius must be positive");
        RadialRow row;
        row.r = r;
        double shw = adaptive ? X.h : shellHalfWidth;
        bool any = scan(r, shw, row);
        while (!any && adaptive && shw < 4.0 * X.h) {
            shw = std::min(2.0 * shw, 4.0 * X.h);
            any = scan(r, shw, row);
        }
        if (!any) throw EmptyShell("no vertex inside the requested shell");
        prof.shellHalfWidth = std::max(prof.shellHalfWidth, shw);
        row.ballMass = ball(X, dist, G.x0, r).mass;
        prof.rows.push_back(row);
    }
    return prof;
}

void fill_ring_capacities(const MetricMeasureSpace& X, RadialProfile& profile,
                          const EnergyConfig& cfg) {
    if (profile.rows.empty()) return;
    double rRef = 0.0;
    for (const RadialRow& row : profile.rows) rRef = std::max(rRef, row.r);
    const auto dist = distances_from(X, profile.x0);

    std::vector<int> domain;
    for (int v = 0; v < X.vertexCount(); ++v)
        if (dist[v] < rRef) domain.push_back(v);

    std::vector<RadialRow*> inner;
    for (RadialRow& row : profile.rows)
        if (row.r < rRef) inner.push_back(&row);
    std::sort(inner.begin(), inner.end(),
              [](const RadialRow* a, const RadialRow* b) { return a->r > b->r; });

    EnergyConfig ccfg = cfg;
    ccfg.p = profile.p;
    std::vector<double> warmStore;
    const std::vector<double>* warm = nullptr;
    for (RadialRow* row : inner) {
        CapacityProblem pr;
        pr.p = profile.p;
        pr.core = closed_ball_core(X, dist, row->r);
        pr.domain = domain;
        CapacityResult res = detail::solve_capacity_warm(X, pr, ccfg, warm);
        row->ringCap = res.value;
        warmStore = std::move(res.potential.values);
        warm = &warmStore;
    }
}

DefinitionReport check_definition_criteria(
    const MetricMeasureSpace& X, const GreenFunction& G, const EnergyConfig& cfg,
    const std::vector<std::pair<double, double>>& levelPairs,
    const std::vector<double>* refinementPeaks) {
    DefinitionReport rep;
    const int V = X.vertexCount();
    auto mask = domain_mask(X, G.domain);

    double peak = 0.0;
    for (int v = 0; v < V; ++v) peak = std::max(peak, std::abs(G.values[v]));
    for (int v = 0; v < V; ++v) {
        if (mask[v]) {
            if (G.values[v] < -1e-9 * peak) rep.positive = false;
        } else if (std::abs(G.values[v]) > 1e-15) {
            rep.vanishesOutside = false;
        }
    }

    std::vector<int> awayFromPole;
    awayFromPole.reserve(G.domain.size());
    for (int v : G.domain)
        if (v != G.x0) awayFromPole.push_back(v);
    EnergyConfig rcfg = cfg;
    rcfg.p = G.p;
    PotentialField wrap = G.field;
    wrap.values = G.values;
    rep.worstResidual = harmonic_residual(X, wrap, awayFromPole, rcfg);
    rep.harmonicAway = rep.worstResidual <= std::max(1e3 * cfg.tolRel, 1e-8);

    if (refinementPeaks) {
        if (refinementPeaks->size() < 2) {
            rep.singularAtPole = false;
        } else {
            for (std::size_t i = 1; i < refinementPeaks->size(); ++i)
                if (!((*refinementPeaks)[i] > (*refinementPeaks)[i - 1]))
                    rep.singularAtPole = false;
        }
    }

    const double target = G.normalized
                              ? 1.0
                              : (std::isfinite(G.kValue) ? G.kValue
                                                         : G.sourceStrength);
    for (const auto& [a, b] : levelPairs) {
        const double cap = level_set_capacity(X, wrap, a, b, G.p, rcfg);
        const double product = cap * std::pow(b - a, G.p - 1.0);
        rep.levelProducts.push_back(product);
        if (std::abs(product - target) > 0.08 * target) rep.levelLawHolds = false;
    }

    rep.pass = rep.positive && rep.vanishesOutside && rep.harmonicAway &&
               rep.singularAtPole && rep.levelLawHolds;
    return rep;
}

GrowthReport check_growth_bounds(const RadialProfile& profile,
                                 const MetricMeasureSpace& X,
                                 const GreenFunction& G) {
    (void)X;
    std::vector<RadialRow> rows = profile.rows;
    std::sort(rows.begin(), rows.end(),
              [](const RadialRow& a, const RadialRow& b) { return a.r < b.r; });
    if (rows.size() < 4)
        throw InsufficientRows("growth check needs at least 4 shells");

    GrowthReport rep;
    const double p = G.p;
    const double MR = rows.back().M;

    double r0 = 0.0;
    for (const RadialRow& row : rows)
        if (row.m >= MR) r0 = std::max(r0, row.r);
    if (!(r0 > 0.0))
        throw InsufficientRows("no shell stays above the outer level");

    rep.r0 = r0;
    for (const RadialRow& row : rows) {
        if (!(row.ringCap > 0.0)) continue;  // reference row or unfilled
        const double capFac = std::pow(row.ringCap, 1.0 / (p - 1.0));
        if (row.m > MR) {
            rep.upperRatios.push_back((row.m - MR) * capFac);
        } else {
            ++rep.skippedRows;
        }
        if (row.r <= 0.5 * r0 && row.M > MR) {
            const double corr = std::pow(1.0 - row.r / r0, p);
            rep.lowerRatios.push_back((row.M - MR) * capFac / corr);
        }
    }
    if (rep.upperRatios.size() < 3 || rep.lowerRatios.size() < 3)
        throw InsufficientRows("growth check needs at least 3 usable shells");

    const auto spread = [](const std::vector<double>& xs) {
        const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    };
    rep.upperSpread = spread(rep.upperRatios);
    rep.lowerSpread = spread(rep.lowerRatios);
    rep.pass = rep.upperSpread <= 10.0 && rep.lowerSpread <= 10.0;
    return rep;
}

}  // namespace greenlab
