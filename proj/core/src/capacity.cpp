#include "greenlab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "greenlab/errors.hpp"
#include "greenlab/util.hpp"

namespace greenlab {

namespace {

// connected components of the set marked in mask, via the space adjacency
std::vector<int> components_of(const MetricMeasureSpace& X,
                               const std::vector<std::uint8_t>& mask, int& nComp) {
    const int V = X.vertexCount();
    std::vector<int> comp(V, -1);
    nComp = 0;
    std::vector<int> stack;
    for (int s = 0; s < V; ++s) {
        if (!mask[s] || comp[s] >= 0) continue;
        comp[s] = nComp;
        stack.push_back(s);
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int k = X.adjOffset[v]; k < X.adjOffset[v + 1]; ++k) {
                const int w = X.adjVert[k];
                if (mask[w] && comp[w] < 0) {
                    comp[w] = nComp;
                    stack.push_back(w);
                }
            }
        }
        ++nComp;
    }
    return comp;
}

void check_problem(const MetricMeasureSpace& X, const CapacityProblem& pr) {
    const int V = X.vertexCount();
    if (pr.core.empty() || pr.domain.empty())
        throw InvalidProblem("core and domain must be nonempty");
    if (!(pr.p > 1.0)) throw InvalidProblem("exponent p must exceed 1");
    std::vector<std::uint8_t> inDom(V, 0);
    for (int v : pr.domain) {
        if (v < 0 || v >= V) throw InvalidProblem("domain vertex out of range");
        inDom[v] = 1;
    }
    std::size_t domCount = 0;
    for (int v = 0; v < V; ++v) domCount += inDom[v];
    if (domCount == std::size_t(V))
        throw InvalidProblem("domain complement must be nonempty");
    for (int v : pr.core)
        if (v < 0 || v >= V || !inDom[v])
            throw InvalidProblem("core must lie inside the domain");
    int nComp = 0;
    const auto comp = components_of(X, inDom, nComp);
    (void)comp;
    if (nComp != 1) throw DisconnectedDomain("capacity domain is disconnected");
}

CapacityResult solve_capacity_impl(const MetricMeasureSpace& X,
                                   const CapacityProblem& pr,
                                   const EnergyConfig& cfgIn,
                                   const std::vector<double>* init) {
    const int V = X.vertexCount();
    std::vector<std::uint8_t> freeMask(V, 0);
    std::vector<double> values(V, 0.0);
    for (int v : pr.domain) freeMask[v] = 1;
    for (int v : pr.core) {
        freeMask[v] = 0;
        values[v] = 1.0;
    }

    EnergyConfig cfg = cfgIn;
    cfg.p = pr.p;
    detail::SolveOptions opts;
    if (init) {
        opts.init = init;
        // warm starts sit near the minimizer; a short continuation tail
        // suffices and saves most of the ladder
        opts.eps0Rel = 1e-5;
    }
    PotentialField field =
        detail::minimize_masked(X, freeMask, std::move(values), std::nullopt, cfg, opts);

    // clamp of the maximum principle: guard roundoff, never reshape
    for (int v : pr.domain)
        if (freeMask[v]) {
            if (field.values[v] < 0.0 && field.values[v] > -1e-12)
                field.values[v] = 0.0;
            if (field.values[v] > 1.0 && field.values[v] < 1.0 + 1e-12)
                field.values[v] = 1.0;
        }

    CapacityResult res;
    res.value = p_energy(X, field.values, cfg);
    field.energy = res.value;
    res.potential = std::move(field);
    res.problem = pr;
    return res;
}

}  // namespace

CapacityResult solve_capacity(const MetricMeasureSpace& X,
                              const CapacityProblem& problem,
                              const EnergyConfig& cfg) {
    check_problem(X, problem);
    return solve_capacity_impl(X, problem, cfg, nullptr);
}

namespace detail {
CapacityResult solve_capacity_warm(const MetricMeasureSpace& X,
                                   const CapacityProblem& problem,
                                   const EnergyConfig& cfg,
                                   const std::vector<double>* init) {
    check_problem(X, problem);
    return solve_capacity_impl(X, problem, cfg, init);
}
}  // namespace detail

RingCapacityProfile ring_capacity_sweep(const MetricMeasureSpace& X, int x0,
                                        const std::vector<double>& radii, double R,
                                        const EnergyConfig& cfg) {
    if (radii.empty()) throw InvalidInput("sweep needs at least one radius");
    for (double r : radii) {
        if (!(r < R)) throw InvalidInput("all sweep radii must be below R");
        if (r < 4.0 * X.h)
            throw InvalidInput("smallest sweep radius must be at least 4h");
    }

    const auto dist = distances_from(X, x0);

    RingCapacityProfile prof;
    prof.center = x0;
    prof.outerRadius = R;
    prof.p = cfg.p;
    prof.pointwiseQ =
        estimate_pointwise_dimension(X, x0, dyadic_radii(R, 0, 3)).logMassSlope;

    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());

    std::vector<int> domainAll;
    for (int v = 0; v < X.vertexCount(); ++v)
        if (dist[v] < R) domainAll.push_back(v);

    const std::vector<double>* warm = nullptr;
    std::vector<double> warmStore;
    for (double r : sorted) {
        RingRow row;
        row.r = r;
        row.ballMass = ball(X, dist, x0, r).mass;
        CapacityProblem pr;
        pr.p = cfg.p;
        pr.core = closed_ball_core(X, dist, r);
        pr.domain = domainAll;
        try {
            check_problem(X, pr);
            CapacityResult res = solve_capacity_impl(X, pr, cfg, warm);
            row.capValue = res.value;
            row.converged = true;
            warmStore = std::move(res.potential.values);
            warm = &warmStore;
        } catch (const NonConvergence&) {
            row.converged = false;
        }
        prof.rows.push_back(row);
    }
    return prof;
}

namespace {

double regime_model(Regime reg, double r, double R, double p, double Q,
                    double mass) {
    switch (reg) {
        case Regime::Below:
            return mass / std::pow(r, p);
        case Regime::Conformal:
            return std::pow(std::log(R / r), 1.0 - Q);
        case Regime::Above: {
            const double gamma = (p - Q) / (p - 1.0);
            return std::pow(std::abs(std::pow(2.0 * R, gamma) - std::pow(r, gamma)),
                            1.0 - p);
        }
    }
    return 1.0;
}

}  // namespace

SandwichReport check_capacity_sandwich(const RingCapacityProfile& profile) {
    std::vector<const RingRow*> valid;
    for (const RingRow& row : profile.rows)
        if (row.converged) valid.push_back(&row);
    if (valid.size() < 4)
        throw InsufficientRows("sandwich check needs at least 4 converged rows");

    SandwichReport rep;
    const double p = profile.p, Q = profile.pointwiseQ;
    if (std::abs(p - Q) <= 0.1)
        rep.regime = Regime::Conformal;
    else if (p < Q)
        rep.regime = Regime::Below;
    else
        rep.regime = Regime::Above;

    for (const RingRow* row : valid) {
        const double model = regime_model(rep.regime, row->r, profile.outerRadius,
                                          p, Q, row->ballMass);
        rep.ratios.push_back(row->capValue / model);
    }
    rep.fittedLowerConst = *std::min_element(rep.ratios.begin(), rep.ratios.end());
    rep.fittedUpperConst = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    rep.spread = rep.fittedUpperConst / rep.fittedLowerConst;
    rep.pass = rep.fittedLowerConst > 0.0 && rep.spread <= 10.0;
    return rep;
}

TrendVerdict singleton_capacity_trend(const RingCapacityProfile& profile) {
    TrendVerdict verdict;
    verdict.applicable = profile.p <= profile.pointwiseQ + 0.1;
    if (!verdict.applicable) return verdict;

    std::vector<const RingRow*> valid;
    for (const RingRow& row : profile.rows)
        if (row.converged) valid.push_back(&row);
    if (valid.size() < 2) return verdict;

    // rows run descending in r; capacity must shrink with the core
    bool monotone = true;
    for (std::size_t i = 1; i < valid.size(); ++i)
        if (valid[i]->capValue > valid[i - 1]->capValue * (1.0 + 1e-6))
            monotone = false;
    const double first = valid.front()->capValue;
    const double last = valid.back()->capValue;
    verdict.pass = monotone && last < 0.5 * first;
    return verdict;
}

double level_set_capacity(const MetricMeasureSpace& X, const PotentialField& field,
                          double alphaLevel, double betaLevel, double p,
                          const EnergyConfig& cfg) {
    if (!(alphaLevel >= 0.0) || !(alphaLevel < betaLevel))
        throw InvalidInput("levels must satisfy 0 <= alpha < beta");
    const int V = X.vertexCount();
    if (field.values.size() != std::size_t(V))
        throw InvalidInput("field must cover every vertex");

    std::vector<std::uint8_t> superBeta(V, 0), superAlpha(V, 0);
    bool anyBeta = false;
    for (int v = 0; v < V; ++v) {
        if (field.values[v] >= betaLevel) {
            superBeta[v] = 1;
            anyBeta = true;
        }
        if (field.values[v] > alphaLevel) superAlpha[v] = 1;
    }
    if (!anyBeta) throw EmptyLevelSet("no vertex reaches the beta level");

    // keep only the components of {u > alpha} that meet the core; the
    // others carry the zero minimizer and contribute nothing
    int nComp = 0;
    const auto comp = components_of(X, superAlpha, nComp);
    std::vector<std::uint8_t> keep(nComp, 0);
    for (int v = 0; v < V; ++v)
        if (superBeta[v]) keep[comp[v]] = 1;

    std::vector<std::uint8_t> freeMask(V, 0);
    std::vector<double> values(V, 0.0);
    bool anyFree = false;
    for (int v = 0; v < V; ++v) {
        if (superBeta[v]) {
            values[v] = 1.0;
        } else if (superAlpha[v] && keep[comp[v]]) {
            freeMask[v] = 1;
            anyFree = true;
        }
    }

    EnergyConfig lcfg = cfg;
    lcfg.p = p;

    if (!anyFree) {
        // beta set fills the alpha set: capacity is the boundary-layer energy
        return p_energy(X, values, lcfg);
    }

    // warm start from the affinely rescaled parent potential
    std::vector<double> init(values);
    for (int v = 0; v < V; ++v)
        if (freeMask[v])
            init[v] = std::clamp((field.values[v] - alphaLevel) /
                                     (betaLevel - alphaLevel),
                                 0.0, 1.0);
    detail::SolveOptions opts;
    opts.init = &init;
    opts.eps0Rel = 1e-5;  // the rescaled parent is already near the minimum

    PotentialField sol =
        detail::minimize_masked(X, freeMask, std::move(values), std::nullopt, lcfg, opts);
    return p_energy(X, sol.values, lcfg);
}

ScalingReport verify_potential_scaling(
    const MetricMeasureSpace& X, const CapacityResult& capResult,
    const std::vector<std::pair<double, double>>& pairs, const EnergyConfig& cfg) {
    ScalingReport rep;
    rep.pass = true;
    for (const auto& [a, b] : pairs) {
        if (!(a >= 0.0) || !(a < b) || !(b <= 1.0))
            throw InvalidInput("scaling pair must satisfy 0 <= alpha < beta <= 1");
        ScalingRow row;
        row.alphaLevel = a;
        row.betaLevel = b;
        row.measured =
            level_set_capacity(X, capResult.potential, a, b, capResult.problem.p, cfg);
        row.predicted =
            capResult.value / std::pow(b - a, capResult.problem.p - 1.0);
        row.relError = std::abs(row.measured - row.predicted) / row.predicted;
        row.pass = row.relError <= 0.05;
        rep.pass = rep.pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace greenlab
