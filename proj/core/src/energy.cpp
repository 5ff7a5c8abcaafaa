#include "greenlab/energy.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "greenlab/errors.hpp"
#include "greenlab/util.hpp"

namespace greenlab {

void configure_threads(int cap) {
    Eigen::setNbThreads(std::max(1, std::min(cap, 1)));
}

double p_energy(const MetricMeasureSpace& X, const std::vector<double>& values,
                const EnergyConfig& cfg) {
    if (values.size() != std::size_t(X.vertexCount()))
        throw InvalidInput("values must cover every vertex");
    KahanSum acc;
    for (const Edge& e : X.edges) {
        const double V = 0.5 * (X.measure[e.a] + X.measure[e.b]);
        const double g = std::abs(values[e.a] - values[e.b]) / e.len;
        if (g > 0.0) acc.add(V * std::pow(g, cfg.p));
    }
    return acc.value();
}

double harmonic_residual(const MetricMeasureSpace& X, const PotentialField& field,
                         const std::vector<int>& domain, const EnergyConfig& cfg) {
    const int V = X.vertexCount();
    if (field.values.size() != std::size_t(V))
        throw InvalidInput("field must cover every vertex");
    std::vector<double> net(V, 0.0), scale(V, 0.0);
    const double p = cfg.p;
    for (const Edge& e : X.edges) {
        const double c = 0.5 * (X.measure[e.a] + X.measure[e.b]) / (e.len * e.len);
        const double du = field.values[e.a] - field.values[e.b];
        if (du == 0.0) continue;
        const double s = std::abs(du) / e.len;
        const double flux = c * std::pow(s, p - 2.0) * du;
        net[e.a] += flux;
        net[e.b] -= flux;
        scale[e.a] += std::abs(flux);
        scale[e.b] += std::abs(flux);
    }
    double worst = 0.0;
    for (int v : domain) {
        if (v < 0 || v >= V) throw InvalidInput("domain vertex out of range");
        if (scale[v] == 0.0) continue;  // no flux at all: exactly balanced
        worst = std::max(worst, std::abs(net[v]) / scale[v]);
    }
    return worst;
}

namespace detail {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

struct FFEdge {
    int edge;  // index into X.edges
    int i, j;  // free indices of the endpoints
};
struct FPEdge {
    int edge;
    int i;        // free index of the free endpoint
    int pinned;   // vertex id of the pinned endpoint
    double sign;  // +1 if the free endpoint is edge.a
};

// Precomputed value-array offsets into the compressed matrix so Newton
// iterations refill coefficients without reallocating the pattern.
struct Pattern {
    SpMat H;
    std::vector<int> diagOff;            // per free vertex
    std::vector<std::array<int, 2>> ffOff;  // per ff edge: (i,j) and (j,i)
};

int find_slot(const SpMat& H, int row, int col) {
    const int* inner = H.innerIndexPtr();
    const int* outer = H.outerIndexPtr();
    int lo = outer[col], hi = outer[col + 1];
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (inner[mid] < row)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

Pattern build_pattern(int nFree, const std::vector<FFEdge>& ff,
                      const std::vector<FPEdge>& fp) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(nFree + 4 * ff.size());
    for (int i = 0; i < nFree; ++i) trip.emplace_back(i, i, 1.0);
    for (const FFEdge& e : ff) {
        trip.emplace_back(e.i, e.j, -0.5);
        trip.emplace_back(e.j, e.i, -0.5);
    }
    (void)fp;
    Pattern pat;
    pat.H.resize(nFree, nFree);
    pat.H.setFromTriplets(trip.begin(), trip.end());
    pat.H.makeCompressed();
    pat.diagOff.resize(nFree);
    for (int i = 0; i < nFree; ++i) pat.diagOff[i] = find_slot(pat.H, i, i);
    pat.ffOff.resize(ff.size());
    for (std::size_t k = 0; k < ff.size(); ++k) {
        pat.ffOff[k][0] = find_slot(pat.H, ff[k].i, ff[k].j);
        pat.ffOff[k][1] = find_slot(pat.H, ff[k].j, ff[k].i);
    }
    return pat;
}

struct Workspace {
    const MetricMeasureSpace& X;
    const std::vector<std::uint8_t>& freeMask;
    std::vector<int> freeIdx;    // vertex -> free slot or -1
    std::vector<int> freeVerts;  // free slot -> vertex
    std::vector<FFEdge> ff;
    std::vector<FPEdge> fp;
    std::vector<double> cond;    // V_e / len^2 per edge
    double p;
    std::optional<PointSource> src;
    int srcFree = -1;

    Workspace(const MetricMeasureSpace& X_, const std::vector<std::uint8_t>& mask,
              const std::optional<PointSource>& s, double p_)
        : X(X_), freeMask(mask), p(p_), src(s) {
        const int V = X.vertexCount();
        freeIdx.assign(V, -1);
        for (int v = 0; v < V; ++v)
            if (freeMask[v]) {
                freeIdx[v] = static_cast<int>(freeVerts.size());
                freeVerts.push_back(v);
            }
        cond.resize(X.edgeCount());
        for (int e = 0; e < X.edgeCount(); ++e) {
            const Edge& ed = X.edges[e];
            cond[e] = 0.5 * (X.measure[ed.a] + X.measure[ed.b]) / (ed.len * ed.len);
            const int fa = freeIdx[ed.a], fb = freeIdx[ed.b];
            if (fa >= 0 && fb >= 0)
                ff.push_back({e, fa, fb});
            else if (fa >= 0)
                fp.push_back({e, fa, ed.b, +1.0});
            else if (fb >= 0)
                fp.push_back({e, fb, ed.a, -1.0});
        }
        if (src) {
            if (src->vertex < 0 || src->vertex >= V || freeIdx[src->vertex] < 0)
                throw InvalidProblem("point source must sit on a free vertex");
            srcFree = freeIdx[src->vertex];
        }
        checkWellPosed();
    }

    int nFree() const { return static_cast<int>(freeVerts.size()); }

    // every free component must see at least one pinned vertex, otherwise
    // the minimization is unbounded or degenerate on that component
    void checkWellPosed() const {
        if (freeVerts.empty()) return;
        std::vector<int> comp(nFree(), -1);
        int nComp = 0;
        std::vector<int> stack;
        for (int s = 0; s < nFree(); ++s) {
            if (comp[s] >= 0) continue;
            comp[s] = nComp;
            stack.push_back(s);
            while (!stack.empty()) {
                const int k = stack.back();
                stack.pop_back();
                const int v = freeVerts[k];
                for (int t = X.adjOffset[v]; t < X.adjOffset[v + 1]; ++t) {
                    const int fw = freeIdx[X.adjVert[t]];
                    if (fw >= 0 && comp[fw] < 0) {
                        comp[fw] = nComp;
                        stack.push_back(fw);
                    }
                }
            }
            ++nComp;
        }
        std::vector<std::uint8_t> anchored(nComp, 0);
        for (const FPEdge& e : fp) anchored[comp[e.i]] = 1;
        for (int c = 0; c < nComp; ++c)
            if (!anchored[c])
                throw DisconnectedDomain(
                    "free region has a component with no boundary contact");
    }

    // gradient of the objective, one-sided flux scales, smoothed energy
    void gradient(const std::vector<double>& u, double eps,
                  Eigen::VectorXd& g, std::vector<double>& fluxScale,
                  double* smoothedEnergy) const {
        g.setZero();
        std::fill(fluxScale.begin(), fluxScale.end(), 0.0);
        const double e2 = eps * eps;
        KahanSum acc;
        const double halfP = 0.5 * p;
        for (const FFEdge& fe : ff) {
            const Edge& ed = X.edges[fe.edge];
            const double du = u[ed.a] - u[ed.b];
            const double s2 = (du * du) / (ed.len * ed.len);
            const double base = s2 + e2;
            const double w = std::pow(base, halfP - 1.0);
            const double flux = cond[fe.edge] * w * du;
            g[fe.i] += flux;
            g[fe.j] -= flux;
            fluxScale[fe.i] += std::abs(flux);
            fluxScale[fe.j] += std::abs(flux);
            if (smoothedEnergy)
                acc.add(cond[fe.edge] * ed.len * ed.len *
                        (std::pow(base, halfP) - std::pow(e2, halfP)));
        }
        for (const FPEdge& fe : fp) {
            const Edge& ed = X.edges[fe.edge];
            const double du = fe.sign * (u[ed.a] - u[ed.b]);
            const double s2 = (du * du) / (ed.len * ed.len);
            const double base = s2 + e2;
            const double w = std::pow(base, halfP - 1.0);
            const double flux = cond[fe.edge] * w * du;
            g[fe.i] += flux;
            fluxScale[fe.i] += std::abs(flux);
            if (smoothedEnergy)
                acc.add(cond[fe.edge] * ed.len * ed.len *
                        (std::pow(base, halfP) - std::pow(e2, halfP)));
        }
        if (src) {
            g[srcFree] -= src->strength;
            fluxScale[srcFree] += std::abs(src->strength);
        }
        if (smoothedEnergy) *smoothedEnergy = acc.value();
    }

    // max normalized residual from a gradient vector
    double residual(const Eigen::VectorXd& g,
                    const std::vector<double>& fluxScale) const {
        double maxFlux = 0.0;
        for (double f : fluxScale) maxFlux = std::max(maxFlux, f);
        const double floor = 1e-12 * maxFlux + 1e-300;
        double worst = 0.0;
        for (int i = 0; i < nFree(); ++i) {
            const double denom = fluxScale[i] + floor;
            worst = std::max(worst, std::abs(g[i]) / denom);
        }
        return worst;
    }

    void hessianValues(const std::vector<double>& u, double eps, Pattern& pat) const {
        double* val = pat.H.valuePtr();
        std::fill(val, val + pat.H.nonZeros(), 0.0);
        const double e2 = eps * eps;
        const double halfP = 0.5 * p;
        double maxDiag = 0.0;
        for (std::size_t k = 0; k < ff.size(); ++k) {
            const FFEdge& fe = ff[k];
            const Edge& ed = X.edges[fe.edge];
            const double du = u[ed.a] - u[ed.b];
            const double s2 = (du * du) / (ed.len * ed.len);
            const double hw = cond[fe.edge] * std::pow(s2 + e2, halfP - 2.0) *
                              (e2 + (p - 1.0) * s2);
            val[pat.diagOff[fe.i]] += hw;
            val[pat.diagOff[fe.j]] += hw;
            val[pat.ffOff[k][0]] -= hw;
            val[pat.ffOff[k][1]] -= hw;
        }
        for (const FPEdge& fe : fp) {
            const Edge& ed = X.edges[fe.edge];
            const double du = u[ed.a] - u[ed.b];
            const double s2 = (du * du) / (ed.len * ed.len);
            const double hw = cond[fe.edge] * std::pow(s2 + e2, halfP - 2.0) *
                              (e2 + (p - 1.0) * s2);
            val[pat.diagOff[fe.i]] += hw;
        }
        for (int i = 0; i < nFree(); ++i)
            maxDiag = std::max(maxDiag, val[pat.diagOff[i]]);
        const double ridge = 1e-13 * (maxDiag > 0.0 ? maxDiag : 1.0);
        for (int i = 0; i < nFree(); ++i) val[pat.diagOff[i]] += ridge;
    }

    double objectiveSmoothed(const std::vector<double>& u, double eps) const {
        const double e2 = eps * eps;
        const double halfP = 0.5 * p;
        KahanSum acc;
        for (const FFEdge& fe : ff) {
            const Edge& ed = X.edges[fe.edge];
            const double du = u[ed.a] - u[ed.b];
            const double s2 = (du * du) / (ed.len * ed.len);
            acc.add(cond[fe.edge] * ed.len * ed.len *
                    (std::pow(s2 + e2, halfP) - std::pow(e2, halfP)));
        }
        for (const FPEdge& fe : fp) {
            const Edge& ed = X.edges[fe.edge];
            const double du = u[ed.a] - u[ed.b];
            const double s2 = (du * du) / (ed.len * ed.len);
            acc.add(cond[fe.edge] * ed.len * ed.len *
                    (std::pow(s2 + e2, halfP) - std::pow(e2, halfP)));
        }
        double F = acc.value() / p;
        if (src) F -= src->strength * u[src->vertex];
        return F;
    }

    double objectiveTrue(const std::vector<double>& u, const EnergyConfig& cfg) const {
        double F = p_energy(X, u, cfg) / p;
        if (src) F -= src->strength * u[src->vertex];
        return F;
    }
};

// Direct p=2 solve: with quadratic energy the Newton system from any start
// is the exact optimality system, so one linear solve finishes the job.
// Also the warm-start base for every p != 2 continuation.
void solve_quadratic(Workspace& ws, Pattern& pat, std::vector<double>& u,
                     bool useDirect, double cgTol) {
    const int n = ws.nFree();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    double* val = pat.H.valuePtr();
    std::fill(val, val + pat.H.nonZeros(), 0.0);
    for (std::size_t k = 0; k < ws.ff.size(); ++k) {
        const double c = ws.cond[ws.ff[k].edge];
        val[pat.diagOff[ws.ff[k].i]] += c;
        val[pat.diagOff[ws.ff[k].j]] += c;
        val[pat.ffOff[k][0]] -= c;
        val[pat.ffOff[k][1]] -= c;
    }
    for (const FPEdge& fe : ws.fp) {
        const double c = ws.cond[fe.edge];
        val[pat.diagOff[fe.i]] += c;
        rhs[fe.i] += c * u[fe.pinned];
    }
    if (ws.src) rhs[ws.srcFree] += ws.src->strength;

    Eigen::VectorXd x;
    if (useDirect) {
        Eigen::SimplicialLDLT<SpMat> ldlt;
        ldlt.compute(pat.H);
        if (ldlt.info() != Eigen::Success)
            throw NonConvergence("sparse factorization failed", -1.0);
        x = ldlt.solve(rhs);
    } else {
        Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(cgTol);
        cg.setMaxIterations(8000);
        cg.compute(pat.H);
        Eigen::VectorXd guess(n);
        for (int i = 0; i < n; ++i) guess[i] = u[ws.freeVerts[i]];
        x = cg.solveWithGuess(rhs, guess);
        if (cg.info() != Eigen::Success && cg.error() > 1e-6)
            throw NonConvergence("conjugate gradient stalled", cg.error());
    }
    for (int i = 0; i < n; ++i) u[ws.freeVerts[i]] = x[i];
}

}  // namespace

PotentialField minimize_masked(const MetricMeasureSpace& X,
                               const std::vector<std::uint8_t>& freeMask,
                               std::vector<double> values,
                               const std::optional<PointSource>& source,
                               const EnergyConfig& cfg,
                               const SolveOptions& opts) {
    if (freeMask.size() != std::size_t(X.vertexCount()))
        throw InvalidInput("free mask must cover every vertex");
    if (!(cfg.p > 1.0)) throw InvalidInput("exponent p must exceed 1");
    if (!(cfg.tolRel > 0.0)) throw InvalidInput("tolRel must be positive");

    PotentialField out;
    Workspace ws(X, freeMask, source, cfg.p);

    auto finish = [&](std::vector<double>&& u, double finalRes) {
        out.values = std::move(u);
        out.energy = p_energy(X, out.values, cfg);
        out.edgeGradients.resize(X.edgeCount());
        for (int e = 0; e < X.edgeCount(); ++e)
            out.edgeGradients[e] =
                std::abs(out.values[X.edges[e].a] - out.values[X.edges[e].b]) /
                X.edges[e].len;
        for (int v = 0; v < X.vertexCount(); ++v)
            if (!freeMask[v]) out.fixedSet.push_back(v);
        out.source = source;
        out.finalResidual = finalRes;
        return out;
    };

    if (ws.nFree() == 0) return finish(std::move(values), 0.0);

    if (opts.init) {
        if (opts.init->size() != values.size())
            throw InvalidInput("warm start has wrong size");
        for (int i = 0; i < ws.nFree(); ++i) {
            const int v = ws.freeVerts[i];
            values[v] = (*opts.init)[v];
        }
    } else {
        for (int i = 0; i < ws.nFree(); ++i) values[ws.freeVerts[i]] = 0.0;
    }

    Pattern pat = build_pattern(ws.nFree(), ws.ff, ws.fp);
    const bool useDirect =
        (X.dim == 2 && ws.nFree() <= 450000) || ws.nFree() <= 40000;

    if (cfg.p == 2.0 && !opts.forceContinuation) {
        solve_quadratic(ws, pat, values, useDirect, 1e-12);
        Eigen::VectorXd g(ws.nFree());
        std::vector<double> fs(ws.nFree());
        ws.gradient(values, 0.0, g, fs, nullptr);
        const double res = ws.residual(g, fs);
        if (cfg.trace)
            out.trace.push_back({0, ws.objectiveTrue(values, cfg), res});
        return finish(std::move(values), res);
    }
    if (!opts.init && !opts.forceContinuation)
        solve_quadratic(ws, pat, values, useDirect, 1e-8);

    // epsilon continuation on the smoothed energy, damped Newton per stage
    double gscale = 0.0;
    for (const Edge& e : X.edges)
        gscale = std::max(gscale,
                          std::abs(values[e.a] - values[e.b]) / e.len);
    if (gscale < 1e-30) gscale = 1.0;

    std::vector<double> epsStages;
    {
        const double rel = opts.eps0Rel > 0.0 ? opts.eps0Rel : cfg.epsilon0;
        double e0 = opts.eps0Abs > 0.0 ? opts.eps0Abs : rel * gscale;
        const double eMin = 1e-12 * gscale;
        for (double e = e0; e > eMin && epsStages.size() < 60; e *= 0.5)
            epsStages.push_back(e);
        epsStages.push_back(1e-13 * gscale);
    }

    Eigen::VectorXd g(ws.nFree()), delta(ws.nFree());
    std::vector<double> fluxScale(ws.nFree());
    std::vector<double> trial(values.size());
    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool analyzed = false;
    int iterTotal = 0;
    double lastRes = std::numeric_limits<double>::infinity();

    for (std::size_t stage = 0; stage < epsStages.size(); ++stage) {
        const double eps = epsStages[stage];
        const bool finalStage = (stage + 1 == epsStages.size());
        const double stageTol = finalStage ? cfg.tolRel : 1e-3;
        const int stageCap = finalStage ? cfg.maxIter : 6;

        double Fprev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < stageCap; ++it) {
            double Feps;
            ws.gradient(values, eps, g, fluxScale, &Feps);
            Feps /= cfg.p;
            if (ws.src) Feps -= ws.src->strength * values[ws.src->vertex];
            const double res = ws.residual(g, fluxScale);
            lastRes = res;
            const double drop = std::abs(Fprev - Feps) /
                                (std::abs(Feps) + 1e-300);
            if (res < stageTol && (it == 0 || drop < stageTol)) break;
            if (iterTotal >= cfg.maxIter)
                throw NonConvergence("iteration budget exhausted", res);

            ws.hessianValues(values, eps, pat);
            if (useDirect) {
                if (!analyzed) {
                    ldlt.analyzePattern(pat.H);
                    analyzed = true;
                }
                ldlt.factorize(pat.H);
                if (ldlt.info() != Eigen::Success)
                    throw NonConvergence("sparse factorization failed", res);
                delta = ldlt.solve(-g);
            } else {
                Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
                cg.setTolerance(std::clamp(stageTol * 1e-2, 1e-11, 1e-4));
                cg.setMaxIterations(4000);
                cg.compute(pat.H);
                delta = cg.solve(-g);
            }
            double slope = g.dot(delta);
            if (!(slope < 0.0)) {
                // fallback: preconditioned steepest descent
                const double* val = pat.H.valuePtr();
                for (int i = 0; i < ws.nFree(); ++i)
                    delta[i] = -g[i] / val[pat.diagOff[i]];
                slope = g.dot(delta);
            }

            double t = 1.0, Fbest = Feps, tBest = 0.0;
            for (int bt = 0; bt < 30; ++bt) {
                trial = values;
                for (int i = 0; i < ws.nFree(); ++i)
                    trial[ws.freeVerts[i]] += t * delta[i];
                const double Ft = ws.objectiveSmoothed(trial, eps);
                if (Ft <= Feps + 1e-4 * t * slope) {
                    tBest = t;
                    Fbest = Ft;
                    break;
                }
                if (Ft < Fbest) {
                    Fbest = Ft;
                    tBest = t;
                }
                t *= 0.5;
            }
            if (tBest == 0.0) break;  // no descent at this eps, move on
            for (int i = 0; i < ws.nFree(); ++i)
                values[ws.freeVerts[i]] += tBest * delta[i];
            ++iterTotal;
            Fprev = Fbest;
            if (cfg.trace)
                out.trace.push_back(
                    {iterTotal, ws.objectiveTrue(values, cfg), res});
        }
        if (finalStage && lastRes >= cfg.tolRel) {
            // one more verification pass; throw if genuinely off tolerance
            ws.gradient(values, eps, g, fluxScale, nullptr);
            const double res = ws.residual(g, fluxScale);
            if (res >= cfg.tolRel)
                throw NonConvergence("final residual above tolerance", res);
        }
    }

    ws.gradient(values, 0.0, g, fluxScale, nullptr);
    return finish(std::move(values), ws.residual(g, fluxScale));
}

}  // namespace detail

PotentialField minimize(const MetricMeasureSpace& X, const std::vector<int>& domain,
                        const std::unordered_map<int, double>& boundary,
                        const std::optional<PointSource>& source,
                        const EnergyConfig& cfg) {
    const int V = X.vertexCount();
    std::vector<std::uint8_t> freeMask(V, 0);
    for (int v : domain) {
        if (v < 0 || v >= V) throw InvalidProblem("domain vertex out of range");
        freeMask[v] = 1;
    }
    std::vector<double> values(V, 0.0);
    for (int v = 0; v < V; ++v) {
        if (freeMask[v]) continue;
        auto it = boundary.find(v);
        if (it == boundary.end())
            throw InvalidProblem("boundary must pin every vertex outside the domain");
        values[v] = it->second;
    }
    for (const auto& [v, val] : boundary) {
        (void)val;
        if (v < 0 || v >= V || freeMask[v])
            throw InvalidProblem("boundary entry collides with the domain");
    }

    // the domain itself must be connected, not just anchored
    {
        std::vector<int> inDom(V, 0);
        for (int v : domain) inDom[v] = 1;
        int start = -1, count = 0;
        for (int v = 0; v < V; ++v)
            if (inDom[v]) {
                if (start < 0) start = v;
                ++count;
            }
        if (count > 0) {
            std::vector<int> stack{start};
            std::vector<std::uint8_t> seen(V, 0);
            seen[start] = 1;
            int reached = 1;
            while (!stack.empty()) {
                const int v = stack.back();
                stack.pop_back();
                for (int k = X.adjOffset[v]; k < X.adjOffset[v + 1]; ++k) {
                    const int w = X.adjVert[k];
                    if (inDom[w] && !seen[w]) {
                        seen[w] = 1;
                        ++reached;
                        stack.push_back(w);
                    }
                }
            }
            if (reached != count)
                throw DisconnectedDomain("minimization domain is disconnected");
        }
    }

    return detail::minimize_masked(X, freeMask, std::move(values), source, cfg);
}

}  // namespace greenlab
