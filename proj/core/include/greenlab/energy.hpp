#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "greenlab/space.hpp"

namespace greenlab {

struct EnergyConfig {
    double p = 2.0;
    double epsilon0 = 1e-2;  // initial smoothing scale, relative to the
                             // gradient magnitude of the starting iterate
    double tolRel = 1e-6;
    int maxIter = 200;       // total Newton-iteration budget per solve
    unsigned seed = 0;       // consumed only by randomized-start diagnostics
    bool trace = false;      // record per-iteration objective and residual
};

struct PointSource {
    int vertex = -1;
    double strength = 1.0;
};

struct TraceRow {
    int iter;
    double objective;  // (1/p)*energy - strength*u(x0); the minimized value
    double residual;   // normalized Euler-Lagrange residual at current eps
};

struct PotentialField {
    std::vector<double> values;
    double energy = 0.0;                 // recomputable: p_energy(values)
    std::vector<double> edgeGradients;   // |u_a - u_b| / len per edge
    std::vector<int> fixedSet;           // pinned vertices, ascending
    std::optional<PointSource> source;
    std::vector<TraceRow> trace;
    double finalResidual = 0.0;          // unsmoothed p-flux residual
};

// Cap internal parallelism. The numeric kernels are sequential by design
// (deterministic summation order), so the effective cap is min(cap, 1).
void configure_threads(int cap);

// Discrete p-Dirichlet energy: sum over edges of V_e * (|du|/len)^p with
// edge volume V_e = (mu_a + mu_b)/2. Compensated, order-fixed summation.
double p_energy(const MetricMeasureSpace& X, const std::vector<double>& values,
                const EnergyConfig& cfg);

// Minimize (1/p)*p_energy(u) - strength*u(x0) over fields that agree with
// `boundary` outside `domain`. Every vertex outside `domain` must be pinned.
PotentialField minimize(const MetricMeasureSpace& X,
                        const std::vector<int>& domain,
                        const std::unordered_map<int, double>& boundary,
                        const std::optional<PointSource>& source,
                        const EnergyConfig& cfg);

// Max over the given vertices of the net discrete p-flux, normalized by the
// local one-sided flux scale; 0 means exactly discretely p-harmonic.
double harmonic_residual(const MetricMeasureSpace& X, const PotentialField& field,
                         const std::vector<int>& domain, const EnergyConfig& cfg);

namespace detail {

struct SolveOptions {
    // Run the smoothing/continuation path even at p == 2 (oracle checks).
    bool forceContinuation = false;
    // Warm start; must satisfy the pinned values exactly where not free.
    const std::vector<double>* init = nullptr;
    // Continuation start override (absolute smoothing scale); < 0 = default.
    double eps0Abs = -1.0;
    // Continuation start relative to the gradient scale; < 0 = cfg.epsilon0.
    // Warm-started solves pass a small value to skip the early ladder.
    double eps0Rel = -1.0;
};

// Mask-based entry point shared by capacity and Green solvers. freeMask[v]
// nonzero marks an unknown; `values` carries pinned values (and is the cold
// start elsewhere). Throws DisconnectedDomain if some free component has no
// pinned neighbor, NonConvergence if the iteration budget is exhausted.
PotentialField minimize_masked(const MetricMeasureSpace& X,
                               const std::vector<std::uint8_t>& freeMask,
                               std::vector<double> values,
                               const std::optional<PointSource>& source,
                               const EnergyConfig& cfg,
                               const SolveOptions& opts = {});

}  // namespace detail

}  // namespace greenlab
