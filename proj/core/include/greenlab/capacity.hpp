#pragma once

#include <utility>
#include <vector>

#include "greenlab/energy.hpp"
#include "greenlab/space.hpp"

namespace greenlab {

struct CapacityProblem {
    std::vector<int> core;    // K, nonempty, inside domain
    std::vector<int> domain;  // Omega, connected, proper subset
    double p = 2.0;
};

struct CapacityResult {
    double value = 0.0;
    PotentialField potential;  // 1 on K, 0 off Omega, in [0,1]
    CapacityProblem problem;
};

struct RingRow {
    double r = 0.0;
    double capValue = 0.0;
    double ballMass = 0.0;  // mu(B(x0, r)), open ball
    bool converged = false;
};

struct RingCapacityProfile {
    int center = -1;
    double outerRadius = 0.0;
    double p = 2.0;
    double pointwiseQ = 0.0;
    std::vector<RingRow> rows;  // sorted descending in r
};

enum class Regime { Below, Conformal, Above };

struct SandwichReport {
    Regime regime = Regime::Below;
    double fittedLowerConst = 0.0;  // min of capValue / model(r)
    double fittedUpperConst = 0.0;  // max of capValue / model(r)
    double spread = 0.0;            // upper / lower
    bool pass = false;
    std::vector<double> ratios;
};

struct TrendVerdict {
    bool applicable = false;  // p at or below the pointwise dimension
    bool pass = false;
};

struct ScalingRow {
    double alphaLevel = 0.0;
    double betaLevel = 0.0;
    double measured = 0.0;
    double predicted = 0.0;
    double relError = 0.0;
    bool pass = false;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    bool pass = false;
};

CapacityResult solve_capacity(const MetricMeasureSpace& X,
                              const CapacityProblem& problem,
                              const EnergyConfig& cfg);

namespace detail {
// warm-started variant used by the radius sweeps; init may be null
CapacityResult solve_capacity_warm(const MetricMeasureSpace& X,
                                   const CapacityProblem& problem,
                                   const EnergyConfig& cfg,
                                   const std::vector<double>* init);
}  // namespace detail

// One capacity solve per radius with K the mesh-closed ball and Omega the
// open ball B(x0, R); rows descending in r, smaller cores warm-started from
// larger ones. pointwiseQ is fitted over {R*2^-k : k = 0..3}.
RingCapacityProfile ring_capacity_sweep(const MetricMeasureSpace& X, int x0,
                                        const std::vector<double>& radii, double R,
                                        const EnergyConfig& cfg);

SandwichReport check_capacity_sandwich(const RingCapacityProfile& profile);

TrendVerdict singleton_capacity_trend(const RingCapacityProfile& profile);

// Capacity between the level sets {field >= beta} and {field > alpha}.
// Components of the superlevel domain that miss the core carry a zero
// minimizer and no energy, so the solve restricts to the core's components.
double level_set_capacity(const MetricMeasureSpace& X, const PotentialField& field,
                          double alphaLevel, double betaLevel, double p,
                          const EnergyConfig& cfg);

ScalingReport verify_potential_scaling(
    const MetricMeasureSpace& X, const CapacityResult& capResult,
    const std::vector<std::pair<double, double>>& pairs, const EnergyConfig& cfg);

}  // namespace greenlab
