#pragma once

#include <array>
#include <vector>

#include "greenlab/energy.hpp"
#include "greenlab/green.hpp"
#include "greenlab/space.hpp"

namespace greenlab {

enum class FitModel { PowerLaw, Logarithmic };

struct FitReport {
    FitModel model = FitModel::PowerLaw;
    double fittedSlope = 0.0;
    double predictedSlope = 0.0;
    double intercept = 0.0;
    double rSquared = 0.0;
    double rMin = 0.0;  // radius window actually used
    double rMax = 0.0;
    bool pass = false;
};

enum class Trend { Bounded, Diverging, Indeterminate };

struct IntegrabilityRow {
    double q = 0.0;
    std::vector<double> norms;  // q-th power integrals, coarse to fine
    Trend trend = Trend::Indeterminate;
};

struct IntegrabilityReport {
    double p = 2.0;
    double r = 0.0;
    std::vector<double> meshSteps;  // h of each mesh, coarse to fine
    double pointwiseQ = 0.0;  // log-mass slope at the pole, finest mesh
    double globalQ = 0.0;     // doubling-based estimate
    // integrability thresholds implied by the pointwise dimension
    double criticalValueExponent = 0.0;     // Q(p-1)/(Q-p), inf when p >= Q
    double criticalGradientExponent = 0.0;  // Q(p-1)/(Q-1)
    std::vector<IntegrabilityRow> valueRows;
    std::vector<IntegrabilityRow> gradientRows;
};

struct HarnackReport {
    double maxRatio = 0.0;
    double bound = 3.0;
    bool pass = false;
};

// Fit the shell midrange (m+M)/2 of a singular potential inside the window
// [4h, R0/4], with R0 the domain radius seen from the pole. The model comes
// from the pointwise dimension at the pole: within 0.1 of p the logarithmic
// model regresses midrange against log(R0/r), asking only for a positive
// slope with a tight linearity gate; otherwise the power-law model
// regresses log-midrange against log((r^p / mu(B(x0,r)))^{1/(p-1)}) and
// expects slope 1.
FitReport fit_local_behavior(const MetricMeasureSpace& X, const GreenFunction& G,
                             const RadialProfile& profile,
                             const DimensionEstimate& dim);

// Solve the same point-source problem on a refinement ladder (coarse to
// fine, typically h, h/2, h/4) and track the q-th power integrals of the
// potential over B(x0, r) and of its edge gradients. A quantity diverges
// when the finest norm exceeds 1.5x the coarsest and the ladder increases;
// it is bounded when all norms agree within 15%; otherwise the verdict is
// left open.
IntegrabilityReport integrability_scan(
    const std::vector<const MetricMeasureSpace*>& meshes,
    const std::array<double, 3>& center, double r,
    const std::vector<double>& valueExponents,
    const std::vector<double>& gradientExponents, const EnergyConfig& cfg);

// Largest shell oscillation M/m across the profile rows.
HarnackReport harnack_sphere_ratio(const RadialProfile& profile,
                                   double bound = 3.0);

}  // namespace greenlab
