#pragma once

#include <optional>
#include <vector>

#include "greenlab/capacity.hpp"
#include "greenlab/energy.hpp"
#include "greenlab/space.hpp"

namespace greenlab {

// Singular potential with a point source: minimizes (1/p) E(u) - s*u(x0)
// over fields vanishing outside the domain.
struct GreenFunction {
    std::vector<double> values;
    int x0 = -1;
    std::vector<int> domain;
    double p = 2.0;
    // pairing constant; NaN until compute_K has run, 1 after normalize
    double kValue = std::numeric_limits<double>::quiet_NaN();
    bool normalized = false;
    double sourceStrength = 1.0;
    PotentialField field;  // solver output incl. residual and trace
};

// Shell statistics of a singular potential at distance r from its pole.
struct RadialRow {
    double r = 0.0;
    double m = 0.0;         // min over the shell
    double M = 0.0;         // max over the shell
    double ballMass = 0.0;  // measure of the open ball B(x0, r)
    double ringCap = 0.0;   // Cap_p(closed ball(r), reference ball), 0 if unset
};

struct RadialProfile {
    int x0 = -1;
    double p = 2.0;
    double shellHalfWidth = 0.0;  // widest half-width actually used
    std::vector<RadialRow> rows;
};

struct DefinitionReport {
    bool positive = true;             // values >= 0 on the domain
    bool vanishesOutside = true;      // exactly zero off the domain
    bool harmonicAway = true;         // flux balance away from the pole
    double worstResidual = 0.0;
    bool singularAtPole = true;       // peak growth under refinement, if given
    bool levelLawHolds = true;        // cap products near the expected constant
    std::vector<double> levelProducts;
    bool pass = false;
};

struct GrowthReport {
    // u(r) = (m(r) - M_R) * cap(r)^{1/(p-1)} should be flat; the l(r)
    // companion divides (M(r) - M_R) * cap^{1/(p-1)} by (1 - r/r0)^p. The
    // divisor degenerates as r approaches r0, so the lower aggregation only
    // admits rows with r <= r0/2, where the bound is quantitative.
    std::vector<double> upperRatios;
    std::vector<double> lowerRatios;
    double upperSpread = 0.0;
    double lowerSpread = 0.0;
    double r0 = 0.0;      // largest shell radius with m(r) >= M_R
    int skippedRows = 0;  // shells already below the outer level
    bool pass = false;
};

// Solve for the singular potential. x0 must be interior to the domain:
// every neighbor inside, else SingularityOnBoundary.
GreenFunction solve_singular(const MetricMeasureSpace& X, int x0,
                             const std::vector<int>& domain,
                             const EnergyConfig& cfg,
                             double sourceStrength = 1.0);

// Capacitary potential of a small ball around x0, the canonical cutoff for
// the pairing below.
std::vector<double> default_cutoff(const MetricMeasureSpace& X,
                                   const GreenFunction& G,
                                   const EnergyConfig& cfg);

// Discrete pairing sum_e w_e |dG|^{p-2} dG dphi over the edges. The cutoff
// must be 1 on the pole's closed 1-ring and 0 outside the domain, else
// InvalidCutoff. By flux balance the value is independent of the cutoff.
double compute_K(const MetricMeasureSpace& X, const GreenFunction& G,
                 const std::vector<double>& cutoff);

// Rescale so the pairing constant becomes 1: multiplies values by
// K^{-1/(p-1)} and folds K into sourceStrength.
void normalize(GreenFunction& G);

// Shell min/max of |G| at the given radii. With the default half-width the
// shell spans one mesh layer (h) and widens, up to 4h, for radii that would
// otherwise catch no vertex; an explicit half-width is applied strictly and
// an empty shell raises EmptyShell either way.
RadialProfile radial_extrema(const MetricMeasureSpace& X, const GreenFunction& G,
                             const std::vector<double>& radii,
                             double shellHalfWidth = -1.0);

// Fill ringCap on the profile rows: Cap_p(closed ball(r), open ball(R_ref))
// with R_ref the largest row radius. The outermost row keeps ringCap = 0.
void fill_ring_capacities(const MetricMeasureSpace& X, RadialProfile& profile,
                          const EnergyConfig& cfg);

// Defining properties of a p-harmonic Green's function: positivity, zero
// boundary values, harmonicity away from the pole, singularity at the pole
// (via peak values on refined meshes, if provided), and the capacity level
// law with the expected constant.
DefinitionReport check_definition_criteria(
    const MetricMeasureSpace& X, const GreenFunction& G, const EnergyConfig& cfg,
    const std::vector<std::pair<double, double>>& levelPairs,
    const std::vector<double>* refinementPeaks = nullptr);

// Two-sided growth control of the profile against capacity: the upper and
// lower combinations above must each stay within a factor-10 band.
GrowthReport check_growth_bounds(const RadialProfile& profile,
                                 const MetricMeasureSpace& X,
                                 const GreenFunction& G);

}  // namespace greenlab
