#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace greenlab {

enum class MetricMode { GraphGeodesic, AmbientEuclidean };

struct Edge {
    int a;       // a < b, each undirected edge stored once
    int b;
    double len;  // > 0
};

// Finite weighted graph standing in for a metric measure space: vertex
// coordinates, one cell mass per vertex, edge lengths, and a metric mode.
// Immutable after construction; distance queries allocate their own output.
struct MetricMeasureSpace {
    int dim = 0;                 // ambient coordinate dimension, 2 or 3
    double h = 0.0;              // nominal mesh spacing
    MetricMode metricMode = MetricMode::AmbientEuclidean;
    std::string generator;       // "grid" | "cone" | "glued"
    double alpha = 0.0;          // grid measure exponent, 0 elsewhere

    std::vector<std::array<double, 3>> coords;  // z = 0 for 2-d spaces
    std::vector<double> measure;                // > 0 per vertex
    std::vector<Edge> edges;

    // CSR adjacency, filled by finalize(): for vertex v the incident edges
    // are adjEdge[adjOffset[v] .. adjOffset[v+1]) with opposite endpoints
    // adjVert[...] in the same slots.
    std::vector<int> adjOffset;
    std::vector<int> adjVert;
    std::vector<int> adjEdge;

    double totalMeasure = 0.0;

    int vertexCount() const { return static_cast<int>(coords.size()); }
    int edgeCount() const { return static_cast<int>(edges.size()); }

    // Builds adjacency, validates positivity and connectivity.
    void finalize();

    double euclid(int a, int b) const {
        const auto& p = coords[a];
        const auto& q = coords[b];
        const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    }
};

struct BallIndex {
    int center = -1;
    double radius = 0.0;
    std::vector<int> members;  // {v : d(center, v) < radius}, ascending ids
    double mass = 0.0;
};

struct DimensionEstimate {
    int center = -1;
    std::vector<double> radii;
    double logMassSlope = 0.0;  // fitted pointwise dimension at the center
    double globalQ = 0.0;       // log2 of the doubling constant
    double fitResidual = 0.0;
};

MetricMeasureSpace build_grid(int n, double halfWidth, double h, double alpha);
MetricMeasureSpace build_cone(int n, double halfHeight, double h);
MetricMeasureSpace build_glued_balls(int n, double h, double neckLength);

// Distance field from one vertex: Dijkstra under graph-geodesic mode,
// closed-form under ambient-euclidean mode. O(V log V) / O(V).
std::vector<double> distances_from(const MetricMeasureSpace& X, int v);

// Open ball {d < r}. Empty balls are legal (mass 0).
BallIndex ball(const MetricMeasureSpace& X, int center, double r);
BallIndex ball(const MetricMeasureSpace& X, const std::vector<double>& dist,
               int center, double r);

// Mesh-consistent closed ball {d <= r + h/2}; the ring-capacity core.
std::vector<int> closed_ball_core(const MetricMeasureSpace& X,
                                  const std::vector<double>& dist, double r);

// max over radii of mass(B(x,2r)) / mass(B(x,r)); throws EmptyBall.
double estimate_doubling(const MetricMeasureSpace& X, int center,
                         const std::vector<double>& radii);

// Least-squares slope of log mass against log r plus the doubling exponent.
// Needs >= 4 radii, none with an empty ball.
DimensionEstimate estimate_pointwise_dimension(const MetricMeasureSpace& X,
                                               int center,
                                               const std::vector<double>& radii);

int nearest_vertex(const MetricMeasureSpace& X, const std::array<double, 3>& point);

// {R*2^-k : k = kmin..kmax}
std::vector<double> dyadic_radii(double R, int kmin, int kmax);

}  // namespace greenlab
