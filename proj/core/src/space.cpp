#include "greenlab/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_map>

#include "greenlab/errors.hpp"
#include "greenlab/util.hpp"

namespace greenlab {

void MetricMeasureSpace::finalize() {
    const int V = vertexCount();
    if (V == 0) throw InvalidSpace("space has no vertices");
    for (double m : measure)
        if (!(m > 0.0)) throw InvalidSpace("nonpositive vertex measure");
    for (const Edge& e : edges) {
        if (e.a < 0 || e.b < 0 || e.a >= V || e.b >= V || e.a == e.b)
            throw InvalidSpace("edge endpoint out of range");
        if (!(e.len > 0.0)) throw InvalidSpace("nonpositive edge length");
    }

    adjOffset.assign(V + 1, 0);
    for (const Edge& e : edges) {
        ++adjOffset[e.a + 1];
        ++adjOffset[e.b + 1];
    }
    for (int v = 0; v < V; ++v) adjOffset[v + 1] += adjOffset[v];
    adjVert.assign(adjOffset[V], -1);
    adjEdge.assign(adjOffset[V], -1);
    std::vector<int> fill(adjOffset.begin(), adjOffset.end() - 1);
    for (int i = 0; i < edgeCount(); ++i) {
        const Edge& e = edges[i];
        adjVert[fill[e.a]] = e.b;
        adjEdge[fill[e.a]++] = i;
        adjVert[fill[e.b]] = e.a;
        adjEdge[fill[e.b]++] = i;
    }

    KahanSum total;
    for (double m : measure) total.add(m);
    totalMeasure = total.value();

    // connectivity
    std::vector<std::uint8_t> seen(V, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int k = adjOffset[v]; k < adjOffset[v + 1]; ++k) {
            int w = adjVert[k];
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    if (reached != V) throw InvalidSpace("graph is disconnected");
}

namespace {

double weight_density(const std::array<double, 3>& x, double alpha, double h) {
    if (alpha == 0.0) return 1.0;
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    return std::pow(std::max(r, h / 2.0), alpha);
}

}  // namespace

MetricMeasureSpace build_grid(int n, double halfWidth, double h, double alpha) {
    if (n != 2 && n != 3) throw InvalidSpace("grid dimension must be 2 or 3");
    if (!(h > 0.0)) throw InvalidSpace("mesh spacing must be positive");
    if (!(halfWidth >= 8.0 * h)) throw InvalidSpace("halfWidth must be at least 8h");
    if (alpha < 0.0) throw InvalidSpace("measure exponent must be nonnegative");

    const int N = static_cast<int>(std::llround(2.0 * halfWidth / h)) + 1;
    MetricMeasureSpace X;
    X.dim = n;
    X.h = h;
    X.metricMode = MetricMode::AmbientEuclidean;
    X.generator = "grid";
    X.alpha = alpha;

    const double cellVol = std::pow(h, n);
    auto axisCoord = [&](int i) { return i * h - halfWidth; };

    if (n == 2) {
        X.coords.reserve(std::size_t(N) * N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                X.coords.push_back({axisCoord(i), axisCoord(j), 0.0});
        X.edges.reserve(2 * std::size_t(N) * (N - 1));
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                const int v = i * N + j;
                if (i + 1 < N) X.edges.push_back({v, v + N, h});
                if (j + 1 < N) X.edges.push_back({v, v + 1, h});
            }
    } else {
        X.coords.reserve(std::size_t(N) * N * N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                for (int k = 0; k < N; ++k)
                    X.coords.push_back({axisCoord(i), axisCoord(j), axisCoord(k)});
        X.edges.reserve(3 * std::size_t(N) * N * (N - 1));
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                for (int k = 0; k < N; ++k) {
                    const int v = (i * N + j) * N + k;
                    if (i + 1 < N) X.edges.push_back({v, v + N * N, h});
                    if (j + 1 < N) X.edges.push_back({v, v + N, h});
                    if (k + 1 < N) X.edges.push_back({v, v + 1, h});
                }
    }

    X.measure.reserve(X.coords.size());
    for (const auto& c : X.coords)
        X.measure.push_back(cellVol * weight_density(c, alpha, h));

    X.finalize();
    return X;
}

namespace {

// Shared lattice-subset builder for cone and glued-ball spaces: takes the
// accepted lattice points (integer coordinates scaled by h) and connects the
// full 8-/26-neighborhood with Euclidean edge lengths.
struct LatticeKey {
    std::int64_t packed;
    bool operator==(const LatticeKey& o) const { return packed == o.packed; }
};
struct LatticeKeyHash {
    std::size_t operator()(const LatticeKey& k) const {
        return std::hash<std::int64_t>()(k.packed);
    }
};

std::int64_t pack3(int i, int j, int k) {
    const std::int64_t B = 1 << 20;
    return ((std::int64_t(i) + B) << 42) | ((std::int64_t(j) + B) << 21) |
           (std::int64_t(k) + B);
}

void connect_lattice_neighbors(MetricMeasureSpace& X,
                               const std::vector<std::array<int, 3>>& latt,
                               int firstVertex,
                               const std::unordered_map<LatticeKey, int, LatticeKeyHash>& index,
                               int n, double h) {
    const double len1 = h, len2 = std::sqrt(2.0) * h, len3 = std::sqrt(3.0) * h;
    const int kRange = (n == 3) ? 1 : 0;
    for (std::size_t t = 0; t < latt.size(); ++t) {
        const auto& a = latt[t];
        const int v = firstVertex + static_cast<int>(t);
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj)
                for (int dk = -kRange; dk <= kRange; ++dk) {
                    if (di == 0 && dj == 0 && dk == 0) continue;
                    auto it = index.find({pack3(a[0] + di, a[1] + dj, a[2] + dk)});
                    if (it == index.end()) continue;
                    const int w = firstVertex + it->second;
                    if (w <= v) continue;  // store each edge once
                    const int ord = std::abs(di) + std::abs(dj) + std::abs(dk);
                    const double len = ord == 1 ? len1 : (ord == 2 ? len2 : len3);
                    X.edges.push_back({v, w, len});
                }
    }
}

}  // namespace

MetricMeasureSpace build_cone(int n, double halfHeight, double h) {
    if (n != 2 && n != 3) throw InvalidSpace("cone dimension must be 2 or 3");
    if (!(h > 0.0)) throw InvalidSpace("mesh spacing must be positive");
    if (!(halfHeight >= 8.0 * h)) throw InvalidSpace("halfHeight must be at least 8h");

    MetricMeasureSpace X;
    X.dim = n;
    X.h = h;
    X.metricMode = MetricMode::GraphGeodesic;
    X.generator = "cone";

    const int M = static_cast<int>(std::floor(halfHeight / h + 1e-9));
    std::vector<std::array<int, 3>> latt;
    // double cone {x_1^2 + ... + x_{n-1}^2 <= x_n^2}, axis along the last
    // coordinate; lattice indices (i[,j]) transverse, m axial
    for (int m = -M; m <= M; ++m) {
        const std::int64_t m2 = std::int64_t(m) * m;
        if (n == 2) {
            for (int i = -std::abs(m); i <= std::abs(m); ++i)
                latt.push_back({i, m, 0});
        } else {
            for (int i = -std::abs(m); i <= std::abs(m); ++i)
                for (int j = -std::abs(m); j <= std::abs(m); ++j)
                    if (std::int64_t(i) * i + std::int64_t(j) * j <= m2)
                        latt.push_back({i, j, m});
        }
    }

    std::unordered_map<LatticeKey, int, LatticeKeyHash> index;
    index.reserve(latt.size() * 2);
    for (std::size_t t = 0; t < latt.size(); ++t)
        index.emplace(LatticeKey{pack3(latt[t][0], latt[t][1], latt[t][2])},
                      static_cast<int>(t));

    const double cellVol = std::pow(h, n);
    for (const auto& a : latt) {
        if (n == 2)
            X.coords.push_back({a[0] * h, a[1] * h, 0.0});
        else
            X.coords.push_back({a[0] * h, a[1] * h, a[2] * h});
        X.measure.push_back(cellVol);
    }

    connect_lattice_neighbors(X, latt, 0, index, n, h);

    try {
        X.finalize();
    } catch (const InvalidSpace&) {
        throw InvalidSpace("cone truncation produced a degenerate graph");
    }
    return X;
}

MetricMeasureSpace build_glued_balls(int n, double h, double neckLength) {
    if (n != 2 && n != 3) throw InvalidSpace("glued-ball dimension must be 2 or 3");
    if (!(h > 0.0)) throw InvalidSpace("mesh spacing must be positive");
    if (!(neckLength >= 2.0 * h)) throw InvalidSpace("neck must be at least 2h long");

    MetricMeasureSpace X;
    X.dim = n;
    X.h = h;
    X.metricMode = MetricMode::GraphGeodesic;
    X.generator = "glued";

    const int M = static_cast<int>(std::floor(1.0 / h + 1e-9));
    const double cellVol = std::pow(h, n);
    const int kRange = (n == 3) ? M : 0;

    auto addBall = [&](const std::array<double, 3>& center) {
        std::vector<std::array<int, 3>> latt;
        for (int i = -M; i <= M; ++i)
            for (int j = -M; j <= M; ++j)
                for (int k = -kRange; k <= kRange; ++k) {
                    const std::int64_t r2 =
                        std::int64_t(i) * i + std::int64_t(j) * j + std::int64_t(k) * k;
                    if (r2 * h * h <= 1.0 + 1e-12) latt.push_back({i, j, k});
                }
        std::unordered_map<LatticeKey, int, LatticeKeyHash> index;
        index.reserve(latt.size() * 2);
        for (std::size_t t = 0; t < latt.size(); ++t)
            index.emplace(LatticeKey{pack3(latt[t][0], latt[t][1], latt[t][2])},
                          static_cast<int>(t));
        const int first = X.vertexCount();
        for (const auto& a : latt) {
            X.coords.push_back(
                {center[0] + a[0] * h, center[1] + a[1] * h, center[2] + a[2] * h});
            X.measure.push_back(cellVol);
        }
        connect_lattice_neighbors(X, latt, first, index, n, h);
        return first;
    };

    const int firstA = addBall({0.0, 0.0, 0.0});
    const double cbx = 2.0 + neckLength;
    const int firstB = addBall({cbx, 0.0, 0.0});

    const int jA = nearest_vertex(X, {1.0, 0.0, 0.0});
    const int jB = [&] {
        int best = firstB;
        double bd = std::numeric_limits<double>::infinity();
        for (int v = firstB; v < X.vertexCount(); ++v) {
            const auto& c = X.coords[v];
            const double dx = c[0] - (1.0 + neckLength);
            const double d = dx * dx + c[1] * c[1] + c[2] * c[2];
            if (d < bd) { bd = d; best = v; }
        }
        return best;
    }();
    (void)firstA;

    // 1-d chain across the neck; every chain vertex carries mass h
    const int K = static_cast<int>(std::llround(neckLength / h));
    int prev = jA;
    for (int k = 1; k < K; ++k) {
        const std::array<double, 3> pos{1.0 + k * h, 0.0, 0.0};
        const int v = X.vertexCount();
        X.coords.push_back(pos);
        X.measure.push_back(h);
        const auto& pc = X.coords[prev];
        const double dx = pc[0] - pos[0], dy = pc[1] - pos[1], dz = pc[2] - pos[2];
        X.edges.push_back({std::min(prev, v), std::max(prev, v),
                           std::max(std::sqrt(dx * dx + dy * dy + dz * dz), 1e-12)});
        prev = v;
    }
    {
        const auto& pc = X.coords[prev];
        const auto& qc = X.coords[jB];
        const double dx = pc[0] - qc[0], dy = pc[1] - qc[1], dz = pc[2] - qc[2];
        X.edges.push_back({std::min(prev, jB), std::max(prev, jB),
                           std::max(std::sqrt(dx * dx + dy * dy + dz * dz), 1e-12)});
    }

    X.finalize();
    return X;
}

std::vector<double> distances_from(const MetricMeasureSpace& X, int src) {
    const int V = X.vertexCount();
    if (src < 0 || src >= V) throw InvalidInput("distance source out of range");
    std::vector<double> dist(V, std::numeric_limits<double>::infinity());

    if (X.metricMode == MetricMode::AmbientEuclidean) {
        for (int v = 0; v < V; ++v) dist[v] = X.euclid(src, v);
        return dist;
    }

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        for (int k = X.adjOffset[v]; k < X.adjOffset[v + 1]; ++k) {
            const int w = X.adjVert[k];
            const double nd = d + X.edges[X.adjEdge[k]].len;
            if (nd < dist[w]) {
                dist[w] = nd;
                pq.push({nd, w});
            }
        }
    }
    return dist;
}

BallIndex ball(const MetricMeasureSpace& X, const std::vector<double>& dist,
               int center, double r) {
    if (r < 0.0) throw InvalidInput("ball radius must be nonnegative");
    BallIndex b;
    b.center = center;
    b.radius = r;
    KahanSum mass;
    for (int v = 0; v < X.vertexCount(); ++v)
        if (dist[v] < r) {
            b.members.push_back(v);
            mass.add(X.measure[v]);
        }
    b.mass = mass.value();
    return b;
}

BallIndex ball(const MetricMeasureSpace& X, int center, double r) {
    return ball(X, distances_from(X, center), center, r);
}

std::vector<int> closed_ball_core(const MetricMeasureSpace& X,
                                  const std::vector<double>& dist, double r) {
    std::vector<int> out;
    const double cut = r + X.h / 2.0;
    for (int v = 0; v < X.vertexCount(); ++v)
        if (dist[v] <= cut) out.push_back(v);
    return out;
}

double estimate_doubling(const MetricMeasureSpace& X, int center,
                         const std::vector<double>& radii) {
    if (radii.empty()) throw InvalidInput("doubling sweep needs radii");
    const auto dist = distances_from(X, center);
    double worst = 0.0;
    for (double r : radii) {
        const BallIndex inner = ball(X, dist, center, r);
        const BallIndex outer = ball(X, dist, center, 2.0 * r);
        if (inner.members.empty() || outer.members.empty())
            throw EmptyBall("empty ball in doubling sweep");
        worst = std::max(worst, outer.mass / inner.mass);
    }
    return worst;
}

DimensionEstimate estimate_pointwise_dimension(const MetricMeasureSpace& X,
                                               int center,
                                               const std::vector<double>& radii) {
    if (radii.size() < 4)
        throw InvalidInput("pointwise dimension fit needs at least 4 radii");
    const auto dist = distances_from(X, center);
    std::vector<double> lr, lm;
    for (double r : radii) {
        const BallIndex b = ball(X, dist, center, r);
        if (b.members.empty()) throw EmptyBall("empty ball in dimension fit");
        lr.push_back(std::log(r));
        lm.push_back(std::log(b.mass));
    }
    const LinearFit fit = linear_fit(lr, lm);

    DimensionEstimate est;
    est.center = center;
    est.radii = radii;
    est.logMassSlope = fit.slope;
    est.fitResidual = fit.maxAbsResidual;
    est.globalQ = std::log2(estimate_doubling(X, center, radii));
    return est;
}

int nearest_vertex(const MetricMeasureSpace& X, const std::array<double, 3>& point) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int v = 0; v < X.vertexCount(); ++v) {
        const auto& c = X.coords[v];
        const double dx = c[0] - point[0], dy = c[1] - point[1], dz = c[2] - point[2];
        const double d = dx * dx + dy * dy + dz * dz;
        if (d < bd) { bd = d; best = v; }
    }
    return best;
}

std::vector<double> dyadic_radii(double R, int kmin, int kmax) {
    std::vector<double> out;
    for (int k = kmin; k <= kmax; ++k) out.push_back(R * std::pow(0.5, k));
    return out;
}

}  // namespace greenlab
