#pragma once

#include <cstdint>
#include <cstdio>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace greenlab {

// Neumaier-compensated accumulator. Deterministic and order-stable; used for
// every energy/mass reduction so reruns are byte-identical.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Fixed 12-significant-digit float formatting for all CSV/report output.
inline std::string fmt_g12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rSquared = 0.0;
    double maxAbsResidual = 0.0;
};

// Ordinary least squares y = slope*x + intercept with R^2.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit f;
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return f;
    KahanSum sx, sy;
    for (std::size_t i = 0; i < n; ++i) { sx.add(x[i]); sy.add(y[i]); }
    const double mx = sx.value() / double(n);
    const double my = sy.value() / double(n);
    KahanSum sxx, sxy, syy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    const double vxx = sxx.value(), vxy = sxy.value(), vyy = syy.value();
    if (vxx <= 0.0) return f;
    f.slope = vxy / vxx;
    f.intercept = my - f.slope * mx;
    if (vyy > 0.0) f.rSquared = (vxy * vxy) / (vxx * vyy);
    else f.rSquared = 1.0;  // constant data, perfectly fit by slope 0
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::abs(y[i] - (f.slope * x[i] + f.intercept));
        if (r > f.maxAbsResidual) f.maxAbsResidual = r;
    }
    return f;
}

}  // namespace greenlab
