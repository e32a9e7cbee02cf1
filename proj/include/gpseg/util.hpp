#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace gpseg {

/// Counter-based generator: draw k is splitmix64(seed + k). Stateless per
/// draw, so runs are reproducible from the single config seed regardless of
/// evaluation order (see docs/report-schema.md).
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed) {}

    uint64_t next_u64() {
        uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * (++counter_);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    uint64_t seed_;
    uint64_t counter_ = 0;
};

/// Quintic smoothstep: 0 for x <= e0, 1 for x >= e1, C^2 in between.
double smoothstep(double e0, double e1, double x);
double smoothstep_d1(double e0, double e1, double x);
double smoothstep_d2(double e0, double e1, double x);

/// Least-squares fit y = a + b x. Returns {a, b}.
std::pair<double, double> linear_fit(const std::vector<double>& x,
                                     const std::vector<double>& y);

/// Max absolute deviation of the fit.
double linear_fit_residual(const std::vector<double>& x,
                           const std::vector<double>& y, double a, double b);

/// Slope of log|y| vs log x, skipping non-positive |y|.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Trapezoid rule on a uniform grid with spacing h.
double trapezoid(const std::vector<double>& f, double h);

}  // namespace gpseg
