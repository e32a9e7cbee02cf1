#include "gpseg/util.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpseg {

double smoothstep(double e0, double e1, double x) {
    const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double smoothstep_d1(double e0, double e1, double x) {
    const double t = (x - e0) / (e1 - e0);
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30.0 * t * t * (t - 1.0) * (t - 1.0) / (e1 - e0);
}

double smoothstep_d2(double e0, double e1, double x) {
    const double t = (x - e0) / (e1 - e0);
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 60.0 * t * (t - 1.0) * (2.0 * t - 1.0) / ((e1 - e0) * (e1 - e0));
}

std::pair<double, double> linear_fit(const std::vector<double>& x,
                                     const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need >= 2 matching points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double b = (n * sxy - sx * sy) / denom;
    const double a = (sy - b * sx) / n;
    return {a, b};
}

double linear_fit_residual(const std::vector<double>& x,
                           const std::vector<double>& y, double a, double b) {
    double m = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
        m = std::max(m, std::abs(y[i] - a - b * x[i]));
    return m;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i) {
        if (std::abs(y[i]) > 0.0 && x[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(std::abs(y[i])));
        }
    }
    if (lx.size() < 2) throw std::invalid_argument("loglog_slope: not enough usable points");
    return linear_fit(lx, ly).second;
}

double trapezoid(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

}  // namespace gpseg
