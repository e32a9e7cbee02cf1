#include "gpseg/nonlinearity.hpp"

#include <cmath>
#include <stdexcept>

namespace gpseg {

Nonlinearity Nonlinearity::cubic(double a, double b) {
    return Nonlinearity(Kind::cubic, a, b);
}

Nonlinearity Nonlinearity::power(double lambda, double p) {
    if (p < 0.5) throw std::invalid_argument("Nonlinearity::power: p must be >= 0.5");
    return Nonlinearity(Kind::power, lambda, p);
}

double Nonlinearity::f(double u) const {
    if (kind_ == Kind::cubic) return p1_ * u * u * u + p2_ * u;
    return p1_ * u - u * std::pow(std::abs(u), 2.0 * p2_);
}

long double Nonlinearity::f_hp(long double u) const {
    if (kind_ == Kind::cubic)
        return static_cast<long double>(p1_) * u * u * u + static_cast<long double>(p2_) * u;
    return static_cast<long double>(p1_) * u -
           u * std::pow(std::abs(u), static_cast<long double>(2.0 * p2_));
}

double Nonlinearity::df(double u) const {
    if (kind_ == Kind::cubic) return 3.0 * p1_ * u * u + p2_;
    return p1_ - (2.0 * p2_ + 1.0) * std::pow(std::abs(u), 2.0 * p2_);
}

double Nonlinearity::d2f(double u) const {
    if (kind_ == Kind::cubic) return 6.0 * p1_ * u;
    const double q = 2.0 * p2_;
    if (u == 0.0) return 0.0;
    return -(q + 1.0) * q * std::pow(std::abs(u), q - 1.0) * (u > 0 ? 1.0 : -1.0);
}

double Nonlinearity::d3f(double u) const {
    if (kind_ == Kind::cubic) return 6.0 * p1_;
    const double q = 2.0 * p2_;
    if (u == 0.0) return (q == 2.0) ? -(q + 1.0) * q * (q - 1.0) : 0.0;
    return -(q + 1.0) * q * (q - 1.0) * std::pow(std::abs(u), q - 2.0);
}

bool Nonlinearity::is_odd() const {
    // a u^3 + b u and lam u - u|u|^(2p) are both odd
    return true;
}

std::string Nonlinearity::describe() const {
    if (kind_ == Kind::cubic)
        return "cubic(a=" + std::to_string(p1_) + ", b=" + std::to_string(p2_) + ")";
    return "power(lambda=" + std::to_string(p1_) + ", p=" + std::to_string(p2_) + ")";
}

double Nonlinearity::derivative_probe(double lo, double hi) const {
    const double eps = 1e-6;
    double worst = 0.0;
    for (int k = 0; k <= 16; ++k) {
        const double u = lo + (hi - lo) * k / 16.0;
        const double fd = (f(u + eps) - f(u - eps)) / (2.0 * eps);
        const double ref = std::max(1.0, std::abs(df(u)));
        worst = std::max(worst, std::abs(fd - df(u)) / ref);
    }
    return worst;
}

}  // namespace gpseg
