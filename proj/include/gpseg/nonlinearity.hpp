#pragma once

#include <string>

namespace gpseg {

/// Reaction term with derivatives up to third order. Two families:
///   cubic(a, b):   f(u) = a u^3 + b u
///   power(lam, p): f(u) = lam u - u |u|^(2p)
/// Both vanish at 0.
class Nonlinearity {
public:
    enum class Kind { cubic, power };

    static Nonlinearity cubic(double a, double b);
    static Nonlinearity power(double lambda, double p);

    double f(double u) const;
    double df(double u) const;
    double d2f(double u) const;
    double d3f(double u) const;

    /// Extended-precision evaluation for the stiff residual paths.
    long double f_hp(long double u) const;

    Kind kind() const { return kind_; }
    double param1() const { return p1_; }  // a or lambda
    double param2() const { return p2_; }  // b or p
    bool is_odd() const;
    std::string describe() const;

    /// Max relative mismatch of df against a centered difference of f at a
    /// few sample points (consistency probe).
    double derivative_probe(double lo = -2.0, double hi = 2.0) const;

private:
    Nonlinearity(Kind k, double p1, double p2) : kind_(k), p1_(p1), p2_(p2) {}
    Kind kind_;
    double p1_, p2_;
};

}  // namespace gpseg
