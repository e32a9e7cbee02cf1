#include "gpseg/matching.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gpseg/dense.hpp"

namespace gpseg {

namespace {

constexpr double kCondGate = 1e10;

void check_cond(double cond, const char* which) {
    if (!(cond < kCondGate))
        throw std::runtime_error(std::string("matching: ") + which +
                                 " system condition number above 1e10");
}

std::array<double, 4> solve4(const std::vector<double>& m, const std::vector<double>& c,
                             double& cond) {
    cond = dense_cond_inf(m, 4);
    auto x = dense_solve(m, c);
    return {x[0], x[1], x[2], x[3]};
}

}  // namespace

MatchingParameters combine(const Order1& o1, const Order2& o2, const Order3& o3) {
    MatchingParameters p;
    p.xi = o1.xi;
    p.mu1 = o1.mu1;
    p.delta1 = o1.delta1;
    p.delta_tilde1 = o1.delta_tilde1;
    p.delta2 = o2.delta2;
    p.delta_tilde2 = o2.delta_tilde2;
    p.A0 = o2.A0;
    p.B0 = o2.B0;
    p.delta3 = o3.delta3;
    p.delta_tilde3 = o3.delta_tilde3;
    p.A1 = o3.A1;
    p.B1 = o3.B1;
    return p;
}

// Row assembly is table-driven: unknown-bearing terms move to the left with
// their original coefficients, everything else stays on the right.

Order1 solve_order1(const MatchingInputs& in) {
    if (std::abs(in.u1p - in.v1p) < 1e-10)
        throw std::runtime_error("matching: u1'(r0) = v1'(r0), degenerate first system");
    const double g4 = std::pow(in.g, -0.25);
    const double n1r = (in.dim - 1) / in.r0;
    // unknowns x = (delta1, delta_tilde1, mu1, xi)
    std::vector<double> m = {
        1, 0, 0,                 in.psi0,
        in.u1p, 0, -2 * in.psi0, -n1r * in.psi0,
        0, 1, 0,                 -in.psi0,
        0, in.v1p, 2 * in.psi0,  n1r * in.psi0,
    };
    std::vector<double> c = {g4 * in.k, in.b0 * g4, g4 * in.k, in.b0 * g4};
    Order1 o;
    auto x = solve4(m, c, o.cond);
    check_cond(o.cond, "order-1");
    o.delta1 = x[0];
    o.delta_tilde1 = x[1];
    o.mu1 = x[2];
    o.xi = x[3];
    return o;
}

Order1 order1_closed_form(const MatchingInputs& in) {
    const double g4 = std::pow(in.g, -0.25);
    const double n1r = (in.dim - 1) / in.r0;
    const double gap = in.u1p - in.v1p;
    const double sum = in.u1p + in.v1p;
    Order1 o;
    o.xi = sum / gap * in.k * g4 / in.psi0 - 2.0 * in.b0 * g4 / (in.psi0 * gap);
    o.mu1 = -(n1r / 2.0) * sum / gap * in.k * g4 / in.psi0 -
            in.u1p * in.v1p / gap * in.k * g4 / in.psi0 +
            n1r / in.psi0 / gap * g4 * in.b0 + sum / (2.0 * gap) / in.psi0 * g4 * in.b0;
    o.delta1 = -2.0 * g4 * in.k * in.v1p / gap + 2.0 * g4 * in.b0 / gap;
    o.delta_tilde1 = 2.0 * g4 * in.k * in.u1p / gap - 2.0 * g4 * in.b0 / gap;
    return o;
}

Order2 solve_order2(const MatchingInputs& in, const Order1& o1) {
    const double g4 = std::pow(in.g, -0.25);
    const double g2 = std::pow(in.g, -0.5);
    const double gp4 = std::pow(in.g, 0.25);
    const double n1r = (in.dim - 1) / in.r0;
    const double n1r2 = (in.dim - 1) / (in.r0 * in.r0);
    const double curv = n1r2 + n1r * n1r;
    const double psi = in.psi0, xi = o1.xi, mu1 = o1.mu1;

    const double bcol = 2 * g4 * psi * (1.0 + mu1) + 2 * n1r * psi * xi * g4;
    // unknowns x = (delta2, delta_tilde2, A0, B0)
    std::vector<double> m = {
        1, 0, -g2 * psi, 2 * psi * g4 * xi - g2 * in.k,
        in.u1p, 0, 0, -bcol,
        0, 1, g2 * psi, -(g2 * in.k + 2 * psi * g4 * xi),
        0, in.v1p, 0, bcol,
    };
    std::vector<double> c = {
        mu1 * g4 * in.k - 2 * psi * mu1 * xi - 0.5 * n1r * psi * xi * xi - in.b0 * g4 * xi,
        psi * mu1 * mu1 + 2 * mu1 * n1r * psi * xi + in.b0 * mu1 * g4 - n1r2 * xi * xi * psi +
            curv * psi * xi * xi / 2 + n1r * xi * g4 * in.b0 +
            g4 * in.f_prime0 * (-in.k * xi + gp4 * psi * xi * xi / 2) + g2 * in.b1 -
            o1.delta1 * o1.delta1 * in.u2p,
        mu1 * g4 * in.k + 2 * psi * mu1 * xi + 0.5 * n1r * psi * xi * xi - in.b0 * g4 * xi,
        -psi * mu1 * mu1 - 2 * mu1 * n1r * psi * xi + in.b0 * mu1 * g4 + n1r2 * xi * xi * psi -
            curv * psi * xi * xi / 2 + n1r * xi * g4 * in.b0 +
            g4 * in.f_prime0 * (-in.k * xi - gp4 * psi * xi * xi / 2) + g2 * in.b1 -
            o1.delta_tilde1 * o1.delta_tilde1 * in.v2p,
    };
    Order2 o;
    o.det = dense_det(m, 4);
    o.det_closed_form = order2_determinant_closed_form(in);
    auto x = solve4(m, c, o.cond);
    check_cond(o.cond, "order-2");
    if (std::abs(o.det) < 1e-12)
        throw std::runtime_error("matching: order-2 determinant below 1e-12");
    o.delta2 = x[0];
    o.delta_tilde2 = x[1];
    o.A0 = x[2];
    o.B0 = x[3];
    return o;
}

double order2_determinant_closed_form(const MatchingInputs& in) {
    const double g4 = std::pow(in.g, -0.25);
    const double g2 = std::pow(in.g, -0.5);
    const double n1r = (in.dim - 1) / in.r0;
    return 2 * in.psi0 * (in.u1p - in.v1p) * g4 +
           2 *
               (0.5 * n1r * (in.u1p + in.v1p) * in.k +
                (0.5 * (in.u1p + in.v1p) - n1r) * in.b0) *
               g2;
}

Order3 solve_order3(const MatchingInputs& in, const Order1& o1, const Order2& o2) {
    const double g4 = std::pow(in.g, -0.25);
    const double g2 = std::pow(in.g, -0.5);
    const double g34 = std::pow(in.g, -0.75);
    const double gp4 = std::pow(in.g, 0.25);
    const double n1r = (in.dim - 1) / in.r0;
    const double n1r2 = (in.dim - 1) / (in.r0 * in.r0);
    const double curv = n1r2 + n1r * n1r;
    const double psi = in.psi0, xi = o1.xi, mu1 = o1.mu1, B0 = o2.B0;
    const double bp = in.b0 + 2 * B0 * psi;
    const double bm = in.b0 - 2 * B0 * psi;

    // unknowns x = (delta3, delta_tilde3, A1, B1)
    std::vector<double> m = {
        1, 0, -g34 * psi, -(g34 * in.k - 2 * g2 * psi * xi),
        in.u1p, 0, 0, -2 * g2 * psi * (1.0 + mu1),
        0, 1, g34 * psi, -(g34 * in.k + 2 * g2 * psi * xi),
        0, in.v1p, 0, 2 * g2 * psi * (1.0 + mu1),
    };
    std::vector<double> c = {
        -n1r * psi * mu1 * xi * xi + 0.5 * n1r2 * xi * xi * xi * psi -
            curv * psi * xi * xi * xi / 6 - 0.5 * n1r * xi * xi * g4 * bp +
            g4 * in.f_prime0 * (in.k * xi * xi / 2 - gp4 * psi * xi * xi * xi / 6) -
            g2 * in.b1 * xi + g34 * in.a1 - g4 * mu1 * xi * bp - psi * mu1 * mu1 * xi,
        n1r * psi * mu1 * mu1 * xi - 2 * n1r2 * xi * xi * psi * mu1 + curv * mu1 * psi * xi * xi +
            n1r * mu1 * xi * g4 * bp +
            mu1 * g4 * in.f_prime0 * (-in.k * xi + gp4 * psi * xi * xi) + g2 * mu1 * in.b1 -
            2 * o1.delta1 * o2.delta2 * in.u2p -
            o1.delta1 * o1.delta1 * o1.delta1 * in.u3p,
        n1r * psi * mu1 * xi * xi - 0.5 * n1r2 * xi * xi * xi * psi +
            curv * psi * xi * xi * xi / 6 - 0.5 * n1r * xi * xi * g4 * bm +
            g4 * in.f_prime0 * (in.k * xi * xi / 2 + gp4 * psi * xi * xi * xi / 6) -
            g2 * in.b1 * xi + g34 * in.a1 - g4 * mu1 * xi * bm + psi * mu1 * mu1 * xi,
        -n1r * psi * mu1 * mu1 * xi + 2 * n1r2 * xi * xi * psi * mu1 - curv * mu1 * psi * xi * xi +
            n1r * mu1 * xi * g4 * bm +
            mu1 * g4 * in.f_prime0 * (-in.k * xi - gp4 * psi * xi * xi) + g2 * mu1 * in.b1 -
            2 * o1.delta_tilde1 * o2.delta_tilde2 * in.v2p -
            o1.delta_tilde1 * o1.delta_tilde1 * o1.delta_tilde1 * in.v3p,
    };
    Order3 o;
    auto x = solve4(m, c, o.cond);
    check_cond(o.cond, "order-3");
    o.delta3 = x[0];
    o.delta_tilde3 = x[1];
    o.A1 = x[2];
    o.B1 = x[3];
    return o;
}

InnerExpansionCoeffs inner_expansion_coeffs(const MatchingInputs& in,
                                            const MatchingParameters& par) {
    const double g4 = std::pow(in.g, -0.25);
    const double g2 = std::pow(in.g, -0.5);
    const double g34 = std::pow(in.g, -0.75);
    const double n1r = (in.dim - 1) / in.r0;
    const double n1r2 = (in.dim - 1) / (in.r0 * in.r0);
    const double mu = par.mu(), xi = par.xi, psi = in.psi0;

    // t-polynomial content (t^0..t^3) of varphi0 + varphi1 on each side;
    // gauge terms enter with the kernel asymptotics
    const double c_t = (n1r2 + n1r * n1r) / mu * psi * g34;
    const double c_c = n1r / mu * g34 * in.b0;
    const double c_d = n1r / mu * g34 * 2.0 * par.B0 * psi;
    const double c_u = -in.f_prime0 / mu * g34;
    const double c_v = -in.h_prime0 / mu * g34;
    const double zc = -0.5 * n1r * psi;  // Z = zc t^2 on the + side
    const double c_a = -xi * g2 / in.r0;

    std::array<double, 4> pu{}, pv{};
    // u component, + side
    pu[3] = c_t / 6.0 - c_u * psi / 6.0;
    pu[2] = g2 * zc + c_a * zc - 0.5 * (c_c + c_d) - 0.5 * c_u * in.k;
    pu[1] = g2 * (in.b0 + 2 * par.B0 * psi) + g34 * (in.b1 + 2 * par.B1 * psi);
    pu[0] = g2 * (par.A0 * psi + par.B0 * in.k) + g34 * (in.a1 + par.A1 * psi + par.B1 * in.k);
    // v component, - side (mirrored peels and kernel tails)
    pv[3] = -c_t / 6.0 + c_v * psi / 6.0;
    pv[2] = g2 * (-zc) + c_a * (-zc) - 0.5 * (c_c - c_d) - 0.5 * c_v * in.k;
    pv[1] = g2 * (in.b0 - 2 * par.B0 * psi) + g34 * (in.b1 - 2 * par.B1 * psi);
    pv[0] = g2 * (-par.A0 * psi + par.B0 * in.k) + g34 * (in.a1 - par.A1 * psi + par.B1 * in.k);

    // transform t = alpha (s - xi) and add the leading profile part
    const double alpha = mu * std::pow(in.g, 0.25);
    InnerExpansionCoeffs out;
    auto expand = [&](const std::array<double, 4>& p, std::array<double, 4>& s) {
        s.fill(0.0);
        for (int mdeg = 0; mdeg <= 3; ++mdeg) {
            double binom = 1.0;
            for (int j = mdeg; j >= 0; --j) {
                // C(m, j) alpha^m (-xi)^(m-j)
                s[j] += p[mdeg] * binom * std::pow(alpha, mdeg) * std::pow(-xi, mdeg - j);
                binom = binom * j / (mdeg - j + 1.0);
            }
        }
    };
    expand(pu, out.u);
    expand(pv, out.v);
    // mu g^-1/4 U ~ mu g^-1/4 (psi t + k) = mu^2 psi (s - xi) + mu g^-1/4 k
    out.u[0] += mu * g4 * in.k - mu * mu * psi * xi;
    out.u[1] += mu * mu * psi;
    out.v[0] += mu * g4 * in.k + mu * mu * psi * xi;
    out.v[1] += -mu * mu * psi;
    return out;
}

InnerExpansionCoeffs outer_expansion_coeffs(const MatchingInputs& in,
                                            const MatchingParameters& par) {
    const double d = par.delta(), dt = par.delta_tilde();
    const double u1pp = in.f_prime0 - (in.dim - 1) / in.r0 * in.u1p;
    const double v1pp = in.h_prime0 - (in.dim - 1) / in.r0 * in.v1p;
    InnerExpansionCoeffs out;
    out.u = {d, in.psi0 + d * in.u1p + d * d * in.u2p, 0.5 * (in.u0pp + d * u1pp),
             in.u0ppp / 6.0};
    out.v = {dt, -in.psi0 + dt * in.v1p + dt * dt * in.v2p, 0.5 * (in.v0pp + dt * v1pp),
             in.v0ppp / 6.0};
    return out;
}

S2S3Report verify_s2_s3(const MatchingInputs& in, const MatchingParameters& par) {
    const auto inner = inner_expansion_coeffs(in, par);
    const auto outer = outer_expansion_coeffs(in, par);
    S2S3Report r;
    r.outer_s2_u = outer.u[2];
    r.inner_s2_u = inner.u[2];
    r.gap_s2_u = std::abs(outer.u[2] - inner.u[2]);
    r.outer_s2_v = outer.v[2];
    r.inner_s2_v = inner.v[2];
    r.gap_s2_v = std::abs(outer.v[2] - inner.v[2]);
    r.outer_s3_u = outer.u[3];
    r.inner_s3_u = inner.u[3];
    r.gap_s3_u = std::abs(outer.u[3] - inner.u[3]);
    r.outer_s3_v = outer.v[3];
    r.inner_s3_v = inner.v[3];
    r.gap_s3_v = std::abs(outer.v[3] - inner.v[3]);
    return r;
}

}  // namespace gpseg
