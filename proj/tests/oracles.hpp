#pragma once

// Test-only oracles, kept independent of the library's solver paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi (in place).
inline void jacobi_eigenvalues(std::vector<double>& s, int n) {
    for (int sweep = 0; sweep < 80; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) off += s[p * n + q] * s[p * n + q];
        if (off < 1e-30 * n * n) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = s[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (s[q * n + q] - s[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double skp = s[k * n + p], skq = s[k * n + q];
                    s[k * n + p] = c * skp - sn * skq;
                    s[k * n + q] = sn * skp + c * skq;
                }
                for (int k = 0; k < n; ++k) {
                    const double spk = s[p * n + k], sqk = s[q * n + k];
                    s[p * n + k] = c * spk - sn * sqk;
                    s[q * n + k] = sn * spk + c * sqk;
                }
            }
        }
    }
}

/// Smallest singular value of a dense row-major matrix via the symmetric
/// augmented form [[0, A^T], [A, 0]], whose eigenvalues are +-sigma_i.
/// Unlike Jacobi on A^T A this keeps the conditioning linear in kappa(A).
inline double dense_sigma_min(const std::vector<double>& a, int n) {
    const int m = 2 * n;
    std::vector<double> s(m * m, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            s[i * m + (n + j)] = a[j * n + i];  // A^T block
            s[(n + i) * m + j] = a[i * n + j];  // A block
        }
    jacobi_eigenvalues(s, m);
    double smin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) smin = std::min(smin, std::abs(s[i * m + i]));
    return smin;
}

/// Dense trajectory of a radial shooting run.
struct ShootTrajectory {
    std::vector<double> r, w;
    double first_zero = std::numeric_limits<double>::infinity();
    double second_zero = std::numeric_limits<double>::infinity();
    int sign_changes = 0;

    double eval(double x) const {
        auto it = std::upper_bound(r.begin(), r.end(), x);
        int i = static_cast<int>(it - r.begin()) - 1;
        i = std::clamp(i, 0, static_cast<int>(r.size()) - 2);
        const double t = (x - r[i]) / (r[i + 1] - r[i]);
        return (1 - t) * w[i] + t * w[i + 1];
    }
};

/// RK4 shooting for w'' + (N-1)/r w' = rhs(w), w(0) = -amp, w'(0) = 0,
/// with root bracketing on the amplitude so the second zero lands at r = 1.
class RadialShoot {
public:
    RadialShoot(std::function<double(double)> rhs, int dim, int steps)
        : rhs_(std::move(rhs)), dim_(dim), steps_(steps) {}

    ShootTrajectory run(double amp) const {
        ShootTrajectory tr;
        const double r_end = 1.4;
        const double dr = r_end / steps_;
        double r = 1e-8;
        double w = -amp + rhs_(-amp) * r * r / (2.0 * dim_);
        double wp = rhs_(-amp) * r / dim_;
        tr.r.push_back(r);
        tr.w.push_back(w);
        auto f = [&](double rr, double ww, double pp, double& dw, double& dp) {
            dw = pp;
            dp = rhs_(ww) - (dim_ - 1) / rr * pp;
        };
        while (r < r_end && tr.sign_changes < 2 && std::abs(w) < 1e8) {
            double k1w, k1p, k2w, k2p, k3w, k3p, k4w, k4p;
            f(r, w, wp, k1w, k1p);
            f(r + dr / 2, w + dr / 2 * k1w, wp + dr / 2 * k1p, k2w, k2p);
            f(r + dr / 2, w + dr / 2 * k2w, wp + dr / 2 * k2p, k3w, k3p);
            f(r + dr, w + dr * k3w, wp + dr * k3p, k4w, k4p);
            const double wn = w + dr / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
            const double pn = wp + dr / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
            if (w != 0 && wn != 0 && (w > 0) != (wn > 0)) {
                ++tr.sign_changes;
                const double z = r - w * dr / (wn - w);
                if (tr.sign_changes == 1) tr.first_zero = z;
                if (tr.sign_changes == 2) tr.second_zero = z;
            }
            r += dr;
            w = wn;
            wp = pn;
            tr.r.push_back(r);
            tr.w.push_back(w);
        }
        return tr;
    }

    double bisect_nodal_amplitude(double lo, double hi, double tol) const {
        auto rho = [&](double amp) { return run(amp).second_zero; };
        double alo = -1, ahi = -1, prev_a = 0, prev_r = 0;
        for (int k = 0; k <= 200; ++k) {
            const double amp = lo * std::pow(hi / lo, k / 200.0);
            const double rr = rho(amp);
            if (k > 0 && std::isfinite(rr) && std::isfinite(prev_r) &&
                (prev_r - 1.0) * (rr - 1.0) <= 0.0) {
                alo = prev_a;
                ahi = amp;
                break;
            }
            prev_a = amp;
            prev_r = rr;
        }
        if (alo < 0) throw std::runtime_error("oracle: no bracket");
        const double side = rho(alo) - 1.0;
        while (ahi - alo > tol * alo) {
            const double mid = 0.5 * (alo + ahi);
            if ((rho(mid) - 1.0) * side > 0)
                alo = mid;
            else
                ahi = mid;
        }
        return 0.5 * (alo + ahi);
    }

private:
    std::function<double(double)> rhs_;
    int dim_;
    int steps_;
};

}  // namespace oracle
