#include "gpseg/newton.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gpseg/util.hpp"

namespace gpseg {

double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

namespace {

void fd_probe(const NewtonProblem& p, const std::vector<double>& x,
              const BandMatrix& jac, const NewtonOptions& opt,
              const NewtonReport& rep) {
    const int n = static_cast<int>(x.size());
    const double scale = std::max(1.0, sup_norm(x));
    const double eps = 1e-6 * scale;
    Rng rng(opt.fd_seed);
    for (int probe = 0; probe < 3; ++probe) {
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = rng.uniform(-1.0, 1.0);
        std::vector<double> xp = x, xm = x;
        for (int i = 0; i < n; ++i) {
            xp[i] += eps * d[i];
            xm[i] -= eps * d[i];
        }
        const auto rp = p.residual(xp);
        const auto rm = p.residual(xm);
        const auto jd = jac.multiply(d);
        double err = 0.0, ref = 0.0;
        for (int i = 0; i < n; ++i) {
            const double fd = (rp[i] - rm[i]) / (2.0 * eps);
            err = std::max(err, std::abs(fd - jd[i]));
            ref = std::max(ref, std::abs(jd[i]));
        }
        if (err > opt.fd_check_tol * std::max(ref, 1e-8))
            throw NewtonError("newton_solve: jacobian inconsistent with residual "
                              "(finite-difference probe mismatch " +
                                  std::to_string(err / std::max(ref, 1e-8)) + ")",
                              rep);
    }
}

}  // namespace

namespace {

template <class T>
std::pair<std::vector<T>, NewtonReport>
newton_loop(const NewtonProblem& problem,
            const std::function<std::vector<T>(const std::vector<T>&)>& residual,
            std::vector<T> x, const NewtonOptions& opt) {
    const size_t n = x.size();
    NewtonReport rep;
    auto supn = [](const std::vector<T>& v) {
        T m = 0;
        for (T t : v) m = std::max<T>(m, t < 0 ? -t : t);
        return static_cast<double>(m);
    };
    auto downcast = [n](const std::vector<T>& v) {
        std::vector<double> d(n);
        for (size_t i = 0; i < n; ++i) d[i] = static_cast<double>(v[i]);
        return d;
    };

    std::vector<T> res = residual(x);
    double rnorm = supn(res);
    rep.residual_history.push_back(rnorm);

    for (int it = 0; it < opt.max_iter; ++it) {
        if (rnorm <= opt.tol) {
            rep.converged = true;
            rep.final_residual = rnorm;
            return {std::move(x), rep};
        }
        const std::vector<double> xd = downcast(x);
        BandMatrix jac = problem.jacobian(xd);
        if (opt.fd_check && it == 0) fd_probe(problem, xd, jac, opt, rep);

        std::vector<double> rhs(n);
        for (size_t i = 0; i < n; ++i) rhs[i] = -static_cast<double>(res[i]);
        std::vector<double> dx;
        try {
            BandLU lu(jac);
            dx = lu.solve(rhs);
        } catch (const std::runtime_error& e) {
            rep.final_residual = rnorm;
            throw NewtonError(std::string("newton_solve: ") + e.what(), rep);
        }

        double lambda = 1.0;
        std::vector<T> xn(n);
        std::vector<T> rn;
        double rn_norm = 0.0;
        int bt = 0;
        for (;; ++bt) {
            for (size_t i = 0; i < n; ++i) xn[i] = x[i] + static_cast<T>(lambda * dx[i]);
            rn = residual(xn);
            rn_norm = supn(rn);
            if (std::isfinite(rn_norm) && rn_norm < rnorm) break;
            if (bt >= opt.max_backtracks) break;
            lambda *= 0.5;
        }
        rep.total_backtracks += bt;
        if (!(std::isfinite(rn_norm) && rn_norm < rnorm)) {
            rep.final_residual = rnorm;
            // a stall between tol and stall_tol means the evaluation floor
            // was reached; the measured residual is quantization noise there,
            // so a couple of undamped polish steps still contract the true
            // error even though the residual cannot show it
            if (rnorm <= opt.stall_tol) {
                for (int polish = 0; polish < 2; ++polish) {
                    const std::vector<double> xp = downcast(x);
                    std::vector<double> prhs(n);
                    for (size_t i = 0; i < n; ++i) prhs[i] = -static_cast<double>(res[i]);
                    try {
                        BandLU plu(problem.jacobian(xp));
                        auto pdx = plu.solve(prhs);
                        for (size_t i = 0; i < n; ++i) x[i] += static_cast<T>(pdx[i]);
                    } catch (const std::runtime_error&) {
                        break;
                    }
                    res = residual(x);
                }
                rep.converged = true;
                rep.accepted_at_floor = true;
                rep.final_residual = supn(res);
                return {std::move(x), rep};
            }
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3e (tol %.3e)", rnorm, opt.tol);
            throw NewtonError(std::string("newton_solve: line search stalled at residual ") + buf,
                              rep);
        }
        x = std::move(xn);
        res = std::move(rn);
        rnorm = rn_norm;
        rep.iterations = it + 1;
        rep.residual_history.push_back(rnorm);
    }
    rep.final_residual = rnorm;
    if (rnorm <= opt.tol) {
        rep.converged = true;
        return {std::move(x), rep};
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", rnorm);
    throw NewtonError("newton_solve: no convergence after " +
                          std::to_string(opt.max_iter) + " iterations (residual " +
                          std::string(buf) + ")",
                      rep);
}

std::vector<double> downcast_vec(const std::vector<long double>& v) {
    return std::vector<double>(v.begin(), v.end());
}

}  // namespace

std::pair<std::vector<double>, NewtonReport>
newton_solve(const NewtonProblem& problem, std::vector<double> x0,
             const NewtonOptions& opt) {
    if (problem.residual_hp) {
        auto [x, rep] = newton_solve_hp(problem, std::move(x0), opt);
        return {downcast_vec(x), rep};
    }
    auto [x, rep] = newton_loop<double>(problem, problem.residual, std::move(x0), opt);
    return {std::move(x), rep};
}

std::pair<std::vector<long double>, NewtonReport>
newton_solve_hp(const NewtonProblem& problem, std::vector<double> x0,
                const NewtonOptions& opt) {
    if (!problem.residual_hp)
        throw std::invalid_argument("newton_solve_hp: residual_hp not provided");
    std::vector<long double> x(x0.begin(), x0.end());
    return newton_loop<long double>(problem, problem.residual_hp, std::move(x), opt);
}

}  // namespace gpseg
