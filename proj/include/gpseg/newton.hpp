#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpseg/band.hpp"

namespace gpseg {

struct NewtonReport {
    int iterations = 0;
    std::vector<double> residual_history;  // length iterations + 1
    bool converged = false;
    double final_residual = 0.0;
    int total_backtracks = 0;
    bool accepted_at_floor = false;  // stalled between tol and stall_tol
};

struct NewtonOptions {
    double tol = 1e-10;         // sup-norm residual target (absolute)
    double stall_tol = 0.0;     // if > tol, a line-search stall below this
                                // counts as converged (rounding floor reached)
    int max_iter = 30;
    int max_backtracks = 20;    // halving line search
    bool fd_check = false;      // probe jacobian against finite differences
    double fd_check_tol = 1e-4; // relative mismatch allowed by the probe
    unsigned long long fd_seed = 0x9e3779b97f4a7c15ull;
};

struct NewtonProblem {
    std::function<std::vector<double>(const std::vector<double>&)> residual;
    std::function<BandMatrix(const std::vector<double>&)> jacobian;

    /// Optional high-precision residual. When present the iterate is kept in
    /// long double and residuals are evaluated through this function, which
    /// lowers the attainable floor from eps_d |u| / h^2 to the long double
    /// one; the Jacobian is still assembled and factored in double.
    std::function<std::vector<long double>(const std::vector<long double>&)> residual_hp;
};

class NewtonError : public std::runtime_error {
public:
    NewtonError(const std::string& what, NewtonReport rep)
        : std::runtime_error(what), report(std::move(rep)) {}
    NewtonReport report;
};

/// Damped Newton on the sup norm: full step first, then halving backtracks
/// until the residual decreases. Throws NewtonError (with the report) on
/// non-convergence, singular Jacobian, or a failed consistency probe.
std::pair<std::vector<double>, NewtonReport>
newton_solve(const NewtonProblem& problem, std::vector<double> x0,
             const NewtonOptions& opt = {});

/// Same solve, returning the extended-precision iterate (requires
/// problem.residual_hp).
std::pair<std::vector<long double>, NewtonReport>
newton_solve_hp(const NewtonProblem& problem, std::vector<double> x0,
                const NewtonOptions& opt = {});

double sup_norm(const std::vector<double>& v);

}  // namespace gpseg
