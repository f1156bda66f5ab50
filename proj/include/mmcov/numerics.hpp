#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmcov {

// Thrown when an iterative numerical method gives up; carries its best guess.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double best_estimate, double error_estimate)
        : std::runtime_error(what), best_(best_estimate), err_(error_estimate) {}
    double best_estimate() const { return best_; }
    double error_estimate() const { return err_; }

private:
    double best_;
    double err_;
};

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
    int gcq_order = 64;

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod (7/15) on [a, b]; the interval is pre-split at every
// breakpoint that falls strictly inside. Throws NumericalError on failure.
QuadResult integrate(const Integrand& f, double a, double b, const std::vector<double>& breakpoints,
                     const QuadratureSpec& spec = {});

// Integral over [0, inf) via t = s / (1 - s); breakpoints are given in t.
QuadResult integrate_semi_infinite(const Integrand& f, const std::vector<double>& breakpoints,
                                   const QuadratureSpec& spec = {});

// Integral over the whole real line via v = c + w s / (1 - s^2) on (-1, 1).
QuadResult integrate_real_line(const Integrand& f, double center, double scale,
                               const std::vector<double>& breakpoints, const QuadratureSpec& spec = {});

// Gauss-Hermite rule for E[f(Z)], Z ~ N(0,1): nodes z_i, weights w_i summing to one.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussHermiteRule& gauss_hermite(int order);

// First-kind Gauss-Chebyshev estimate of int_0^inf pcov(t) / (1 + t) dt.
// The half line is mapped to (-1, 1) by t = exp(c + w y / sqrt(1 - y^2)),
// which turns the Chebyshev weight into a smooth, doubly-decaying integrand.
double gcq_rate(const Integrand& pcov, const QuadratureSpec& spec, double log_center = 0.0,
                double log_scale = 4.0);

struct LeastSquaresProblem {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;
    // Optional; forward differences are used when empty.
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::MatrixXd eq_matrix;  // rows x n, may be empty
    Eigen::VectorXd eq_rhs;
    Eigen::VectorXd x0;

    void validate() const;
};

struct LsqOptions {
    int max_iterations = 400;
    double ftol = 1e-13;
    double xtol = 1e-12;
    double gtol = 1e-12;
    double fd_step = 1e-7;
    double feas_tol = 1e-9;
};

struct LsqResult {
    Eigen::VectorXd x;
    double norm = 0.0;          // ||r(x)||
    double initial_norm = 0.0;  // ||r(x0)|| after projection onto the feasible set
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    bool stagnated = false;
    std::string message;
};

// Projects x onto {lower <= x <= upper, A x = b}; throws std::invalid_argument
// when the set is empty.
Eigen::VectorXd project_feasible(const LeastSquaresProblem& p, const Eigen::VectorXd& x, double tol = 1e-11);

// Levenberg-Marquardt with an active-set QP subproblem handling the box and
// linear equality constraints. The returned point is always feasible.
LsqResult solve_constrained_lsq(const LeastSquaresProblem& problem, const LsqOptions& opts = {});

}  // namespace mmcov
