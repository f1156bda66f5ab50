#include "mmcov/numerics.hpp"

#include "mmcov/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>

namespace mmcov {

namespace {

// Kronrod 15-point abscissae/weights and the embedded 7-point Gauss weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        fv1[j] = f(c - dx);
        fv2[j] = f(c + dx);
        resk += kWgk[j] * (fv1[j] + fv2[j]);
        if (j % 2 == 1) resg += kWg[j / 2] * (fv1[j] + fv2[j]);
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    resasc *= std::abs(h);
    const double value = resk * h;
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (!std::isfinite(value)) throw std::domain_error("integrate: integrand returned a non-finite value");
    return {a, b, value, err};
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("quadrature: tolerances must be > 0");
    if (gcq_order < 2) throw std::invalid_argument("quadrature: gcq_order must be >= 2");
    if (max_subdivisions < 1) throw std::invalid_argument("quadrature: max_subdivisions must be >= 1");
}

QuadResult integrate(const Integrand& f, double a, double b, const std::vector<double>& breakpoints,
                     const QuadratureSpec& spec) {
    spec.validate();
    if (a == b) return {};
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::vector<double> cuts{a};
    std::vector<double> inner;
    for (double p : breakpoints)
        if (p > a && p < b) inner.push_back(p);
    std::sort(inner.begin(), inner.end());
    for (double p : inner)
        if (p > cuts.back()) cuts.push_back(p);
    cuts.push_back(b);

    std::priority_queue<Segment> heap;
    std::vector<Segment> frozen;  // too narrow to split further
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Segment s = gk15(f, cuts[i], cuts[i + 1]);
        total += s.value;
        err += s.error;
        heap.push(s);
    }
    int count = static_cast<int>(heap.size());
    while (err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (heap.empty()) break;
        if (count >= spec.max_subdivisions)
            throw NumericalError("integrate: subdivision limit reached", sign * total, err);
        Segment s = heap.top();
        heap.pop();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b) || (s.b - s.a) < 1e-14 * std::max(std::abs(s.a), std::abs(s.b))) {
            frozen.push_back(s);
            continue;
        }
        Segment l = gk15(f, s.a, mid);
        Segment r = gk15(f, mid, s.b);
        total += l.value + r.value - s.value;
        err += l.error + r.error - s.error;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    // Recompute the sums to shed accumulated cancellation in the running totals.
    double value = 0.0, error = 0.0;
    std::vector<Segment> all = frozen;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    for (const auto& s : all) {
        value += s.value;
        error += s.error;
    }
    if (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value)) * 10.0)
        throw NumericalError("integrate: roundoff prevents reaching the requested tolerance", sign * value, error);
    return {sign * value, error, static_cast<int>(all.size())};
}

QuadResult integrate_semi_infinite(const Integrand& f, const std::vector<double>& breakpoints,
                                   const QuadratureSpec& spec) {
    auto g = [&f](double s) {
        const double one = 1.0 - s;
        return f(s / one) / (one * one);
    };
    std::vector<double> mapped;
    for (double t : breakpoints)
        if (t > 0.0 && std::isfinite(t)) mapped.push_back(t / (1.0 + t));
    return integrate(g, 0.0, 1.0, mapped, spec);
}

QuadResult integrate_real_line(const Integrand& f, double center, double scale,
                               const std::vector<double>& breakpoints, const QuadratureSpec& spec) {
    if (!(scale > 0.0)) throw std::invalid_argument("integrate_real_line: scale must be > 0");
    auto g = [&](double s) {
        const double d = 1.0 - s * s;
        return f(center + scale * s / d) * scale * (1.0 + s * s) / (d * d);
    };
    std::vector<double> mapped;
    for (double v : breakpoints) {
        if (!std::isfinite(v)) continue;
        const double d = v - center;
        mapped.push_back(2.0 * d / (scale + std::sqrt(scale * scale + 4.0 * d * d)));
    }
    return integrate(g, -1.0, 1.0, mapped, spec);
}

const GaussHermiteRule& gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    static std::mutex mu;
    static std::map<int, GaussHermiteRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussHermiteRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    double sum = 0.0;
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        rule.weights[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
        sum += rule.weights[i];
    }
    for (double& w : rule.weights) w /= sum;
    return cache.emplace(order, std::move(rule)).first->second;
}

double gcq_rate(const Integrand& pcov, const QuadratureSpec& spec, double log_center, double log_scale) {
    spec.validate();
    if (!(log_scale > 0.0)) throw std::invalid_argument("gcq_rate: log_scale must be > 0");
    const int n = spec.gcq_order;
    double sum = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double theta = (2.0 * i - 1.0) * kPi / (2.0 * n);
        const double s = std::sin(theta);
        const double v = log_center + log_scale * std::cos(theta) / s;
        const double logistic = 1.0 / (1.0 + std::exp(-v));
        const double p = pcov(std::exp(v));
        if (p != 0.0) sum += p * logistic * log_scale / (s * s);
    }
    return sum * kPi / n;
}

// ---------------------------------------------------------------------------
// Constrained least squares

void LeastSquaresProblem::validate() const {
    const auto n = x0.size();
    if (n == 0) throw std::invalid_argument("lsq: empty parameter vector");
    if (lower.size() != n || upper.size() != n) throw std::invalid_argument("lsq: bound dimensions mismatch");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(lower(i) <= upper(i))) throw std::invalid_argument("lsq: lower bound exceeds upper bound");
    if (eq_matrix.size() != 0 && (eq_matrix.cols() != n || eq_matrix.rows() != eq_rhs.size()))
        throw std::invalid_argument("lsq: equality constraint dimensions mismatch");
    if (!residual) throw std::invalid_argument("lsq: missing residual function");
}

Eigen::VectorXd project_feasible(const LeastSquaresProblem& p, const Eigen::VectorXd& x, double tol) {
    auto clamp = [&](Eigen::VectorXd v) { return v.cwiseMax(p.lower).cwiseMin(p.upper).eval(); };
    if (p.eq_matrix.rows() == 0) return clamp(x);
    const Eigen::MatrixXd& A = p.eq_matrix;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A * A.transpose());
    auto affine = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd lam = cod.solve(A * v - p.eq_rhs);
        return (v - A.transpose() * lam).eval();
    };
    // Dykstra's alternating projections converge to the nearest feasible point.
    Eigen::VectorXd y = x, pb = Eigen::VectorXd::Zero(x.size()), qa = pb;
    for (int it = 0; it < 200000; ++it) {
        Eigen::VectorXd z = clamp(y + pb);
        pb = y + pb - z;
        Eigen::VectorXd y2 = affine(z + qa);
        qa = z + qa - y2;
        const double change = (y2 - y).norm();
        y = y2;
        if (change < 1e-15 * (1.0 + y.norm()) && it > 2) break;
    }
    Eigen::VectorXd out = clamp(y);
    const double viol = (A * out - p.eq_rhs).cwiseAbs().maxCoeff();
    if (!(viol <= tol))
        throw std::invalid_argument("lsq: constraints are infeasible (violation " + std::to_string(viol) + ")");
    return out;
}

namespace {

// min 1/2 p'Hp + g'p  s.t.  E p = 0,  lo <= p <= hi  (lo <= 0 <= hi), primal active set from p = 0.
// Works in diagonally scaled variables and solves each equality-constrained
// subproblem in the null space of the working constraints.
Eigen::VectorXd solve_qp(const Eigen::MatrixXd& H0, const Eigen::VectorXd& g0, const Eigen::MatrixXd& E0,
                         const Eigen::VectorXd& lo0, const Eigen::VectorXd& hi0) {
    const Eigen::Index n = g0.size();
    const Eigen::Index me = E0.rows();
    const Eigen::VectorXd sc = H0.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd H = sc.asDiagonal() * H0 * sc.asDiagonal();
    const Eigen::VectorXd g = sc.cwiseProduct(g0);
    const Eigen::MatrixXd E = me > 0 ? (E0 * sc.asDiagonal()).eval() : Eigen::MatrixXd(0, n);
    const Eigen::VectorXd lo = lo0.cwiseQuotient(sc), hi = hi0.cwiseQuotient(sc);

    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    std::vector<int> state(n, 0);  // -1 at lower, +1 at upper, 0 free
    for (Eigen::Index i = 0; i < n; ++i)
        if (lo(i) == 0.0 && hi(i) == 0.0) state[i] = -1;
    const double scale = 1.0 + g.cwiseAbs().maxCoeff();
    for (int iter = 0; iter < 20 * static_cast<int>(n) + 50; ++iter) {
        std::vector<Eigen::Index> act;
        for (Eigen::Index i = 0; i < n; ++i)
            if (state[i] != 0) act.push_back(i);
        const Eigen::Index m = me + static_cast<Eigen::Index>(act.size());
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, n);
        if (me > 0) C.topRows(me) = E;
        for (std::size_t k = 0; k < act.size(); ++k) C(me + k, act[k]) = 1.0;
        const Eigen::VectorXd grad = H * p + g;

        Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
        if (m < n) {
            Eigen::MatrixXd Z;
            if (m == 0) {
                Z = Eigen::MatrixXd::Identity(n, n);
            } else {
                Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(C.transpose());
                qr.setThreshold(1e-12);
                const Eigen::Index rank = qr.rank();
                Eigen::MatrixXd Q = qr.matrixQ();
                Z = Q.rightCols(n - rank);
            }
            if (Z.cols() > 0) {
                const Eigen::MatrixXd Hr = Z.transpose() * H * Z;
                const Eigen::VectorXd y = Hr.ldlt().solve(-Z.transpose() * grad);
                step = Z * y;
            }
        }
        if (step.norm() <= 1e-13 * (1.0 + p.norm())) {
            if (act.empty()) break;
            // multipliers from  grad + C' lambda = 0
            const Eigen::VectorXd lam = C.transpose().completeOrthogonalDecomposition().solve(-grad);
            Eigen::Index worst = -1;
            double worst_val = 1e-12 * scale;
            for (std::size_t k = 0; k < act.size(); ++k) {
                const Eigen::Index i = act[k];
                if (lo(i) == 0.0 && hi(i) == 0.0) continue;
                const double l = lam(me + k);
                const double wrong = state[i] < 0 ? l : -l;
                if (wrong > worst_val) {
                    worst_val = wrong;
                    worst = i;
                }
            }
            if (worst < 0) break;
            state[worst] = 0;
            continue;
        }
        double alpha = 1.0;
        Eigen::Index block = -1;
        int block_side = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (state[i] != 0) continue;
            if (step(i) < 0.0) {
                const double a = (lo(i) - p(i)) / step(i);
                if (a < alpha) {
                    alpha = std::max(0.0, a);
                    block = i;
                    block_side = -1;
                }
            } else if (step(i) > 0.0) {
                const double a = (hi(i) - p(i)) / step(i);
                if (a < alpha) {
                    alpha = std::max(0.0, a);
                    block = i;
                    block_side = 1;
                }
            }
        }
        p += alpha * step;
        if (block >= 0) {
            p(block) = block_side < 0 ? lo(block) : hi(block);
            state[block] = block_side;
        }
    }
    return sc.cwiseProduct(p);
}

}  // namespace

LsqResult solve_constrained_lsq(const LeastSquaresProblem& problem, const LsqOptions& opts) {
    problem.validate();
    const Eigen::Index n = problem.x0.size();
    const bool has_eq = problem.eq_matrix.rows() > 0;
    LsqResult res;
    Eigen::VectorXd x = project_feasible(problem, problem.x0);

    auto eval = [&](const Eigen::VectorXd& v, Eigen::VectorXd& r) {
        ++res.evaluations;
        r = problem.residual(v);
        const double f = 0.5 * r.squaredNorm();
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    };

    Eigen::VectorXd r;
    double f = eval(x, r);
    if (!std::isfinite(f)) throw std::invalid_argument("lsq: residual is not finite at the initial point");
    res.initial_norm = std::sqrt(2.0 * f);
    const Eigen::MatrixXd E = has_eq ? problem.eq_matrix : Eigen::MatrixXd(0, n);

    double mu = -1.0, nu = 2.0;
    Eigen::MatrixXd J(r.size(), n);
    bool need_jac = true;
    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        if (need_jac && problem.jacobian) {
            J = problem.jacobian(x);
            if (J.rows() != r.size() || J.cols() != n) throw std::invalid_argument("lsq: jacobian has wrong shape");
            need_jac = false;
        }
        if (need_jac) {
            for (Eigen::Index j = 0; j < n; ++j) {
                double h = opts.fd_step * std::max(1.0, std::abs(x(j)));
                if (x(j) + h > problem.upper(j)) h = -h;
                if (x(j) + h < problem.lower(j)) h = 0.0;  // degenerate bound interval
                if (h == 0.0) {
                    J.col(j).setZero();
                    continue;
                }
                Eigen::VectorXd xp = x;
                xp(j) += h;
                Eigen::VectorXd rp;
                eval(xp, rp);
                J.col(j) = (rp - r) / h;
            }
            need_jac = false;
        }
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;

        if (!has_eq) {
            double pg = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                double gi = g(i);
                if ((x(i) <= problem.lower(i) && gi > 0.0) || (x(i) >= problem.upper(i) && gi < 0.0)) gi = 0.0;
                pg = std::max(pg, std::abs(gi));
            }
            if (pg <= opts.gtol) {
                res.converged = true;
                res.message = "projected gradient below tolerance";
                break;
            }
        }

        Eigen::VectorXd diag = A.diagonal();
        const double dmax = std::max(diag.maxCoeff(), 1e-300);
        diag = diag.cwiseMax(1e-10 * dmax);
        if (mu < 0.0) mu = 1e-3;
        const Eigen::MatrixXd H = A + mu * Eigen::MatrixXd(diag.asDiagonal());
        const Eigen::VectorXd step = solve_qp(H, g, E, problem.lower - x, problem.upper - x);

        if (step.norm() <= opts.xtol * (x.norm() + opts.xtol)) {
            // A tiny step forced by heavy damping is not a stationary point.
            if (mu > 1e6) {
                res.stagnated = true;
                res.message = "step below tolerance under heavy damping";
            } else {
                res.converged = true;
                res.message = "step below tolerance";
            }
            break;
        }
        Eigen::VectorXd xn = (x + step).cwiseMax(problem.lower).cwiseMin(problem.upper);
        Eigen::VectorXd rn;
        const double fn = eval(xn, rn);
        const double pred = -(g.dot(step) + 0.5 * step.dot(A * step));
        const double rho = pred > 0.0 ? (f - fn) / pred : -1.0;
        if (fn < f && rho > 0.0) {
            const double drop = f - fn;
            x = xn;
            r = rn;
            f = fn;
            need_jac = true;
            mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
            nu = 2.0;
            if (drop <= opts.ftol * f) {
                res.converged = true;
                res.message = "relative reduction below tolerance";
                ++res.iterations;
                break;
            }
        } else {
            mu *= nu;
            nu *= 2.0;
            if (mu > 1e30) {
                res.stagnated = true;
                res.message = "damping diverged; returning best point";
                break;
            }
        }
    }
    if (!res.converged && !res.stagnated) {
        res.stagnated = true;
        res.message = "iteration limit reached; returning best point";
    }
    res.x = x;
    res.norm = std::sqrt(2.0 * f);
    return res;
}

}  // namespace mmcov
