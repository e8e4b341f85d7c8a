// SPDX-License-Identifier: Apache-2.0

#include "wpbc/gp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wpbc::gp {

namespace {

constexpr double kLogSpaceExponent = 8.0;

void check_dimension(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                    std::to_string(expected) + ", got " + std::to_string(got) + ")");
    }
}

void check_positive(std::span<const double> x, const char* what) {
    for (double v : x) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": variables must be strictly positive and finite");
        }
    }
}

std::vector<double> log_of(std::span<const double> x) {
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [](double v) { return std::log(v); });
    return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// Monomial / Posynomial

Monomial::Monomial(double coefficient, std::vector<double> exponents)
    : exponents_(std::move(exponents)) {
    if (!(coefficient > 0.0) || !std::isfinite(coefficient)) {
        throw std::invalid_argument("Monomial: coefficient must be positive and finite");
    }
    for (double a : exponents_) {
        if (!std::isfinite(a)) throw std::invalid_argument("Monomial: exponents must be finite");
    }
    log_coefficient_ = std::log(coefficient);
}

Monomial Monomial::from_log(double log_coefficient, std::vector<double> exponents) {
    if (!std::isfinite(log_coefficient)) {
        throw std::invalid_argument("Monomial: log coefficient must be finite");
    }
    for (double a : exponents) {
        if (!std::isfinite(a)) throw std::invalid_argument("Monomial: exponents must be finite");
    }
    Monomial m;
    m.log_coefficient_ = log_coefficient;
    m.exponents_ = std::move(exponents);
    return m;
}

double Monomial::coefficient() const { return std::exp(log_coefficient_); }

double Monomial::log_evaluate(std::span<const double> y) const {
    check_dimension(exponents_.size(), y.size(), "Monomial::log_evaluate");
    double acc = log_coefficient_;
    for (std::size_t v = 0; v < y.size(); ++v) acc += exponents_[v] * y[v];
    return acc;
}

double Monomial::evaluate(std::span<const double> x) const {
    check_dimension(exponents_.size(), x.size(), "Monomial::evaluate");
    check_positive(x, "Monomial::evaluate");
    const bool large = std::any_of(exponents_.begin(), exponents_.end(),
                                   [](double a) { return std::abs(a) > kLogSpaceExponent; });
    if (large) return std::exp(log_evaluate(log_of(x)));
    double acc = coefficient();
    for (std::size_t v = 0; v < x.size(); ++v) {
        if (exponents_[v] != 0.0) acc *= std::pow(x[v], exponents_[v]);
    }
    return acc;
}

Posynomial::Posynomial(std::vector<Monomial> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("Posynomial: needs at least one term");
    dimension_ = terms_.front().dimension();
    for (const auto& t : terms_) check_dimension(dimension_, t.dimension(), "Posynomial");
}

double evaluate(const Posynomial& p, std::span<const double> x) {
    check_dimension(p.dimension(), x.size(), "evaluate");
    check_positive(x, "evaluate");
    double acc = 0.0;
    for (const auto& t : p.terms()) acc += t.evaluate(x);
    return acc;
}

double log_evaluate(const Posynomial& p, std::span<const double> y) {
    check_dimension(p.dimension(), y.size(), "log_evaluate");
    std::vector<double> u;
    u.reserve(p.size());
    for (const auto& t : p.terms()) u.push_back(t.log_evaluate(y));
    const double m = *std::max_element(u.begin(), u.end());
    double s = 0.0;
    for (double v : u) s += std::exp(v - m);
    return m + std::log(s);
}

Posynomial rescale(const Posynomial& p, std::span<const double> scale) {
    check_dimension(p.dimension(), scale.size(), "rescale");
    check_positive(scale, "rescale");
    const auto log_scale = log_of(scale);
    std::vector<Monomial> out;
    out.reserve(p.size());
    for (const auto& t : p.terms()) {
        out.push_back(Monomial::from_log(t.log_evaluate(log_scale), t.exponents()));
    }
    return Posynomial(std::move(out));
}

Posynomial restrict_to(const Posynomial& p, std::span<const std::size_t> keep) {
    std::vector<bool> kept(p.dimension(), false);
    for (std::size_t v : keep) {
        if (v >= p.dimension()) throw std::out_of_range("restrict_to: variable index out of range");
        kept[v] = true;
    }
    std::vector<Monomial> out;
    for (const auto& t : p.terms()) {
        bool vanishes = false;
        for (std::size_t v = 0; v < p.dimension() && !vanishes; ++v) {
            vanishes = !kept[v] && t.exponents()[v] != 0.0;
        }
        if (vanishes) continue;
        std::vector<double> a;
        a.reserve(keep.size());
        for (std::size_t v : keep) a.push_back(t.exponents()[v]);
        out.push_back(Monomial::from_log(t.log_coefficient(), std::move(a)));
    }
    if (out.empty()) throw std::invalid_argument("restrict_to: every term vanishes");
    return Posynomial(std::move(out));
}

// ---------------------------------------------------------------------------
// Condensation

Condensation condense(const Posynomial& p, std::span<const double> anchor) {
    check_dimension(p.dimension(), anchor.size(), "condense");
    check_positive(anchor, "condense");
    const auto y = log_of(anchor);

    std::vector<double> u;
    u.reserve(p.size());
    for (const auto& t : p.terms()) u.push_back(t.log_evaluate(y));
    const double m = *std::max_element(u.begin(), u.end());
    double total = 0.0;
    for (double v : u) total += std::exp(v - m);
    const double log_total = m + std::log(total);

    CondensationWeights w;
    w.weights.reserve(p.size());
    for (double v : u) w.weights.push_back(std::exp(v - log_total));
    // Renormalise so the weights sum to one to machine precision.
    const double sum = std::accumulate(w.weights.begin(), w.weights.end(), 0.0);
    for (double& g : w.weights) g /= sum;

    // prod_k (c_k x^{a_k} / g_k)^{g_k}
    double log_c = 0.0;
    std::vector<double> exps(p.dimension(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double g = w.weights[k];
        if (g < kWeightFloor) continue;
        const auto& t = p.terms()[k];
        log_c += g * (t.log_coefficient() - std::log(g));
        for (std::size_t v = 0; v < exps.size(); ++v) exps[v] += g * t.exponents()[v];
    }
    return {Monomial::from_log(log_c, std::move(exps)), std::move(w)};
}

// ---------------------------------------------------------------------------
// Solver

void GpProblem::validate() const {
    const std::size_t v = dimension();
    if (v == 0) throw std::invalid_argument("GpProblem: zero variables");
    for (const auto& p : posynomial_constraints) check_dimension(v, p.dimension(), "GpProblem constraint");
    for (const auto& m : monomial_constraints) check_dimension(v, m.dimension(), "GpProblem constraint");
}

std::string_view to_string(GpStatus status) {
    switch (status) {
        case GpStatus::Optimal: return "optimal";
        case GpStatus::MaxIterations: return "max_iterations";
        case GpStatus::Infeasible: return "infeasible";
    }
    return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// F(z) = log sum_k exp(b_k + A_k z)
struct LseConstraint {
    MatrixXd a;
    VectorXd b;

    double value(const VectorXd& z) const {
        const VectorXd u = b + a * z;
        const double m = u.maxCoeff();
        return m + std::log((u.array() - m).exp().sum());
    }

    // Returns F and fills gradient and Hessian.
    double derivatives(const VectorXd& z, VectorXd& grad, MatrixXd& hess) const {
        const VectorXd u = b + a * z;
        const double m = u.maxCoeff();
        VectorXd w = (u.array() - m).exp().matrix();
        const double s = w.sum();
        w /= s;
        grad.noalias() = a.transpose() * w;
        hess.noalias() = a.transpose() * w.asDiagonal() * a;
        hess.noalias() -= grad * grad.transpose();
        return m + std::log(s);
    }
};

struct BarrierResult {
    VectorXd z;
    double t = 1.0;
    bool converged = false;
    bool stopped_early = false;
    int newton_iterations = 0;
    double kkt_residual = 0.0;
};

class BarrierSolver {
public:
    BarrierSolver(VectorXd cost, std::vector<LseConstraint> constraints)
        : cost_(std::move(cost)), constraints_(std::move(constraints)) {}

    bool strictly_feasible(const VectorXd& z) const {
        for (const auto& c : constraints_) {
            const double f = c.value(z);
            if (!(f < 0.0) || !std::isfinite(f)) return false;
        }
        return true;
    }

    // Minimises cost.z over the constraints starting from a strictly feasible z0.
    // `stop` is polled after every Newton step.
    BarrierResult run(VectorXd z0, double tol, int budget,
                      const std::function<bool(const VectorXd&)>& stop) const {
        BarrierResult r;
        r.z = std::move(z0);
        const std::size_t dim = static_cast<std::size_t>(r.z.size());
        const double m = static_cast<double>(constraints_.size());
        constexpr double kMu = 20.0;
        constexpr double kCenteringTol = 1e-11;
        constexpr double kMaxStep = 10.0;

        VectorXd grad(dim);
        MatrixXd hess(dim, dim);
        VectorXd g_i(dim);
        MatrixXd h_i(dim, dim);

        if (constraints_.empty()) {
            r.converged = cost_.isZero();
            return r;
        }

        r.t = 1.0;
        for (;;) {
            bool centered = false;
            int quadratic_steps = 0;
            while (r.newton_iterations < budget) {
                grad = r.t * cost_;
                hess.setZero();
                for (const auto& c : constraints_) {
                    const double f = c.derivatives(r.z, g_i, h_i);
                    grad += g_i / (-f);
                    hess += (g_i * g_i.transpose()) / (f * f) + h_i / (-f);
                }
                // Jacobi scaling: curvature along nearly-vanishing coordinates can be
                // 1e-14 of the rest, so the ridge has to be relative per entry.
                const double floor = 1e-30 * std::max(hess.diagonal().cwiseAbs().maxCoeff(), 1e-300);
                const VectorXd d = hess.diagonal().cwiseAbs().cwiseMax(floor).cwiseSqrt().cwiseInverse();
                MatrixXd scaled = d.asDiagonal() * hess * d.asDiagonal();
                scaled.diagonal().array() += 1e-13;
                VectorXd step = d.asDiagonal() * scaled.ldlt().solve(-(d.asDiagonal() * grad));
                const double decrement_sq = -grad.dot(step);
                ++r.newton_iterations;
                if (!step.allFinite()) break;
                if (decrement_sq / 2.0 <= kCenteringTol) {
                    centered = true;
                    break;
                }
                // Barrier change evaluated as a difference; absolute values lose
                // everything below t * |c.z| * eps once t is large.
                std::vector<double> f0(constraints_.size());
                for (std::size_t i = 0; i < constraints_.size(); ++i) f0[i] = constraints_[i].value(r.z);
                // Log-space step cap; phase 1 is unbounded along some directions.
                const double longest = step.cwiseAbs().maxCoeff();
                if (longest > kMaxStep) step *= kMaxStep / longest;
                const double descent = -grad.dot(step);
                const double slope = r.t * cost_.dot(step);
                auto delta = [&](double alpha) {
                    const VectorXd trial = r.z + alpha * step;
                    double d = alpha * slope;
                    for (std::size_t i = 0; i < constraints_.size(); ++i) {
                        const double f = constraints_[i].value(trial);
                        if (!(f < 0.0) || !std::isfinite(f)) return std::numeric_limits<double>::infinity();
                        d -= std::log(f / f0[i]);
                    }
                    return d;
                };
                bool accepted = false;
                if (decrement_sq < 1e-4 && std::isfinite(delta(1.0))) {
                    // Quadratic region: full step.
                    r.z += step;
                    accepted = true;
                } else {
                    double alpha = 1.0;
                    for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
                        if (delta(alpha) <= -0.01 * alpha * descent) {
                            r.z += alpha * step;
                            accepted = true;
                            break;
                        }
                    }
                }
                if (decrement_sq < 1e-4) ++quadratic_steps;
                if (quadratic_steps > 12) {
                    // Stuck at the rounding floor.
                    centered = true;
                    break;
                }
                if (stop && stop(r.z)) {
                    r.stopped_early = true;
                    return r;
                }
                if (!accepted) {
                    // No further progress is representable; treat as centered.
                    centered = true;
                    break;
                }
            }
            if (!centered) return r;

            const double gap = m / r.t;
            if (gap <= tol) {
                r.kkt_residual = kkt_residual(r.z, r.t);
                if (r.kkt_residual <= tol) {
                    r.converged = true;
                    return r;
                }
            }
            if (r.newton_iterations >= budget) return r;
            r.t *= kMu;
        }
    }

    // max(relative duality gap, stationarity) for a dual estimate refined by
    // least squares over the near-active constraints. The plain barrier
    // estimate 1/(t * -F_i) inherits the rounding error of F_i near zero.
    double kkt_residual(const VectorXd& z, double t) const {
        const auto n = static_cast<Eigen::Index>(constraints_.size());
        const auto dim = z.size();
        MatrixXd g(dim, n);
        VectorXd f(n), lambda(n);
        VectorXd g_i(dim);
        MatrixXd h_i(dim, dim);
        for (Eigen::Index i = 0; i < n; ++i) {
            f(i) = constraints_[static_cast<std::size_t>(i)].derivatives(z, g_i, h_i);
            g.col(i) = g_i;
            lambda(i) = 1.0 / (t * -f(i));
        }
        const double barrier_gap = static_cast<double>(n) / t;
        auto measure = [&](const VectorXd& l) {
            const double gap = (l.array() * (-f.array())).sum();
            const double stat = (cost_ + g * l).cwiseAbs().maxCoeff() / std::max(1.0, cost_.cwiseAbs().maxCoeff());
            return std::max(gap, stat);
        };
        double best = measure(lambda);

        std::vector<Eigen::Index> active;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (-f(i) <= 1e3 * barrier_gap) active.push_back(i);
        }
        if (!active.empty()) {
            MatrixXd ga(dim, static_cast<Eigen::Index>(active.size()));
            VectorXd rhs = -cost_;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (std::find(active.begin(), active.end(), i) == active.end()) rhs -= g.col(i) * lambda(i);
            }
            for (std::size_t k = 0; k < active.size(); ++k) ga.col(static_cast<Eigen::Index>(k)) = g.col(active[k]);
            const VectorXd la = ga.completeOrthogonalDecomposition().solve(rhs);
            if (la.allFinite() && (la.array() >= 0.0).all()) {
                VectorXd refined = lambda;
                for (std::size_t k = 0; k < active.size(); ++k) refined(active[k]) = la(static_cast<Eigen::Index>(k));
                best = std::min(best, measure(refined));
            }
        }
        return best;
    }

private:
    VectorXd cost_;
    std::vector<LseConstraint> constraints_;
};

LseConstraint to_lse(const Posynomial& p, std::size_t extra_columns, double extra_value) {
    const std::size_t v = p.dimension();
    LseConstraint c{MatrixXd::Zero(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(v + extra_columns)),
                    VectorXd(static_cast<Eigen::Index>(p.size()))};
    for (std::size_t k = 0; k < p.size(); ++k) {
        const auto& t = p.terms()[k];
        c.b(static_cast<Eigen::Index>(k)) = t.log_coefficient();
        for (std::size_t j = 0; j < v; ++j) c.a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = t.exponents()[j];
        for (std::size_t j = 0; j < extra_columns; ++j) {
            c.a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v + j)) = extra_value;
        }
    }
    return c;
}

std::vector<LseConstraint> build_constraints(const GpProblem& problem, std::size_t extra_columns,
                                             double extra_value) {
    std::vector<LseConstraint> out;
    out.reserve(problem.posynomial_constraints.size() + problem.monomial_constraints.size());
    for (const auto& p : problem.posynomial_constraints) out.push_back(to_lse(p, extra_columns, extra_value));
    for (const auto& m : problem.monomial_constraints) out.push_back(to_lse(Posynomial({m}), extra_columns, extra_value));
    return out;
}

}  // namespace

namespace {
constexpr double kPhase1Margin = 1e-3;
}  // namespace

GpSolution solve_gp(const GpProblem& problem, const GpOptions& options) {
    problem.validate();
    if (!(options.tol > 0.0)) throw std::invalid_argument("solve_gp: tol must be positive");
    if (options.max_newton_iters < 1) throw std::invalid_argument("solve_gp: max_newton_iters must be >= 1");

    const std::size_t v = problem.dimension();
    const auto vi = static_cast<Eigen::Index>(v);

    VectorXd y = VectorXd::Zero(vi);
    if (options.initial) {
        check_dimension(v, options.initial->size(), "solve_gp initial point");
        check_positive(*options.initial, "solve_gp initial point");
        for (std::size_t j = 0; j < v; ++j) y(static_cast<Eigen::Index>(j)) = std::log((*options.initial)[j]);
    }

    GpSolution out;
    const auto constraints = build_constraints(problem, 0, 0.0);
    int budget = options.max_newton_iters;

    // Phase 1: minimise s subject to F_i(y) - s <= 0. Stopping at the first
    // s < 0 leaves phase 2 on the boundary, where Newton steps underflow, so
    // push on to a margin and settle for any s < 0 if that is unreachable.
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& c : constraints) worst = std::max(worst, c.value(y));
    if (!constraints.empty() && !(worst < 0.0)) {
        VectorXd cost = VectorXd::Zero(vi + 1);
        cost(vi) = 1.0;
        BarrierSolver phase1(cost, build_constraints(problem, 1, -1.0));
        VectorXd z(vi + 1);
        z.head(vi) = y;
        z(vi) = worst + 1.0;
        auto r = phase1.run(z, options.tol, budget,
                            [vi](const VectorXd& zz) { return zz(vi) < -kPhase1Margin; });
        budget -= r.newton_iterations;
        out.newton_iterations += r.newton_iterations;
        y = r.z.head(vi);
        bool interior = true;
        for (const auto& c : constraints) interior = interior && c.value(y) < 0.0;
        if (!r.stopped_early && !interior) {
            out.variables.resize(v);
            for (std::size_t j = 0; j < v; ++j) out.variables[j] = std::exp(y(static_cast<Eigen::Index>(j)));
            out.status = r.converged ? GpStatus::Infeasible : GpStatus::MaxIterations;
            out.objective_value = std::exp(problem.objective.log_evaluate(std::span<const double>(y.data(), v)));
            out.kkt_residual = std::numeric_limits<double>::infinity();
            return out;
        }
    }

    // Phase 2: minimise -log(objective) = -a0.y (constant dropped).
    VectorXd cost(vi);
    for (std::size_t j = 0; j < v; ++j) cost(static_cast<Eigen::Index>(j)) = -problem.objective.exponents()[j];
    BarrierSolver phase2(cost, constraints);
    auto r = phase2.run(y, options.tol, std::max(budget, 1), {});
    out.newton_iterations += r.newton_iterations;

    out.variables.resize(v);
    for (std::size_t j = 0; j < v; ++j) out.variables[j] = std::exp(r.z(static_cast<Eigen::Index>(j)));
    out.objective_value = std::exp(problem.objective.log_evaluate(std::span<const double>(r.z.data(), v)));
    out.kkt_residual = r.converged ? r.kkt_residual : std::numeric_limits<double>::infinity();
    out.status = r.converged ? GpStatus::Optimal : GpStatus::MaxIterations;
    return out;
}

}  // namespace wpbc::gp
