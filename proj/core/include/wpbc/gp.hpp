// SPDX-License-Identifier: Apache-2.0
//
// Posynomial algebra, single condensation and a log-domain GP solver.

#ifndef WPBC_GP_HPP
#define WPBC_GP_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace wpbc::gp {

/// c * x_0^{a_0} * ... * x_{V-1}^{a_{V-1}} with c > 0.
class Monomial {
public:
    Monomial(double coefficient, std::vector<double> exponents);

    /// Builds from log(c). Needed when c itself would overflow a double.
    static Monomial from_log(double log_coefficient, std::vector<double> exponents);

    double coefficient() const;
    double log_coefficient() const { return log_coefficient_; }
    const std::vector<double>& exponents() const { return exponents_; }
    std::size_t dimension() const { return exponents_.size(); }

    double evaluate(std::span<const double> x) const;
    /// log g(exp(y)) = log c + a.y
    double log_evaluate(std::span<const double> y) const;

private:
    Monomial() = default;
    double log_coefficient_ = 0.0;
    std::vector<double> exponents_;
};

/// Nonempty sum of monomials over a shared variable space.
class Posynomial {
public:
    explicit Posynomial(std::vector<Monomial> terms);

    const std::vector<Monomial>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    std::size_t dimension() const { return dimension_; }

private:
    std::vector<Monomial> terms_;
    std::size_t dimension_;
};

double evaluate(const Posynomial& p, std::span<const double> x);

/// log p(exp(y)), evaluated with the max-shift trick.
double log_evaluate(const Posynomial& p, std::span<const double> y);

/// Substitutes x_v = scale_v * u_v and returns the posynomial in u.
Posynomial rescale(const Posynomial& p, std::span<const double> scale);

/// Keeps the listed variables (in the given order). Terms with a nonzero
/// exponent on a dropped variable vanish, since dropped variables are pinned
/// to zero. Throws if nothing survives.
Posynomial restrict_to(const Posynomial& p, std::span<const std::size_t> keep);

struct CondensationWeights {
    std::vector<double> weights;
};

struct Condensation {
    Monomial monomial;
    CondensationWeights weights;
};

/// Weights below this are dropped from the condensed product.
inline constexpr double kWeightFloor = 1e-300;

/// AM-GM single condensation of p around `anchor`:
///   gamma_k = g_k(anchor) / p(anchor),  p(x) >= prod_k (g_k(x) / gamma_k)^gamma_k
/// with equality at the anchor.
Condensation condense(const Posynomial& p, std::span<const double> anchor);

/// maximize objective(x)
/// s.t.     P_i(x) <= 1   for each posynomial constraint
///          m_j(x) <= 1   for each monomial constraint
struct GpProblem {
    Monomial objective;
    std::vector<Posynomial> posynomial_constraints;
    std::vector<Monomial> monomial_constraints;

    std::size_t dimension() const { return objective.dimension(); }
    void validate() const;
};

enum class GpStatus { Optimal, MaxIterations, Infeasible };

std::string_view to_string(GpStatus status);

struct GpSolution {
    std::vector<double> variables;
    double objective_value = 0.0;
    double kkt_residual = 0.0;
    GpStatus status = GpStatus::MaxIterations;
    int newton_iterations = 0;
};

struct GpOptions {
    /// Bound on the relative duality gap of the log-domain program.
    double tol = 1e-8;
    int max_newton_iters = 500;
    /// Optional starting point in x-space; used directly when strictly
    /// feasible, otherwise as the phase-1 seed.
    std::optional<std::vector<double>> initial;
};

GpSolution solve_gp(const GpProblem& problem, const GpOptions& options = {});

inline GpSolution solve_gp(const GpProblem& problem, double tol, int max_newton_iters) {
    GpOptions options;
    options.tol = tol;
    options.max_newton_iters = max_newton_iters;
    return solve_gp(problem, options);
}

}  // namespace wpbc::gp

#endif  // WPBC_GP_HPP
