#include "rsplan/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rsplan {

double IterationTrace::worst_increment() const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& rec : records) worst = std::min({worst, rec.min_increment[0], rec.min_increment[1]});
    return worst;
}

double IterationTrace::worst_sandwich_slack() const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& rec : records)
        worst = std::min({worst, rec.lower_slack[0], rec.lower_slack[1], rec.upper_slack[0], rec.upper_slack[1]});
    return worst;
}

SubSuperCertificate grid_certificate(const ProblemInstance& instance, const BallGrid& grid) {
    if (grid.dim() == 1 || grid.ghost_radius() <= instance.radius) return choose_constants(instance);
    return choose_constants(instance.with_radius(grid.ghost_radius()));
}

GridField sample_subsolution(const SubSuperCertificate& cert, const ProblemInstance& instance, const GridPtr& grid,
                             Regime r) {
    GridField out(grid, 0.0, 1.0);
    for (std::size_t i = 0; i < grid->size(); ++i) out[i] = eval_subsolution(cert, instance, r, grid->coords(i));
    return out;
}

namespace {

struct NodeCosts {
    std::vector<double> f1;
    std::vector<double> f2;
};

NodeCosts node_costs(const ProblemInstance& instance, const BallGrid& grid) {
    NodeCosts c;
    c.f1.resize(grid.size());
    c.f2.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        c.f1[i] = eval_cost(instance.f1, grid.coords(i), instance.radius);
        c.f2[i] = eval_cost(instance.f2, grid.coords(i), instance.radius);
    }
    return c;
}

/// Δu_j − g_j(u) with the arguments of g clamped to [lo_j, 1].
std::array<GridField, 2> residual_fields(const CouplingTerms& ct, const NodeCosts& costs, const GridField& u1,
                                         const GridField& u2, std::array<double, 2> lo) {
    std::array<GridField, 2> out{apply_laplacian(u1), apply_laplacian(u2)};
    for (std::size_t i = 0; i < u1.size(); ++i) {
        const double t = std::clamp(u1[i], lo[0], 1.0);
        const double s = std::clamp(u2[i], lo[1], 1.0);
        out[0][i] -= ct.g1(costs.f1[i], t, s);
        out[1][i] -= ct.g2(costs.f2[i], t, s);
    }
    return out;
}

}  // namespace

std::array<GridField, 2> transformed_residual(const ProblemInstance& instance, const GridField& u1,
                                              const GridField& u2) {
    const CouplingTerms ct(instance.regimes);
    const NodeCosts costs = node_costs(instance, *u1.grid);
    for (std::size_t i = 0; i < u1.size(); ++i)
        if (!(u1[i] > 0.0) || !(u2[i] > 0.0)) throw DomainError("transformed residual needs positive u");
    constexpr double tiny = std::numeric_limits<double>::min();
    return residual_fields(ct, costs, u1, u2, {tiny, tiny});
}

MonotoneResult monotone_iterate(const ProblemInstance& instance, const SubSuperCertificate& cert,
                                const GridPtr& grid, const MonotoneOptions& options) {
    if (!(options.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (options.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    if (!(cert.lambda1 < 0.0) || !(cert.lambda2 < 0.0)) throw std::invalid_argument("shifts must be negative");

    const CouplingTerms ct(instance.regimes);
    const NodeCosts costs = node_costs(instance, *grid);
    const std::array<double, 2> lo{cert.box_lo(Regime::one), cert.box_lo(Regime::two)};
    const std::array<GridField, 2> sub{sample_subsolution(cert, instance, grid, Regime::one),
                                       sample_subsolution(cert, instance, grid, Regime::two)};
    const std::array<double, 2> shift{cert.lambda1, cert.lambda2};
    const LinearSolveOptions lin{options.cg_rel_tol, 20000};

    MonotoneResult result;
    result.cert = cert;
    std::array<GridField, 2> u = sub;

    for (int k = 1; k <= options.max_iter; ++k) {
        const auto res = residual_fields(ct, costs, u[0], u[1], lo);
        IterationRecord rec;
        rec.iteration = k;
        std::array<GridField, 2> next;
        for (int j = 0; j < 2; ++j) {
            rec.residual[j] = sup_norm(res[j].values);
            // (Δ + Λ) w = g(u) − Δu = −res
            GridField rhs(grid, 0.0, 0.0);
            for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -res[j][i];
            const ShiftedSolve w = solve_shifted(grid, shift[j], rhs, 0.0, lin);
            result.linear_residual = std::max(result.linear_residual, w.residual);
            rec.cg_iterations[j] = w.iterations;

            next[j] = u[j];
            double max_up = 0.0;
            double min_inc = std::numeric_limits<double>::infinity();
            double lower = std::numeric_limits<double>::infinity();
            double upper = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rhs.size(); ++i) {
                next[j][i] += w.u[i];
                max_up = std::max(max_up, std::abs(w.u[i]));
                min_inc = std::min(min_inc, w.u[i]);
                lower = std::min(lower, next[j][i] - sub[j][i]);
                upper = std::min(upper, 1.0 - next[j][i]);
            }
            rec.max_update[j] = max_up;
            rec.min_increment[j] = min_inc;
            rec.lower_slack[j] = lower;
            rec.upper_slack[j] = upper;
        }
        u = std::move(next);
        result.trace.records.push_back(rec);
        if (std::max(rec.max_update[0], rec.max_update[1]) <= options.tol) {
            const auto final_res = residual_fields(ct, costs, u[0], u[1], lo);
            result.residual = {sup_norm(final_res[0].values), sup_norm(final_res[1].values)};
            result.u1 = std::move(u[0]);
            result.u2 = std::move(u[1]);
            return result;
        }
    }
    std::ostringstream msg;
    const auto& last = result.trace.records.back();
    msg << "monotone iteration did not reach tol " << options.tol << " in " << options.max_iter
        << " iterations (last update " << std::max(last.max_update[0], last.max_update[1]) << ")";
    throw IterationLimitError(msg.str(), std::move(result.trace));
}

}  // namespace rsplan
