#pragma once

// Monotone Picard iteration for the transformed system
//
//   Δu_j + Λ_j u_j^k = g_j(x, u1^{k-1}, u2^{k-1}) + Λ_j u_j^{k-1},   u_j^k = 1 on ∂B_R,
//
// started from the sub-solution. Each step is carried out in correction form,
// (Δ + Λ_j) w = g_j(u^{k-1}) − Δu_j^{k-1} with w = 0 on the boundary and
// u^k = u^{k-1} + w, which is the same iterate but keeps the sign of small
// increments resolvable to the linear-solver tolerance.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsplan/grid.hpp"
#include "rsplan/linear_solver.hpp"
#include "rsplan/subsuper.hpp"

namespace rsplan {

struct MonotoneOptions {
    double tol = 1e-9;
    int max_iter = 10000;
    /// Relative tolerance of each correction solve.
    double cg_rel_tol = 1e-12;
};

struct IterationRecord {
    int iteration = 0;
    /// sup_x |u_j^k − u_j^{k−1}|
    std::array<double, 2> max_update{};
    /// min_x (u_j^k − u_j^{k−1})
    std::array<double, 2> min_increment{};
    /// sup_x |Δu_j − g_j(u)| at the previous iterate
    std::array<double, 2> residual{};
    /// min_x (u_j^k − sub_j) and min_x (1 − u_j^k)
    std::array<double, 2> lower_slack{};
    std::array<double, 2> upper_slack{};
    std::array<int, 2> cg_iterations{};
};

struct IterationTrace {
    std::vector<IterationRecord> records;

    [[nodiscard]] int iterations() const { return static_cast<int>(records.size()); }
    /// Smallest min_increment over all iterations and both regimes.
    [[nodiscard]] double worst_increment() const;
    /// Smallest sandwich slack over all iterations, regimes and both sides.
    [[nodiscard]] double worst_sandwich_slack() const;
};

struct MonotoneResult {
    GridField u1;
    GridField u2;
    IterationTrace trace;
    /// Certificate the iteration ran with (constants for the grid's ghost radius).
    SubSuperCertificate cert;
    /// sup_x |Δu_j − g_j(u)| at the returned pair.
    std::array<double, 2> residual{};
    /// Largest achieved linear-solver residual over the run.
    double linear_residual = 0.0;
};

/// The update never dropped below tol within max_iter iterations.
class IterationLimitError : public std::runtime_error {
public:
    IterationLimitError(const std::string& message, IterationTrace trace)
        : std::runtime_error(message), trace_(std::move(trace)) {}

    [[nodiscard]] const IterationTrace& trace() const { return trace_; }

private:
    IterationTrace trace_;
};

/// Certificate for the discrete problem on `grid`: the constants are certified
/// on the ball through the outermost lattice points the stencil reads, so the
/// sampled sub-solution is a discrete sub-solution as well. Identical to
/// choose_constants(instance) for N = 1.
SubSuperCertificate grid_certificate(const ProblemInstance& instance, const BallGrid& grid);

/// Sub-solution of regime r sampled on the grid's interior nodes.
GridField sample_subsolution(const SubSuperCertificate& cert, const ProblemInstance& instance, const GridPtr& grid,
                             Regime r);

/// Nodewise Δu_j − g_j(x, u1, u2), boundary value 1 for both fields.
std::array<GridField, 2> transformed_residual(const ProblemInstance& instance, const GridField& u1,
                                              const GridField& u2);

MonotoneResult monotone_iterate(const ProblemInstance& instance, const SubSuperCertificate& cert,
                                const GridPtr& grid, const MonotoneOptions& options = {});

}  // namespace rsplan
