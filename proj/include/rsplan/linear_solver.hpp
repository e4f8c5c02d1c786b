#pragma once

#include <stdexcept>
#include <string>

#include "rsplan/grid.hpp"

namespace rsplan {

/// Conjugate gradients ran out of iterations.
class LinearSolveError : public std::runtime_error {
public:
    LinearSolveError(const std::string& message, double residual, int iterations)
        : std::runtime_error(message), residual_(residual), iterations_(iterations) {}

    /// Sup-norm residual reached before giving up.
    [[nodiscard]] double residual() const { return residual_; }
    [[nodiscard]] int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

struct LinearSolveOptions {
    /// Target: ‖(Δ+Λ)u − rhs‖_∞ <= rel_tol · ‖effective rhs‖_∞, where the
    /// effective right-hand side has the boundary data folded in. Targets
    /// below the rounding floor of the residual evaluation are raised to it.
    double rel_tol = 1e-10;
    int max_iter = 20000;
};

struct ShiftedSolve {
    GridField u;
    int iterations = 0;
    double residual = 0.0;  ///< achieved sup-norm residual
};

/// Solves (Δ + Λ) u = rhs on the interior nodes with u = boundary_value on
/// the staircase boundary, Λ < 0. The negated operator −(Δ+Λ) is symmetric
/// positive definite; it is applied matrix-free and inverted by
/// Jacobi-preconditioned conjugate gradients.
ShiftedSolve solve_shifted(const GridPtr& grid, double shift, const GridField& rhs, double boundary_value,
                           const LinearSolveOptions& options = {});

}  // namespace rsplan
