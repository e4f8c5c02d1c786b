#pragma once

// Certify → iterate → transform → extract, as used by the command-line tool.

#include "rsplan/hjb.hpp"
#include "rsplan/monotone.hpp"
#include "rsplan/subsuper.hpp"

namespace rsplan {

/// 129 nodes per axis for N = 1, 65 for N = 2, 33 for N = 3.
int default_grid_nodes(int dim);

struct SolveOptions {
    /// Nodes per axis; 0 picks default_grid_nodes.
    int grid = 0;
    MonotoneOptions iteration;
};

struct Solution {
    GridPtr grid;
    /// Certificate for the instance's own ball.
    SubSuperCertificate cert;
    MonotoneResult iteration;
    ValueFields values;
    PolicyField policy;
};

/// Throws DomainError for invalid instances, CertificationError,
/// LinearSolveError or IterationLimitError.
Solution solve_instance(const ProblemInstance& instance, const SolveOptions& options = {});

/// Richardson estimate |z_h(y0) − z_{2h}(y0)| / 3 of the grid error at y0,
/// from a second solve on the coarser lattice (skipped, returning 0, when that
/// lattice would fall below the minimum size).
double richardson_grid_term(const ProblemInstance& instance, const Solution& fine, const SolveOptions& options);

}  // namespace rsplan
