#include "rsplan/pipeline.hpp"

#include <cmath>

namespace rsplan {

int default_grid_nodes(int dim) {
    switch (dim) {
        case 1: return 129;
        case 2: return 65;
        default: return 33;
    }
}

Solution solve_instance(const ProblemInstance& instance, const SolveOptions& options) {
    Solution s;
    s.cert = choose_constants(instance);
    s.grid = build_grid(instance, options.grid > 0 ? options.grid : default_grid_nodes(instance.dim));
    const SubSuperCertificate grid_cert = s.grid->dim() == 1 ? s.cert : grid_certificate(instance, *s.grid);
    s.iteration = monotone_iterate(instance, grid_cert, s.grid, options.iteration);
    s.values = transform_to_z(s.iteration.u1, s.iteration.u2, instance);
    s.policy = extract_policy(s.values);
    return s;
}

double richardson_grid_term(const ProblemInstance& instance, const Solution& fine, const SolveOptions& options) {
    const int n = fine.grid->nodes_per_axis();
    const int coarse = (n + 1) / 2;
    if (coarse < kMinNodesPerAxis) return 0.0;
    SolveOptions opt = options;
    opt.grid = coarse;
    const Solution c = solve_instance(instance, opt);
    const double zf = value_at(fine.values, instance.eps0, instance.y0);
    const double zc = value_at(c.values, instance.eps0, instance.y0);
    return std::abs(zf - zc) / 3.0;
}

}  // namespace rsplan
