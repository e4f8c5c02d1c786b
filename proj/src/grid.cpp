#include "rsplan/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rsplan {

BallGrid::BallGrid(int dim, double radius, int nodes_per_axis)
    : dim_(dim), radius_(radius), n_(nodes_per_axis), h_(0.0) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("grid radius must be positive");
    if (nodes_per_axis < kMinNodesPerAxis)
        throw std::invalid_argument("nodes per axis must be at least " + std::to_string(kMinNodesPerAxis) +
                                    ", got " + std::to_string(nodes_per_axis));
    h_ = 2.0 * radius / (nodes_per_axis - 1);

    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(n_);
    node_of_lattice_.assign(total, -1);

    const double inside = radius * radius * (1.0 - 1e-12);
    for (std::size_t lat = 0; lat < total; ++lat) {
        auto multi = lattice_multi(lat);
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            double x = lattice_coord(multi[d]);
            r2 += x * x;
        }
        if (r2 < inside) {
            node_of_lattice_[lat] = static_cast<long>(lattice_of_node_.size());
            lattice_of_node_.push_back(lat);
            for (int d = 0; d < dim; ++d) coords_.push_back(lattice_coord(multi[d]));
            norm2_.push_back(r2);
        }
    }

    const std::size_t nodes = lattice_of_node_.size();
    neighbors_.assign(nodes * dim * 2, -1);
    boundary_adjacent_.assign(nodes, 0);
    boundary_arms_.assign(nodes, 0);
    for (std::size_t node = 0; node < nodes; ++node) {
        auto multi = lattice_multi(lattice_of_node_[node]);
        for (int d = 0; d < dim; ++d) {
            for (int side = 0; side < 2; ++side) {
                auto m = multi;
                m[d] += side == 0 ? -1 : 1;
                long nb = -1;
                if (m[d] >= 0 && m[d] < n_) nb = node_of_lattice_[lattice_index({m.data(), static_cast<std::size_t>(dim)})];
                neighbors_[(node * dim + d) * 2 + side] = nb;
                if (nb < 0) {
                    boundary_adjacent_[node] = 1;
                    ++boundary_arms_[node];
                    double r2 = 0.0;
                    for (int k = 0; k < dim; ++k) {
                        double x = lattice_coord(m[k]);
                        r2 += x * x;
                    }
                    ghost_radius_ = std::max(ghost_radius_, std::sqrt(r2));
                }
            }
        }
    }
    // exact for the 1D lattice, whose end points sit on the sphere
    if (dim == 1) ghost_radius_ = radius;
}

std::size_t BallGrid::lattice_index(std::span<const int> multi) const {
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (int d = 0; d < dim_; ++d) {
        idx += static_cast<std::size_t>(multi[d]) * stride;
        stride *= static_cast<std::size_t>(n_);
    }
    return idx;
}

std::array<int, 3> BallGrid::lattice_multi(std::size_t lattice) const {
    std::array<int, 3> m{0, 0, 0};
    for (int d = 0; d < dim_; ++d) {
        m[d] = static_cast<int>(lattice % static_cast<std::size_t>(n_));
        lattice /= static_cast<std::size_t>(n_);
    }
    return m;
}

GridPtr build_grid(const ProblemInstance& instance, int nodes_per_axis) {
    return std::make_shared<const BallGrid>(instance.dim, instance.radius, nodes_per_axis);
}

GridField apply_laplacian(const GridField& field) {
    const BallGrid& g = *field.grid;
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    GridField out(field.grid, 0.0, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double acc = 0.0;
        const double ui = field.values[i];
        for (int d = 0; d < g.dim(); ++d) {
            const long lo = g.neighbor(i, d, 0);
            const long hi = g.neighbor(i, d, 1);
            const double ul = lo >= 0 ? field.values[lo] : field.boundary_value;
            const double ur = hi >= 0 ? field.values[hi] : field.boundary_value;
            acc += ul - 2.0 * ui + ur;
        }
        out.values[i] = acc * inv_h2;
    }
    return out;
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace rsplan
