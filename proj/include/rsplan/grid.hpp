#pragma once

// Uniform tensor lattice over [-R, R]^N restricted to the open ball B_R, with
// staircase Dirichlet closure: a stencil arm that leaves the ball reads the
// field's boundary constant.

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsplan/model.hpp"

namespace rsplan {

inline constexpr int kMinNodesPerAxis = 17;

class BallGrid {
public:
    /// Throws std::invalid_argument for unsupported dimensions, a
    /// non-positive radius or fewer than kMinNodesPerAxis nodes per axis.
    BallGrid(int dim, double radius, int nodes_per_axis);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] double radius() const { return radius_; }
    [[nodiscard]] double spacing() const { return h_; }
    [[nodiscard]] int nodes_per_axis() const { return n_; }

    /// Number of interior nodes.
    [[nodiscard]] std::size_t size() const { return lattice_of_node_.size(); }

    [[nodiscard]] std::span<const double> coords(std::size_t node) const {
        return {coords_.data() + node * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    [[nodiscard]] double norm2(std::size_t node) const { return norm2_[node]; }

    /// Interior neighbour along `axis` (side 0: minus, 1: plus), or -1 when
    /// the arm leaves the ball.
    [[nodiscard]] long neighbor(std::size_t node, int axis, int side) const {
        return neighbors_[(node * dim_ + axis) * 2 + side];
    }
    [[nodiscard]] bool boundary_adjacent(std::size_t node) const { return boundary_adjacent_[node]; }
    /// Number of stencil arms of `node` that read the boundary value.
    [[nodiscard]] int boundary_arms(std::size_t node) const { return boundary_arms_[node]; }

    // Full lattice ------------------------------------------------------------

    [[nodiscard]] std::size_t lattice_size() const { return node_of_lattice_.size(); }
    [[nodiscard]] double lattice_coord(int i) const { return -radius_ + i * h_; }
    /// Linear lattice index of a multi-index (axis 0 fastest).
    [[nodiscard]] std::size_t lattice_index(std::span<const int> multi) const;
    [[nodiscard]] std::array<int, 3> lattice_multi(std::size_t lattice) const;
    /// Interior node at a lattice position, or -1.
    [[nodiscard]] long node_at_lattice(std::size_t lattice) const { return node_of_lattice_[lattice]; }
    [[nodiscard]] std::size_t lattice_of_node(std::size_t node) const { return lattice_of_node_[node]; }

    /// Largest |x| over lattice points read through boundary arms. Equals R
    /// for N = 1; can exceed R by up to one spacing for N >= 2.
    [[nodiscard]] double ghost_radius() const { return ghost_radius_; }

private:
    int dim_;
    double radius_;
    int n_;
    double h_;
    double ghost_radius_ = 0.0;
    std::vector<double> coords_;
    std::vector<double> norm2_;
    std::vector<long> neighbors_;
    std::vector<char> boundary_adjacent_;
    std::vector<int> boundary_arms_;
    std::vector<long> node_of_lattice_;
    std::vector<std::size_t> lattice_of_node_;
};

using GridPtr = std::shared_ptr<const BallGrid>;

/// Scalar field on the interior nodes; `boundary_value` closes the stencil.
struct GridField {
    GridPtr grid;
    std::vector<double> values;
    double boundary_value = 0.0;

    GridField() = default;
    GridField(GridPtr g, double fill, double boundary)
        : grid(std::move(g)), values(grid->size(), fill), boundary_value(boundary) {}
    GridField(GridPtr g, std::vector<double> v, double boundary)
        : grid(std::move(g)), values(std::move(v)), boundary_value(boundary) {}

    [[nodiscard]] std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

GridPtr build_grid(const ProblemInstance& instance, int nodes_per_axis);

/// Σ_axes (u(x+h e) − 2u(x) + u(x−h e)) / h², arms outside the ball reading
/// the field's boundary value. The result carries boundary value 0.
GridField apply_laplacian(const GridField& field);

double sup_norm(std::span<const double> v);

}  // namespace rsplan
