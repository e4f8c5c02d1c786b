#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rsplan/grid.hpp"

using namespace rsplan;

namespace {

ProblemInstance instance_in(int dim) {
    ProblemInstance inst = canonical_instance();
    inst.dim = dim;
    inst.y0.assign(dim, 0.0);
    return inst;
}

}  // namespace

TEST_CASE("1D grid with 17 nodes") {
    const GridPtr g = build_grid(instance_in(1), 17);
    CHECK(g->size() == 15);
    CHECK(g->spacing() == 2.0 / 16.0);
    CHECK(g->ghost_radius() == 1.0);
    for (std::size_t i = 0; i < g->size(); ++i) {
        const bool outer = i == 0 || i == g->size() - 1;
        CHECK(g->boundary_adjacent(i) == outer);
        CHECK(g->boundary_arms(i) == (outer ? 1 : 0));
        CHECK(std::abs(g->coords(i)[0]) < 1.0);
    }
}

TEST_CASE("interior counts match direct enumeration") {
    for (int dim = 1; dim <= 3; ++dim) {
        for (int n : {17, 18, 33}) {
            const GridPtr g = build_grid(instance_in(dim), n);
            CHECK(static_cast<long>(g->size()) == oracle::count_ball_points(dim, 1.0, n));
            for (std::size_t i = 0; i < g->size(); ++i) CHECK(g->norm2(i) < 1.0);
        }
    }
}

TEST_CASE("neighbour structure is consistent") {
    const GridPtr g = build_grid(instance_in(2), 33);
    const double h = g->spacing();
    for (std::size_t i = 0; i < g->size(); ++i) {
        int arms = 0;
        for (int axis = 0; axis < 2; ++axis) {
            for (int side = 0; side < 2; ++side) {
                const long nb = g->neighbor(i, axis, side);
                if (nb < 0) {
                    ++arms;
                    continue;
                }
                const double step = g->coords(nb)[axis] - g->coords(i)[axis];
                CHECK(step == doctest::Approx(side == 0 ? -h : h));
                CHECK(g->neighbor(nb, axis, 1 - side) == static_cast<long>(i));
            }
        }
        CHECK(g->boundary_arms(i) == arms);
        CHECK(g->boundary_adjacent(i) == (arms > 0));
        CHECK(g->node_at_lattice(g->lattice_of_node(i)) == static_cast<long>(i));
    }
    CHECK(g->ghost_radius() >= 1.0);
    CHECK(g->ghost_radius() <= 1.0 + h);
}

TEST_CASE("too few nodes or bad dimension are rejected") {
    CHECK_THROWS_AS(build_grid(instance_in(1), 8), std::invalid_argument);
    CHECK_THROWS_AS(BallGrid(4, 1.0, 17), std::invalid_argument);
    CHECK_THROWS_AS(BallGrid(1, 0.0, 17), std::invalid_argument);
}

TEST_CASE("Laplacian of a constant vanishes") {
    for (int dim = 1; dim <= 3; ++dim) {
        const GridPtr g = build_grid(instance_in(dim), 17);
        const GridField lap = apply_laplacian(GridField(g, 0.7, 0.7));
        CHECK(sup_norm(lap.values) == 0.0);
    }
}

TEST_CASE("Laplacian is exact on quadratics away from the staircase") {
    const GridPtr g1 = build_grid(instance_in(1), 129);
    GridField q1(g1, 0.0, 1.0);
    for (std::size_t i = 0; i < g1->size(); ++i) q1[i] = g1->norm2(i);
    const GridField l1 = apply_laplacian(q1);
    for (std::size_t i = 0; i < g1->size(); ++i) CHECK(l1[i] == doctest::Approx(2.0).epsilon(1e-9));

    const GridPtr g2 = build_grid(instance_in(2), 65);
    GridField q2(g2, 0.0, 1.0);
    for (std::size_t i = 0; i < g2->size(); ++i) q2[i] = g2->norm2(i);
    const GridField l2 = apply_laplacian(q2);
    for (std::size_t i = 0; i < g2->size(); ++i) {
        if (!g2->boundary_adjacent(i)) CHECK(l2[i] == doctest::Approx(4.0).epsilon(1e-9));
    }
}
