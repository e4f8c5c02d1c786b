#include "rsplan/hjb.hpp"

#include <algorithm>
#include <cmath>

namespace rsplan {

std::span<const double> ValueFields::grad(Regime r, std::size_t node) const {
    const auto& g = r == Regime::one ? grad1 : grad2;
    const auto n = static_cast<std::size_t>(z1.grid->dim());
    return {g.data() + node * n, n};
}

std::vector<double> central_gradient(const GridField& field) {
    const BallGrid& g = *field.grid;
    const int n = g.dim();
    const double inv_2h = 1.0 / (2.0 * g.spacing());
    std::vector<double> out(g.size() * n);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (int d = 0; d < n; ++d) {
            const long lo = g.neighbor(i, d, 0);
            const long hi = g.neighbor(i, d, 1);
            const double zl = lo >= 0 ? field[lo] : field.boundary_value;
            const double zr = hi >= 0 ? field[hi] : field.boundary_value;
            out[i * n + d] = (zr - zl) * inv_2h;
        }
    }
    return out;
}

ValueFields transform_to_z(const GridField& u1, const GridField& u2, const ProblemInstance& instance) {
    auto to_z = [](const GridField& u, double sigma) {
        GridField z(u.grid, 0.0, 0.0);
        const double scale = -2.0 * sigma * sigma;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!(u[i] > 0.0)) throw DomainError("transform needs u > 0, got " + std::to_string(u[i]));
            z[i] = scale * std::log(u[i]);
        }
        return z;
    };
    ValueFields v;
    v.z1 = to_z(u1, instance.regimes.sigma(Regime::one));
    v.z2 = to_z(u2, instance.regimes.sigma(Regime::two));
    v.grad1 = central_gradient(v.z1);
    v.grad2 = central_gradient(v.z2);
    return v;
}

GridField transform_to_u(const GridField& z, double sigma) {
    GridField u(z.grid, 0.0, 1.0);
    const double inv = -1.0 / (2.0 * sigma * sigma);
    for (std::size_t i = 0; i < z.size(); ++i) u[i] = std::exp(inv * z[i]);
    u.boundary_value = std::exp(inv * z.boundary_value);
    return u;
}

FocResult foc_infimum(std::span<const double> grad) {
    FocResult out;
    out.argmin.resize(grad.size());
    double norm2 = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        out.argmin[i] = -0.5 * grad[i];
        norm2 += grad[i] * grad[i];
    }
    out.value = -0.25 * norm2;
    return out;
}

std::array<GridField, 2> hjb_residual(const ValueFields& values, const ProblemInstance& instance) {
    const BallGrid& g = *values.z1.grid;
    const RegimeParams& p = instance.regimes;
    const GridField lap1 = apply_laplacian(values.z1);
    const GridField lap2 = apply_laplacian(values.z2);
    std::array<GridField, 2> r{GridField(values.z1.grid, 0.0, 0.0), GridField(values.z1.grid, 0.0, 0.0)};
    const double s1 = p.sigma(Regime::one);
    const double s2 = p.sigma(Regime::two);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.coords(i);
        const double q1 = squared_norm(values.grad(Regime::one, i));
        const double q2 = squared_norm(values.grad(Regime::two, i));
        r[0][i] = -p.a1 * values.z2[i] + (p.a1 + p.alpha1) * values.z1[i] - 0.5 * s1 * s1 * lap1[i] -
                  eval_cost(instance.f1, x, instance.radius) + 0.25 * q1;
        r[1][i] = -p.a2 * values.z1[i] + (p.a2 + p.alpha2) * values.z2[i] - 0.5 * s2 * s2 * lap2[i] -
                  eval_cost(instance.f2, x, instance.radius) + 0.25 * q2;
    }
    return r;
}

double growth_bound(const SubSuperCertificate& cert, const ProblemInstance& instance, Regime r,
                    std::span<const double> x) {
    const double s = instance.regimes.sigma(r);
    return -2.0 * s * s * cert.k(r) * (cert.radius * cert.radius - squared_norm(x));
}

namespace {

struct Cell {
    std::array<int, 3> base{};
    std::array<double, 3> frac{};
};

Cell locate(const BallGrid& g, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(g.dim())) throw DomainError("query point has the wrong dimension");
    const double R = g.radius();
    if (!(squared_norm(x) <= R * R * (1.0 + 1e-12))) throw DomainError("query point outside the closed ball");
    Cell c;
    const int last = g.nodes_per_axis() - 2;
    for (int d = 0; d < g.dim(); ++d) {
        const double s = (x[d] + R) / g.spacing();
        const int b = std::clamp(static_cast<int>(std::floor(s)), 0, last);
        c.base[d] = b;
        c.frac[d] = std::clamp(s - b, 0.0, 1.0);
    }
    return c;
}

/// Calls fn(lattice index, weight) for the 2^N corners of the cell.
template <typename Fn>
void for_corners(const BallGrid& g, const Cell& c, Fn&& fn) {
    const int n = g.dim();
    for (int corner = 0; corner < (1 << n); ++corner) {
        std::array<int, 3> m{};
        double w = 1.0;
        for (int d = 0; d < n; ++d) {
            const int bit = (corner >> d) & 1;
            m[d] = c.base[d] + bit;
            w *= bit ? c.frac[d] : 1.0 - c.frac[d];
        }
        if (w == 0.0) continue;
        fn(g.lattice_index({m.data(), static_cast<std::size_t>(n)}), w);
    }
}

}  // namespace

double value_at(const ValueFields& values, Regime r, std::span<const double> x) {
    const BallGrid& g = *values.z1.grid;
    const GridField& z = values.z(r);
    const Cell c = locate(g, x);
    double acc = 0.0;
    for_corners(g, c, [&](std::size_t lat, double w) {
        const long node = g.node_at_lattice(lat);
        acc += w * (node >= 0 ? z[node] : z.boundary_value);
    });
    return acc;
}

PolicyField::PolicyField(const ValueFields& values) : grid_(values.z1.grid) {
    const BallGrid& g = *grid_;
    const int n = g.dim();
    dim_ = n;
    last_cell_ = g.nodes_per_axis() - 2;
    radius_ = g.radius();
    inv_h_ = 1.0 / g.spacing();
    std::size_t stride = 1;
    for (int d = 0; d < n; ++d) {
        strides_[d] = stride;
        stride *= static_cast<std::size_t>(g.nodes_per_axis());
    }
    for (int j = 0; j < 2; ++j) {
        const Regime r = j == 0 ? Regime::one : Regime::two;
        const GridField& z = values.z(r);
        auto& lat = lattice_[j];
        lat.assign(g.lattice_size() * n, 0.0);
        for (std::size_t l = 0; l < g.lattice_size(); ++l) {
            const long node = g.node_at_lattice(l);
            if (node >= 0) {
                const auto grad = values.grad(r, static_cast<std::size_t>(node));
                for (int d = 0; d < n; ++d) lat[l * n + d] = -0.5 * grad[d];
                continue;
            }
            // Lattice point on or outside the sphere: one-sided difference
            // into the ball with z = 0 at the point itself.
            const auto multi = g.lattice_multi(l);
            for (int d = 0; d < n; ++d) {
                auto interior = [&](int step) -> long {
                    auto m = multi;
                    m[d] += step;
                    if (m[d] < 0 || m[d] >= g.nodes_per_axis()) return -1;
                    return g.node_at_lattice(g.lattice_index({m.data(), static_cast<std::size_t>(n)}));
                };
                double deriv = 0.0;
                for (int dir : {1, -1}) {
                    const long n1 = interior(dir);
                    if (n1 < 0) continue;
                    const long n2 = interior(2 * dir);
                    // derivative along +dir, converted to the +axis direction
                    const double along = n2 >= 0 ? (4.0 * z[n1] - z[n2] - 3.0 * z.boundary_value) /
                                                       (2.0 * g.spacing())
                                                 : (z[n1] - z.boundary_value) / g.spacing();
                    deriv = dir * along;
                    break;
                }
                lat[l * n + d] = -0.5 * deriv;
            }
        }
    }
}

std::span<const double> PolicyField::at_node(Regime r, std::size_t node) const {
    const auto n = static_cast<std::size_t>(grid_->dim());
    return {lattice_[index_of(r)].data() + grid_->lattice_of_node(node) * n, n};
}

std::array<double, 3> PolicyField::operator()(Regime r, std::span<const double> x) const {
    // Hot path of the simulator: locate/for_corners with the lattice strides
    // precomputed.
    const int n = dim_;
    if (x.size() != static_cast<std::size_t>(n)) throw DomainError("query point has the wrong dimension");
    if (!(squared_norm(x) <= radius_ * radius_ * (1.0 + 1e-12)))
        throw DomainError("query point outside the closed ball");
    std::size_t base = 0;
    std::array<double, 3> frac{};
    for (int d = 0; d < n; ++d) {
        const double s = (x[d] + radius_) * inv_h_;
        const int b = std::clamp(static_cast<int>(s), 0, last_cell_);  // s >= 0 up to rounding
        frac[d] = std::clamp(s - b, 0.0, 1.0);
        base += static_cast<std::size_t>(b) * strides_[d];
    }
    const double* lat = lattice_[index_of(r)].data();
    std::array<double, 3> out{0.0, 0.0, 0.0};
    if (n == 1) {
        out[0] = (1.0 - frac[0]) * lat[base] + frac[0] * lat[base + 1];
        return out;
    }
    for (int corner = 0; corner < (1 << n); ++corner) {
        std::size_t l = base;
        double w = 1.0;
        for (int d = 0; d < n; ++d) {
            if ((corner >> d) & 1) {
                l += strides_[d];
                w *= frac[d];
            } else {
                w *= 1.0 - frac[d];
            }
        }
        const double* p = lat + l * static_cast<std::size_t>(n);
        for (int d = 0; d < n; ++d) out[d] += w * p[d];
    }
    return out;
}

double PolicyField::max_norm() const {
    const auto n = static_cast<std::size_t>(grid_->dim());
    double best = 0.0;
    for (const auto& lat : lattice_)
        for (std::size_t l = 0; l + n <= lat.size(); l += n)
            best = std::max(best, std::sqrt(squared_norm({lat.data() + l, n})));
    return best;
}

PolicyField extract_policy(const ValueFields& values) { return PolicyField(values); }

}  // namespace rsplan
