#pragma once

// Value functions z_j = −2σ_j² ln u_j of the HJB system
//
//   −a1 z2 + (a1+α1) z1 − (σ1²/2) Δz1 − f1 + ¼|∇z1|² = 0
//   −a2 z1 + (a2+α2) z2 − (σ2²/2) Δz2 − f2 + ¼|∇z2|² = 0,   z = 0 on ∂B_R,
//
// and the feedback production rate p̄ = −½∇z_j that attains the pointwise
// infimum of p·∇z + |p|².

#include <array>
#include <span>
#include <vector>

#include "rsplan/grid.hpp"
#include "rsplan/subsuper.hpp"

namespace rsplan {

struct ValueFields {
    GridField z1;
    GridField z2;
    /// Node-major gradients: grad[node * N + axis].
    std::vector<double> grad1;
    std::vector<double> grad2;

    [[nodiscard]] const GridField& z(Regime r) const { return r == Regime::one ? z1 : z2; }
    [[nodiscard]] std::span<const double> grad(Regime r, std::size_t node) const;
};

/// Central-difference gradient, stencil arms outside the ball reading the
/// field's boundary value.
std::vector<double> central_gradient(const GridField& field);

/// z_j = −2σ_j² ln u_j with boundary value 0; throws DomainError for u <= 0.
ValueFields transform_to_z(const GridField& u1, const GridField& u2, const ProblemInstance& instance);

/// Inverse map u_j = exp(−z_j / (2σ_j²)).
GridField transform_to_u(const GridField& z, double sigma);

struct FocResult {
    double value = 0.0;
    std::vector<double> argmin;
};

/// inf_p p·grad + |p|² = −¼|grad|², attained at p = −½ grad.
FocResult foc_infimum(std::span<const double> grad);

/// Residuals of the HJB system with the discrete Laplacian and central gradients.
std::array<GridField, 2> hjb_residual(const ValueFields& values, const ProblemInstance& instance);

/// −2σ_j² K_j (R_c² − |x|²), R_c the certificate's radius.
double growth_bound(const SubSuperCertificate& cert, const ProblemInstance& instance, Regime r,
                    std::span<const double> x);

/// Multilinear interpolation of z_r over the lattice, with z = 0 at lattice
/// points outside the open ball. Throws DomainError for |x| > R.
double value_at(const ValueFields& values, Regime r, std::span<const double> x);

/// Feedback policy on the full lattice of the grid.
class PolicyField {
public:
    PolicyField() = default;
    explicit PolicyField(const ValueFields& values);

    [[nodiscard]] int dim() const { return grid_->dim(); }
    [[nodiscard]] const GridPtr& grid() const { return grid_; }

    /// Policy at an interior node: exactly −½ of the node gradient.
    [[nodiscard]] std::span<const double> at_node(Regime r, std::size_t node) const;

    /// Multilinear interpolation of the lattice policy; throws DomainError
    /// outside the closed ball. Only the first dim() entries are meaningful.
    [[nodiscard]] std::array<double, 3> operator()(Regime r, std::span<const double> x) const;

    /// max over lattice points and regimes of |p̄|.
    [[nodiscard]] double max_norm() const;

private:
    GridPtr grid_;
    // lattice-major: lattice_[j][lat * N + axis]
    std::array<std::vector<double>, 2> lattice_;
    // interpolation constants
    int dim_ = 1;
    int last_cell_ = 0;
    double radius_ = 0.0;
    double inv_h_ = 0.0;
    std::array<std::size_t, 3> strides_{};
};

PolicyField extract_policy(const ValueFields& values);

}  // namespace rsplan
