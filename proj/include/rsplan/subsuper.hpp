#pragma once

// Ordered sub/super-solution pair for the exponentially transformed system
//
//   Δu1 = g1(x, u1, u2),   Δu2 = g2(x, u1, u2)   in B_R,   u1 = u2 = 1 on ∂B_R,
//
// with
//
//   g1(x,t,s) = t f1(x)/σ1⁴ + (2(a1+α1)/σ1²) t ln t − (2 a1 σ2²/σ1⁴) t ln s
//   g2(x,t,s) = s f2(x)/σ2⁴ + (2(a2+α2)/σ2²) s ln s − (2 a2 σ1²/σ2⁴) s ln t.
//
// The sub-solution is u_j = exp(K_j (R² − |x|²)) with K_j < 0, the super-solution
// is the constant 1. Substituting the sub-solution and using f_j <= M_j |x|²
// reduces the differential inequalities to four scalar inequalities in (K1, K2):
//
//   (1) 4K1² + c1 K1 − M1/σ1⁴ − d1 K2 >= 0
//   (2) 4K2² + c2 K2 − M2/σ2⁴ − d2 K1 >= 0
//   (3) −(c1 R² + 2N) K1 + d1 R² K2  >= 0
//   (4) −(c2 R² + 2N) K2 + d2 R² K1  >= 0
//
// where c_j = 2(a_j+α_j)/σ_j² and d1 = 2a1σ2²/σ1⁴, d2 = 2a2σ1²/σ2⁴.

#include <array>
#include <span>
#include <stdexcept>
#include <string>

#include "rsplan/model.hpp"

namespace rsplan {

/// Coefficients of the nonlinear right-hand sides g1, g2.
struct CouplingTerms {
    double inv_sigma1_4 = 0.0;  // 1/σ1⁴
    double inv_sigma2_4 = 0.0;  // 1/σ2⁴
    double c1 = 0.0;            // 2(a1+α1)/σ1²
    double c2 = 0.0;            // 2(a2+α2)/σ2²
    double d1 = 0.0;            // 2 a1 σ2²/σ1⁴
    double d2 = 0.0;            // 2 a2 σ1²/σ2⁴

    explicit CouplingTerms(const RegimeParams& p);

    /// g1 with t = u1, s = u2 and f1x = f1(x).
    [[nodiscard]] double g1(double f1x, double t, double s) const;
    /// g2 with t = u1, s = u2 and f2x = f2(x).
    [[nodiscard]] double g2(double f2x, double t, double s) const;
    [[nodiscard]] double dg1_dt(double f1x, double t, double s) const;
    [[nodiscard]] double dg2_ds(double f2x, double t, double s) const;
};

struct SubSuperCertificate {
    double k1 = 0.0;
    double k2 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    /// Left-hand sides of inequalities (1)-(4) at (k1, k2).
    std::array<double, 4> ineq_margins{};
    /// sup |∂g1/∂t| and sup |∂g2/∂s| over the sub/super box and the ball.
    std::array<double, 2> lipschitz_bounds{};
    /// Radius of the ball the constants were certified on.
    double radius = 0.0;
    /// Number of K2 doublings the selection needed.
    int deepenings = 0;

    [[nodiscard]] double k(Regime r) const { return r == Regime::one ? k1 : k2; }
    [[nodiscard]] double lambda(Regime r) const { return r == Regime::one ? lambda1 : lambda2; }
    /// Lower end e^{K_j R²} of the box the iterates live in.
    [[nodiscard]] double box_lo(Regime r) const;
};

/// Certification could not be completed; carries the 1-based index of the
/// inequality that kept failing.
class CertificationError : public std::runtime_error {
public:
    CertificationError(int inequality, const std::string& message)
        : std::runtime_error(message), inequality_(inequality) {}

    [[nodiscard]] int inequality() const { return inequality_; }

private:
    int inequality_;
};

/// Left-hand sides of inequalities (1)-(4).
std::array<double, 4> ineq_margins(const ProblemInstance& instance, double k1, double k2);

/// (1/(4σ_j²)) (α_j + a_j + sqrt((α_j + a_j)² + 4 M_j)): the smallest −K_j for
/// which the pure quadratic part of inequality (1) resp. (2) is nonnegative.
double quadratic_root_bound(const ProblemInstance& instance, Regime r);

/// Closed interval of admissible −K1 values for a given K2, from (3) and (4).
struct K1Interval {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] bool empty() const { return lo > hi; }
};
K1Interval k1_interval(const ProblemInstance& instance, double k2);

/// [c2 R² + 2N][c1 R² + 2N] − (d1 R²)(d2 R²); nonnegative for every valid
/// instance, which is what makes the K1 interval nonempty.
double product_inequality_slack(const ProblemInstance& instance);

struct Shifts {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::array<double, 2> lipschitz_bounds{};
};

/// Safety factor applied to the Lipschitz bounds when choosing the shifts.
inline constexpr double kShiftSafetyFactor = 1.1;

/// Shifts Λ1, Λ2 < 0 with −Λ1 >= sup |∂g1/∂t| and −Λ2 >= sup |∂g2/∂s| over
/// x in B_R, t in [e^{K1R²}, 1], s in [e^{K2R²}, 1] (times the safety factor).
/// Covering the derivative from both sides makes t -> g1(x,t,s) + Λ1 t
/// nonincreasing, which is what the monotone iteration needs.
Shifts choose_shifts(const ProblemInstance& instance, double k1, double k2);

/// Full certificate for the instance's ball.
SubSuperCertificate choose_constants(const ProblemInstance& instance);

/// e^{K_j (R² − |x|²)} with R the certificate's radius.
double eval_subsolution(const SubSuperCertificate& cert, const ProblemInstance& instance, Regime r,
                        std::span<const double> x);

/// The constant super-solution 1.
double eval_supersolution(Regime r, std::span<const double> x);

}  // namespace rsplan
