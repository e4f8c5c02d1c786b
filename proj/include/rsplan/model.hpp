#pragma once

// Problem data for the two-regime production-planning model: switching
// rates, discounts, volatilities, running costs and the inventory ball.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rsplan {

/// Thrown when a point or value falls outside an operation's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Economic regime of the Markov chain.
enum class Regime : std::uint8_t { one = 1, two = 2 };

constexpr std::size_t index_of(Regime r) { return r == Regime::one ? 0 : 1; }
constexpr Regime other(Regime r) { return r == Regime::one ? Regime::two : Regime::one; }
constexpr int to_int(Regime r) { return static_cast<int>(r); }
Regime regime_from_int(int value);

/// Rates and volatilities of both regimes. a1 is the rate of leaving regime 1,
/// a2 the rate of leaving regime 2.
struct RegimeParams {
    double a1 = 0.0;
    double a2 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;

    [[nodiscard]] double switch_rate(Regime r) const { return r == Regime::one ? a1 : a2; }
    [[nodiscard]] double discount(Regime r) const { return r == Regime::one ? alpha1 : alpha2; }
    /// Volatility magnitude (the sign of the diffusion coefficient is irrelevant).
    [[nodiscard]] double sigma(Regime r) const;
};

/// f(x) = m |x|^2
struct RadialQuadratic {
    double m = 0.0;
};

/// f(x) = sum_i c_i x_i^2
struct QuadraticDiagonal {
    std::vector<double> c;
};

/// f(x) = phi(|x|) with phi piecewise linear through (radii[k], values[k]);
/// extrapolated linearly past the last knot.
struct TabulatedRadial {
    std::vector<double> radii;
    std::vector<double> values;
};

/// Running inventory cost together with its declared quadratic bound M,
/// i.e. the caller's claim that f(x) <= M |x|^2.
class CostFunction {
public:
    using Form = std::variant<RadialQuadratic, QuadraticDiagonal, TabulatedRadial>;

    CostFunction() = default;

    static CostFunction radial(double m);
    static CostFunction diagonal(std::vector<double> c);
    static CostFunction tabulated(std::vector<double> radii, std::vector<double> values,
                                  double bound);

    /// Same cost with a different declared bound.
    [[nodiscard]] CostFunction with_bound(double bound) const;

    /// Unchecked evaluation.
    [[nodiscard]] double operator()(std::span<const double> x) const;

    [[nodiscard]] double bound() const { return bound_; }
    [[nodiscard]] const Form& form() const { return form_; }
    [[nodiscard]] std::string_view kind() const;

    /// Supremum of f over the closed ball of the given radius.
    [[nodiscard]] double max_over_ball(double radius) const;

    /// True for the forms whose convexity is known in closed form.
    [[nodiscard]] bool is_quadratic() const;

    /// True when f vanishes identically.
    [[nodiscard]] bool is_zero() const;

private:
    CostFunction(Form form, double bound) : form_(std::move(form)), bound_(bound) {}

    Form form_ = RadialQuadratic{0.0};
    double bound_ = 0.0;
};

struct ProblemInstance {
    int dim = 1;
    double radius = 1.0;
    RegimeParams regimes;
    CostFunction f1;
    CostFunction f2;
    std::vector<double> y0;
    Regime eps0 = Regime::one;

    [[nodiscard]] const CostFunction& cost(Regime r) const { return r == Regime::one ? f1 : f2; }

    /// Copy with a different ball radius.
    [[nodiscard]] ProblemInstance with_radius(double r) const;
};

/// The reference instance used throughout the tests: N=1, R=1, a=(1,2),
/// alpha=(0.05,0.10), sigma=(0.4,0.6), f1=|x|^2, f2=2|x|^2, y0=0, regime 1.
ProblemInstance canonical_instance();

struct Violation {
    std::string assumption;  ///< e.g. "a1 > 0"
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool valid() const { return violations.empty(); }
    /// True when some violation names the given assumption text.
    [[nodiscard]] bool mentions(std::string_view text) const;
    [[nodiscard]] std::string summary() const;
};

/// Checks every standing assumption of the model. Pure: the quadratic-bound,
/// positivity and convexity spot checks use a fixed sample set.
ValidationReport validate(const ProblemInstance& instance);

/// f(x) for |x| <= radius; throws DomainError outside the closed ball.
double eval_cost(const CostFunction& f, std::span<const double> x, double radius);

inline double squared_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

}  // namespace rsplan
