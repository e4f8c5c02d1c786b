#include "rsplan/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rsplan {

Regime regime_from_int(int value) {
    if (value == 1) return Regime::one;
    if (value == 2) return Regime::two;
    throw DomainError("regime must be 1 or 2, got " + std::to_string(value));
}

double RegimeParams::sigma(Regime r) const {
    return std::abs(r == Regime::one ? sigma1 : sigma2);
}

// ---------------------------------------------------------------------------
// CostFunction

CostFunction CostFunction::radial(double m) { return CostFunction(RadialQuadratic{m}, m); }

CostFunction CostFunction::diagonal(std::vector<double> c) {
    double bound = c.empty() ? 0.0 : *std::max_element(c.begin(), c.end());
    return CostFunction(QuadraticDiagonal{std::move(c)}, bound);
}

CostFunction CostFunction::tabulated(std::vector<double> radii, std::vector<double> values,
                                     double bound) {
    return CostFunction(TabulatedRadial{std::move(radii), std::move(values)}, bound);
}

CostFunction CostFunction::with_bound(double bound) const {
    CostFunction copy = *this;
    copy.bound_ = bound;
    return copy;
}

namespace {

double tabulated_profile(const TabulatedRadial& t, double r) {
    const auto& rs = t.radii;
    const auto& vs = t.values;
    if (rs.size() < 2) return vs.empty() ? 0.0 : vs.front();
    auto it = std::upper_bound(rs.begin(), rs.end(), r);
    std::size_t k = it == rs.begin() ? 0 : static_cast<std::size_t>(it - rs.begin()) - 1;
    k = std::min(k, rs.size() - 2);
    double w = (r - rs[k]) / (rs[k + 1] - rs[k]);
    return vs[k] + w * (vs[k + 1] - vs[k]);
}

}  // namespace

double CostFunction::operator()(std::span<const double> x) const {
    return std::visit(
        [&](const auto& form) -> double {
            using T = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<T, RadialQuadratic>) {
                return form.m * squared_norm(x);
            } else if constexpr (std::is_same_v<T, QuadraticDiagonal>) {
                double s = 0.0;
                for (std::size_t i = 0; i < x.size() && i < form.c.size(); ++i)
                    s += form.c[i] * x[i] * x[i];
                return s;
            } else {
                return tabulated_profile(form, std::sqrt(squared_norm(x)));
            }
        },
        form_);
}

std::string_view CostFunction::kind() const {
    switch (form_.index()) {
        case 0: return "radial_quadratic";
        case 1: return "quadratic_diagonal";
        default: return "tabulated_radial";
    }
}

double CostFunction::max_over_ball(double radius) const {
    return std::visit(
        [&](const auto& form) -> double {
            using T = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<T, RadialQuadratic>) {
                return std::max(form.m, 0.0) * radius * radius;
            } else if constexpr (std::is_same_v<T, QuadraticDiagonal>) {
                double c = 0.0;
                for (double ci : form.c) c = std::max(c, ci);
                return c * radius * radius;
            } else {
                // piecewise linear: the maximum sits on a knot or at the radius
                double m = tabulated_profile(form, radius);
                for (std::size_t k = 0; k < form.radii.size(); ++k)
                    if (form.radii[k] <= radius) m = std::max(m, form.values[k]);
                return m;
            }
        },
        form_);
}

bool CostFunction::is_quadratic() const { return form_.index() != 2; }

bool CostFunction::is_zero() const {
    return std::visit(
        [](const auto& form) -> bool {
            using T = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<T, RadialQuadratic>) {
                return form.m == 0.0;
            } else if constexpr (std::is_same_v<T, QuadraticDiagonal>) {
                return std::all_of(form.c.begin(), form.c.end(), [](double c) { return c == 0.0; });
            } else {
                return std::all_of(form.values.begin(), form.values.end(),
                                   [](double v) { return v == 0.0; });
            }
        },
        form_);
}

double eval_cost(const CostFunction& f, std::span<const double> x, double radius) {
    double r2 = squared_norm(x);
    if (!(r2 <= radius * radius * (1.0 + 1e-12))) {
        std::ostringstream msg;
        msg << "cost evaluated outside the closed ball: |x| = " << std::sqrt(r2) << " > R = "
            << radius;
        throw DomainError(msg.str());
    }
    return f(x);
}

// ---------------------------------------------------------------------------
// ProblemInstance

ProblemInstance ProblemInstance::with_radius(double r) const {
    ProblemInstance copy = *this;
    copy.radius = r;
    return copy;
}

ProblemInstance canonical_instance() {
    ProblemInstance inst;
    inst.dim = 1;
    inst.radius = 1.0;
    inst.regimes = RegimeParams{1.0, 2.0, 0.05, 0.10, 0.4, 0.6};
    inst.f1 = CostFunction::radial(1.0);
    inst.f2 = CostFunction::radial(2.0);
    inst.y0 = {0.0};
    inst.eps0 = Regime::one;
    return inst;
}

// ---------------------------------------------------------------------------
// validation

bool ValidationReport::mentions(std::string_view text) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) {
        return v.assumption.find(text) != std::string::npos ||
               v.detail.find(text) != std::string::npos;
    });
}

std::string ValidationReport::summary() const {
    if (violations.empty()) return "all assumptions hold";
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) out << "; ";
        out << violations[i].assumption << " violated";
        if (!violations[i].detail.empty()) out << " (" << violations[i].detail << ")";
    }
    return out.str();
}

namespace {

std::string format_point(std::span<const double> x) {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
    out << ")";
    return out.str();
}

/// Fixed sample of the closed ball: axis points first (outermost first), then
/// a seeded uniform cloud.
std::vector<std::vector<double>> ball_samples(int dim, double radius, std::size_t cloud) {
    std::vector<std::vector<double>> pts;
    for (double frac : {1.0, -1.0, 0.5, -0.5}) {
        for (int axis = 0; axis < dim; ++axis) {
            std::vector<double> p(dim, 0.0);
            p[axis] = frac * radius;
            pts.push_back(std::move(p));
        }
    }
    pts.emplace_back(dim, 0.0);
    std::mt19937_64 rng(0x5eed5eedULL);
    std::uniform_real_distribution<double> coord(-radius, radius);
    while (pts.size() < cloud) {
        std::vector<double> p(dim);
        for (auto& v : p) v = coord(rng);
        if (squared_norm(p) <= radius * radius) pts.push_back(std::move(p));
    }
    return pts;
}

void check_cost(const CostFunction& f, const std::string& name, const std::string& bound_name,
                int dim, double radius, ValidationReport& report) {
    auto add = [&](std::string assumption, std::string detail) {
        report.violations.push_back({std::move(assumption), std::move(detail)});
    };
    const double M = f.bound();
    if (!std::isfinite(M) || M < 0.0) {
        add(bound_name + " >= 0", bound_name + " = " + std::to_string(M));
        return;
    }
    bool shape_ok = std::visit(
        [&](const auto& form) -> bool {
            using T = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<T, RadialQuadratic>) {
                if (!std::isfinite(form.m) || form.m < 0.0) {
                    add(name + " coefficient m >= 0", "m = " + std::to_string(form.m));
                    return false;
                }
            } else if constexpr (std::is_same_v<T, QuadraticDiagonal>) {
                if (form.c.size() != static_cast<std::size_t>(dim)) {
                    add(name + " has N coefficients",
                        "got " + std::to_string(form.c.size()) + " for N = " + std::to_string(dim));
                    return false;
                }
                for (double c : form.c) {
                    if (!std::isfinite(c) || c < 0.0) {
                        add(name + " coefficients c_i >= 0", "c_i = " + std::to_string(c));
                        return false;
                    }
                }
            } else {
                const auto& rs = form.radii;
                if (rs.size() < 2 || rs.size() != form.values.size()) {
                    add(name + " table well formed", "need >= 2 matching radii/values");
                    return false;
                }
                if (rs.front() != 0.0) {
                    add(name + " table starts at r = 0", "first radius " + std::to_string(rs.front()));
                    return false;
                }
                for (std::size_t k = 1; k < rs.size(); ++k) {
                    if (!(rs[k] > rs[k - 1])) {
                        add(name + " table radii increasing", "at knot " + std::to_string(k));
                        return false;
                    }
                }
            }
            return true;
        },
        f.form());
    if (!shape_ok) return;

    const auto samples = ball_samples(dim, radius, 2000);
    for (const auto& x : samples) {
        double v = f(x);
        if (!std::isfinite(v) || v < 0.0) {
            add(name + "(x) >= 0", "at sampled x = " + format_point(x) + ", value " + std::to_string(v));
            break;
        }
    }
    for (const auto& x : samples) {
        double v = f(x);
        double cap = M * squared_norm(x);
        if (v > cap + 1e-12 * (1.0 + cap)) {
            std::ostringstream detail;
            detail << "quadratic bound fails at sampled x = " << format_point(x) << ": " << name
                   << " = " << v << " > " << bound_name << "|x|^2 = " << cap;
            add(name + "(x) <= " + bound_name + "|x|^2", detail.str());
            break;
        }
    }
    // convexity along segments between consecutive samples
    for (std::size_t i = 0; i + 1 < samples.size(); i += 2) {
        const auto& x = samples[i];
        const auto& y = samples[i + 1];
        bool failed = false;
        for (double lam : {0.25, 0.5, 0.75}) {
            std::vector<double> mid(dim);
            for (int k = 0; k < dim; ++k) mid[k] = lam * x[k] + (1.0 - lam) * y[k];
            double lhs = f(mid);
            double rhs = lam * f(x) + (1.0 - lam) * f(y);
            if (lhs > rhs + 1e-12 * (1.0 + std::abs(rhs))) {
                add(name + " convex", "on segment " + format_point(x) + " -- " + format_point(y));
                failed = true;
                break;
            }
        }
        if (failed) break;
    }
}

}  // namespace

ValidationReport validate(const ProblemInstance& inst) {
    ValidationReport report;
    auto add = [&](std::string assumption, std::string detail) {
        report.violations.push_back({std::move(assumption), std::move(detail)});
    };
    auto num = [](double v) {
        std::ostringstream s;
        s << v;
        return s.str();
    };

    bool geometry_ok = true;
    if (inst.dim < 1 || inst.dim > 3) {
        add("1 <= N <= 3", "N = " + std::to_string(inst.dim));
        geometry_ok = false;
    }
    if (!std::isfinite(inst.radius) || inst.radius <= 0.0) {
        add("R > 0", "R = " + num(inst.radius));
        geometry_ok = false;
    }

    const auto& rp = inst.regimes;
    if (!std::isfinite(rp.a1) || rp.a1 <= 0.0) add("a1 > 0", "a1 = " + num(rp.a1));
    if (!std::isfinite(rp.a2) || rp.a2 <= 0.0) add("a2 > 0", "a2 = " + num(rp.a2));
    if (!std::isfinite(rp.alpha1) || rp.alpha1 < 0.0) add("alpha1 >= 0", "alpha1 = " + num(rp.alpha1));
    if (!std::isfinite(rp.alpha2) || rp.alpha2 < 0.0) add("alpha2 >= 0", "alpha2 = " + num(rp.alpha2));
    if (!std::isfinite(rp.sigma1) || rp.sigma1 == 0.0) add("sigma1 != 0", "sigma1 = " + num(rp.sigma1));
    if (!std::isfinite(rp.sigma2) || rp.sigma2 == 0.0) add("sigma2 != 0", "sigma2 = " + num(rp.sigma2));

    if (inst.eps0 != Regime::one && inst.eps0 != Regime::two) add("eps0 in {1, 2}", "");

    if (geometry_ok) {
        if (inst.y0.size() != static_cast<std::size_t>(inst.dim)) {
            add("y0 has N components", "got " + std::to_string(inst.y0.size()));
        } else {
            bool finite = std::all_of(inst.y0.begin(), inst.y0.end(),
                                      [](double v) { return std::isfinite(v); });
            double r = std::sqrt(squared_norm(inst.y0));
            if (!finite || !(r < inst.radius)) add("|y0| < R", "|y0| = " + num(r) + ", R = " + num(inst.radius));
        }
        check_cost(inst.f1, "f1", "M1", inst.dim, inst.radius, report);
        check_cost(inst.f2, "f2", "M2", inst.dim, inst.radius, report);
    }
    return report;
}

}  // namespace rsplan
