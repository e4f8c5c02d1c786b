#include "rsplan/subsuper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rsplan {

CouplingTerms::CouplingTerms(const RegimeParams& p) {
    const double s1 = p.sigma(Regime::one);
    const double s2 = p.sigma(Regime::two);
    const double s1_2 = s1 * s1;
    const double s2_2 = s2 * s2;
    inv_sigma1_4 = 1.0 / (s1_2 * s1_2);
    inv_sigma2_4 = 1.0 / (s2_2 * s2_2);
    c1 = 2.0 * (p.a1 + p.alpha1) / s1_2;
    c2 = 2.0 * (p.a2 + p.alpha2) / s2_2;
    d1 = 2.0 * p.a1 * s2_2 * inv_sigma1_4;
    d2 = 2.0 * p.a2 * s1_2 * inv_sigma2_4;
}

double CouplingTerms::g1(double f1x, double t, double s) const {
    return t * (f1x * inv_sigma1_4 + c1 * std::log(t) - d1 * std::log(s));
}

double CouplingTerms::g2(double f2x, double t, double s) const {
    return s * (f2x * inv_sigma2_4 + c2 * std::log(s) - d2 * std::log(t));
}

double CouplingTerms::dg1_dt(double f1x, double t, double s) const {
    return f1x * inv_sigma1_4 + c1 * (std::log(t) + 1.0) - d1 * std::log(s);
}

double CouplingTerms::dg2_ds(double f2x, double t, double s) const {
    return f2x * inv_sigma2_4 + c2 * (std::log(s) + 1.0) - d2 * std::log(t);
}

double SubSuperCertificate::box_lo(Regime r) const { return std::exp(k(r) * radius * radius); }

std::array<double, 4> ineq_margins(const ProblemInstance& inst, double k1, double k2) {
    const CouplingTerms ct(inst.regimes);
    const double R2 = inst.radius * inst.radius;
    const double two_n = 2.0 * inst.dim;
    return {
        4.0 * k1 * k1 + ct.c1 * k1 - inst.f1.bound() * ct.inv_sigma1_4 - ct.d1 * k2,
        4.0 * k2 * k2 + ct.c2 * k2 - inst.f2.bound() * ct.inv_sigma2_4 - ct.d2 * k1,
        -(ct.c1 * R2 + two_n) * k1 + ct.d1 * R2 * k2,
        -(ct.c2 * R2 + two_n) * k2 + ct.d2 * R2 * k1,
    };
}

double quadratic_root_bound(const ProblemInstance& inst, Regime r) {
    const double s = inst.regimes.sigma(r);
    const double rate = inst.regimes.switch_rate(r) + inst.regimes.discount(r);
    const double M = inst.cost(r).bound();
    return (rate + std::sqrt(rate * rate + 4.0 * M)) / (4.0 * s * s);
}

K1Interval k1_interval(const ProblemInstance& inst, double k2) {
    const CouplingTerms ct(inst.regimes);
    const double R2 = inst.radius * inst.radius;
    const double two_n = 2.0 * inst.dim;
    return {-ct.d1 * R2 * k2 / (ct.c1 * R2 + two_n), -(ct.c2 * R2 + two_n) * k2 / (ct.d2 * R2)};
}

double product_inequality_slack(const ProblemInstance& inst) {
    const CouplingTerms ct(inst.regimes);
    const double R2 = inst.radius * inst.radius;
    const double two_n = 2.0 * inst.dim;
    return (ct.c2 * R2 + two_n) * (ct.c1 * R2 + two_n) - (ct.d1 * R2) * (ct.d2 * R2);
}

Shifts choose_shifts(const ProblemInstance& inst, double k1, double k2) {
    const CouplingTerms ct(inst.regimes);
    const double R2 = inst.radius * inst.radius;
    // ln t ranges over [K1 R², 0], ln s over [K2 R², 0]; f_j over [0, max f_j].
    const double f1_max = inst.f1.max_over_ball(inst.radius);
    const double f2_max = inst.f2.max_over_ball(inst.radius);

    const double sup1 = f1_max * ct.inv_sigma1_4 + ct.c1 - ct.d1 * k2 * R2;
    const double inf1 = ct.c1 * (1.0 + k1 * R2);
    const double sup2 = f2_max * ct.inv_sigma2_4 + ct.c2 - ct.d2 * k1 * R2;
    const double inf2 = ct.c2 * (1.0 + k2 * R2);

    Shifts out;
    out.lipschitz_bounds = {std::max(std::abs(sup1), std::abs(inf1)),
                            std::max(std::abs(sup2), std::abs(inf2))};
    out.lambda1 = -kShiftSafetyFactor * out.lipschitz_bounds[0];
    out.lambda2 = -kShiftSafetyFactor * out.lipschitz_bounds[1];
    if (!(out.lambda1 < 0.0)) out.lambda1 = -1.0;
    if (!(out.lambda2 < 0.0)) out.lambda2 = -1.0;
    return out;
}

SubSuperCertificate choose_constants(const ProblemInstance& inst) {
    if (auto report = validate(inst); !report.valid())
        throw DomainError("cannot certify an invalid instance: " + report.summary());

    const double root1 = quadratic_root_bound(inst, Regime::one);
    double k2 = -quadratic_root_bound(inst, Regime::two);
    int last_failure = 0;

    constexpr int kMaxDeepenings = 60;
    for (int deepening = 0; deepening <= kMaxDeepenings; ++deepening, k2 *= 2.0) {
        const K1Interval iv = k1_interval(inst, k2);
        double neg_k1 = std::max(iv.lo, root1);
        if (neg_k1 > iv.hi) {
            last_failure = 4;
            continue;
        }
        // Endpoint choices make (1) or (3) vanish analytically; step off the
        // endpoint by a few ulps if rounding left them slightly negative.
        auto margins = ineq_margins(inst, -neg_k1, k2);
        for (int nudge = 0; nudge < 64 && neg_k1 <= iv.hi; ++nudge) {
            if (std::all_of(margins.begin(), margins.end(), [](double m) { return m >= 0.0; })) break;
            neg_k1 = std::nextafter(neg_k1, std::numeric_limits<double>::infinity());
            margins = ineq_margins(inst, -neg_k1, k2);
        }
        auto bad = std::find_if(margins.begin(), margins.end(), [](double m) { return m < 0.0; });
        if (bad != margins.end()) {
            last_failure = static_cast<int>(bad - margins.begin()) + 1;
            continue;
        }

        SubSuperCertificate cert;
        cert.k1 = -neg_k1;
        cert.k2 = k2;
        cert.ineq_margins = margins;
        cert.radius = inst.radius;
        cert.deepenings = deepening;
        const Shifts shifts = choose_shifts(inst, cert.k1, cert.k2);
        cert.lambda1 = shifts.lambda1;
        cert.lambda2 = shifts.lambda2;
        cert.lipschitz_bounds = shifts.lipschitz_bounds;
        return cert;
    }
    std::ostringstream msg;
    msg << "no admissible (K1, K2) after " << kMaxDeepenings << " deepenings; inequality "
        << last_failure << " keeps failing";
    throw CertificationError(last_failure, msg.str());
}

double eval_subsolution(const SubSuperCertificate& cert, const ProblemInstance& /*instance*/,
                        Regime r, std::span<const double> x) {
    const double R2 = cert.radius * cert.radius;
    const double r2 = squared_norm(x);
    if (!(r2 <= R2 * (1.0 + 1e-12))) throw DomainError("sub-solution evaluated outside the ball");
    if (r2 >= R2) return 1.0;
    return std::exp(cert.k(r) * (R2 - r2));
}

double eval_supersolution(Regime, std::span<const double>) { return 1.0; }

}  // namespace rsplan
