#include "rsplan/report.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace rsplan {

using nlohmann::json;

json certificate_to_json(const SubSuperCertificate& cert) {
    return json{{"k1", cert.k1},
                {"k2", cert.k2},
                {"lambda1", cert.lambda1},
                {"lambda2", cert.lambda2},
                {"ineq_margins", cert.ineq_margins},
                {"lipschitz_bounds", cert.lipschitz_bounds},
                {"radius", cert.radius},
                {"deepenings", cert.deepenings}};
}

namespace {

void coords_header(std::ostream& out, int dim, const char* prefix) {
    for (int d = 0; d < dim; ++d) out << (d ? "," : "") << prefix << d;
}

}  // namespace

void write_field_csv(std::ostream& out, const GridField& u1, const GridField& u2, const ValueFields& values) {
    const BallGrid& g = *u1.grid;
    out << std::setprecision(17);
    coords_header(out, g.dim(), "x");
    out << ",u1,u2,z1,z2\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (double c : g.coords(i)) out << c << ',';
        out << u1[i] << ',' << u2[i] << ',' << values.z1[i] << ',' << values.z2[i] << '\n';
    }
}

json field_metadata(const Solution& s, const MonotoneOptions& options) {
    const BallGrid& g = *s.grid;
    return json{{"grid",
                 {{"dim", g.dim()},
                  {"radius", g.radius()},
                  {"nodes_per_axis", g.nodes_per_axis()},
                  {"spacing", g.spacing()},
                  {"interior_nodes", g.size()},
                  {"ghost_radius", g.ghost_radius()}}},
                {"tol", options.tol},
                {"max_iter", options.max_iter},
                {"iterations", s.iteration.trace.iterations()},
                {"transformed_residual", s.iteration.residual},
                {"linear_residual", s.iteration.linear_residual},
                {"worst_increment", s.iteration.trace.worst_increment()},
                {"worst_sandwich_slack", s.iteration.trace.worst_sandwich_slack()},
                {"certificate", certificate_to_json(s.cert)},
                {"grid_certificate", certificate_to_json(s.iteration.cert)}};
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
    out << std::setprecision(17);
    out << "iteration,max_update1,max_update2,min_increment1,min_increment2,residual1,residual2,"
           "lower_slack1,lower_slack2,upper_slack1,upper_slack2,cg1,cg2\n";
    for (const auto& r : trace.records) {
        out << r.iteration << ',' << r.max_update[0] << ',' << r.max_update[1] << ',' << r.min_increment[0] << ','
            << r.min_increment[1] << ',' << r.residual[0] << ',' << r.residual[1] << ',' << r.lower_slack[0] << ','
            << r.lower_slack[1] << ',' << r.upper_slack[0] << ',' << r.upper_slack[1] << ',' << r.cg_iterations[0]
            << ',' << r.cg_iterations[1] << '\n';
    }
}

void write_policy_csv(std::ostream& out, const PolicyField& policy) {
    const BallGrid& g = *policy.grid();
    out << std::setprecision(17);
    coords_header(out, g.dim(), "x");
    out << ',';
    coords_header(out, g.dim(), "p1_");
    out << ',';
    coords_header(out, g.dim(), "p2_");
    out << '\n';
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (double c : g.coords(i)) out << c << ',';
        const auto p1 = policy.at_node(Regime::one, i);
        const auto p2 = policy.at_node(Regime::two, i);
        for (double v : p1) out << v << ',';
        for (std::size_t d = 0; d < p2.size(); ++d) out << p2[d] << (d + 1 < p2.size() ? ',' : '\n');
    }
}

void write_path_csv(std::ostream& out, int dim, const std::vector<StepRecord>& samples) {
    out << std::setprecision(17);
    out << "path,t,regime,";
    coords_header(out, dim, "y");
    out << ",discount,cost\n";
    for (const auto& s : samples) {
        out << s.path << ',' << s.t << ',' << to_int(s.regime) << ',';
        for (int d = 0; d < dim; ++d) out << s.y[d] << ',';
        out << s.discount << ',' << s.cost << '\n';
    }
}

json estimate_to_json(const PolicyEstimate& e) {
    return json{{"policy", e.name},
                {"mean", e.mean},
                {"stderr", e.std_error},
                {"n", e.n},
                {"truncation_fraction", e.truncation_fraction}};
}

namespace {

json margin_to_json(const MarginTerms& m) {
    return json{{"exit", m.exit}, {"step", m.step}, {"grid", m.grid}, {"total", m.total()}};
}

}  // namespace

json report_to_json(const VerificationReport& r) {
    json challengers = json::array();
    for (const auto& c : r.challengers) {
        json e = estimate_to_json(c.estimate);
        e["checks"] = {{"not_better_than_optimal", c.not_better}, {"separated", c.separated}};
        challengers.push_back(std::move(e));
    }
    json out{{"reference", r.reference},
             {"eps0", to_int(r.eps0)},
             {"dt", r.dt},
             {"seed", r.seed},
             {"optimal", estimate_to_json(r.optimal)},
             {"disc_margin", margin_to_json(r.margin)},
             {"challengers", challengers},
             {"separated_count", r.separated_count},
             {"wide_intervals", r.wide_intervals}};
    json checks{{"optimal_within_band", r.optimal_within_band}};
    if (r.halving_run) {
        out["half_step"] = {{"dt", 0.5 * r.dt},
                            {"optimal", estimate_to_json(r.optimal_half)},
                            {"disc_margin", margin_to_json(r.margin_half)}};
        checks["half_step_within_band"] = r.half_within_band;
        checks["error_not_growing"] = r.error_not_growing;
        checks["shift_within_margin_drop"] = r.shift_within_margin_drop;
    }
    checks["passed"] = r.passed();
    out["checks"] = checks;
    return out;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream f(file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + file.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + file.string());
}

}  // namespace rsplan
