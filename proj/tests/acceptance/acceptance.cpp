// One line per acceptance criterion: [PASS] or [FAIL], what was measured and
// how long it took. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "rsplan/cli.hpp"
#include "rsplan/instance_io.hpp"
#include "rsplan/pipeline.hpp"
#include "rsplan/simulate.hpp"

using namespace rsplan;
namespace fs = std::filesystem;

namespace {

const std::string kData = RSPLAN_TEST_DATA;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

oracle::OneDimProblem oracle_problem(const ProblemInstance& inst) {
    oracle::OneDimProblem p;
    p.radius = inst.radius;
    p.a1 = inst.regimes.a1;
    p.a2 = inst.regimes.a2;
    p.alpha1 = inst.regimes.alpha1;
    p.alpha2 = inst.regimes.alpha2;
    p.sigma1 = inst.regimes.sigma1;
    p.sigma2 = inst.regimes.sigma2;
    const double m1 = std::get<RadialQuadratic>(inst.f1.form()).m;
    const double m2 = std::get<RadialQuadratic>(inst.f2.form()).m;
    p.f1 = [m1](double x) { return m1 * x * x; };
    p.f2 = [m2](double x) { return m2 * x * x; };
    return p;
}

// Solutions shared between criteria; each is computed inside the first
// criterion that needs it, so its cost lands in that criterion's runtime.
std::optional<Solution> inst_a_129;
std::optional<Solution> inst_a_257;
std::vector<std::pair<std::string, const Solution*>> tested;
std::vector<std::unique_ptr<Solution>> extra_solutions;
std::vector<ProblemInstance> extra_instances;

const Solution& keep(std::string name, const ProblemInstance& inst, Solution s) {
    extra_instances.push_back(inst);
    extra_solutions.push_back(std::make_unique<Solution>(std::move(s)));
    tested.emplace_back(std::move(name), extra_solutions.back().get());
    return *extra_solutions.back();
}

bool margins_ok(const SubSuperCertificate& c) {
    for (double m : c.ineq_margins)
        if (m < 0.0) return false;
    return c.k1 < 0.0 && c.k2 < 0.0;
}

Outcome certification() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> log_u(std::log(0.1), std::log(10.0));
    std::uniform_real_distribution<double> m(0.1, 5.0);
    auto draw = [&] { return std::exp(log_u(rng)); };

    std::vector<ProblemInstance> instances{canonical_instance()};
    while (instances.size() < 51) {
        ProblemInstance inst = canonical_instance();
        inst.regimes = {draw(), draw(), draw(), draw(), draw(), draw()};
        inst.radius = draw();
        inst.f1 = CostFunction::radial(m(rng));
        inst.f2 = CostFunction::radial(m(rng));
        if (validate(inst).valid()) instances.push_back(inst);
    }
    int failures = 0;
    for (const auto& inst : instances) {
        try {
            const SubSuperCertificate c = choose_constants(inst);
            const K1Interval iv = k1_interval(inst, c.k2);
            const bool in_interval = -c.k1 >= iv.lo && -c.k1 <= iv.hi;
            if (!margins_ok(c) || !in_interval || product_inequality_slack(inst) < 0.0) ++failures;
        } catch (const std::exception&) {
            ++failures;
        }
    }
    return {failures == 0, std::to_string(instances.size() - failures) + "/51 instances certified"};
}

Outcome iteration_invariants() {
    const ProblemInstance inst = canonical_instance();
    inst_a_129 = solve_instance(inst, {129, {1e-9, 10000, 1e-12}});
    tested.emplace_back("reference/129", &*inst_a_129);
    const IterationTrace& tr = inst_a_129->iteration.trace;
    const bool pass = tr.worst_increment() >= -1e-12 && tr.worst_sandwich_slack() >= -1e-12 &&
                      tr.iterations() <= 10000;
    return {pass, std::to_string(tr.iterations()) + " iterations, worst increment " + fmt(tr.worst_increment()) +
                      ", worst sandwich slack " + fmt(tr.worst_sandwich_slack())};
}

std::array<double, 2> residual_norms(const Solution& s, const ProblemInstance& inst) {
    const auto r = hjb_residual(s.values, inst);
    return {sup_norm(r[0].values), sup_norm(r[1].values)};
}

Outcome pde_correctness() {
    const ProblemInstance inst = canonical_instance();
    inst_a_257 = solve_instance(inst, {257, {1e-9, 10000, 1e-12}});
    tested.emplace_back("reference/257", &*inst_a_257);
    const auto r129 = residual_norms(*inst_a_129, inst);
    const auto r257 = residual_norms(*inst_a_257, inst);
    const double q1 = r129[0] / r257[0], q2 = r129[1] / r257[1];
    const bool residual_ok = q1 >= 3.2 && q1 <= 4.8 && q2 >= 3.2 && q2 <= 4.8;

    const oracle::CoupledSolution ref = oracle::coupled_newton(oracle_problem(inst), 2049);
    auto error_against_ref = [&](const Solution& s) {
        const int stride = 2048 / (s.grid->nodes_per_axis() - 1);
        double e = 0.0;
        for (std::size_t i = 0; i < s.grid->size(); ++i) {
            const std::size_t k = stride * (i + 1) - 1;
            e = std::max(e, std::abs(s.values.z1[i] + 2.0 * 0.16 * std::log(ref.u1[k])));
            e = std::max(e, std::abs(s.values.z2[i] + 2.0 * 0.36 * std::log(ref.u2[k])));
        }
        return e;
    };
    const double e129 = error_against_ref(*inst_a_129);
    const double e257 = error_against_ref(*inst_a_257);
    const double q = e129 / e257;
    const bool oracle_ok = q >= 3.2 && q <= 4.8;
    return {residual_ok && oracle_ok, "residual ratios " + fmt(q1) + ", " + fmt(q2) + "; Newton-2049 error " +
                                          fmt(e129) + " -> " + fmt(e257) + " (ratio " + fmt(q) + ")"};
}

Outcome zero_cost() {
    const ProblemInstance inst = load_instance(kData + "/zero_cost.json");
    const Solution& s = keep("zero cost", inst, solve_instance(inst));
    const double z = std::max(sup_norm(s.values.z1.values), sup_norm(s.values.z2.values));
    const double p = s.policy.max_norm();
    return {z <= 1e-8 && p <= 1e-7, "|z| = " + fmt(z) + ", |p| = " + fmt(p)};
}

Outcome decoupling() {
    ProblemInstance inst = canonical_instance();
    inst.regimes.a1 = 1e-12;
    inst.regimes.a2 = 1e-12;
    const Solution& s = keep("decoupled", inst, solve_instance(inst));
    const auto& rg = inst.regimes;
    const auto u1 = oracle::scalar_newton(1.0, rg.alpha1, rg.sigma1, [](double x) { return x * x; }, 129);
    const auto u2 = oracle::scalar_newton(1.0, rg.alpha2, rg.sigma2, [](double x) { return 2.0 * x * x; }, 129);
    double d = 0.0;
    for (std::size_t i = 0; i < s.grid->size(); ++i) {
        d = std::max(d, std::abs(s.values.z1[i] + 2.0 * rg.sigma1 * rg.sigma1 * std::log(u1[i])));
        d = std::max(d, std::abs(s.values.z2[i] + 2.0 * rg.sigma2 * rg.sigma2 * std::log(u2[i])));
    }
    return {d <= 1e-6, "sup |z - z_scalar| = " + fmt(d)};
}

Outcome growth_bound_check() {
    for (const char* file : {"/inst_2d.json"}) {
        const ProblemInstance inst = load_instance(kData + file);
        keep(file + 1, inst, solve_instance(inst));
    }
    {
        ProblemInstance inst = canonical_instance();
        inst.dim = 3;
        inst.y0 = {0.1, 0.0, -0.2};
        keep("reference in 3D", inst, solve_instance(inst, {17, {}}));
    }
    double worst = -INFINITY;
    std::size_t nodes = 0;
    for (const auto& [name, s] : tested) {
        const ProblemInstance* inst = nullptr;
        ProblemInstance a = canonical_instance();
        if (s == &*inst_a_129 || s == &*inst_a_257) inst = &a;
        for (std::size_t k = 0; k < extra_solutions.size(); ++k)
            if (extra_solutions[k].get() == s) inst = &extra_instances[k];
        for (std::size_t i = 0; i < s->grid->size(); ++i) {
            for (Regime r : {Regime::one, Regime::two}) {
                const double gap = s->values.z(r)[i] - growth_bound(s->iteration.cert, *inst, r, s->grid->coords(i));
                worst = std::max(worst, gap);
            }
            ++nodes;
        }
    }
    return {worst <= 1e-9, std::to_string(tested.size()) + " instances, " + std::to_string(nodes) +
                               " nodes, max z - bound = " + fmt(worst)};
}

Outcome verification() {
    const ProblemInstance inst = canonical_instance();
    const Solution& s = *inst_a_129;
    const SolveOptions opts{129, {1e-9, 10000, 1e-12}};
    const double grid_term = richardson_grid_term(inst, s, opts);
    const FeedbackPolicy opt = field_policy(std::make_shared<const PolicyField>(s.policy));
    const VerificationReport rep = verify_optimality(inst, s.values, s.policy, default_challengers(opt),
                                                     default_sim_config(inst, 200000), {grid_term, true});
    bool all_not_better = true;
    for (const auto& c : rep.challengers) all_not_better = all_not_better && c.not_better;
    const bool halving = rep.halving_run && rep.half_within_band && rep.error_not_growing &&
                         rep.shift_within_margin_drop;
    const bool pass = rep.optimal_within_band && halving && all_not_better && rep.separated_count >= 2;
    return {pass, "J = " + fmt(rep.optimal.mean, 6) + " +- " + fmt(rep.optimal.std_error, 2) + " vs z1(0) = " +
                      fmt(rep.reference, 6) + ", margin " + fmt(rep.margin.total(), 3) + ", dt/2 J = " +
                      fmt(rep.optimal_half.mean, 6) + ", " + std::to_string(rep.separated_count) +
                      " challengers separated"};
}

Outcome first_order_condition() {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd(0.0, 1.5);
    long beaten = 0, ties_off_argmin = 0, argmin_mismatch = 0;
    for (int k = 0; k < 100; ++k) {
        const std::vector<double> g{nd(rng), nd(rng), nd(rng)};
        const FocResult foc = foc_infimum(g);
        // p·g + |p|², each sum formed on its own
        auto objective = [&](const double* p) {
            double dot = 0.0, norm2 = 0.0;
            for (int i = 0; i < 3; ++i) dot += p[i] * g[i];
            for (int i = 0; i < 3; ++i) norm2 += p[i] * p[i];
            return dot + norm2;
        };
        if (objective(foc.argmin.data()) != foc.value) ++argmin_mismatch;
        for (int j = 0; j < 100000; ++j) {
            const double p[3] = {nd(rng), nd(rng), nd(rng)};
            const double v = objective(p);
            if (v < foc.value) ++beaten;
            if (v == foc.value && !(p[0] == foc.argmin[0] && p[1] == foc.argmin[1] && p[2] == foc.argmin[2]))
                ++ties_off_argmin;
        }
    }
    return {beaten == 0 && ties_off_argmin == 0 && argmin_mismatch == 0,
            "1e7 competitors: " + std::to_string(beaten) + " better, " + std::to_string(ties_off_argmin) +
                " ties away from p*, value attained at p* in " + std::to_string(100 - argmin_mismatch) + "/100"};
}

Outcome determinism() {
    const fs::path base = fs::temp_directory_path() / "rsplan_acceptance";
    auto run = [&](const std::string& dir, const std::string& threads) {
        fs::remove_all(base / dir);
        std::ostringstream out, err;
        run_cli({"verify", kData + "/inst_a.json", "--paths", "20000", "--seed", "42", "--threads", threads, "--out",
                 (base / dir).string()},
                out, err);
        std::ifstream in(base / dir / "verification.json", std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    const std::string a = run("a", "0");
    const std::string b = run("b", "0");
    const std::string c = run("c", "1");
    const bool pass = !a.empty() && a == b && a == c;
    return {pass, pass ? "three runs (two thread settings) byte-identical" : "reports differ"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double budget;  // seconds; 0 for none
    };
    const std::vector<Criterion> criteria{
        {1, "certification", certification, 1.0},
        {2, "monotone iteration invariants", iteration_invariants, 30.0},
        {3, "PDE correctness", pde_correctness, 120.0},
        {5, "zero-cost case", zero_cost, 0.0},
        {6, "decoupling oracle", decoupling, 0.0},
        {4, "growth bound", growth_bound_check, 0.0},
        {7, "optimality verification", verification, 120.0},
        {8, "first-order condition", first_order_condition, 0.0},
        {9, "determinism", determinism, 0.0},
    };
    std::map<int, std::string> lines;
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double t = seconds_since(start);
        const bool in_time = c.budget <= 0.0 || t < c.budget;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::ostringstream line;
        line << (pass ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.name << ": " << o.detail << " ("
             << std::fixed << std::setprecision(2) << t << " s";
        if (c.budget > 0.0) line << ", budget " << std::setprecision(0) << c.budget << " s";
        line << ")";
        lines[c.id] = line.str();
    }
    for (const auto& [id, line] : lines) std::cout << line << "\n";
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
}
