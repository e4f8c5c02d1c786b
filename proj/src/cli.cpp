#include "rsplan/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rsplan/instance_io.hpp"
#include "rsplan/pipeline.hpp"
#include "rsplan/report.hpp"
#include "rsplan/simulate.hpp"

#ifndef RSPLAN_VERSION
#define RSPLAN_VERSION "unknown"
#endif

namespace rsplan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string instance_path;
    std::string out_dir = "out";
};

struct SolveArgs {
    int grid = 0;
    double tol = 1e-9;
    int max_iter = 10000;
};

struct SimArgs {
    std::size_t paths = 200000;
    std::optional<double> dt;
    std::uint64_t seed = 42;
    unsigned threads = 0;
    bool halving = true;
};

struct SweepArgs {
    std::string param;
    std::vector<double> values;
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

/// Thrown to leave a command with a given exit code after reporting.
struct CommandFailure {
    int code;
    std::string message;
};

class Command {
public:
    Command(std::string name, std::vector<std::string> args, const CommonArgs& common, std::ostream& out,
            std::ostream& err)
        : name_(std::move(name)), args_(std::move(args)), common_(common), out_(out), err_(err) {
        manifest_ = {{"command", name_},
                     {"args", args_},
                     {"instance_path", common_.instance_path},
                     {"out_dir", common_.out_dir},
                     {"version", RSPLAN_VERSION},
                     {"started_at", utc_now()}};
    }

    ProblemInstance load() {
        ProblemInstance inst;
        try {
            inst = load_instance(common_.instance_path);
        } catch (const SchemaError& e) {
            throw CommandFailure{kExitInput, std::string("schema error at ") + e.what()};
        }
        manifest_["instance"] = instance_to_json(inst);
        if (const auto report = validate(inst); !report.valid())
            throw CommandFailure{kExitInput, "invalid instance: " + report.summary()};
        return inst;
    }

    void resolved(const std::string& key, json value) { manifest_["resolved"][key] = std::move(value); }

    void write(const std::string& file, const std::string& text) {
        write_text(fs::path(common_.out_dir) / file, text);
        manifest_["outputs"].push_back(file);
    }

    std::ostream& out() { return out_; }

    int finish(int code) {
        manifest_["exit_code"] = code;
        manifest_["finished_at"] = utc_now();
        try {
            write_text(fs::path(common_.out_dir) / "manifest.json", manifest_.dump(2) + "\n");
        } catch (const std::exception& e) {
            err_ << "error: " << e.what() << '\n';
            return code == kExitOk ? kExitInput : code;
        }
        return code;
    }

    /// Runs body() and maps library errors to exit codes.
    template <typename Body>
    int run(Body&& body) {
        int code = kExitOk;
        try {
            code = body();
        } catch (const CommandFailure& f) {
            err_ << "error: " << f.message << '\n';
            code = f.code;
        } catch (const SchemaError& e) {
            err_ << "error: schema error at " << e.what() << '\n';
            code = kExitInput;
        } catch (const CertificationError& e) {
            err_ << "error: certification failed at inequality " << e.inequality() << ": " << e.what() << '\n';
            code = kExitCertification;
        } catch (const IterationLimitError& e) {
            err_ << "error: " << e.what() << '\n';
            code = kExitSolver;
        } catch (const LinearSolveError& e) {
            err_ << "error: " << e.what() << '\n';
            code = kExitSolver;
        } catch (const SimulationError& e) {
            err_ << "error: simulation failed at " << e.what() << '\n';
            code = kExitSimulation;
        } catch (const DomainError& e) {
            err_ << "error: " << e.what() << '\n';
            code = kExitInput;
        } catch (const std::invalid_argument& e) {
            err_ << "error: " << e.what() << '\n';
            code = kExitInput;
        } catch (const std::exception& e) {
            err_ << "error: " << e.what() << '\n';
            code = kExitInput;
        }
        return finish(code);
    }

private:
    std::string name_;
    std::vector<std::string> args_;
    CommonArgs common_;
    std::ostream& out_;
    std::ostream& err_;
    json manifest_;
};

SolveOptions solve_options(const ProblemInstance& inst, const SolveArgs& a) {
    if (a.grid != 0 && a.grid < kMinNodesPerAxis)
        throw CommandFailure{kExitInput, "--grid must be at least " + std::to_string(kMinNodesPerAxis)};
    if (!(a.tol > 0.0)) throw CommandFailure{kExitInput, "--tol must be positive"};
    SolveOptions o;
    o.grid = a.grid > 0 ? a.grid : default_grid_nodes(inst.dim);
    o.iteration.tol = a.tol;
    o.iteration.max_iter = a.max_iter;
    return o;
}

SimConfig sim_config(const ProblemInstance& inst, const SimArgs& a) {
    if (a.paths < 1) throw CommandFailure{kExitInput, "--paths must be at least 1"};
    SimConfig c = default_sim_config(inst, a.paths);
    if (a.dt) {
        if (!(*a.dt > 0.0)) throw CommandFailure{kExitInput, "--dt must be positive"};
        c.dt = *a.dt;
    }
    c.seed = a.seed;
    c.threads = a.threads;
    return c;
}

json sim_json(const SimConfig& c) {
    return json{{"dt", c.dt}, {"n_paths", c.n_paths}, {"horizon_cap", c.horizon_cap}, {"seed", c.seed}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_certify(Command& cmd) {
    const ProblemInstance inst = cmd.load();
    const SubSuperCertificate cert = choose_constants(inst);
    cmd.write("certificate.json", dump(certificate_to_json(cert)));
    const bool ok = std::all_of(cert.ineq_margins.begin(), cert.ineq_margins.end(), [](double m) { return m >= 0; });
    auto& o = cmd.out();
    o << std::setprecision(10) << "K1 = " << cert.k1 << ", K2 = " << cert.k2 << "\n"
      << "Lambda1 = " << cert.lambda1 << ", Lambda2 = " << cert.lambda2 << "\n"
      << "inequality margins:";
    for (double m : cert.ineq_margins) o << ' ' << m;
    o << "\nK2 doublings: " << cert.deepenings << "\n";
    return ok ? kExitOk : kExitCertification;
}

void write_solution(Command& cmd, const Solution& s, const SolveOptions& o) {
    std::ostringstream fields, trace, policy;
    write_field_csv(fields, s.iteration.u1, s.iteration.u2, s.values);
    write_trace_csv(trace, s.iteration.trace);
    write_policy_csv(policy, s.policy);
    cmd.write("fields.csv", fields.str());
    cmd.write("fields.json", dump(field_metadata(s, o.iteration)));
    cmd.write("trace.csv", trace.str());
    cmd.write("policy.csv", policy.str());
    cmd.write("certificate.json", dump(certificate_to_json(s.cert)));
}

int cmd_solve(Command& cmd, const SolveArgs& a) {
    const ProblemInstance inst = cmd.load();
    const SolveOptions o = solve_options(inst, a);
    cmd.resolved("grid", o.grid);
    cmd.resolved("tol", o.iteration.tol);
    cmd.resolved("max_iter", o.iteration.max_iter);
    Solution s;
    try {
        s = solve_instance(inst, o);
    } catch (const IterationLimitError& e) {
        std::ostringstream trace;
        write_trace_csv(trace, e.trace());
        cmd.write("trace.csv", trace.str());
        throw;
    }
    write_solution(cmd, s, o);
    cmd.out() << std::setprecision(12) << "converged in " << s.iteration.trace.iterations() << " iterations\n"
              << "z1(y0) = " << value_at(s.values, Regime::one, inst.y0) << "\n"
              << "z2(y0) = " << value_at(s.values, Regime::two, inst.y0) << "\n";
    return kExitOk;
}

int cmd_verify(Command& cmd, const SolveArgs& sa, const SimArgs& ma) {
    const ProblemInstance inst = cmd.load();
    const SolveOptions o = solve_options(inst, sa);
    SimConfig c = sim_config(inst, ma);
    c.record_paths = 100;
    cmd.resolved("grid", o.grid);
    cmd.resolved("tol", o.iteration.tol);
    cmd.resolved("max_iter", o.iteration.max_iter);
    cmd.resolved("simulation", sim_json(c));
    cmd.resolved("dt_halving", ma.halving);

    const Solution s = solve_instance(inst, o);
    const double grid_term = richardson_grid_term(inst, s, o);
    const FeedbackPolicy optimal = field_policy(std::make_shared<const PolicyField>(s.policy));
    const VerificationReport rep =
        verify_optimality(inst, s.values, s.policy, default_challengers(optimal), c, {grid_term, ma.halving});
    cmd.write("verification.json", dump(report_to_json(rep)));

    // trajectories of the first paths under the optimal policy
    SimConfig sample = c;
    sample.n_paths = std::min<std::size_t>(100, c.n_paths);
    const SimResult traj = simulate_cost(inst, optimal, sample);
    std::ostringstream paths;
    write_path_csv(paths, inst.dim, traj.samples);
    cmd.write("paths.csv", paths.str());

    auto& out = cmd.out();
    out << std::setprecision(6) << std::fixed;
    out << "z" << to_int(inst.eps0) << "(y0) = " << rep.reference << "\n";
    out << "J(optimal) = " << rep.optimal.mean << " +- " << rep.optimal.std_error << "  (margin "
        << rep.margin.total() << ", " << (rep.optimal_within_band ? "within band" : "OUTSIDE band") << ")\n";
    for (const auto& ch : rep.challengers)
        out << "J(" << ch.estimate.name << ") = " << ch.estimate.mean << " +- " << ch.estimate.std_error
            << (ch.not_better ? "" : "  BEATS optimal") << (ch.separated ? "  separated" : "") << "\n";
    if (rep.halving_run)
        out << "J(optimal, dt/2) = " << rep.optimal_half.mean << " +- " << rep.optimal_half.std_error << "\n";
    if (rep.wide_intervals) out << "note: wide intervals, too few paths for a sharp comparison\n";
    out << (rep.passed() ? "all checks passed" : "some checks FAILED") << "\n";
    return rep.passed() ? kExitOk : kExitVerificationFailed;
}

const std::vector<std::string> kSweepParams{"a1", "a2", "alpha1", "alpha2", "sigma1", "sigma2", "R"};

ProblemInstance with_param(ProblemInstance inst, const std::string& name, double v) {
    RegimeParams& p = inst.regimes;
    if (name == "a1") p.a1 = v;
    else if (name == "a2") p.a2 = v;
    else if (name == "alpha1") p.alpha1 = v;
    else if (name == "alpha2") p.alpha2 = v;
    else if (name == "sigma1") p.sigma1 = std::abs(v);
    else if (name == "sigma2") p.sigma2 = std::abs(v);
    else inst.radius = v;
    return inst;
}

std::string csv_field(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

int cmd_sweep(Command& cmd, const SweepArgs& w, const SolveArgs& sa, const SimArgs& ma) {
    if (std::find(kSweepParams.begin(), kSweepParams.end(), w.param) == kSweepParams.end())
        throw CommandFailure{kExitInput, "unknown sweep parameter '" + w.param + "'"};
    if (w.values.empty()) throw CommandFailure{kExitInput, "--values must not be empty"};
    const ProblemInstance base = cmd.load();
    const SolveOptions o = solve_options(base, sa);
    cmd.resolved("grid", o.grid);
    cmd.resolved("tol", o.iteration.tol);
    cmd.resolved("max_iter", o.iteration.max_iter);
    cmd.resolved("simulation", sim_json(sim_config(base, ma)));
    cmd.resolved("param", w.param);
    cmd.resolved("values", w.values);

    std::ostringstream csv;
    csv << std::setprecision(17);
    csv << "param,value,status,z1_y0,z2_y0,J_opt,J_stderr,k1,k2,margin1,margin2,margin3,margin4\n";
    int failures = 0;
    for (double v : w.values) {
        const ProblemInstance inst = with_param(base, w.param, v);
        csv << w.param << ',' << v << ',';
        std::string status;
        try {
            if (const auto report = validate(inst); !report.valid()) {
                status = "invalid: " + report.summary();
            } else {
                const Solution s = solve_instance(inst, o);
                const SimResult r = simulate_cost(
                    inst, field_policy(std::make_shared<const PolicyField>(s.policy)), sim_config(inst, ma));
                csv << "ok," << value_at(s.values, Regime::one, inst.y0) << ','
                    << value_at(s.values, Regime::two, inst.y0) << ',' << r.mean << ',' << r.std_error << ','
                    << s.cert.k1 << ',' << s.cert.k2;
                for (double m : s.cert.ineq_margins) csv << ',' << m;
                csv << '\n';
                cmd.out() << w.param << " = " << v << ": ok\n";
                continue;
            }
        } catch (const std::exception& e) {
            status = std::string("failed: ") + e.what();
        }
        ++failures;
        csv << csv_field(status) << ",,,,,,,,,,\n";
        cmd.out() << w.param << " = " << v << ": " << status << "\n";
    }
    cmd.write("sweep.csv", csv.str());
    cmd.out() << w.values.size() - failures << " of " << w.values.size() << " rows succeeded\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-regime production planning: certify, solve, verify, sweep"};
    app.require_subcommand(1);
    app.set_version_flag("--version", RSPLAN_VERSION);

    CommonArgs common;
    SolveArgs solve_args;
    SimArgs sim_args;
    SweepArgs sweep_args;
    bool no_halving = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("instance", common.instance_path, "Instance JSON file")->required();
        sub->add_option("--out", common.out_dir, "Output directory")->capture_default_str();
    };
    auto add_solve = [&](CLI::App* sub) {
        sub->add_option("--grid", solve_args.grid, "Nodes per axis (default 129/65/33 for N=1/2/3)");
        sub->add_option("--tol", solve_args.tol, "Sup-norm update tolerance")->capture_default_str();
        sub->add_option("--max-iter", solve_args.max_iter, "Iteration cap")->capture_default_str();
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--paths", sim_args.paths, "Monte Carlo paths")->capture_default_str();
        sub->add_option("--dt", sim_args.dt, "Euler step (default 1e-3 R^2/sigma_max^2)");
        sub->add_option("--seed", sim_args.seed, "Master seed")->capture_default_str();
        sub->add_option("--threads", sim_args.threads, "Worker threads (0: all cores)")->capture_default_str();
    };

    CLI::App* certify = app.add_subcommand("certify", "Sub-solution constants and iteration shifts");
    add_common(certify);
    CLI::App* solve = app.add_subcommand("solve", "Solve the value functions on a grid");
    add_common(solve);
    add_solve(solve);
    CLI::App* verify = app.add_subcommand("verify", "Monte Carlo optimality check of the extracted policy");
    add_common(verify);
    add_solve(verify);
    add_sim(verify);
    verify->add_flag("--no-halving", no_halving, "Skip the dt/2 rerun");
    CLI::App* sweep = app.add_subcommand("sweep", "Solve and simulate over a parameter list");
    add_common(sweep);
    add_solve(sweep);
    add_sim(sweep);
    sweep->add_option("--param", sweep_args.param, "One of a1, a2, alpha1, alpha2, sigma1, sigma2, R")->required();
    sweep->add_option("--values", sweep_args.values, "Comma-separated values")->required()->delimiter(',');

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }
    sim_args.halving = !no_halving;

    CLI::App* chosen = app.get_subcommands().front();
    Command cmd(chosen->get_name(), args, common, out, err);
    if (chosen == certify) return cmd.run([&] { return cmd_certify(cmd); });
    if (chosen == solve) return cmd.run([&] { return cmd_solve(cmd, solve_args); });
    if (chosen == verify) return cmd.run([&] { return cmd_verify(cmd, solve_args, sim_args); });
    return cmd.run([&] { return cmd_sweep(cmd, sweep_args, solve_args, sim_args); });
}

}  // namespace rsplan
