#include "rsplan/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace rsplan {

Regime RegimePath::at(double t) const {
    const auto k = std::upper_bound(jump_times.begin(), jump_times.end(), t) - jump_times.begin();
    return regimes[static_cast<std::size_t>(k)];
}

RegimePath sample_regime_path(const RegimeParams& rates, Regime eps0, double horizon, std::mt19937_64& rng) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    RegimePath path;
    path.start = eps0;
    path.regimes.push_back(eps0);
    RegimeClock clock(rates, eps0, rng);
    while (clock.next_jump() < horizon) {
        path.jump_times.push_back(clock.next_jump());
        clock.advance();
        path.regimes.push_back(clock.current());
    }
    return path;
}

RegimeClock::RegimeClock(const RegimeParams& rates, Regime eps0, std::mt19937_64& rng)
    : rates_(&rates), rng_(&rng), current_(eps0) {
    next_jump_ = holding_time();
}

double RegimeClock::holding_time() {
    const double rate = rates_->switch_rate(current_);
    if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
    std::exponential_distribution<double> hold(rate);
    double h = hold(*rng_);
    while (!(h > 0.0)) h = hold(*rng_);
    return h;
}

void RegimeClock::advance() {
    const double t = next_jump_;
    current_ = other(current_);
    next_jump_ = t + holding_time();
}

FeedbackPolicy zero_policy() {
    return {"zero", [](Regime, std::span<const double>) { return std::array<double, 3>{0.0, 0.0, 0.0}; }};
}

FeedbackPolicy field_policy(std::shared_ptr<const PolicyField> field, std::string name) {
    return {std::move(name), [field](Regime r, std::span<const double> x) { return (*field)(r, x); }};
}

FeedbackPolicy scaled_policy(const FeedbackPolicy& base, double factor, std::string name) {
    return {std::move(name), [rule = base.rule, factor](Regime r, std::span<const double> x) {
                auto p = rule(r, x);
                for (double& v : p) v *= factor;
                return p;
            }};
}

FeedbackPolicy swapped_policy(const FeedbackPolicy& base, std::string name) {
    return {std::move(name), [rule = base.rule](Regime r, std::span<const double> x) { return rule(other(r), x); }};
}

std::vector<FeedbackPolicy> default_challengers(const FeedbackPolicy& optimal) {
    return {zero_policy(), scaled_policy(optimal, 0.5, "half"), scaled_policy(optimal, 1.5, "one_and_half"),
            swapped_policy(optimal, "regime_swapped")};
}

SimConfig default_sim_config(const ProblemInstance& instance, std::size_t n_paths) {
    SimConfig c;
    const double s = std::max(instance.regimes.sigma1, instance.regimes.sigma2);
    c.dt = 1e-3 * instance.radius * instance.radius / (s * s);
    c.horizon_cap = 50.0 / std::min({instance.regimes.alpha1, instance.regimes.alpha2, 0.01});
    c.n_paths = n_paths;
    c.seed = 42;
    return c;
}

namespace {

/// Engine for substream `stream` of path `path`: the three counters are
/// hashed with the splitmix64 finalizer into a single engine seed.
std::mt19937_64 substream(std::uint64_t seed, std::size_t path, unsigned stream) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    const std::uint64_t key = mix(mix(mix(seed) ^ static_cast<std::uint64_t>(path)) ^ stream);
    return std::mt19937_64(key);
}

/// Randomness of one path, drawn on demand and kept so that several policies
/// can be run against the same regime chain and Brownian increments.
class PathRandomness {
public:
    PathRandomness(const ProblemInstance& inst, std::uint64_t seed, std::size_t path)
        : regime_rng_(substream(seed, path, 0)),
          noise_rng_(substream(seed, path, 1)),
          clock_(inst.regimes, inst.eps0, regime_rng_) {}

    PathRandomness(const PathRandomness&) = delete;
    PathRandomness& operator=(const PathRandomness&) = delete;

    /// Time of the k-th regime jump (0-based).
    double jump(std::size_t k) {
        while (jumps_.size() <= k) {
            jumps_.push_back(clock_.next_jump());
            clock_.advance();
        }
        return jumps_[k];
    }

    /// k-th standard normal draw.
    double normal(std::size_t k) {
        while (normals_.size() <= k) normals_.push_back(normal_(noise_rng_));
        return normals_[k];
    }

private:
    std::mt19937_64 regime_rng_;
    std::mt19937_64 noise_rng_;
    RegimeClock clock_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::vector<double> jumps_;
    std::vector<double> normals_;
};

struct PathRunner {
    const ProblemInstance& inst;
    const SimConfig& cfg;
    std::array<double, 2> sigma;
    std::array<double, 2> alpha;
    std::array<double, 2> full_step_sd;     // σ_j √dt
    std::array<double, 2> full_step_decay;  // e^{−α_j dt}
    std::array<const RadialQuadratic*, 2> radial{};  // direct path for m|x|² costs

    PathRunner(const ProblemInstance& instance, const SimConfig& config) : inst(instance), cfg(config) {
        const double root_dt = std::sqrt(cfg.dt);
        for (Regime r : {Regime::one, Regime::two}) {
            const std::size_t j = index_of(r);
            sigma[j] = inst.regimes.sigma(r);
            alpha[j] = inst.regimes.discount(r);
            full_step_sd[j] = sigma[j] * root_dt;
            full_step_decay[j] = std::exp(-alpha[j] * cfg.dt);
            radial[j] = std::get_if<RadialQuadratic>(&inst.cost(r).form());
        }
    }

    PathOutcome run(std::size_t path, const FeedbackPolicy& policy, PathRandomness& rnd,
                    const StepObserver& observer) const {
        const int n = inst.dim;
        const double R2 = inst.radius * inst.radius;

        std::array<double, 3> y{0.0, 0.0, 0.0};
        std::copy(inst.y0.begin(), inst.y0.end(), y.begin());
        const std::span<const double> ys(y.data(), static_cast<std::size_t>(n));
        Regime regime = inst.eps0;
        std::size_t jumps_taken = 0;
        double next_jump = rnd.jump(0);
        std::size_t draws = 0;
        double t = 0.0;
        double D = 0.0;
        double discount = 1.0;  // e^{−D}
        double J = 0.0;
        std::size_t step = 0;

        StepRecord rec;
        if (observer) {
            rec.path = path;
            rec.regime = regime;
            rec.y = y;
            observer(rec);
        }

        PathOutcome out;
        while (true) {
            const double r2 = squared_norm(ys);
            if (r2 >= R2) {
                out.exit_norm = std::sqrt(r2);
                break;
            }
            if (t >= cfg.horizon_cap) {
                out.truncated = true;
                out.exit_norm = std::sqrt(r2);
                break;
            }
            const std::size_t j = index_of(regime);

            double h = cfg.dt;
            bool jumps = false;
            if (next_jump - t <= h) {
                h = next_jump - t;
                jumps = true;
            }
            bool capped = false;
            if (cfg.horizon_cap - t <= h) {
                h = cfg.horizon_cap - t;
                capped = true;
                jumps = jumps && next_jump <= cfg.horizon_cap;
            }

            std::array<double, 3> p;
            try {
                p = policy.rule(regime, ys);
            } catch (const std::exception& e) {
                throw SimulationError(path, step, std::string("policy query failed: ") + e.what());
            }
            const double f = radial[j] ? radial[j]->m * r2 : inst.cost(regime)(ys);
            const double running = squared_norm({p.data(), static_cast<std::size_t>(n)}) + f;
            J += discount * running * h;

            const bool full = h == cfg.dt;
            const double sd = full ? full_step_sd[j] : sigma[j] * std::sqrt(h);
            for (int d = 0; d < n; ++d) y[d] += p[d] * h + sd * rnd.normal(draws++);
            D += alpha[j] * h;
            discount *= full ? full_step_decay[j] : std::exp(-alpha[j] * h);
            if (jumps) {
                t = next_jump;
                regime = other(regime);
                next_jump = rnd.jump(++jumps_taken);
            } else if (capped) {
                t = cfg.horizon_cap;
            } else {
                t += h;
            }
            ++step;
            if (!std::isfinite(J) || !std::isfinite(squared_norm(ys)))
                throw SimulationError(path, step, "nonfinite state");

            if (observer) {
                rec.t = t;
                rec.regime = regime;
                rec.y = y;
                rec.discount = D;
                rec.cost = J;
                rec.sigma = sigma[j];
                rec.alpha = alpha[j];
                observer(rec);
            }
        }
        out.cost = J;
        out.exit_time = t;
        return out;
    }
};

void check_config(const ProblemInstance& instance, const SimConfig& config) {
    if (!(config.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (config.n_paths < 1) throw std::invalid_argument("n_paths must be at least 1");
    if (!(config.horizon_cap > 0.0)) throw std::invalid_argument("horizon_cap must be positive");
    if (instance.y0.size() != static_cast<std::size_t>(instance.dim))
        throw DomainError("y0 has the wrong dimension");
    if (!(squared_norm(instance.y0) < instance.radius * instance.radius))
        throw DomainError("y0 must lie inside the ball");
}

SimResult summarize(const std::string& name, std::vector<PathOutcome> outcomes, bool keep) {
    // fixed-order reduction
    SimResult result;
    result.policy = name;
    double sum = 0.0;
    double exit_sum = 0.0;
    std::size_t truncated = 0;
    for (const auto& o : outcomes) {
        sum += o.cost;
        exit_sum += o.exit_time;
        truncated += o.truncated ? 1 : 0;
    }
    const auto n = static_cast<double>(outcomes.size());
    result.n = outcomes.size();
    result.mean = sum / n;
    double ss = 0.0;
    for (const auto& o : outcomes) ss += (o.cost - result.mean) * (o.cost - result.mean);
    result.std_error = outcomes.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    result.truncation_fraction = static_cast<double>(truncated) / n;
    result.mean_exit_time = exit_sum / n;
    if (keep) result.outcomes = std::move(outcomes);
    return result;
}

}  // namespace

std::vector<SimResult> simulate_costs(const ProblemInstance& instance, const std::vector<FeedbackPolicy>& policies,
                                      const SimConfig& config, const StepObserver& observer) {
    check_config(instance, config);
    if (policies.empty()) throw std::invalid_argument("at least one policy is required");
    const PathRunner runner(instance, config);
    const std::size_t k = policies.size();
    std::vector<std::vector<PathOutcome>> outcomes(k, std::vector<PathOutcome>(config.n_paths));
    std::vector<SimResult> results(k);

    const std::size_t recorded = std::min(config.record_paths, config.n_paths);
    auto run_path = [&](std::size_t i, bool observed) {
        PathRandomness rnd(instance, config.seed, i);
        for (std::size_t q = 0; q < k; ++q) {
            StepObserver obs;
            if (observed) {
                obs = [&, q](const StepRecord& rec) {
                    if (rec.path < recorded) results[q].samples.push_back(rec);
                    if (observer) observer(rec);
                };
            }
            outcomes[q][i] = runner.run(i, policies[q], rnd, obs);
        }
    };

    // Recorded or observed paths run on the calling thread.
    const std::size_t sequential = observer ? config.n_paths : recorded;
    for (std::size_t i = 0; i < sequential; ++i) run_path(i, true);

    const std::size_t rest = config.n_paths - sequential;
    if (rest > 0) {
        unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, rest));
        if (threads <= 1) {
            for (std::size_t i = sequential; i < config.n_paths; ++i) run_path(i, false);
        } else {
            std::vector<std::exception_ptr> errors(threads);
            std::vector<std::thread> pool;
            const std::size_t chunk = (rest + threads - 1) / threads;
            for (unsigned w = 0; w < threads; ++w) {
                const std::size_t lo = std::min(config.n_paths, sequential + w * chunk);
                const std::size_t hi = std::min(config.n_paths, lo + chunk);
                pool.emplace_back([&, lo, hi, w] {
                    try {
                        for (std::size_t i = lo; i < hi; ++i) run_path(i, false);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
            for (auto& th : pool) th.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
    }

    for (std::size_t q = 0; q < k; ++q) {
        auto samples = std::move(results[q].samples);
        results[q] = summarize(policies[q].name, std::move(outcomes[q]), config.keep_outcomes);
        results[q].samples = std::move(samples);
    }
    return results;
}

SimResult simulate_cost(const ProblemInstance& instance, const FeedbackPolicy& policy, const SimConfig& config,
                        const StepObserver& observer) {
    return std::move(simulate_costs(instance, {policy}, config, observer).front());
}

MarginTerms disc_margin(const ProblemInstance& instance, const PolicyField& policy, double dt, double grid_term) {
    const BallGrid& g = *policy.grid();
    double exit_rate = 0.0;
    double running = 0.0;
    for (Regime r : {Regime::one, Regime::two}) {
        double pmax = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double p2 = squared_norm(policy.at_node(r, i));
            pmax = std::max(pmax, std::sqrt(p2));
            running = std::max(running, p2 + eval_cost(instance.cost(r), g.coords(i), instance.radius));
        }
        // |∇z| = 2|p̄|
        exit_rate = std::max(exit_rate, instance.regimes.sigma(r) * 2.0 * pmax);
    }
    MarginTerms m;
    m.exit = kExitShiftConstant * std::sqrt(dt) * exit_rate;
    m.step = 0.5 * dt * running;
    m.grid = grid_term;
    return m;
}

bool VerificationReport::passed() const {
    bool ok = optimal_within_band;
    for (const auto& c : challengers) ok = ok && c.not_better;
    if (halving_run) ok = ok && half_within_band && error_not_growing && shift_within_margin_drop;
    return ok;
}

namespace {

PolicyEstimate estimate_of(const SimResult& r) {
    return {r.policy, r.mean, r.std_error, r.n, r.truncation_fraction};
}

}  // namespace

VerificationReport verify_optimality(const ProblemInstance& instance, const ValueFields& values,
                                     const PolicyField& policy, const std::vector<FeedbackPolicy>& challengers,
                                     const SimConfig& config, const VerifyOptions& options) {
    if (challengers.empty()) throw std::invalid_argument("at least one challenger is required");
    VerificationReport rep;
    rep.eps0 = instance.eps0;
    rep.dt = config.dt;
    rep.seed = config.seed;
    rep.reference = value_at(values, instance.eps0, instance.y0);

    const FeedbackPolicy optimal = field_policy(std::make_shared<const PolicyField>(policy));
    std::vector<FeedbackPolicy> all{optimal};
    all.insert(all.end(), challengers.begin(), challengers.end());
    const std::vector<SimResult> runs = simulate_costs(instance, all, config);
    const SimResult& star = runs.front();
    rep.optimal = estimate_of(star);
    rep.margin = disc_margin(instance, policy, config.dt, options.grid_term);
    const double err = std::abs(star.mean - rep.reference);
    rep.optimal_within_band = err <= 3.0 * star.std_error + rep.margin.total();

    for (std::size_t q = 1; q < runs.size(); ++q) {
        const SimResult& r = runs[q];
        ChallengerCheck c;
        c.estimate = estimate_of(r);
        c.not_better = r.mean + 3.0 * r.std_error >= star.mean - 3.0 * star.std_error;
        c.separated = r.mean - star.mean > 5.0 * std::hypot(r.std_error, star.std_error);
        rep.separated_count += c.separated ? 1 : 0;
        rep.challengers.push_back(std::move(c));
    }

    if (options.dt_halving) {
        SimConfig half = config;
        half.dt = 0.5 * config.dt;
        half.record_paths = 0;
        const SimResult h = simulate_cost(instance, optimal, half);
        rep.halving_run = true;
        rep.optimal_half = estimate_of(h);
        rep.margin_half = disc_margin(instance, policy, half.dt, options.grid_term);
        const double err_half = std::abs(h.mean - rep.reference);
        const double se_diff = std::hypot(star.std_error, h.std_error);
        rep.half_within_band = err_half <= 3.0 * h.std_error + rep.margin_half.total();
        rep.error_not_growing = err_half <= err + 3.0 * se_diff;
        rep.shift_within_margin_drop =
            std::abs(star.mean - h.mean) <= rep.margin.total() - rep.margin_half.total() + 3.0 * se_diff;
    }

    rep.wide_intervals = 3.0 * star.std_error > 0.05 * std::abs(rep.reference);
    return rep;
}

}  // namespace rsplan
