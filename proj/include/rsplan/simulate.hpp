#pragma once

// Monte Carlo evaluation of the discounted production-plus-inventory cost
//
//   J(p) = E ∫_0^τ e^{−∫_0^s α_{ε(r)} dr} (|p(s)|² + f_{ε(s)}(y(s))) ds
//
// for the Markov-modulated inventory dynamics dy = p dt + σ_{ε(t)} dw, stopped
// at the first exit τ of |y| from the open ball.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsplan/hjb.hpp"

namespace rsplan {

struct RegimePath {
    Regime start = Regime::one;
    /// Strictly increasing jump times; the regime flips at each.
    std::vector<double> jump_times;
    /// regimes[0] = start, regimes[k] = regime after the k-th jump.
    std::vector<Regime> regimes;

    [[nodiscard]] Regime at(double t) const;
};

/// Exponential holding times with rate a1 in regime 1 and a2 in regime 2,
/// truncated at the horizon.
RegimePath sample_regime_path(const RegimeParams& rates, Regime eps0, double horizon, std::mt19937_64& rng);

/// Lazily sampled regime chain, drawing a holding time only when needed.
class RegimeClock {
public:
    RegimeClock(const RegimeParams& rates, Regime eps0, std::mt19937_64& rng);

    [[nodiscard]] Regime current() const { return current_; }
    [[nodiscard]] double next_jump() const { return next_jump_; }
    /// Jump at next_jump() and draw the following holding time.
    void advance();

private:
    double holding_time();

    const RegimeParams* rates_;
    std::mt19937_64* rng_;
    Regime current_;
    double next_jump_ = 0.0;
};

using PolicyRule = std::function<std::array<double, 3>(Regime, std::span<const double>)>;

struct FeedbackPolicy {
    std::string name;
    PolicyRule rule;
};

FeedbackPolicy zero_policy();
FeedbackPolicy field_policy(std::shared_ptr<const PolicyField> field, std::string name = "optimal");
FeedbackPolicy scaled_policy(const FeedbackPolicy& base, double factor, std::string name);
/// The base policy applied as if the regime were the other one.
FeedbackPolicy swapped_policy(const FeedbackPolicy& base, std::string name);
/// {zero, 0.5·p*, 1.5·p*, p* with regimes swapped}
std::vector<FeedbackPolicy> default_challengers(const FeedbackPolicy& optimal);

struct SimConfig {
    double dt = 0.0;
    std::size_t n_paths = 0;
    double horizon_cap = 0.0;
    std::uint64_t seed = 42;
    /// Worker threads; 0 picks the hardware concurrency. Results do not
    /// depend on this.
    unsigned threads = 0;
    /// Number of leading paths whose full trajectories are recorded.
    std::size_t record_paths = 0;
    /// Keep per-path outcomes in the result.
    bool keep_outcomes = false;
};

/// dt = 10⁻³ R²/σ_max², horizon_cap = 50/min(α1, α2, 0.01), seed 42.
SimConfig default_sim_config(const ProblemInstance& instance, std::size_t n_paths);

struct StepRecord {
    std::size_t path = 0;
    double t = 0.0;
    Regime regime = Regime::one;
    std::array<double, 3> y{};
    /// Accumulated discount exponent D(t) = ∫_0^t α_{ε(s)} ds.
    double discount = 0.0;
    /// Cost accumulated up to t.
    double cost = 0.0;
    /// Coefficients used for the step that ends at t (unset on the first record).
    double sigma = 0.0;
    double alpha = 0.0;
};

struct PathOutcome {
    double cost = 0.0;
    double exit_time = 0.0;
    /// |y(τ)|; for truncated paths the norm at the horizon.
    double exit_norm = 0.0;
    bool truncated = false;
};

struct SimResult {
    std::string policy;
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    double truncation_fraction = 0.0;
    double mean_exit_time = 0.0;
    std::vector<PathOutcome> outcomes;
    std::vector<StepRecord> samples;
};

/// Failure inside a single path, e.g. a nonfinite state or a policy error.
class SimulationError : public std::runtime_error {
public:
    SimulationError(std::size_t path, std::size_t step, const std::string& what)
        : std::runtime_error("path " + std::to_string(path) + ", step " + std::to_string(step) + ": " + what),
          path_(path),
          step_(step) {}

    [[nodiscard]] std::size_t path() const { return path_; }
    [[nodiscard]] std::size_t step() const { return step_; }

private:
    std::size_t path_;
    std::size_t step_;
};

using StepObserver = std::function<void(const StepRecord&)>;

/// Euler–Maruyama with steps split at regime jumps. Paths use independent
/// substreams derived from (seed, path index), so the same path index sees the
/// same regime chain and Brownian increments under every policy. An observer,
/// if given, sees every step and forces sequential execution.
SimResult simulate_cost(const ProblemInstance& instance, const FeedbackPolicy& policy, const SimConfig& config,
                        const StepObserver& observer = {});

/// Several policies path by path against shared randomness; each result is
/// identical to a separate simulate_cost call with the same config.
std::vector<SimResult> simulate_costs(const ProblemInstance& instance, const std::vector<FeedbackPolicy>& policies,
                                      const SimConfig& config, const StepObserver& observer = {});

/// −ζ(1/2)/√(2π): mean overshoot, in units of σ√dt, of a Gaussian random walk
/// monitored at discrete times.
inline constexpr double kExitShiftConstant = 0.5825971579390106;

struct MarginTerms {
    double exit = 0.0;
    double step = 0.0;
    double grid = 0.0;
    [[nodiscard]] double total() const { return exit + step + grid; }
};

/// Allowance for the bias of the estimator of J(p*) at step dt: the late exit
/// of step-end monitoring (kExitShiftConstant·√dt·max_j σ_j sup|∇z_j|), the
/// left-point quadrature (½dt·sup(|p̄|² + f)) and the given grid term.
MarginTerms disc_margin(const ProblemInstance& instance, const PolicyField& policy, double dt, double grid_term);

struct PolicyEstimate {
    std::string name;
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    double truncation_fraction = 0.0;
};

struct ChallengerCheck {
    PolicyEstimate estimate;
    bool not_better = false;  ///< Ĵ(q) + 3 se(q) >= Ĵ(p*) − 3 se(p*)
    bool separated = false;   ///< Ĵ(q) − Ĵ(p*) > 5 sqrt(se(q)² + se(p*)²)
};

struct VerifyOptions {
    /// Grid discretization allowance entering disc_margin.
    double grid_term = 0.0;
    /// Rerun the optimal policy at dt/2 and check the margin's scaling.
    bool dt_halving = true;
};

struct VerificationReport {
    double reference = 0.0;  ///< z_{ε0}(y0)
    Regime eps0 = Regime::one;
    double dt = 0.0;
    std::uint64_t seed = 0;
    PolicyEstimate optimal;
    MarginTerms margin;
    bool optimal_within_band = false;
    std::vector<ChallengerCheck> challengers;

    bool halving_run = false;
    PolicyEstimate optimal_half;
    MarginTerms margin_half;
    bool half_within_band = false;
    bool error_not_growing = false;
    bool shift_within_margin_drop = false;

    int separated_count = 0;
    /// 3·se(p*) exceeds 5% of the reference value.
    bool wide_intervals = false;

    /// Band check, all challenger checks and (when run) the dt-halving checks.
    [[nodiscard]] bool passed() const;
};

VerificationReport verify_optimality(const ProblemInstance& instance, const ValueFields& values,
                                     const PolicyField& policy, const std::vector<FeedbackPolicy>& challengers,
                                     const SimConfig& config, const VerifyOptions& options = {});

}  // namespace rsplan
