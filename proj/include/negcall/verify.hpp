#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "negcall/economy.hpp"
#include "negcall/scenario.hpp"
#include "negcall/stats.hpp"

namespace negcall {

/// Outcome of one acceptance criterion: its sub-reports plus an overall
/// verdict. Criteria that a backend cannot exercise are marked inapplicable
/// (with the reason in `note`) and excluded from the suite verdict.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool applicable = true;
    bool passed = false;
    std::vector<TestReport> reports;
    std::string note;
};

struct VerifySuiteResult {
    std::vector<CriterionResult> criteria;
    bool all_passed() const;
};

struct VerifyOptions {
    /// Test hook: perturbs the pinned analytic anchor so the suite must fail.
    bool corrupt_oracle = false;
};

/// Runs every criterion feasible under the configured backend. Statistical
/// scales (path counts, grids, levels) come from the config; tolerances are
/// fixed. Throws ConfigError for invalid configs or n_paths < 100 (no
/// statistical verdict below that).
VerifySuiteResult run_verify_suite(const ScenarioConfig& cfg, const VerifyOptions& opt = {});

/// Deterministic report document: config echo plus all criterion results.
/// Contains no timestamps, so identical configs produce identical bytes.
nlohmann::json verify_report_json(const ScenarioConfig& cfg, const VerifySuiteResult& result);

/// One row of the discrete-hedging error study.
struct ConvergeRow {
    std::size_t n_steps = 0;
    double rms = 0.0;
    double rms_se = 0.0;
};

struct ConvergeResult {
    std::vector<ConvergeRow> rows;
    std::optional<SlopeFit> fit;  ///< absent with < 3 usable rows or zero errors
};

/// Replication-error study over cfg.n_list on calendar-uniform grids with
/// cfg.converge_paths paths per row, hedging `claim`.
ConvergeResult run_hedge_convergence(const ScenarioConfig& cfg, const Claim& claim);

/// Streaming whole-ensemble statistics for the discretized backends: identity
/// maxima, stop counts, probe-node moment sums, and wealth-consistency maxima.
/// merge() folds chunk partials; fingerprint() exposes every accumulated
/// number for bit-reproducibility checks.
class EnsembleStats {
  public:
    EnsembleStats() = default;
    EnsembleStats(const TimeGrid& grid, std::vector<std::size_t> probe_nodes);

    void add(const MarketPath& mp);
    void merge(const EnsembleStats& other);
    std::vector<double> fingerprint() const;

    const std::vector<std::size_t>& probe_nodes() const { return probes_; }
    std::size_t n_paths() const { return n_paths_; }
    std::size_t n_stopped() const { return n_stopped_; }
    std::size_t n_unstopped() const { return n_paths_ - n_stopped_; }

    double max_s2_init_err() const { return max_s2_init_err_; }
    double max_s2_identity_err() const { return max_s2_identity_err_; }
    double max_stopped_terminal_err() const { return max_stopped_terminal_err_; }
    double max_box_w0() const { return max_box_w0_; }
    double max_box_identity_err() const { return max_box_identity_err_; }
    double max_box_terminal_err() const { return max_box_terminal_err_; }
    double max_w1w2_init_err() const { return max_w1w2_init_err_; }
    double max_w1w2_identity_err() const { return max_w1w2_identity_err_; }
    double max_w1w2_gap_err() const { return max_w1w2_gap_err_; }

    struct Moments {
        double mean = 0.0;
        double std_error = 0.0;
        std::size_t n = 0;
    };
    Moments probe_s1(std::size_t i) const;
    Moments probe_m(std::size_t i) const;
    Moments probe_s2(std::size_t i) const;
    Moments terminal_s1() const;
    Moments terminal_payoff() const;
    Moments unstopped_m() const;

  private:
    std::vector<std::size_t> probes_;
    std::size_t n_paths_ = 0;
    std::size_t n_stopped_ = 0;
    double max_s2_init_err_ = 0.0;
    double max_s2_identity_err_ = 0.0;
    double max_stopped_terminal_err_ = 0.0;
    double max_box_w0_ = 0.0;
    double max_box_identity_err_ = 0.0;
    double max_box_terminal_err_ = 0.0;
    double max_w1w2_init_err_ = 0.0;
    double max_w1w2_identity_err_ = 0.0;
    double max_w1w2_gap_err_ = 0.0;
    std::vector<KahanSum> s1_sum_, s1_sq_, m_sum_, m_sq_, s2_sum_, s2_sq_;
    KahanSum s1t_sum_, s1t_sq_;
    KahanSum d_sum_, d_sq_;
    KahanSum mu_sum_, mu_sq_;  // terminal integral value among unstopped paths
};

/// Runs the configured discretized ensemble (grid, claim, bridge setting,
/// seed, threads all from cfg) and returns the folded statistics.
EnsembleStats run_market_ensemble(const ScenarioConfig& cfg, const Claim& claim);

/// Interior probe indices near calendar times {0.25, 0.5, 0.75}, deduplicated.
std::vector<std::size_t> default_probe_nodes(const TimeGrid& grid);

/// Streaming statistics for the exact-law backend: ruin-depth tail counts,
/// terminal-value exactness, and terminal payoff moments.
class ExactStats {
  public:
    ExactStats() = default;
    explicit ExactStats(std::vector<double> levels);

    void add(const ExactDraw& draw, double payoff, double a);
    void merge(const ExactStats& other);
    std::vector<double> fingerprint() const;

    const std::vector<double>& levels() const { return levels_; }
    std::size_t level_hits(std::size_t i) const { return hits_[i]; }
    std::size_t n() const { return n_; }
    double max_terminal_err() const { return max_terminal_err_; }
    EnsembleStats::Moments payoff_moments() const;

  private:
    std::vector<double> levels_;
    std::vector<std::size_t> hits_;
    std::size_t n_ = 0;
    double max_terminal_err_ = 0.0;
    KahanSum d_sum_, d_sq_;
};

/// Runs cfg.n_paths exact-law draws of (hitting time, pre-hit minimum,
/// terminal value) plus independent terminal payoffs of `claim`.
ExactStats run_exact_ensemble(const ScenarioConfig& cfg, const Claim& claim);

}  // namespace negcall
