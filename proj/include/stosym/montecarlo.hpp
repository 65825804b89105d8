#pragma once

#include "stosym/doob.hpp"
#include "stosym/transform.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace stosym {

struct McConfig {
    std::size_t n_paths = 100000;
    double dt = 1e-3;
    double horizon = 1.0;
    std::uint64_t seed = 42;
    std::map<std::string, double> param_values;
    std::vector<double> x0;
    /// Times at which states are recorded, on the clock of the bundle
    /// (the transformed clock for transformed bundles).
    std::vector<double> eval_times{1.0};
    /// Highest total degree of the monomials compared by weak_compare.
    int degree = 2;
    /// Worker threads; 0 uses the OpenMP default.
    int threads = 0;

    void validate(const Sde& sde) const;
};

/// Simulated (or transformed) paths. Per path the state X and the driving
/// Brownian motion W are stored at the evaluation times, together with the
/// Girsanov log-weight, the total transformed clock, and the states at the
/// start and end of the original horizon.
struct PathBundle {
    McConfig cfg;
    std::shared_ptr<const Sde> source;           // SDE that generated the paths
    std::optional<FiniteTransform> applied;      // transformation applied on replay
    std::vector<std::string> vars;
    std::optional<std::string> time_var;
    std::size_t n = 0;
    std::size_t m = 0;

    std::vector<double> X;          // [path][eval][n]
    std::vector<double> W;          // [path][eval][m]
    std::vector<double> logw;       // [path]
    std::vector<double> clock;      // [path]
    std::vector<double> x_initial;  // [path][n]
    std::vector<double> x_final;    // [path][n]

    std::size_t paths() const { return logw.size(); }
    std::size_t evals() const { return cfg.eval_times.size(); }
    const double* x(std::size_t path, std::size_t eval) const { return &X[(path * evals() + eval) * n]; }
    const double* w(std::size_t path, std::size_t eval) const { return &W[(path * evals() + eval) * m]; }
};

/// Euler-Maruyama paths, parallel over paths. Path i uses its own random
/// stream derived from (seed, i), and all reductions use a fixed pairwise
/// order, so results do not depend on the number of threads.
PathBundle simulate(const Sde& sde, const McConfig& cfg);

/// Replays the generating paths through P_T: Girsanov weight from h, noise
/// sqrt(eta) B (dW - h dt), new clock int eta dt, and state Phi(X)
/// interpolated linearly onto the evaluation times of the new clock.
PathBundle transform_paths(const PathBundle& bundle, const FiniteTransform& t);

/// Straightforward single-threaded versions kept as references: they store
/// whole grids and apply the transformation afterwards.
PathBundle simulate_serial(const Sde& sde, const McConfig& cfg);
PathBundle transform_paths_serial(const PathBundle& bundle, const FiniteTransform& t);

/// Sum in a fixed pairwise order.
double pairwise_sum(const double* v, std::size_t n);

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
};

/// Self-normalized weighted mean of f(X, W) at an evaluation index, with
/// the importance-sampling standard error. Weights are ignored (all one)
/// when use_weights is false.
Estimate weighted_mean(const PathBundle& b, std::size_t eval,
                       const std::function<double(const double* x, const double* w)>& f, bool use_weights = true);

/// Plain mean of exp(logw) with its standard error.
Estimate mean_weight(const PathBundle& b);

/// Effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(const PathBundle& b);

struct CompareThresholds {
    double z_max = 4.0;
    double p_min = 1e-3;
};

struct MomentComparison {
    double time = 0.0;
    std::string label;  // e.g. "x^2", "x*y"
    double transformed = 0.0;
    double direct = 0.0;
    double se = 0.0;
    double z = 0.0;
};

struct KsComparison {
    double time = 0.0;
    std::string coordinate;
    double statistic = 0.0;
    double n_eff = 0.0;
    double p_value = 1.0;
};

struct CompareReport {
    std::vector<MomentComparison> moments;
    std::vector<KsComparison> ks;
    CompareThresholds thresholds;
    double max_abs_z = 0.0;
    double min_p = 1.0;
    bool pass = false;
};

/// Moments up to cfg.degree and per-coordinate KS tests between a weighted
/// transformed bundle and a plain direct bundle. Coordinates that are
/// deterministic in both bundles (e.g. the time coordinate) are skipped.
CompareReport weak_compare(const PathBundle& transformed, const PathBundle& direct, const CompareThresholds& th = {},
                           bool use_weights = true);

/// Asymptotic Kolmogorov distribution tail P(K > lambda).
double kolmogorov_tail(double lambda);

struct PathwiseReport {
    double max_discrepancy = 0.0;
    double mean_discrepancy = 0.0;
    std::size_t paths = 0;
};

/// Per path |sum h dW - sum |h|^2 dt / 2 - (hpot(X_T) - hpot(X_0))| along
/// the generating paths of the bundle.
PathwiseReport doob_pathwise_check(const PathBundle& bundle, const DensityRecipe& recipe);

/// CSV with columns path_id,t,X_1..X_n,logw; one row per path and time.
void write_csv(std::ostream& os, const PathBundle& b);

}  // namespace stosym
