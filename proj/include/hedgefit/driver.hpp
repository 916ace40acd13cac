#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hedgefit/aggregator.hpp"
#include "hedgefit/dataset.hpp"
#include "hedgefit/dynamics.hpp"
#include "hedgefit/model.hpp"

namespace hedgefit {

enum class UpdateMode { PerExpert, Consensus };

struct RunConfig {
    // data
    std::string data_path;
    std::string x_cols = "0";
    std::string y_col = "1";

    // resampling
    std::size_t experts = 25;        // K
    std::size_t subsample_size = 0;  // m; 0 means use d
    SampleMode sample_mode = SampleMode::WithReplacement;

    // dynamics
    double horizon = 1.0;
    std::size_t steps = 100000;
    double epsilon = 0.001;
    UpdateMode update_mode = UpdateMode::Consensus;

    // aggregation
    double gamma = 0.01;
    double beta = 0.5;
    std::optional<std::vector<double>> omega0;

    // loop control
    double tol = 1e-9;
    std::uint64_t seed = 0;

    // model
    std::string model = "logistic";
    std::optional<std::vector<double>> theta0;

    // outputs
    std::string trajectory_path;
    std::string summary_path;
    std::string fit_path;
    bool record_experts = false;

    // checkpointing (optional feature)
    std::string checkpoint_path;
    std::size_t checkpoint_every = 0;  // 0 disables

    void validate() const;
};

struct TrajectoryRecord {
    std::size_t n = 0;
    double tau = 0.0;
    std::vector<double> theta_bar;
    std::vector<double> pi;
    std::vector<double> risks;
    double step_loss = 0.0;
    double total_loss = 0.0;
    double bound = 0.0;
    std::vector<std::vector<double>> expert_thetas;  // only if record_experts
};

struct RunResult {
    ParamVector final_theta;
    std::vector<TrajectoryRecord> trajectory;
    BoundReport bound;
    bool converged = false;
    std::size_t steps_completed = 0;
    double validation_objective = 0.0;
    std::vector<double> expert_validation_objectives;
};

// Execute the full aggregation loop: bootstrap, uniform init, then per step
// consensus -> risks -> weight update -> expert moves, until the consensus
// displacement drops below tol or the step budget is exhausted.
RunResult run(const RunConfig& config, const Dataset& data);

// As run(), but resuming from a checkpoint file written by a previous run
// with the same config.
RunResult run_resumed(const RunConfig& config, const Dataset& data,
                      const std::string& checkpoint_file);

bool check_convergence(const ParamVector& prev, const ParamVector& next,
                       double tol);

// Write trajectory CSV, summary document, and plot-ready fit CSV to the
// paths named in the config (empty path = skip that file).
void emit_outputs(const RunResult& result, const RunConfig& config,
                  const Dataset& data, const ModelSpec& model);

// Flat key=value config file mirroring the CLI flags; '#' starts a comment.
RunConfig load_config(const std::string& path);

// The exact key=value lines load_config would parse back to this config.
std::string config_echo(const RunConfig& config);

}  // namespace hedgefit
