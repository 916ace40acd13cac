#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hedgefit/aggregator.hpp"
#include "hedgefit/driver.hpp"
#include "hedgefit/errors.hpp"
#include "hedgefit/logistic.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

using hedgefit::RunConfig;

void add_override_flags(CLI::App* cmd, RunConfig& config, std::string& theta0,
                        std::string& omega0_path, std::string& replacement,
                        std::string& mode, double& delta) {
    cmd->add_option("--data", config.data_path, "input CSV path");
    cmd->add_option("--x-cols", config.x_cols,
                    "comma-separated x column names or indices");
    cmd->add_option("--y-col", config.y_col, "y column name or index");
    cmd->add_option("--experts,-K", config.experts, "number of experts K");
    cmd->add_option("--subsample-size,-m", config.subsample_size,
                    "bootstrap subsample size m (0 = dataset size)");
    cmd->add_option("--replacement", replacement,
                    "bootstrap mode: with | without");
    cmd->add_option("--seed", config.seed, "run seed");
    cmd->add_option("--horizon,-T", config.horizon, "time horizon T");
    cmd->add_option("--steps,-N", config.steps, "number of steps N");
    cmd->add_option("--delta", delta, "step size (sets steps = horizon/delta)");
    cmd->add_option("--epsilon", config.epsilon, "noise amplitude");
    cmd->add_option("--gamma", config.gamma, "risk sharpness gamma");
    cmd->add_option("--beta", config.beta, "weight decay base beta");
    cmd->add_option("--tol", config.tol, "convergence tolerance");
    cmd->add_option("--mode", mode, "update mode: consensus | per-expert");
    cmd->add_option("--model", config.model, "model name");
    cmd->add_option("--theta0", theta0, "initial parameters, comma-separated");
    cmd->add_option("--omega0", omega0_path,
                    "path to a file with K initial weights");
    cmd->add_option("--trajectory-out", config.trajectory_path);
    cmd->add_option("--summary-out", config.summary_path);
    cmd->add_option("--fit-out", config.fit_path);
    cmd->add_flag("--record-experts", config.record_experts,
                  "include per-expert parameters in the trajectory");
    cmd->add_option("--checkpoint", config.checkpoint_path,
                    "checkpoint file path");
    cmd->add_option("--checkpoint-every", config.checkpoint_every,
                    "steps between checkpoints (0 = off)");
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<double> read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hedgefit::ConfigError("cannot open '" + path + "'");
    std::vector<double> v;
    double x;
    while (in >> x) v.push_back(x);
    return v;
}

int cmd_run(const RunConfig& config, bool resume) {
    const hedgefit::Dataset data = hedgefit::load_csv(
        config.data_path, hedgefit::ColumnSpec::parse(config.x_cols),
        hedgefit::ColumnSpec::parse(config.y_col));
    const hedgefit::RunResult result =
        resume ? hedgefit::run_resumed(config, data, config.checkpoint_path)
               : hedgefit::run(config, data);
    const auto model = hedgefit::make_model(config.model);
    hedgefit::emit_outputs(result, config, data, model);

    std::cout.precision(10);
    std::cout << "steps: " << result.steps_completed
              << (result.converged ? " (converged)" : "") << "\n";
    std::cout << "theta*:";
    for (double v : result.final_theta.values()) std::cout << " " << v;
    std::cout << "\nvalidation objective: " << result.validation_objective
              << "\nmixture loss L = " << result.bound.total_loss
              << ", hedge bound = " << result.bound.bound
              << ", satisfied = " << (result.bound.satisfied ? "yes" : "no")
              << "\n";
    return result.bound.satisfied ? 0 : kExitNumeric;
}

int cmd_validate_gradient(const std::string& model_name, int trials,
                          std::uint64_t seed) {
    if (model_name != "logistic") {
        std::cerr << "validate-gradient supports the built-in logistic model\n";
        return kExitConfig;
    }
    const auto model = hedgefit::make_logistic_model();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const double n0 = 0.5 + 299.5 * unit(rng);
        const double ne = 0.5 + 299.5 * unit(rng);
        const double r = 0.05 + 1.95 * unit(rng);
        hedgefit::ParamVector theta({n0, ne, r});

        std::vector<hedgefit::DataPoint> pts;
        const int count = 3 + static_cast<int>(unit(rng) * 8);
        for (int i = 0; i < count; ++i)
            pts.push_back({{unit(rng) * 24.0}, unit(rng) * 250.0});
        hedgefit::Dataset ds(std::move(pts));

        const auto exact =
            hedgefit::analytic_gradient(model, theta, hedgefit::DataView(ds));
        const auto approx = hedgefit::finite_difference_gradient(
            model, theta, hedgefit::DataView(ds), 1e-6);
        for (std::size_t j = 0; j < exact.size(); ++j) {
            const double scale =
                std::max({1.0, std::abs(exact[j]), std::abs(approx[j])});
            worst = std::max(worst, std::abs(exact[j] - approx[j]) / scale);
        }
    }
    std::cout << "max relative gradient error over " << trials
              << " trials: " << worst << "\n";
    if (worst >= 1e-5) {
        std::cerr << "gradient validation FAILED\n";
        return kExitNumeric;
    }
    std::cout << "gradient validation passed\n";
    return 0;
}

// Re-simulate the weight recursion from the risk columns of a trajectory CSV
// and cross-check the recorded loss ledger and hedge bound.
int cmd_check_bound(const std::string& path, double beta) {
    std::ifstream in(path);
    if (!in) throw hedgefit::DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw hedgefit::DataError("'" + path + "' is empty");

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    std::vector<std::size_t> risk_cols;
    std::size_t loss_col = 0, total_col = 0, bound_col = 0;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i].rfind("r_", 0) == 0) risk_cols.push_back(i);
        else if (header[i] == "L_n") loss_col = i;
        else if (header[i] == "L") total_col = i;
        else if (header[i] == "bound") bound_col = i;
    }
    if (risk_cols.empty())
        throw hedgefit::DataError("no r_k columns in trajectory");

    hedgefit::MixingState mixing(risk_cols.size(), beta, 1.0);
    double worst_ledger = 0.0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
        std::vector<double> risks;
        for (std::size_t c : risk_cols) risks.push_back(cells.at(c));
        mixing.update(risks);
        worst_ledger = std::max(
            {worst_ledger,
             std::abs(cells.at(loss_col) - mixing.step_losses().back()),
             std::abs(cells.at(total_col) - mixing.total_loss()),
             std::abs(cells.at(bound_col) - mixing.bound_report().bound)});
        ++rows;
    }
    const auto report = mixing.bound_report();
    std::cout.precision(10);
    std::cout << "rows: " << rows << "\nL = " << report.total_loss
              << "\nbound = " << report.bound << "\nslack = " << report.slack
              << "\nledger max deviation = " << worst_ledger
              << "\nbound satisfied = " << (report.satisfied ? "yes" : "no")
              << "\n";
    return (report.satisfied && worst_ledger < 1e-6) ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"expert-advice aggregation for point estimation"};
    app.require_subcommand(1);

    RunConfig config;
    std::string config_path, theta0_str, omega0_path;
    std::string replacement = "with", mode = "consensus";
    double delta = 0.0;
    bool resume = false;

    auto* run_cmd = app.add_subcommand("run", "run the full aggregation loop");
    run_cmd->add_option("--config", config_path,
                        "key=value config file; flags override it");
    add_override_flags(run_cmd, config, theta0_str, omega0_path, replacement,
                       mode, delta);
    run_cmd->add_flag("--resume", resume, "resume from --checkpoint");

    std::string vg_model = "logistic";
    int vg_trials = 100;
    std::uint64_t vg_seed = 12345;
    auto* vg_cmd = app.add_subcommand(
        "validate-gradient", "compare analytic and finite-difference gradients");
    vg_cmd->add_option("--model", vg_model);
    vg_cmd->add_option("--trials", vg_trials);
    vg_cmd->add_option("--seed", vg_seed);

    std::string traj_path;
    double cb_beta = 0.5;
    auto* cb_cmd = app.add_subcommand(
        "check-bound", "re-verify the mixture-loss bound from a trajectory CSV");
    cb_cmd->add_option("--trajectory", traj_path)->required();
    cb_cmd->add_option("--beta", cb_beta, "beta the run used");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            if (!config_path.empty()) {
                // file provides the base, explicitly passed flags override
                RunConfig file_cfg = hedgefit::load_config(config_path);
                auto set = [&](const char* flag) {
                    return run_cmd->count(flag) > 0;
                };
                if (set("--data")) file_cfg.data_path = config.data_path;
                if (set("--x-cols")) file_cfg.x_cols = config.x_cols;
                if (set("--y-col")) file_cfg.y_col = config.y_col;
                if (set("--experts")) file_cfg.experts = config.experts;
                if (set("--subsample-size"))
                    file_cfg.subsample_size = config.subsample_size;
                if (set("--seed")) file_cfg.seed = config.seed;
                if (set("--horizon")) file_cfg.horizon = config.horizon;
                if (set("--steps")) file_cfg.steps = config.steps;
                if (set("--epsilon")) file_cfg.epsilon = config.epsilon;
                if (set("--gamma")) file_cfg.gamma = config.gamma;
                if (set("--beta")) file_cfg.beta = config.beta;
                if (set("--tol")) file_cfg.tol = config.tol;
                if (set("--model")) file_cfg.model = config.model;
                if (set("--trajectory-out"))
                    file_cfg.trajectory_path = config.trajectory_path;
                if (set("--summary-out"))
                    file_cfg.summary_path = config.summary_path;
                if (set("--fit-out")) file_cfg.fit_path = config.fit_path;
                if (set("--record-experts"))
                    file_cfg.record_experts = config.record_experts;
                if (set("--checkpoint"))
                    file_cfg.checkpoint_path = config.checkpoint_path;
                if (set("--checkpoint-every"))
                    file_cfg.checkpoint_every = config.checkpoint_every;
                if (!set("--replacement"))
                    replacement = file_cfg.sample_mode ==
                                          hedgefit::SampleMode::WithReplacement
                                      ? "with"
                                      : "without";
                if (!set("--mode"))
                    mode = file_cfg.update_mode ==
                                   hedgefit::UpdateMode::Consensus
                               ? "consensus"
                               : "per-expert";
                if (theta0_str.empty() && file_cfg.theta0)
                    config.theta0 = file_cfg.theta0;
                if (omega0_path.empty() && file_cfg.omega0)
                    config.omega0 = file_cfg.omega0;
                file_cfg.theta0 = config.theta0;
                file_cfg.omega0 = config.omega0;
                config = file_cfg;
            }
            config.sample_mode = replacement == "without"
                                     ? hedgefit::SampleMode::WithoutReplacement
                                     : hedgefit::SampleMode::WithReplacement;
            if (replacement != "with" && replacement != "without")
                throw hedgefit::ConfigError("--replacement must be with|without");
            if (mode == "per-expert")
                config.update_mode = hedgefit::UpdateMode::PerExpert;
            else if (mode == "consensus")
                config.update_mode = hedgefit::UpdateMode::Consensus;
            else
                throw hedgefit::ConfigError("--mode must be consensus|per-expert");
            if (delta > 0.0)
                config.steps = static_cast<std::size_t>(
                    std::llround(config.horizon / delta));
            if (!theta0_str.empty()) config.theta0 = parse_list(theta0_str);
            if (!omega0_path.empty())
                config.omega0 = read_vector_file(omega0_path);
            if (config.data_path.empty())
                throw hedgefit::ConfigError("--data is required");
            return cmd_run(config, resume);
        }
        if (vg_cmd->parsed())
            return cmd_validate_gradient(vg_model, vg_trials, vg_seed);
        if (cb_cmd->parsed()) return cmd_check_bound(traj_path, cb_beta);
    } catch (const hedgefit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const hedgefit::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const hedgefit::EvalFault& e) {
        std::cerr << "numeric fault: " << e.what();
        if (e.expert_id >= 0)
            std::cerr << " (expert " << e.expert_id << ", step " << e.step
                      << ")";
        std::cerr << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
