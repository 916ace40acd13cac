#include "hedgefit/driver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hedgefit/errors.hpp"
#include "hedgefit/logistic.hpp"

namespace hedgefit {

void RunConfig::validate() const {
    if (experts < 1) throw ConfigError("need K >= 1 experts");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must be in (0,1)");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
    if (omega0 && omega0->size() != experts)
        throw ConfigError("omega0 length must equal the expert count");
}

bool check_convergence(const ParamVector& prev, const ParamVector& next,
                       double tol) {
    if (prev.size() != next.size())
        throw ConfigError("convergence check on mismatched dimensions");
    double sq = 0.0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
        const double d = next[i] - prev[i];
        sq += d * d;
    }
    return std::sqrt(sq) <= tol;
}

namespace {

ParamVector default_theta0(const RunConfig& config, const Dataset& data,
                           const ModelSpec& model) {
    if (config.theta0) {
        if (config.theta0->size() != model.dim())
            throw ConfigError("theta0 dimension does not match model");
        return ParamVector(*config.theta0);
    }
    if (config.model == "logistic") {
        double max_y = data[0].y;
        for (std::size_t i = 1; i < data.size(); ++i)
            max_y = std::max(max_y, data[i].y);
        return ParamVector({1.0, max_y, 0.5});
    }
    throw ConfigError("theta0 required for model '" + config.model + "'");
}

struct LoopState {
    std::vector<ExpertState> experts;
    MixingState mixing;
    std::size_t next_step = 0;
    std::optional<ParamVector> prev_consensus;
};

void save_checkpoint(const std::string& path, const LoopState& loop) {
    nlohmann::json j;
    j["next_step"] = loop.next_step;
    j["log_weights"] = loop.mixing.log_weights();
    j["total_loss"] = loop.mixing.total_loss();
    j["step_losses"] = loop.mixing.step_losses();
    j["risk_history"] = loop.mixing.risk_history();
    for (const auto& e : loop.experts) {
        j["experts"].push_back({{"id", e.id},
                                {"theta", e.theta.values()},
                                {"rng", e.noise.save_state()}});
    }
    if (loop.prev_consensus)
        j["prev_consensus"] = loop.prev_consensus->values();
    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint '" + path + "'");
    out << j.dump();
}

// MixingState has no public mutators for restored history; rebuild it by
// replaying the recorded risk vectors, then overwrite the log weights with
// the saved ones (identical up to the replay anyway).
MixingState restore_mixing(const nlohmann::json& j, const RunConfig& config) {
    MixingState mixing =
        config.omega0
            ? MixingState(*config.omega0, config.beta, config.gamma)
            : MixingState(config.experts, config.beta, config.gamma);
    for (const auto& risks : j.at("risk_history"))
        mixing.update(risks.get<std::vector<double>>());
    return mixing;
}

LoopState load_checkpoint(const std::string& path, const RunConfig& config,
                          std::uint64_t run_seed) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read checkpoint '" + path + "'");
    nlohmann::json j;
    in >> j;

    LoopState loop{{}, restore_mixing(j, config)};
    loop.next_step = j.at("next_step").get<std::size_t>();
    for (const auto& e : j.at("experts")) {
        ExpertState state(e.at("id").get<std::size_t>(),
                          ParamVector(e.at("theta").get<std::vector<double>>()),
                          run_seed);
        state.noise.restore_state(e.at("rng").get<std::string>());
        loop.experts.push_back(std::move(state));
    }
    if (loop.experts.size() != config.experts)
        throw DataError("checkpoint expert count does not match config");
    if (j.contains("prev_consensus"))
        loop.prev_consensus =
            ParamVector(j.at("prev_consensus").get<std::vector<double>>());
    return loop;
}

RunResult run_loop(const RunConfig& config, const Dataset& data,
                   LoopState loop) {
    const ModelSpec model = make_model(config.model);
    const std::size_t m =
        config.subsample_size ? config.subsample_size : data.size();
    const SubsampleSet subsamples = bootstrap(
        data, config.experts + 1, m, config.sample_mode, config.seed);
    const DataView validation = subsamples.validation_view();

    const TimeGrid grid{config.horizon, std::max<std::size_t>(config.steps, 1)};
    const NoiseSchedule schedule{config.epsilon};

    RunResult result{consensus(loop.experts, loop.mixing.mixing())};
    if (config.steps > loop.next_step)
        result.trajectory.reserve(config.steps - loop.next_step);

    for (std::size_t n = loop.next_step; n < config.steps; ++n) {
        const auto pi = loop.mixing.mixing();
        const ParamVector theta_bar = consensus(loop.experts, pi);

        std::vector<double> risks(config.experts);
        for (std::size_t k = 0; k < config.experts; ++k) {
            try {
                risks[k] = risk_measure(loop.experts[k].theta, model,
                                        validation, config.gamma);
            } catch (EvalFault& fault) {
                fault.expert_id = static_cast<long>(k);
                fault.step = static_cast<long>(n);
                throw;
            }
        }
        loop.mixing.update(risks);

        for (std::size_t k = 0; k < config.experts; ++k) {
            auto train = subsamples.view(k);
            if (config.update_mode == UpdateMode::Consensus) {
                consensus_step(theta_bar, loop.experts[k], model, train, grid,
                               schedule, n);
            } else {
                expert_step(loop.experts[k], model, train, grid, schedule, n);
            }
        }

        TrajectoryRecord record;
        record.n = n;
        record.tau = grid.tau(n);
        record.theta_bar = theta_bar.values();
        record.pi = pi;
        record.risks = risks;
        record.step_loss = loop.mixing.step_losses().back();
        record.total_loss = loop.mixing.total_loss();
        record.bound = loop.mixing.bound_report().bound;
        if (config.record_experts) {
            for (const auto& e : loop.experts)
                record.expert_thetas.push_back(e.theta.values());
        }
        result.trajectory.push_back(std::move(record));
        result.steps_completed = n + 1;

        loop.next_step = n + 1;
        if (config.checkpoint_every && !config.checkpoint_path.empty() &&
            loop.next_step % config.checkpoint_every == 0) {
            save_checkpoint(config.checkpoint_path, loop);
        }

        const ParamVector next_bar =
            consensus(loop.experts, loop.mixing.mixing());
        if (check_convergence(theta_bar, next_bar, config.tol)) {
            result.converged = true;
            break;
        }
        loop.prev_consensus = theta_bar;
    }

    result.final_theta = consensus(loop.experts, loop.mixing.mixing());
    result.bound = loop.mixing.bound_report();
    result.validation_objective =
        objective(model, result.final_theta, validation);
    for (const auto& e : loop.experts) {
        result.expert_validation_objectives.push_back(
            objective(model, e.theta, validation));
    }
    return result;
}

LoopState fresh_loop(const RunConfig& config, const Dataset& data) {
    const ModelSpec model = make_model(config.model);
    const ParamVector theta0 = default_theta0(config, data, model);
    LoopState loop{{},
                   config.omega0
                       ? MixingState(*config.omega0, config.beta, config.gamma)
                       : MixingState(config.experts, config.beta, config.gamma)};
    for (std::size_t k = 0; k < config.experts; ++k)
        loop.experts.emplace_back(k, theta0, config.seed);
    return loop;
}

}  // namespace

RunResult run(const RunConfig& config, const Dataset& data) {
    config.validate();
    return run_loop(config, data, fresh_loop(config, data));
}

RunResult run_resumed(const RunConfig& config, const Dataset& data,
                      const std::string& checkpoint_file) {
    config.validate();
    return run_loop(config, data,
                    load_checkpoint(checkpoint_file, config, config.seed));
}

namespace {

const char* mode_name(SampleMode m) {
    return m == SampleMode::WithReplacement ? "with" : "without";
}
const char* mode_name(UpdateMode m) {
    return m == UpdateMode::Consensus ? "consensus" : "per-expert";
}

std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << v[i];
    }
    return os.str();
}

}  // namespace

std::string config_echo(const RunConfig& config) {
    std::ostringstream os;
    os.precision(17);
    os << "data = " << config.data_path << "\n"
       << "x-cols = " << config.x_cols << "\n"
       << "y-col = " << config.y_col << "\n"
       << "experts = " << config.experts << "\n"
       << "subsample-size = " << config.subsample_size << "\n"
       << "replacement = " << mode_name(config.sample_mode) << "\n"
       << "horizon = " << config.horizon << "\n"
       << "steps = " << config.steps << "\n"
       << "epsilon = " << config.epsilon << "\n"
       << "mode = " << mode_name(config.update_mode) << "\n"
       << "gamma = " << config.gamma << "\n"
       << "beta = " << config.beta << "\n"
       << "tol = " << config.tol << "\n"
       << "seed = " << config.seed << "\n"
       << "model = " << config.model << "\n"
       << "record-experts = " << (config.record_experts ? 1 : 0) << "\n";
    if (config.theta0) os << "theta0 = " << join(*config.theta0) << "\n";
    if (config.omega0) os << "omega0 = " << join(*config.omega0) << "\n";
    if (!config.trajectory_path.empty())
        os << "trajectory-out = " << config.trajectory_path << "\n";
    if (!config.summary_path.empty())
        os << "summary-out = " << config.summary_path << "\n";
    if (!config.fit_path.empty()) os << "fit-out = " << config.fit_path << "\n";
    return os.str();
}

namespace {

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

void apply_config_line(RunConfig& config, const std::string& key,
                       const std::string& value) {
    if (key == "data") config.data_path = value;
    else if (key == "x-cols") config.x_cols = value;
    else if (key == "y-col") config.y_col = value;
    else if (key == "experts") config.experts = std::stoul(value);
    else if (key == "subsample-size") config.subsample_size = std::stoul(value);
    else if (key == "replacement") {
        if (value == "with") config.sample_mode = SampleMode::WithReplacement;
        else if (value == "without")
            config.sample_mode = SampleMode::WithoutReplacement;
        else throw ConfigError("replacement must be 'with' or 'without'");
    } else if (key == "horizon") config.horizon = std::stod(value);
    else if (key == "steps") config.steps = std::stoul(value);
    else if (key == "epsilon") config.epsilon = std::stod(value);
    else if (key == "mode") {
        if (value == "consensus") config.update_mode = UpdateMode::Consensus;
        else if (value == "per-expert")
            config.update_mode = UpdateMode::PerExpert;
        else throw ConfigError("mode must be 'consensus' or 'per-expert'");
    } else if (key == "gamma") config.gamma = std::stod(value);
    else if (key == "beta") config.beta = std::stod(value);
    else if (key == "tol") config.tol = std::stod(value);
    else if (key == "seed") config.seed = std::stoull(value);
    else if (key == "model") config.model = value;
    else if (key == "record-experts") config.record_experts = value != "0";
    else if (key == "theta0") config.theta0 = parse_double_list(value);
    else if (key == "omega0") config.omega0 = parse_double_list(value);
    else if (key == "trajectory-out") config.trajectory_path = value;
    else if (key == "summary-out") config.summary_path = value;
    else if (key == "fit-out") config.fit_path = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    RunConfig config;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ConfigError("malformed config line " +
                                  std::to_string(lineno));
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            apply_config_line(config, key, value);
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad value for '" + key + "' at line " +
                              std::to_string(lineno));
        }
    }
    return config;
}

void emit_outputs(const RunResult& result, const RunConfig& config,
                  const Dataset& data, const ModelSpec& model) {
    if (!config.trajectory_path.empty()) {
        std::ofstream out(config.trajectory_path);
        if (!out)
            throw DataError("cannot write '" + config.trajectory_path + "'");
        out.precision(17);
        const std::size_t p = result.final_theta.size();
        out << "n,tau";
        for (std::size_t j = 0; j < p; ++j) out << ",theta_bar_" << j;
        for (std::size_t k = 1; k <= config.experts; ++k) out << ",pi_" << k;
        for (std::size_t k = 1; k <= config.experts; ++k) out << ",r_" << k;
        out << ",L_n,L,bound";
        if (config.record_experts) {
            for (std::size_t k = 1; k <= config.experts; ++k)
                for (std::size_t j = 0; j < p; ++j)
                    out << ",theta_" << k << "_" << j;
        }
        out << "\n";
        for (const auto& rec : result.trajectory) {
            out << rec.n << "," << rec.tau;
            for (double v : rec.theta_bar) out << "," << v;
            for (double v : rec.pi) out << "," << v;
            for (double v : rec.risks) out << "," << v;
            out << "," << rec.step_loss << "," << rec.total_loss << ","
                << rec.bound;
            for (const auto& theta : rec.expert_thetas)
                for (double v : theta) out << "," << v;
            out << "\n";
        }
    }

    if (!config.summary_path.empty()) {
        std::ofstream out(config.summary_path);
        if (!out) throw DataError("cannot write '" + config.summary_path + "'");
        out.precision(17);
        out << "# run summary\n"
            << "# trajectory columns: n, tau, theta_bar_0..theta_bar_{p-1}, "
               "pi_1..pi_K, r_1..r_K, L_n, L, bound"
            << (config.record_experts ? ", theta_k_j per expert" : "") << "\n"
            << "# rng = " << NoiseStream::kAlgorithm << "\n"
            << "# final theta = " << join(result.final_theta.values()) << "\n"
            << "# steps completed = " << result.steps_completed << "\n"
            << "# converged = " << (result.converged ? 1 : 0) << "\n"
            << "# validation objective = " << result.validation_objective
            << "\n"
            << "# hedge bound = " << result.bound.bound << "\n"
            << "# total mixture loss = " << result.bound.total_loss << "\n"
            << "# bound slack = " << result.bound.slack << "\n"
            << "# bound satisfied = " << (result.bound.satisfied ? 1 : 0)
            << "\n"
            << "# config echo (parseable):\n"
            << config_echo(config);
    }

    if (!config.fit_path.empty()) {
        std::ofstream out(config.fit_path);
        if (!out) throw DataError("cannot write '" + config.fit_path + "'");
        out.precision(17);
        out << "x,y,model\n";
        for (std::size_t i = 0; i < data.size(); ++i) {
            out << join(data[i].x) << "," << data[i].y << ","
                << model.predict(result.final_theta, data[i].x) << "\n";
        }
    }
}

}  // namespace hedgefit
