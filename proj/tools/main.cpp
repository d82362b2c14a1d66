// covote: token-efficient self-consistency decoding experiments.
//
// Subcommands:
//   run       execute the experiment grid on a dataset
//   ablate    run several pruning policies on shared transcripts, win-rate table
//   simulate  synthesize a simulated-task dataset (JSONL)
//   report    turn results JSONL into curve / delta / prune-rate / coverage CSVs

#include "covote/report.hpp"
#include "covote/runner.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigInvalid = 2;
constexpr int kExitBackendUnavailable = 3;
constexpr int kExitIoError = 4;

using covote::runner::RunConfig;
using nlohmann::json;

struct CliOptions {
    std::string config_path;
    std::string backend;
    std::string dataset;
    std::vector<int> budgets;
    std::vector<int> step_sizes;
    std::vector<std::string> policies;
    int total_samples = -1;
    std::int64_t seed = -1;
    int workers = -1;
    std::string out;
    std::string model;
    std::string dataset_name;
};

void add_common_options(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Declarative JSON config file");
    cmd->add_option("--backend", opts.backend, "simulated | http");
    cmd->add_option("--dataset", opts.dataset, "Dataset JSONL ({id, question, gold})");
    cmd->add_option("--budgets", opts.budgets, "Sample budgets N")->delimiter(',');
    cmd->add_option("--step-sizes", opts.step_sizes, "Initial step sizes")->delimiter(',');
    cmd->add_option("--policies", opts.policies, "cwsc | sc | cw | random | none")->delimiter(',');
    cmd->add_option("--total-samples", opts.total_samples, "Total samples per problem");
    cmd->add_option("--seed", opts.seed, "Master seed");
    cmd->add_option("--workers", opts.workers, "Worker threads");
    cmd->add_option("--out", opts.out, "Output directory");
    cmd->add_option("--model", opts.model, "Model label for reports");
    cmd->add_option("--dataset-name", opts.dataset_name, "Dataset label for reports");
}

// Config file first, then flag overrides; flags win.
RunConfig build_config(const CliOptions& opts) {
    RunConfig config;
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw covote::runner::ConfigError("cannot open config: " + opts.config_path);
        json j = json::parse(in);
        if (j.contains("backend")) {
            config.backend = j["backend"] == "http" ? covote::runner::BackendKind::Http
                                                    : covote::runner::BackendKind::Simulated;
        }
        if (j.contains("dataset")) config.dataset_path = j["dataset"].get<std::string>();
        if (j.contains("budgets")) config.budgets = j["budgets"].get<std::vector<int>>();
        if (j.contains("step_sizes")) {
            config.initial_step_sizes = j["step_sizes"].get<std::vector<int>>();
        }
        if (j.contains("schedule_floor")) config.schedule_floor = j["schedule_floor"].get<int>();
        if (j.contains("schedule_mode")) {
            config.schedule_mode = j["schedule_mode"] == "fixed" ? covote::ScheduleMode::Fixed
                                                                 : covote::ScheduleMode::Halving;
        }
        if (j.contains("policies")) {
            config.policies.clear();
            for (const auto& p : j["policies"]) {
                config.policies.push_back(covote::parse_policy_kind(p.get<std::string>()));
            }
        }
        if (j.contains("total_samples")) config.total_samples = j["total_samples"].get<int>();
        if (j.contains("temperature")) config.sampling.temperature = j["temperature"].get<double>();
        if (j.contains("top_p")) config.sampling.top_p = j["top_p"].get<double>();
        if (j.contains("seed")) config.master_seed = j["seed"].get<std::uint64_t>();
        if (j.contains("workers")) config.workers = j["workers"].get<int>();
        if (j.contains("out")) config.output_dir = j["out"].get<std::string>();
        if (j.contains("model")) config.model_name = j["model"].get<std::string>();
        if (j.contains("dataset_name")) config.dataset_name = j["dataset_name"].get<std::string>();
    }
    if (!opts.backend.empty()) {
        if (opts.backend != "simulated" && opts.backend != "http") {
            throw covote::runner::ConfigError("unknown backend: " + opts.backend);
        }
        config.backend = opts.backend == "http" ? covote::runner::BackendKind::Http
                                                : covote::runner::BackendKind::Simulated;
    }
    if (!opts.dataset.empty()) config.dataset_path = opts.dataset;
    if (!opts.budgets.empty()) config.budgets = opts.budgets;
    if (!opts.step_sizes.empty()) config.initial_step_sizes = opts.step_sizes;
    if (!opts.policies.empty()) {
        config.policies.clear();
        for (const auto& p : opts.policies) config.policies.push_back(covote::parse_policy_kind(p));
    }
    if (opts.total_samples >= 0) config.total_samples = opts.total_samples;
    if (opts.seed >= 0) config.master_seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.workers >= 0) config.workers = opts.workers;
    if (!opts.out.empty()) config.output_dir = opts.out;
    if (!opts.model.empty()) config.model_name = opts.model;
    if (!opts.dataset_name.empty()) config.dataset_name = opts.dataset_name;

    config.http = covote::HttpBackendConfig::from_env();
    if (config.dataset_path.empty()) throw covote::runner::ConfigError("no dataset configured");
    config.validate();
    return config;
}

int cmd_run(const CliOptions& opts) {
    RunConfig config = build_config(opts);
    auto problems = covote::runner::load_dataset(config.dataset_path);
    if (problems.empty()) throw covote::runner::ConfigError("dataset is empty");
    auto records = covote::runner::run_grid(config, problems);
    covote::runner::write_outputs(config, records);
    std::cout << "wrote " << records.size() << " records to " << config.output_dir << '\n';
    return kExitOk;
}

int cmd_ablate(const CliOptions& opts) {
    CliOptions patched = opts;
    if (patched.policies.empty()) {
        patched.policies = {"cwsc", "sc", "cw", "random", "none"};
    }
    RunConfig config = build_config(patched);
    if (config.policies.size() < 2) {
        throw covote::runner::ConfigError("ablate needs at least 2 policies");
    }
    auto problems = covote::runner::load_dataset(config.dataset_path);
    if (problems.empty()) throw covote::runner::ConfigError("dataset is empty");
    auto records = covote::runner::run_grid(config, problems);
    covote::runner::write_outputs(config, records);

    auto rows = covote::report::pairwise_ablation(covote::report::setup_scores(records));
    std::filesystem::create_directories(config.output_dir);
    std::ofstream csv(config.output_dir + "/ablation.csv");
    covote::report::write_ablation_csv(csv, rows);
    covote::report::write_ablation_csv(std::cout, rows);
    return kExitOk;
}

int cmd_simulate(const std::string& out_path, int n_problems, std::uint64_t seed,
                 double gold_prob, double confidence_bias, double shared_fraction,
                 int mean_length, int length_jitter, int vocab_size) {
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot open for writing: " << out_path << '\n';
        return kExitIoError;
    }
    std::mt19937_64 rng(covote::mix_seed(seed, 0x73696dULL));
    for (int i = 0; i < n_problems; ++i) {
        long long gold = 10 + static_cast<long long>(covote::rand_below(rng, 980));
        double rest = 1.0 - gold_prob;
        json task = {
            {"vocab_size", vocab_size},
            {"mean_length", mean_length},
            {"length_jitter", length_jitter},
            {"confidence_bias", confidence_bias},
            {"shared_token_fraction", shared_fraction},
            {"answer_distribution",
             json::array({json::array({std::to_string(gold), gold_prob}),
                          json::array({std::to_string(gold + 1), rest * 0.55}),
                          json::array({std::to_string(gold - 1), rest * 0.45})})},
        };
        json line = {{"id", "sim-" + std::to_string(i)},
                     {"question", "Simulated problem " + std::to_string(i) +
                                      ": determine the planted answer."},
                     {"gold", std::to_string(gold)},
                     {"task", task}};
        out << line.dump() << '\n';
    }
    std::cout << "wrote " << n_problems << " problems to " << out_path << '\n';
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_dir) {
    std::vector<covote::report::RunRecord> records;
    for (const auto& path : inputs) {
        auto chunk = covote::report::read_jsonl(path);
        records.insert(records.end(), chunk.begin(), chunk.end());
    }
    std::filesystem::create_directories(out_dir);
    auto rows = covote::report::aggregate(records);
    {
        std::ofstream out(out_dir + "/summary.csv");
        covote::report::write_report_csv(out, rows);
    }
    {
        std::ofstream out(out_dir + "/curves.csv");
        covote::report::write_curves_csv(out, covote::report::build_curves(rows));
    }
    {
        std::ofstream out(out_dir + "/delta.csv");
        covote::report::write_delta_csv(out, covote::report::build_delta_table(rows));
    }
    {
        std::ofstream out(out_dir + "/prune_rates.csv");
        covote::report::write_prune_rates_csv(out, records);
    }
    {
        std::ofstream out(out_dir + "/coverage.csv");
        covote::report::write_coverage_csv(out, records);
    }
    std::cout << "wrote reports for " << records.size() << " records to " << out_dir << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Token-efficient self-consistency via confidence-weighted token set cover"};
    app.require_subcommand(1);

    CliOptions run_opts;
    CLI::App* run = app.add_subcommand("run", "Execute the experiment grid");
    add_common_options(run, run_opts);

    CliOptions ablate_opts;
    CLI::App* ablate = app.add_subcommand("ablate", "Policy ablation on shared transcripts");
    add_common_options(ablate, ablate_opts);

    std::string sim_out = "synthetic.jsonl";
    int sim_problems = 20;
    std::uint64_t sim_seed = 0;
    double sim_gold_prob = 0.55;
    double sim_bias = 0.8;
    double sim_shared = 0.25;
    int sim_mean_length = 640;
    int sim_jitter = 128;
    int sim_vocab = 48;
    CLI::App* simulate = app.add_subcommand("simulate", "Synthesize a simulated-task dataset");
    simulate->add_option("--out", sim_out, "Output dataset path");
    simulate->add_option("--problems", sim_problems, "Number of problems");
    simulate->add_option("--seed", sim_seed, "Dataset seed");
    simulate->add_option("--gold-prob", sim_gold_prob, "Probability mass on the gold answer");
    simulate->add_option("--confidence-bias", sim_bias, "Logprob penalty for incorrect streams");
    simulate->add_option("--shared-fraction", sim_shared, "Canonical-token probability");
    simulate->add_option("--mean-length", sim_mean_length, "Mean body length in tokens");
    simulate->add_option("--length-jitter", sim_jitter, "Body length jitter");
    simulate->add_option("--vocab-size", sim_vocab, "Divergence vocabulary size");

    std::vector<std::string> report_inputs;
    std::string report_out = "report";
    CLI::App* report = app.add_subcommand("report", "Aggregate results JSONL into CSVs");
    report->add_option("inputs", report_inputs, "Results JSONL paths")->required();
    report->add_option("--out", report_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_opts);
        if (ablate->parsed()) return cmd_ablate(ablate_opts);
        if (simulate->parsed()) {
            return cmd_simulate(sim_out, sim_problems, sim_seed, sim_gold_prob, sim_bias,
                                sim_shared, sim_mean_length, sim_jitter, sim_vocab);
        }
        if (report->parsed()) return cmd_report(report_inputs, report_out);
    } catch (const covote::runner::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigInvalid;
    } catch (const covote::BackendUnavailableError& e) {
        std::cerr << "backend error: " << e.what() << '\n';
        return kExitBackendUnavailable;
    } catch (const covote::report::SchemaMismatchError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIoError;
    }
    return kExitOk;
}
