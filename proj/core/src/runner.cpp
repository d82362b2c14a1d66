#include "covote/runner.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

namespace covote::runner {

using nlohmann::json;

void RunConfig::validate() const {
    if (budgets.empty()) throw ConfigError("no sample budgets configured");
    if (initial_step_sizes.empty()) throw ConfigError("no step sizes configured");
    if (policies.empty()) throw ConfigError("no pruning policies configured");
    if (schedule_floor < 1) throw ConfigError("schedule floor must be positive");
    if (total_samples < 1) throw ConfigError("total_samples must be positive");
    if (workers < 1) throw ConfigError("workers must be positive");
    for (int n : budgets) {
        if (n < 1) throw ConfigError("budget must be positive");
        if (total_samples % n != 0) {
            throw ConfigError("budget " + std::to_string(n) + " does not divide total_samples " +
                              std::to_string(total_samples));
        }
    }
    for (int ss : initial_step_sizes) {
        if (ss < schedule_floor) {
            throw ConfigError("step size " + std::to_string(ss) + " below schedule floor " +
                              std::to_string(schedule_floor));
        }
    }
}

SimulatedTask default_task(const std::string& gold) {
    SimulatedTask task;
    task.gold_answer = gold;
    // Two distractors adjacent to the gold answer when numeric, else fixed.
    std::string wrong1 = gold + "0";
    std::string wrong2 = "-" + gold;
    try {
        long long g = std::stoll(gold);
        wrong1 = std::to_string(g + 1);
        wrong2 = std::to_string(g - 1);
    } catch (const std::exception&) {
    }
    task.answer_distribution = {{gold, 0.55}, {wrong1, 0.25}, {wrong2, 0.20}};
    return task;
}

namespace {

SimulatedTask parse_task(const json& j, const std::string& gold) {
    SimulatedTask task = default_task(gold);
    if (j.contains("vocab_size")) task.vocab_size = j["vocab_size"].get<int>();
    if (j.contains("mean_length")) task.mean_length = j["mean_length"].get<int>();
    if (j.contains("length_jitter")) task.length_jitter = j["length_jitter"].get<int>();
    if (j.contains("confidence_bias")) task.confidence_bias = j["confidence_bias"].get<double>();
    if (j.contains("shared_token_fraction")) {
        task.shared_token_fraction = j["shared_token_fraction"].get<double>();
    }
    if (j.contains("answer_distribution")) {
        task.answer_distribution.clear();
        for (const auto& entry : j["answer_distribution"]) {
            task.answer_distribution.emplace_back(entry.at(0).get<std::string>(),
                                                  entry.at(1).get<double>());
        }
    }
    task.validate();
    return task;
}

} // namespace

std::vector<Problem> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    std::vector<Problem> problems;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            Problem p;
            p.id = j.at("id").get<std::string>();
            p.question = j.at("question").get<std::string>();
            p.gold = j.at("gold").get<std::string>();
            if (j.contains("task")) p.task = parse_task(j["task"], p.gold);
            problems.push_back(std::move(p));
        } catch (const std::exception& e) {
            throw report::SchemaMismatchError(path, line_number, e.what());
        }
    }
    return problems;
}

std::vector<report::RunRecord> run_grid(const RunConfig& config,
                                        const std::vector<Problem>& problems) {
    config.validate();

    struct Job {
        int problem = 0;
        int budget = 0;
        int step_size = 0;
        PolicyKind policy = PolicyKind::CWSC;
        int run = 0;
    };
    std::vector<Job> jobs;
    for (int p = 0; p < static_cast<int>(problems.size()); ++p) {
        for (int n : config.budgets) {
            int runs = config.total_samples / n;
            for (int ss : config.initial_step_sizes) {
                for (PolicyKind policy : config.policies) {
                    for (int r = 0; r < runs; ++r) jobs.push_back({p, n, ss, policy, r});
                }
            }
        }
    }

    std::vector<report::RunRecord> records(jobs.size());
    std::atomic<std::size_t> cursor{0};

    auto worker = [&] {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            const Problem& problem = problems[static_cast<std::size_t>(job.problem)];

            // Sampling seed shared across policies so ablations replay the
            // same transcripts; the random policy draws from its own stream.
            std::uint64_t sample_seed = derive_seed(
                config.master_seed, {1, static_cast<std::uint64_t>(job.problem),
                                     static_cast<std::uint64_t>(job.budget),
                                     static_cast<std::uint64_t>(job.run)});
            std::uint64_t policy_seed = derive_seed(
                config.master_seed, {2, static_cast<std::uint64_t>(job.problem),
                                     static_cast<std::uint64_t>(job.budget),
                                     static_cast<std::uint64_t>(job.run)});

            std::unique_ptr<Backend> backend;
            if (config.backend == BackendKind::Simulated) {
                SimulatedTask task = problem.task ? *problem.task : default_task(problem.gold);
                backend = std::make_unique<SimulatedBackend>(task, job.budget, sample_seed);
            } else {
                backend = std::make_unique<HttpBackend>(config.http);
            }

            StepSchedule schedule{job.step_size, config.schedule_floor, config.schedule_mode};
            PruningPolicy policy{job.policy, policy_seed};
            SamplingParams params = config.sampling;
            params.seed = sample_seed;

            report::RunRecord record;
            record.model = config.model_name;
            record.dataset = config.dataset_name;
            record.seed = config.master_seed;
            record.run = job.run;
            record.initial_step_size = job.step_size;
            record.schedule_mode = config.schedule_mode;
            record.gold = problem.gold;
            record.result =
                run_problem(problem.question, *backend, job.budget, schedule, policy, params);
            record.result.question_id = problem.id;
            record.em = eval::exact_match(record.result.voted_answer, problem.gold);
            records[i] = std::move(record);
        }
    };

    int n_workers = std::min<int>(config.workers, static_cast<int>(jobs.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    return records;
}

void write_outputs(const RunConfig& config, const std::vector<report::RunRecord>& records) {
    std::filesystem::create_directories(config.output_dir);
    report::write_jsonl(config.output_dir + "/results.jsonl", records);
    std::ofstream csv(config.output_dir + "/summary.csv");
    if (!csv) throw std::runtime_error("cannot open summary.csv for writing");
    report::write_report_csv(csv, report::aggregate(records));
}

} // namespace covote::runner
