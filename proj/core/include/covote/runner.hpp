#pragma once

#include "covote/backend.hpp"
#include "covote/http_backend.hpp"
#include "covote/report.hpp"

#include <optional>
#include <string>
#include <vector>

namespace covote::runner {

enum class BackendKind { Simulated, Http };

struct Problem {
    std::string id;
    std::string question;
    std::string gold;
    std::optional<SimulatedTask> task; // simulated backend only; defaulted if absent
};

struct RunConfig {
    BackendKind backend = BackendKind::Simulated;
    std::string dataset_path;
    std::vector<int> budgets = {8, 16, 32, 64};
    std::vector<int> initial_step_sizes = {64, 128, 256, 512};
    int schedule_floor = 8;
    ScheduleMode schedule_mode = ScheduleMode::Halving;
    std::vector<PolicyKind> policies = {PolicyKind::CWSC, PolicyKind::None};
    int total_samples = 256;
    SamplingParams sampling;
    std::string output_dir = "out";
    std::uint64_t master_seed = 0;
    int workers = 1;
    std::string model_name = "simulated";
    std::string dataset_name = "synthetic";
    HttpBackendConfig http; // http backend only

    void validate() const; // throws ConfigError
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Simulated task defaults for a problem that carries none; knobs seeded so
// every problem gets its own answer distractors.
SimulatedTask default_task(const std::string& gold);

std::vector<Problem> load_dataset(const std::string& path); // throws SchemaMismatchError

// Executes the full grid (problems x budgets x step sizes x policies x runs)
// and returns records in a deterministic order. Sampling seeds are derived
// from (master_seed, problem, budget, run) only, never from the policy, so
// ablations share transcripts.
std::vector<report::RunRecord> run_grid(const RunConfig& config,
                                        const std::vector<Problem>& problems);

// Writes results.jsonl and summary.csv under config.output_dir.
void write_outputs(const RunConfig& config, const std::vector<report::RunRecord>& records);

} // namespace covote::runner
