#pragma once

#include "covote/evaluation.hpp"
#include "covote/orchestrator.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace covote::report {

// One finished problem run plus the grid coordinates it was produced under.
// Serialized as one JSONL line.
struct RunRecord {
    std::string model;
    std::string dataset;
    std::uint64_t seed = 0; // master seed the run's sub-seeds derive from
    int run = 0;            // run index within the multi-run split
    int initial_step_size = 0;
    ScheduleMode schedule_mode = ScheduleMode::Halving;
    std::string gold;
    int em = 0;
    ProblemResult result;
};

class SchemaMismatchError : public std::runtime_error {
public:
    SchemaMismatchError(const std::string& path, std::size_t line, const std::string& detail)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + detail),
          line_number(line) {}
    std::size_t line_number;
};

std::string to_jsonl_line(const RunRecord& record);
RunRecord parse_jsonl_line(const std::string& line);

void write_jsonl(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_jsonl(const std::string& path); // throws SchemaMismatchError

// Aggregated (model, dataset, N, policy, step size) row.
struct ReportRow {
    std::string model;
    std::string dataset;
    int n = 0;
    std::string policy;
    int initial_step_size = 0;
    double em_mean = 0.0;
    double em_stderr = 0.0;
    double tokens_mean = 0.0;
    int runs = 0;
};

std::vector<ReportRow> aggregate(const std::vector<RunRecord>& records);
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

// (tokens, EM) curves, one per (model, dataset, n, policy) across step sizes.
struct CurveKey {
    std::string model;
    std::string dataset;
    int n = 0;
    std::string policy;
    auto operator<=>(const CurveKey&) const = default;
};

std::map<CurveKey, eval::AccuracyCurve> build_curves(const std::vector<ReportRow>& rows);
void write_curves_csv(std::ostream& out, const std::map<CurveKey, eval::AccuracyCurve>& curves);

// Token-savings table in (dataset, model, N) layout; pruned policy curves
// against the no-pruning baseline of the same (model, dataset, n).
struct DeltaRow {
    std::string dataset;
    std::string model;
    int n = 0;
    std::string policy;
    std::optional<double> delta_pct;
};

std::vector<DeltaRow> build_delta_table(const std::vector<ReportRow>& rows);
void write_delta_csv(std::ostream& out, const std::vector<DeltaRow>& deltas);

void write_prune_rates_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_coverage_csv(std::ostream& out, const std::vector<RunRecord>& records);

// Per-setup mean EM, setup = (model, dataset, n), averaged over step sizes,
// runs and problems; one entry per policy. Feeds pairwise win-rate tables.
std::map<std::string, std::map<std::string, double>> setup_scores(
    const std::vector<RunRecord>& records);

struct AblationRow {
    std::string method_a;
    std::string method_b;
    std::string winner; // "tie" when neither
    double win_pct = 0.0;
    int ties = 0;
};

std::vector<AblationRow> pairwise_ablation(
    const std::map<std::string, std::map<std::string, double>>& scores);
void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows);

} // namespace covote::report
