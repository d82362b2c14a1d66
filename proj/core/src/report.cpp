#include "covote/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace covote::report {

using nlohmann::json;

namespace {

std::string fmt4(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(4);
    os << v;
    return os.str();
}

json to_json(const RunRecord& record) {
    const ProblemResult& r = record.result;
    json steps = json::array();
    for (const auto& s : r.steps) {
        steps.push_back({{"iteration", s.iteration},
                         {"step_size", s.step_size},
                         {"survivors_before", s.survivors_before},
                         {"survivors_after", s.survivors_after},
                         {"tokens_generated", s.tokens_generated},
                         {"confidences", s.confidences}});
    }
    json answers = json::array();
    for (const auto& [index, answer] : r.final_answers) {
        answers.push_back({{"index", index}, {"answer", answer}});
    }
    return json{{"question_id", r.question_id},
                {"model", record.model},
                {"dataset", record.dataset},
                {"policy", to_string(r.policy.kind)},
                {"n", r.budget_n},
                {"initial_step_size", record.initial_step_size},
                {"schedule_mode", record.schedule_mode == ScheduleMode::Fixed ? "fixed" : "halving"},
                {"seed", record.seed},
                {"run", record.run},
                {"gold", record.gold},
                {"em", record.em},
                {"voted_answer", r.voted_answer ? json(*r.voted_answer) : json(nullptr)},
                {"total_tokens", r.total_tokens},
                {"coverage_fraction", r.first_step_coverage},
                {"final_answers", answers},
                {"steps", steps}};
}

RunRecord from_json(const json& j) {
    RunRecord record;
    record.model = j.at("model").get<std::string>();
    record.dataset = j.at("dataset").get<std::string>();
    record.seed = j.at("seed").get<std::uint64_t>();
    record.run = j.at("run").get<int>();
    record.initial_step_size = j.at("initial_step_size").get<int>();
    record.schedule_mode = j.value("schedule_mode", "halving") == "fixed" ? ScheduleMode::Fixed
                                                                          : ScheduleMode::Halving;
    record.gold = j.at("gold").get<std::string>();
    record.em = j.at("em").get<int>();

    ProblemResult& r = record.result;
    r.question_id = j.at("question_id").get<std::string>();
    r.policy.kind = parse_policy_kind(j.at("policy").get<std::string>());
    r.budget_n = j.at("n").get<int>();
    if (!j.at("voted_answer").is_null()) r.voted_answer = j["voted_answer"].get<std::string>();
    r.total_tokens = j.at("total_tokens").get<long long>();
    r.first_step_coverage = j.value("coverage_fraction", 0.0);
    for (const auto& a : j.value("final_answers", json::array())) {
        r.final_answers.emplace_back(a.at("index").get<int>(), a.at("answer").get<std::string>());
    }
    for (const auto& s : j.at("steps")) {
        StepRecord step;
        step.iteration = s.at("iteration").get<int>();
        step.step_size = s.at("step_size").get<int>();
        step.survivors_before = s.at("survivors_before").get<int>();
        step.survivors_after = s.at("survivors_after").get<int>();
        step.tokens_generated = s.at("tokens_generated").get<long long>();
        step.confidences = s.value("confidences", std::vector<double>{});
        r.steps.push_back(std::move(step));
    }
    return record;
}

} // namespace

std::string to_jsonl_line(const RunRecord& record) { return to_json(record).dump(); }

RunRecord parse_jsonl_line(const std::string& line) { return from_json(json::parse(line)); }

void write_jsonl(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& record : records) out << to_jsonl_line(record) << '\n';
}

std::vector<RunRecord> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<RunRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        try {
            records.push_back(parse_jsonl_line(line));
        } catch (const std::exception& e) {
            throw SchemaMismatchError(path, line_number, e.what());
        }
    }
    return records;
}

std::vector<ReportRow> aggregate(const std::vector<RunRecord>& records) {
    struct Key {
        std::string model, dataset, policy;
        int n, ss;
        auto operator<=>(const Key&) const = default;
    };
    struct Acc {
        std::vector<double> ems;
        double tokens = 0.0;
    };
    std::map<Key, Acc> groups;
    for (const auto& record : records) {
        Key key{record.model, record.dataset, to_string(record.result.policy.kind),
                record.result.budget_n, record.initial_step_size};
        auto& acc = groups[key];
        acc.ems.push_back(record.em);
        acc.tokens += static_cast<double>(record.result.total_tokens);
    }
    std::vector<ReportRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, acc] : groups) {
        ReportRow row;
        row.model = key.model;
        row.dataset = key.dataset;
        row.n = key.n;
        row.policy = key.policy;
        row.initial_step_size = key.ss;
        row.runs = static_cast<int>(acc.ems.size());
        double mean = 0.0;
        for (double em : acc.ems) mean += em;
        mean /= acc.ems.size();
        row.em_mean = mean;
        double var = 0.0;
        for (double em : acc.ems) var += (em - mean) * (em - mean);
        row.em_stderr = acc.ems.size() > 1
                            ? std::sqrt(var / (acc.ems.size() - 1) / acc.ems.size())
                            : 0.0;
        row.tokens_mean = acc.tokens / acc.ems.size();
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << "model,dataset,n,policy,initial_step_size,em_mean,em_stderr,tokens_mean,runs\n";
    for (const auto& r : rows) {
        out << r.model << ',' << r.dataset << ',' << r.n << ',' << r.policy << ','
            << r.initial_step_size << ',' << fmt4(r.em_mean) << ',' << fmt4(r.em_stderr) << ','
            << fmt4(r.tokens_mean) << ',' << r.runs << '\n';
    }
}

std::map<CurveKey, eval::AccuracyCurve> build_curves(const std::vector<ReportRow>& rows) {
    std::map<CurveKey, eval::AccuracyCurve> curves;
    for (const auto& row : rows) {
        CurveKey key{row.model, row.dataset, row.n, row.policy};
        auto& curve = curves[key];
        curve.label = row.policy + " n=" + std::to_string(row.n);
        curve.points.push_back({row.tokens_mean, row.em_mean});
    }
    for (auto& [key, curve] : curves) {
        std::sort(curve.points.begin(), curve.points.end(),
                  [](const auto& a, const auto& b) { return a.mean_tokens < b.mean_tokens; });
        // duplicate x-values collapse to the last occurrence
        curve.points.erase(std::unique(curve.points.begin(), curve.points.end(),
                                       [](const auto& a, const auto& b) {
                                           return a.mean_tokens == b.mean_tokens;
                                       }),
                           curve.points.end());
    }
    return curves;
}

void write_curves_csv(std::ostream& out, const std::map<CurveKey, eval::AccuracyCurve>& curves) {
    out << "model,dataset,n,policy,mean_tokens,em\n";
    for (const auto& [key, curve] : curves) {
        for (const auto& p : curve.points) {
            out << key.model << ',' << key.dataset << ',' << key.n << ',' << key.policy << ','
                << fmt4(p.mean_tokens) << ',' << fmt4(p.em) << '\n';
        }
    }
}

std::vector<DeltaRow> build_delta_table(const std::vector<ReportRow>& rows) {
    auto curves = build_curves(rows);
    std::vector<DeltaRow> deltas;
    for (const auto& [key, curve] : curves) {
        if (key.policy == to_string(PolicyKind::None)) continue;
        CurveKey baseline_key{key.model, key.dataset, key.n, to_string(PolicyKind::None)};
        auto it = curves.find(baseline_key);
        if (it == curves.end() || it->second.points.empty()) continue;
        // Baseline EM/tokens: the no-pruning run at the same budget; step size
        // does not affect it, so average across whatever was recorded.
        double em = 0.0, tokens = 0.0;
        for (const auto& p : it->second.points) {
            em += p.em;
            tokens += p.mean_tokens;
        }
        em /= it->second.points.size();
        tokens /= it->second.points.size();
        DeltaRow row{key.dataset, key.model, key.n, key.policy,
                     eval::token_savings_delta(curve, em, tokens)};
        deltas.push_back(std::move(row));
    }
    return deltas;
}

void write_delta_csv(std::ostream& out, const std::vector<DeltaRow>& deltas) {
    out << "dataset,model,n,policy,delta_pct\n";
    for (const auto& d : deltas) {
        out << d.dataset << ',' << d.model << ',' << d.n << ',' << d.policy << ','
            << (d.delta_pct ? fmt4(*d.delta_pct) : std::string()) << '\n';
    }
}

void write_prune_rates_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    struct Key {
        std::string model, dataset, policy;
        int n, ss;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, std::vector<ProblemResult>> groups;
    for (const auto& record : records) {
        Key key{record.model, record.dataset, to_string(record.result.policy.kind),
                record.result.budget_n, record.initial_step_size};
        groups[key].push_back(record.result);
    }
    out << "model,dataset,n,policy,initial_step_size,iteration,mean_reduction_pct\n";
    for (const auto& [key, results] : groups) {
        for (const auto& [iteration, rate] : eval::prune_rate_series(results)) {
            out << key.model << ',' << key.dataset << ',' << key.n << ',' << key.policy << ','
                << key.ss << ',' << iteration << ',' << fmt4(rate) << '\n';
        }
    }
}

void write_coverage_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    struct Key {
        std::string model, dataset, policy;
        int n;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, std::pair<double, int>> groups;
    for (const auto& record : records) {
        Key key{record.model, record.dataset, to_string(record.result.policy.kind),
                record.result.budget_n};
        auto& [sum, count] = groups[key];
        sum += record.result.first_step_coverage;
        ++count;
    }
    out << "model,dataset,n,policy,mean_coverage_fraction\n";
    for (const auto& [key, acc] : groups) {
        out << key.model << ',' << key.dataset << ',' << key.n << ',' << key.policy << ','
            << fmt4(acc.first / acc.second) << '\n';
    }
}

std::map<std::string, std::map<std::string, double>> setup_scores(
    const std::vector<RunRecord>& records) {
    std::map<std::string, std::map<std::string, std::pair<double, int>>> acc;
    for (const auto& record : records) {
        std::string setup = record.model + "|" + record.dataset + "|" +
                            std::to_string(record.result.budget_n);
        auto& [sum, count] = acc[setup][to_string(record.result.policy.kind)];
        sum += record.em;
        ++count;
    }
    std::map<std::string, std::map<std::string, double>> scores;
    for (const auto& [setup, policies] : acc) {
        for (const auto& [policy, sc] : policies) scores[setup][policy] = sc.first / sc.second;
    }
    return scores;
}

std::vector<AblationRow> pairwise_ablation(
    const std::map<std::string, std::map<std::string, double>>& scores) {
    std::set<std::string> policies;
    for (const auto& [setup, per_policy] : scores) {
        for (const auto& [policy, score] : per_policy) policies.insert(policy);
    }
    std::vector<AblationRow> rows;
    for (auto a = policies.begin(); a != policies.end(); ++a) {
        for (auto b = std::next(a); b != policies.end(); ++b) {
            std::vector<double> scores_a, scores_b;
            for (const auto& [setup, per_policy] : scores) {
                auto ia = per_policy.find(*a);
                auto ib = per_policy.find(*b);
                if (ia == per_policy.end() || ib == per_policy.end()) continue;
                scores_a.push_back(ia->second);
                scores_b.push_back(ib->second);
            }
            if (scores_a.empty()) continue;
            auto rate = eval::ablation_win_rate(scores_a, scores_b);
            AblationRow row;
            row.method_a = *a;
            row.method_b = *b;
            row.ties = rate.ties;
            if (rate.wins_a > rate.wins_b) {
                row.winner = *a;
                row.win_pct = rate.win_pct_a();
            } else if (rate.wins_b > rate.wins_a) {
                row.winner = *b;
                row.win_pct = rate.win_pct_b();
            } else {
                row.winner = "tie";
                row.win_pct = rate.win_pct_a();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows) {
    out << "method_1,method_2,winner,win_pct,ties\n";
    for (const auto& r : rows) {
        out << r.method_a << ',' << r.method_b << ',' << r.winner << ',' << fmt4(r.win_pct) << ','
            << r.ties << '\n';
    }
}

} // namespace covote::report
