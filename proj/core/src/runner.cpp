#include "sodam/runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace sodam {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingReference("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
    }
    return lines;
}

struct PredictionLine {
    std::string video_id;
    std::string raw_scene_array;  // the "prediction" value re-serialized
};

/// Prediction JSONL: one {"video_id", "prediction": [...]} object per line.
std::map<std::string, std::string> load_predictions(const std::string& path) {
    std::map<std::string, std::string> by_video;
    for (const std::string& line : read_lines(path)) {
        auto record = nlohmann::ordered_json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object() || !record.contains("video_id"))
            continue;  // unusable line: the video will be reported missing
        by_video[record["video_id"].get<std::string>()] =
            record.contains("prediction") ? record["prediction"].dump() : "";
    }
    return by_video;
}

std::vector<ReferenceRecord> load_references(const std::string& path) {
    std::vector<ReferenceRecord> records;
    for (const std::string& line : read_lines(path)) records.push_back(parse_reference(line));
    return records;
}

void write_atomically(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

/// Runs fn(i) for i in [0, count) across up to `parallelism` workers.
/// Exceptions are rethrown on the caller thread.
void parallel_for(std::size_t count, unsigned parallelism,
                  const std::function<void(std::size_t)>& fn) {
    if (parallelism <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    const unsigned workers = std::min<std::size_t>(parallelism, count);
    threads.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
    if (error) std::rethrow_exception(error);
}

nlohmann::ordered_json aggregate_reports(const std::vector<MetricReport>& reports) {
    MetricReport mean;
    if (reports.empty()) return report_to_json(mean);
    const double count = static_cast<double>(reports.size());

    mean.f1_at = reports.front().f1_at;
    for (auto& [threshold, score] : mean.f1_at) score = ThresholdScore{};
    PerDimension<std::size_t> dim_counts;
    for (const MetricReport& report : reports) {
        for (std::size_t t = 0; t < mean.f1_at.size(); ++t) {
            mean.f1_at[t].second.precision += report.f1_at[t].second.precision / count;
            mean.f1_at[t].second.recall += report.f1_at[t].second.recall / count;
            mean.f1_at[t].second.f1 += report.f1_at[t].second.f1 / count;
        }
        mean.mean_f1 += report.mean_f1 / count;
        mean.miou += report.miou / count;
        mean.sodam_avg += report.sodam_avg / count;
        for (Dimension d : kDimensions) {
            if (report.dimension_active[d]) {
                mean.per_dimension_sodam[d] += report.per_dimension_sodam[d];
                ++dim_counts[d];
            }
        }
        mean.k_matched += report.k_matched;
        mean.n_reference += report.n_reference;
        mean.m_prediction_raw += report.m_prediction_raw;
        mean.m_prediction_merged += report.m_prediction_merged;
        mean.judge_calls += report.judge_calls;
    }
    for (Dimension d : kDimensions) {
        mean.dimension_active[d] = dim_counts[d] > 0;
        if (dim_counts[d] > 0)
            mean.per_dimension_sodam[d] /= static_cast<double>(dim_counts[d]);
    }
    return report_to_json(mean);
}

}  // namespace

nlohmann::ordered_json eval_run(const EvalRunConfig& config, Judge& judge) {
    const auto references = load_references(config.reference_path);
    const auto predictions = load_predictions(config.prediction_path);

    std::vector<MetricReport> reports(references.size());
    std::vector<std::string> missing;
    std::mutex missing_mutex;

    parallel_for(references.size(), config.parallelism, [&](std::size_t i) {
        const ReferenceRecord& reference = references[i];
        auto found = predictions.find(reference.video_id);
        if (found == predictions.end() || found->second.empty()) {
            reports[i] = zero_report(reference.scenes, config.score);
            std::lock_guard lock(missing_mutex);
            missing.push_back(reference.video_id);
            return;
        }
        ParseOutcome outcome =
            parse_prediction(found->second, config.parse_mode, reference.video_id);
        if (!outcome.document) {
            reports[i] = zero_report(reference.scenes, config.score);
            return;
        }
        reports[i] = evaluate_sodam(*outcome.document, reference.scenes, judge, config.score);
    });

    std::sort(missing.begin(), missing.end());

    nlohmann::ordered_json out;
    out["config"] = {{"thresholds", config.score.thresholds},
                     {"judge", config.judge_mode == JudgeMode::Offline ? "offline" : "http"},
                     {"pooled_average", config.score.pooled_average}};
    auto videos = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < references.size(); ++i) {
        videos.push_back({{"video_id", references[i].video_id},
                          {"report", report_to_json(reports[i])}});
    }
    out["videos"] = std::move(videos);
    out["missing_predictions"] = missing;
    out["aggregate"] = aggregate_reports(reports);

    if (!config.output_path.empty()) write_atomically(config.output_path, out.dump(2) + "\n");
    return out;
}

void reward_run(const RewardRunConfig& config, Judge& judge) {
    const auto references = load_references(config.reference_path);
    const auto predictions = load_predictions(config.prediction_path);

    std::vector<std::string> lines(references.size());
    parallel_for(references.size(), config.parallelism, [&](std::size_t i) {
        const ReferenceRecord& reference = references[i];
        auto found = predictions.find(reference.video_id);
        RolloutScore scored;
        if (found != predictions.end() && !found->second.empty()) {
            scored = score_rollout(found->second, reference.scenes, judge, config.weights,
                                   config.length_policy, config.score);
        } else {
            scored.reward = total_reward(0.0, 0.0, 0.0, 0.0, config.weights);
            scored.report = zero_report(reference.scenes, config.score);
        }
        nlohmann::ordered_json line;
        line["video_id"] = reference.video_id;
        line["reward"] = reward_to_json(scored.reward);
        lines[i] = line.dump();
    });

    std::ostringstream body;
    for (const std::string& line : lines) body << line << "\n";
    write_atomically(config.output_path, body.str());
}

}  // namespace sodam
