#pragma once

#include <string>

#include "sodam/judge.hpp"
#include "sodam/reward.hpp"
#include "sodam/score.hpp"

namespace sodam {

struct MissingReference : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class JudgeMode { Offline, Http };

struct EvalRunConfig {
    std::string prediction_path;
    std::string reference_path;
    std::string output_path;
    JudgeMode judge_mode = JudgeMode::Offline;
    JudgeEndpointConfig endpoint;
    ScoreConfig score;
    ParseMode parse_mode = ParseMode::Lenient;
    unsigned parallelism = 1;
};

/// Batch evaluation over prediction/reference JSONL keyed by video_id.
/// Reference videos missing from the predictions score 0 and are listed.
/// The report is written atomically (temp + rename). Returns the report.
nlohmann::ordered_json eval_run(const EvalRunConfig& config, Judge& judge);

struct RewardRunConfig {
    std::string prediction_path;
    std::string reference_path;
    std::string output_path;
    RewardWeights weights;
    LengthPolicy length_policy;
    ScoreConfig score;
    unsigned parallelism = 1;
};

/// One RewardBreakdown JSON line per reference video_id.
void reward_run(const RewardRunConfig& config, Judge& judge);

}  // namespace sodam
