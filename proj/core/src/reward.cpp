#include "sodam/reward.hpp"

#include <algorithm>
#include <sstream>

#include "sodam/align.hpp"

namespace sodam {

double format_reward(const ParseOutcome& outcome) {
    return outcome.format_valid ? 1.0 : 0.0;
}

std::size_t word_count(const ScriptDocument& doc) {
    std::size_t count = 0;
    for (const SceneEntry& scene : doc.scenes) {
        for (Dimension d : kDimensions) {
            std::istringstream stream(scene.caption[d]);
            std::string token;
            while (stream >> token) ++count;
        }
    }
    return count;
}

double length_reward(const ScriptDocument& doc, const LengthPolicy& policy) {
    policy.validate();
    const double w = static_cast<double>(word_count(doc));
    if (w == 0.0) return 0.0;  // a contentless document earns nothing
    const double lo = static_cast<double>(policy.min_words);
    const double hi = static_cast<double>(policy.max_words);
    const double span = static_cast<double>(policy.decay_span);
    double reward = 1.0;
    if (w < lo)
        reward = 1.0 - (lo - w) / span;
    else if (w > hi)
        reward = 1.0 - (w - hi) / span;
    return std::clamp(reward, 0.0, 1.0);
}

double timestamp_reward(const ScriptDocument& prediction,
                        std::span<const ReferenceScene> reference,
                        std::span<const double> thresholds) {
    std::vector<TimeInterval> refs;
    refs.reserve(reference.size());
    for (const ReferenceScene& scene : reference) refs.push_back(scene.entry.interval);
    std::vector<TimeInterval> preds;
    preds.reserve(prediction.scenes.size());
    for (const SceneEntry& scene : prediction.scenes) preds.push_back(scene.interval);

    const AlignmentResult alignment = align(refs, preds);
    std::vector<double> pair_ious;
    pair_ious.reserve(alignment.pairs.size());
    for (const MatchedGroup& group : alignment.pairs) {
        std::vector<SceneEntry> members;
        for (std::size_t index : group.prediction_indices)
            members.push_back(prediction.scenes[index]);
        pair_ious.push_back(
            iou(merge_group(members).interval, refs[group.reference_index]));
    }
    return timestamp_metrics(alignment, pair_ious, thresholds).mean_f1;
}

double caption_reward(const ScriptDocument& prediction,
                      std::span<const ReferenceScene> reference, Judge& judge,
                      const ScoreConfig& config) {
    return evaluate_sodam(prediction, reference, judge, config).sodam_avg / 100.0;
}

RewardBreakdown total_reward(double r_format, double r_length, double r_timestamp,
                             double r_caption, const RewardWeights& weights) {
    weights.validate();
    RewardBreakdown breakdown;
    breakdown.r_format = r_format;
    breakdown.r_length = r_length;
    // An unparsable output defines no scenes, so it cannot earn the
    // scene-derived components.
    breakdown.r_timestamp = r_format > 0.0 ? r_timestamp : 0.0;
    breakdown.r_caption = r_format > 0.0 ? r_caption : 0.0;
    breakdown.total = weights.alpha_format * breakdown.r_format +
                      weights.alpha_length * breakdown.r_length +
                      weights.alpha_timestamp * breakdown.r_timestamp +
                      weights.alpha_caption * breakdown.r_caption;
    return breakdown;
}

RolloutScore score_rollout(std::string_view raw_output,
                           std::span<const ReferenceScene> reference, Judge& judge,
                           const RewardWeights& weights, const LengthPolicy& length_policy,
                           const ScoreConfig& score_config) {
    RolloutScore out;
    ParseOutcome parsed = parse_prediction(raw_output, ParseMode::Strict);
    out.diagnostics = parsed.diagnostics;

    const double r_format = format_reward(parsed);
    double r_length = 0.0, r_timestamp = 0.0, r_caption = 0.0;
    if (parsed.document) {
        r_length = length_reward(*parsed.document, length_policy);
        if (parsed.format_valid) {
            r_timestamp =
                timestamp_reward(*parsed.document, reference, score_config.thresholds);
            MetricReport report =
                evaluate_sodam(*parsed.document, reference, judge, score_config);
            r_caption = report.sodam_avg / 100.0;
            out.report = std::move(report);
        }
    }
    out.reward = total_reward(r_format, r_length, r_timestamp, r_caption, weights);
    if (!out.report) out.report = zero_report(reference, score_config);
    return out;
}

}  // namespace sodam
