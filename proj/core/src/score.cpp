#include "sodam/score.hpp"

#include <algorithm>
#include <cmath>

#include "sodam/align.hpp"

namespace sodam {

namespace {

double f1_of(double precision, double recall) {
    const double sum = precision + recall;
    return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

}  // namespace

PairScore checklist_score(const SceneCaption& prediction, const KeypointSet& keypoints,
                          Judge& judge) {
    PairScore score;
    for (Dimension d : kDimensions)
        score.per_dimension[d].total_keypoints = keypoints.by_dim[d].size();
    if (!keypoints.any()) return score;  // zero judge calls, checklist stays 0

    JudgeRequest request{prediction, keypoints, ""};
    const JudgeVerdict verdict = judge.evaluate(request);

    std::size_t hits = 0, totals = 0;
    for (Dimension d : kDimensions) {
        auto& tally = score.per_dimension[d];
        tally.hit_keypoints = verdict.hits[d];
        tally.hit_count = tally.hit_keypoints.size();
        if (tally.total_keypoints > 0) {
            hits += tally.hit_count;
            totals += tally.total_keypoints;
        }
    }
    score.checklist = totals > 0 ? static_cast<double>(hits) / static_cast<double>(totals) : 0.0;
    return score;
}

TimestampMetrics timestamp_metrics(const AlignmentResult& alignment,
                                   std::span<const double> pair_ious,
                                   std::span<const double> thresholds) {
    TimestampMetrics metrics;
    const std::size_t k = alignment.pairs.size();
    const std::size_t n = k + alignment.unmatched_references.size();

    double iou_sum = 0.0;
    for (double v : pair_ious) iou_sum += v;
    metrics.miou = n > 0 ? iou_sum / static_cast<double>(n) : 0.0;

    double f1_sum = 0.0;
    for (double threshold : thresholds) {
        std::size_t tp = 0;
        for (double v : pair_ious)
            if (v >= threshold) ++tp;
        ThresholdScore score;
        score.precision = k > 0 ? static_cast<double>(tp) / static_cast<double>(k) : 0.0;
        score.recall = n > 0 ? static_cast<double>(tp) / static_cast<double>(n) : 0.0;
        score.f1 = f1_of(score.precision, score.recall);
        f1_sum += score.f1;
        metrics.f1_at.emplace_back(threshold, score);
    }
    metrics.mean_f1 = thresholds.empty() ? 0.0 : f1_sum / static_cast<double>(thresholds.size());
    return metrics;
}

MetricReport zero_report(std::span<const ReferenceScene> reference, const ScoreConfig& config) {
    MetricReport report;
    report.n_reference = reference.size();
    for (double threshold : config.thresholds)
        report.f1_at.emplace_back(threshold, ThresholdScore{});
    for (Dimension d : kDimensions) {
        bool active = false;
        for (const ReferenceScene& scene : reference)
            active = active || !scene.keypoints.by_dim[d].empty();
        report.dimension_active[d] = active;
    }
    return report;
}

MetricReport evaluate_sodam(const ScriptDocument& prediction,
                            std::span<const ReferenceScene> reference, Judge& judge,
                            const ScoreConfig& config) {
    if (reference.empty()) throw EmptyReference("evaluate_sodam: empty reference");

    std::vector<TimeInterval> ref_intervals;
    ref_intervals.reserve(reference.size());
    for (const ReferenceScene& scene : reference) ref_intervals.push_back(scene.entry.interval);
    std::vector<TimeInterval> pred_intervals;
    pred_intervals.reserve(prediction.scenes.size());
    for (const SceneEntry& scene : prediction.scenes) pred_intervals.push_back(scene.interval);

    const AlignmentResult alignment = align(ref_intervals, pred_intervals);
    const std::size_t k = alignment.pairs.size();
    const std::size_t n = reference.size();

    MetricReport report = zero_report(reference, config);
    report.m_prediction_raw = prediction.scenes.size();
    report.m_prediction_merged = k;
    report.k_matched = k;

    std::vector<double> pair_ious;
    std::vector<PairScore> pair_scores;
    pair_ious.reserve(k);
    pair_scores.reserve(k);
    for (const MatchedGroup& group : alignment.pairs) {
        std::vector<SceneEntry> members;
        members.reserve(group.prediction_indices.size());
        for (std::size_t index : group.prediction_indices)
            members.push_back(prediction.scenes[index]);
        SceneEntry merged = merge_group(members);
        const double pair_iou = iou(merged.interval, reference[group.reference_index].entry.interval);

        PairScore score = checklist_score(merged.caption,
                                          reference[group.reference_index].keypoints, judge);
        if (reference[group.reference_index].keypoints.any()) ++report.judge_calls;
        score.reference_index = group.reference_index;
        score.merged_prediction = std::move(merged);
        score.iou = pair_iou;
        pair_ious.push_back(pair_iou);
        pair_scores.push_back(std::move(score));
    }

    const TimestampMetrics ts = timestamp_metrics(alignment, pair_ious, config.thresholds);
    report.f1_at = ts.f1_at;
    report.mean_f1 = ts.mean_f1;
    report.miou = ts.miou;

    // Per-dimension SODA-style F1: precision over K merged units, recall over
    // the references that carry keypoints in the dimension.
    double avg_sum = 0.0;
    std::size_t avg_count = 0;
    for (Dimension d : kDimensions) {
        std::size_t n_d = 0;
        for (const ReferenceScene& scene : reference)
            if (!scene.keypoints.by_dim[d].empty()) ++n_d;
        if (n_d == 0) continue;  // dimension_active already false

        double dim_sum = 0.0;
        for (const PairScore& score : pair_scores) {
            const auto& tally = score.per_dimension[d];
            if (tally.total_keypoints > 0)
                dim_sum += static_cast<double>(tally.hit_count) /
                           static_cast<double>(tally.total_keypoints);
        }
        const double precision = k > 0 ? dim_sum / static_cast<double>(k) : 0.0;
        const double recall = dim_sum / static_cast<double>(n_d);
        report.per_dimension_sodam[d] = 100.0 * f1_of(precision, recall);
        avg_sum += report.per_dimension_sodam[d];
        ++avg_count;
    }

    if (config.pooled_average) {
        double pooled_sum = 0.0;
        for (const PairScore& score : pair_scores) pooled_sum += score.checklist;
        const double precision = k > 0 ? pooled_sum / static_cast<double>(k) : 0.0;
        const double recall = pooled_sum / static_cast<double>(n);
        report.sodam_avg = 100.0 * f1_of(precision, recall);
    } else {
        report.sodam_avg = avg_count > 0 ? avg_sum / static_cast<double>(avg_count) : 0.0;
    }
    return report;
}

}  // namespace sodam
