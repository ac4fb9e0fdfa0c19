#pragma once

#include <span>
#include <vector>

#include "sodam/judge.hpp"
#include "sodam/types.hpp"

namespace sodam {

struct EmptyReference : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionTally {
    std::size_t hit_count = 0;
    std::size_t total_keypoints = 0;
    std::vector<std::string> hit_keypoints;
};

/// Checklist outcome for one matched pair.
struct PairScore {
    std::size_t reference_index = 0;
    SceneEntry merged_prediction;
    double iou = 0.0;
    PerDimension<DimensionTally> per_dimension;
    /// Pooled score: sum of hits over sum of keypoint totals, across
    /// dimensions with at least one keypoint; 0 when all are empty.
    double checklist = 0.0;
};

inline constexpr std::array<double, 4> kDefaultThresholds = {0.3, 0.5, 0.7, 0.9};

struct ScoreConfig {
    std::vector<double> thresholds{kDefaultThresholds.begin(), kDefaultThresholds.end()};
    /// When true, SodaM(Avg.) uses the pooled checklist normalization instead
    /// of the mean of per-dimension F1 scores.
    bool pooled_average = false;
};

/// Scores one merged prediction caption against a reference's keypoints with
/// a single judge invocation (zero invocations when every dimension is
/// empty).
PairScore checklist_score(const SceneCaption& prediction, const KeypointSet& keypoints,
                          Judge& judge);

struct TimestampMetrics {
    std::vector<std::pair<double, ThresholdScore>> f1_at;
    double mean_f1 = 0.0;
    double miou = 0.0;
};

/// F1 at each threshold (precision over K merged units, recall over N
/// references) plus mean IoU normalized by N.
TimestampMetrics timestamp_metrics(const AlignmentResult& alignment,
                                   std::span<const double> pair_ious,
                                   std::span<const double> thresholds);

/// The full pipeline: align -> merge groups -> per-pair checklist (K judge
/// calls) -> per-dimension F1 -> SodaM(Avg.).
MetricReport evaluate_sodam(const ScriptDocument& prediction,
                            std::span<const ReferenceScene> reference, Judge& judge,
                            const ScoreConfig& config = {});

/// The all-zero report for a missing or unusable prediction (counts still
/// reflect the reference).
MetricReport zero_report(std::span<const ReferenceScene> reference,
                         const ScoreConfig& config = {});

}  // namespace sodam
