#pragma once

#include <span>

#include "sodam/parse.hpp"
#include "sodam/score.hpp"
#include "sodam/types.hpp"

namespace sodam {

/// Trapezoidal word-count band: reward 1 inside [min_words, max_words],
/// linear decay to 0 over decay_span words on either side. A document with no
/// words scores 0.
struct LengthPolicy {
    std::size_t min_words = 400;
    std::size_t max_words = 1400;
    std::size_t decay_span = 1000;

    void validate() const {
        if (min_words == 0 || min_words >= max_words)
            throw std::invalid_argument("LengthPolicy: need 0 < min_words < max_words");
        if (decay_span == 0) throw std::invalid_argument("LengthPolicy: decay_span must be > 0");
    }
};

/// 1 iff the output strictly parsed as a valid scene list.
double format_reward(const ParseOutcome& outcome);

std::size_t word_count(const ScriptDocument& doc);

double length_reward(const ScriptDocument& doc, const LengthPolicy& policy = {});

/// Mean F1 over the IoU thresholds along the merged alignment path, in [0,1].
double timestamp_reward(const ScriptDocument& prediction,
                        std::span<const ReferenceScene> reference,
                        std::span<const double> thresholds);

/// SodaM(Avg.) / 100, in [0,1].
double caption_reward(const ScriptDocument& prediction,
                      std::span<const ReferenceScene> reference, Judge& judge,
                      const ScoreConfig& config = {});

/// Weighted sum of the four components. When r_format is 0 the timestamp and
/// caption components are forced to 0 before summation.
RewardBreakdown total_reward(double r_format, double r_length, double r_timestamp,
                             double r_caption, const RewardWeights& weights = {});

struct RolloutScore {
    RewardBreakdown reward;
    std::optional<MetricReport> report;
    std::vector<Diagnostic> diagnostics;
};

/// Scores one raw rollout end to end: parse (strict for the format signal,
/// lenient salvage is not applied here), then the full reward stack.
RolloutScore score_rollout(std::string_view raw_output,
                           std::span<const ReferenceScene> reference, Judge& judge,
                           const RewardWeights& weights = {},
                           const LengthPolicy& length_policy = {},
                           const ScoreConfig& score_config = {});

}  // namespace sodam
