#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sodam/types.hpp"

namespace sodam {

struct QcPolicy {
    std::size_t min_scenes = 2;
    double min_segment_duration = 1.0;
    bool require_audio = true;

    void validate() const {
        if (min_scenes < 1) throw std::invalid_argument("QcPolicy: min_scenes must be >= 1");
        if (!(min_segment_duration > 0))
            throw std::invalid_argument("QcPolicy: min_segment_duration must be > 0");
    }
};

enum class QcReason {
    JsonError,
    MissingField,
    BadTimestamp,
    TooFewScenes,
    SegmentTooShort,
    NoAudio,
};

std::string_view to_string(QcReason reason);

struct QcDecision {
    bool keep = false;
    std::vector<QcReason> reasons;  // every violated rule, not just the first
    std::vector<std::string> details;
};

/// Applies, in order: JSON parse, required caption fields, scene count,
/// per-segment duration, audio flag. Rejection is a value, never an error.
QcDecision qc_filter(std::string_view record_line, const QcPolicy& policy = {});

struct QcRecord {
    ScriptDocument document;
    bool has_audio = false;
};

struct StatsConfig {
    std::vector<double> duration_bucket_edges{30, 60, 120, 180, 300};
    std::vector<double> segment_bucket_edges{1, 2, 5, 10, 30, 60};
};

/// Aggregate statistics over records that passed qc_filter: video-duration
/// histogram, per-dimension word counts, segment-duration histogram,
/// scene-count distribution.
nlohmann::ordered_json corpus_stats(std::span<const QcRecord> records,
                                    const StatsConfig& config = {});

}  // namespace sodam
