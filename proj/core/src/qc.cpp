#include "sodam/qc.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sodam/parse.hpp"

namespace sodam {

std::string_view to_string(QcReason reason) {
    switch (reason) {
        case QcReason::JsonError: return "JsonError";
        case QcReason::MissingField: return "MissingField";
        case QcReason::BadTimestamp: return "BadTimestamp";
        case QcReason::TooFewScenes: return "TooFewScenes";
        case QcReason::SegmentTooShort: return "SegmentTooShort";
        case QcReason::NoAudio: return "NoAudio";
    }
    return "Unknown";
}

QcDecision qc_filter(std::string_view record_line, const QcPolicy& policy) {
    policy.validate();
    QcDecision decision;
    auto reject = [&](QcReason reason, std::string detail) {
        if (std::find(decision.reasons.begin(), decision.reasons.end(), reason) ==
            decision.reasons.end())
            decision.reasons.push_back(reason);
        decision.details.push_back(std::move(detail));
    };

    nlohmann::json record = nlohmann::json::parse(record_line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
        reject(QcReason::JsonError, "record is not a JSON object");
        return decision;
    }
    if (!record.contains("prediction") || !record["prediction"].is_array()) {
        reject(QcReason::JsonError, "missing scene array 'prediction'");
        return decision;
    }

    const auto& scenes = record["prediction"];
    std::size_t parsable_scenes = 0;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const auto& scene = scenes[i];
        const std::string label = "scene[" + std::to_string(i) + "]";
        if (!scene.is_object()) {
            reject(QcReason::JsonError, label + " is not an object");
            continue;
        }
        for (Dimension d : kDimensions) {
            const std::string key(wire_key(d));
            if (!scene.contains(key) || !scene[key].is_string())
                reject(QcReason::MissingField, label + " lacks '" + key + "'");
        }
        if (!scene.contains("timestamp") || !scene["timestamp"].is_string()) {
            reject(QcReason::MissingField, label + " lacks 'timestamp'");
            continue;
        }
        try {
            const TimeInterval interval =
                parse_timestamp(scene["timestamp"].get<std::string>());
            ++parsable_scenes;
            if (interval.length() < policy.min_segment_duration)
                reject(QcReason::SegmentTooShort,
                       label + " lasts " + std::to_string(interval.length()) + " s");
        } catch (const TimestampError& e) {
            reject(QcReason::BadTimestamp, label + ": " + e.what());
        }
    }

    if (parsable_scenes < policy.min_scenes)
        reject(QcReason::TooFewScenes,
               "only " + std::to_string(parsable_scenes) + " scene(s)");
    if (policy.require_audio && !record.value("has_audio", false))
        reject(QcReason::NoAudio, "record lacks an audio track");

    decision.keep = decision.reasons.empty();
    return decision;
}

namespace {

nlohmann::ordered_json histogram(const std::vector<double>& values,
                                 const std::vector<double>& edges) {
    std::vector<std::size_t> buckets(edges.size() + 1, 0);
    for (double v : values) {
        std::size_t slot = edges.size();
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (v <= edges[i]) {
                slot = i;
                break;
            }
        }
        ++buckets[slot];
    }
    auto out = nlohmann::ordered_json::object();
    double previous = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        std::ostringstream key;
        key << "(" << previous << ", " << edges[i] << "]";
        out[key.str()] = buckets[i];
        previous = edges[i];
    }
    std::ostringstream last;
    last << "(" << previous << ", inf)";
    out[last.str()] = buckets[edges.size()];
    return out;
}

std::size_t words_in(const std::string& text) {
    std::istringstream stream(text);
    std::string token;
    std::size_t count = 0;
    while (stream >> token) ++count;
    return count;
}

}  // namespace

nlohmann::ordered_json corpus_stats(std::span<const QcRecord> records,
                                    const StatsConfig& config) {
    std::vector<double> durations;
    std::vector<double> segment_durations;
    std::map<std::size_t, std::size_t> scene_counts;
    PerDimension<std::size_t> dim_words;
    std::size_t total_words = 0;

    for (const QcRecord& record : records) {
        const ScriptDocument& doc = record.document;
        double duration = doc.video_duration.value_or(
            doc.scenes.empty() ? 0.0 : doc.scenes.back().interval.end);
        durations.push_back(duration);
        ++scene_counts[doc.scenes.size()];
        for (const SceneEntry& scene : doc.scenes) {
            segment_durations.push_back(scene.interval.length());
            for (Dimension d : kDimensions) {
                const std::size_t words = words_in(scene.caption[d]);
                dim_words[d] += words;
                total_words += words;
            }
        }
    }

    nlohmann::ordered_json out;
    out["record_count"] = records.size();
    out["duration_histogram"] = histogram(durations, config.duration_bucket_edges);
    out["segment_duration_histogram"] =
        histogram(segment_durations, config.segment_bucket_edges);
    auto counts = nlohmann::ordered_json::object();
    for (const auto& [scenes, videos] : scene_counts)
        counts[std::to_string(scenes)] = videos;
    out["scene_count_distribution"] = std::move(counts);
    auto words = nlohmann::ordered_json::object();
    for (Dimension d : kDimensions) words[std::string(short_name(d))] = dim_words[d];
    out["per_dimension_word_totals"] = std::move(words);
    out["total_words"] = total_words;
    out["mean_words_per_video"] =
        records.empty() ? 0.0 : static_cast<double>(total_words) / records.size();
    return out;
}

}  // namespace sodam
