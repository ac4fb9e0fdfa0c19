#include "sodam/types.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "sodam/parse.hpp"

namespace sodam {

namespace {

struct DimensionInfo {
    Dimension dim;
    std::string_view wire;
    std::string_view name;
};

constexpr std::array<DimensionInfo, kDimensionCount> kDimensionTable = {{
    {Dimension::Events, "segment_detail_caption", "events"},
    {Dimension::Background, "video_background", "background"},
    {Dimension::Camera, "camera_state", "camera"},
    {Dimension::ShotEdit, "shooting_style", "shot_edit"},
    {Dimension::Dialogue, "speech_content", "dialogue"},
    {Dimension::Acoustics, "acoustics_content", "acoustics"},
}};

}  // namespace

std::string_view wire_key(Dimension d) {
    return kDimensionTable[static_cast<std::size_t>(d)].wire;
}

std::string_view short_name(Dimension d) {
    return kDimensionTable[static_cast<std::size_t>(d)].name;
}

std::optional<Dimension> dimension_from_wire_key(std::string_view key) {
    for (const auto& info : kDimensionTable)
        if (info.wire == key) return info.dim;
    return std::nullopt;
}

std::optional<Dimension> dimension_from_short_name(std::string_view name) {
    for (const auto& info : kDimensionTable)
        if (info.name == name) return info.dim;
    return std::nullopt;
}

std::string_view to_string(ValidationIssueKind kind) {
    switch (kind) {
        case ValidationIssueKind::OverlappingScenes: return "OverlappingScenes";
        case ValidationIssueKind::UnorderedScenes: return "UnorderedScenes";
        case ValidationIssueKind::ZeroDuration: return "ZeroDuration";
        case ValidationIssueKind::NegativeStart: return "NegativeStart";
        case ValidationIssueKind::MissingDimension: return "MissingDimension";
        case ValidationIssueKind::DurationExceeded: return "DurationExceeded";
    }
    return "Unknown";
}

ValidationResult validate_document(ScriptDocument doc, ValidationMode mode) {
    ValidationResult result;
    auto issue = [](ValidationIssueKind kind, std::string message) {
        return ValidationIssue{kind, std::move(message)};
    };
    auto scene_label = [](std::size_t i) {
        return "scene[" + std::to_string(i) + "]";
    };

    const bool strict = mode == ValidationMode::Strict;

    bool sorted = std::is_sorted(doc.scenes.begin(), doc.scenes.end(),
                                 [](const SceneEntry& a, const SceneEntry& b) {
                                     return a.interval.start < b.interval.start;
                                 });
    if (!sorted) {
        auto msg = issue(ValidationIssueKind::UnorderedScenes,
                         "scenes are not sorted by start time");
        if (strict) {
            result.errors.push_back(std::move(msg));
        } else {
            result.warnings.push_back(std::move(msg));
            std::stable_sort(doc.scenes.begin(), doc.scenes.end(),
                             [](const SceneEntry& a, const SceneEntry& b) {
                                 return a.interval.start < b.interval.start;
                             });
        }
    }

    for (std::size_t i = 0; i + 1 < doc.scenes.size(); ++i) {
        if (doc.scenes[i].interval.end > doc.scenes[i + 1].interval.start + 1e-12) {
            auto msg = issue(ValidationIssueKind::OverlappingScenes,
                             scene_label(i) + " overlaps " + scene_label(i + 1));
            if (strict)
                result.errors.push_back(std::move(msg));
            else
                result.warnings.push_back(std::move(msg));
        }
    }

    if (doc.video_duration) {
        for (std::size_t i = 0; i < doc.scenes.size(); ++i) {
            if (doc.scenes[i].interval.end > *doc.video_duration + 1e-12) {
                auto msg = issue(ValidationIssueKind::DurationExceeded,
                                 scene_label(i) + " ends after video_duration");
                if (strict)
                    result.errors.push_back(std::move(msg));
                else
                    result.warnings.push_back(std::move(msg));
            }
        }
    }

    if (result.errors.empty()) result.document = std::move(doc);
    return result;
}

namespace {

nlohmann::ordered_json scene_to_wire(const SceneEntry& scene) {
    nlohmann::ordered_json out;
    out["timestamp"] = format_timestamp(scene.interval);
    for (Dimension d : kDimensions) out[std::string(wire_key(d))] = scene.caption[d];
    for (const auto& [key, raw] : scene.extras)
        out[key] = nlohmann::ordered_json::parse(raw);
    return out;
}

}  // namespace

nlohmann::ordered_json document_to_wire(const ScriptDocument& doc) {
    nlohmann::ordered_json out;
    out["video_id"] = doc.video_id;
    if (doc.video_duration) out["video_duration_s"] = *doc.video_duration;
    auto scenes = nlohmann::ordered_json::array();
    for (const auto& scene : doc.scenes) scenes.push_back(scene_to_wire(scene));
    out["prediction"] = std::move(scenes);
    return out;
}

nlohmann::ordered_json report_to_json(const MetricReport& report) {
    nlohmann::ordered_json out;
    auto f1_at = nlohmann::ordered_json::object();
    for (const auto& [threshold, score] : report.f1_at) {
        char key[32];
        std::snprintf(key, sizeof(key), "%g", threshold);
        f1_at[key] = {{"precision", score.precision},
                      {"recall", score.recall},
                      {"f1", score.f1}};
    }
    out["f1_at"] = std::move(f1_at);
    out["mean_f1"] = report.mean_f1;
    out["miou"] = report.miou;
    auto per_dim = nlohmann::ordered_json::object();
    for (Dimension d : kDimensions) {
        if (report.dimension_active[d])
            per_dim[std::string(short_name(d))] = report.per_dimension_sodam[d];
        else
            per_dim[std::string(short_name(d))] = nullptr;
    }
    out["per_dimension_sodam"] = std::move(per_dim);
    out["sodam_avg"] = report.sodam_avg;
    out["counts"] = {{"k_matched", report.k_matched},
                     {"n_reference", report.n_reference},
                     {"m_prediction_raw", report.m_prediction_raw},
                     {"m_prediction_merged", report.m_prediction_merged},
                     {"judge_calls", report.judge_calls}};
    return out;
}

nlohmann::ordered_json reward_to_json(const RewardBreakdown& reward) {
    return {{"r_format", reward.r_format},
            {"r_length", reward.r_length},
            {"r_timestamp", reward.r_timestamp},
            {"r_caption", reward.r_caption},
            {"total", reward.total}};
}

}  // namespace sodam
