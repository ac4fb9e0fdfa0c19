#include "sodam/parse.hpp"

#include <cmath>
#include <cstdio>
#include <regex>

#include <nlohmann/json.hpp>

namespace sodam {

namespace {

const std::regex kTimestampRe(
    R"(^\s*(\d{1,3}):(\d{2})\s*-\s*(\d{1,3}):(\d{2})\s*$)");

std::string trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return "";
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

TimeInterval parse_timestamp(std::string_view text) {
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(text.begin(), text.end(), m, kTimestampRe))
        throw MalformedTimestamp("not of the form MM:SS-MM:SS: '" + std::string(text) + "'");
    const int start_min = std::stoi(m[1]);
    const int start_sec = std::stoi(m[2]);
    const int end_min = std::stoi(m[3]);
    const int end_sec = std::stoi(m[4]);
    if (start_sec > 59 || end_sec > 59)
        throw SecondsOutOfRange("seconds component must be 00-59: '" + std::string(text) + "'");
    const double start = start_min * 60.0 + start_sec;
    const double end = end_min * 60.0 + end_sec;
    if (!(start < end))
        throw NonPositiveDuration("interval has non-positive duration: '" + std::string(text) + "'");
    return TimeInterval(start, end);
}

std::string format_timestamp(const TimeInterval& interval) {
    auto part = [](double seconds) {
        const long total = std::lround(seconds);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%02ld:%02ld", total / 60, total % 60);
        return std::string(buf);
    };
    return part(interval.start) + "-" + part(interval.end);
}

namespace {

/// Lenient extraction: strip markdown fences, then cut from the first '[' to
/// its matching ']' (string-aware).
std::string extract_array_lenient(std::string_view raw) {
    std::string text = trim(raw);
    if (auto fence = text.find("```"); fence != std::string::npos) {
        auto body_start = text.find('\n', fence);
        if (body_start != std::string::npos) {
            auto fence_end = text.find("```", body_start);
            if (fence_end != std::string::npos)
                text = trim(std::string_view(text).substr(body_start + 1, fence_end - body_start - 1));
        }
    }
    auto open = text.find('[');
    if (open == std::string::npos) return text;
    int depth = 0;
    bool in_string = false, escaped = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '[') ++depth;
        else if (c == ']' && --depth == 0)
            return text.substr(open, i - open + 1);
    }
    return text.substr(open);
}

struct SceneParse {
    std::optional<SceneEntry> scene;
    std::vector<Diagnostic> diagnostics;  // non-empty means not strict-valid
};

SceneParse parse_scene_element(const nlohmann::ordered_json& element, std::size_t index,
                               ParseMode mode) {
    SceneParse out;
    const std::string pos = "prediction[" + std::to_string(index) + "]";
    if (!element.is_object()) {
        out.diagnostics.push_back({pos, "element is not a JSON object"});
        return out;
    }
    SceneEntry scene;
    if (!element.contains("timestamp") || !element["timestamp"].is_string()) {
        out.diagnostics.push_back({pos + ".timestamp", "missing timestamp field"});
        return out;
    }
    try {
        scene.interval = parse_timestamp(element["timestamp"].get<std::string>());
    } catch (const TimestampError& e) {
        out.diagnostics.push_back({pos + ".timestamp", e.what()});
        return out;
    }
    for (Dimension d : kDimensions) {
        const std::string key(wire_key(d));
        if (element.contains(key)) {
            if (element[key].is_string())
                scene.caption[d] = element[key].get<std::string>();
            else
                out.diagnostics.push_back({pos + "." + key, "field is not a string"});
        } else {
            out.diagnostics.push_back({pos + "." + key, "missing caption field '" + key + "'"});
            if (mode == ParseMode::Strict) return out;
        }
    }
    for (const auto& [key, value] : element.items()) {
        if (key == "timestamp" || dimension_from_wire_key(key)) continue;
        scene.extras.emplace_back(key, value.dump());
    }
    if (mode == ParseMode::Strict && !out.diagnostics.empty()) return out;
    out.scene = std::move(scene);
    return out;
}

}  // namespace

ParseOutcome parse_prediction(std::string_view raw, ParseMode mode, std::string video_id) {
    ParseOutcome outcome;
    const std::string text =
        mode == ParseMode::Lenient ? extract_array_lenient(raw) : trim(raw);

    nlohmann::ordered_json array = nlohmann::ordered_json::parse(text, nullptr, false);
    if (array.is_discarded() || !array.is_array()) {
        outcome.diagnostics.push_back({"", "output is not a JSON array"});
        return outcome;
    }

    ScriptDocument doc;
    doc.video_id = std::move(video_id);
    bool all_scenes_strict = true;
    for (std::size_t i = 0; i < array.size(); ++i) {
        SceneParse parsed = parse_scene_element(array[i], i, mode);
        for (auto& d : parsed.diagnostics) outcome.diagnostics.push_back(std::move(d));
        all_scenes_strict = all_scenes_strict && parsed.diagnostics.empty();
        if (parsed.scene)
            doc.scenes.push_back(std::move(*parsed.scene));
        else if (mode == ParseMode::Strict)
            return outcome;
    }

    ScriptDocument fallback = doc;
    ValidationResult validated = validate_document(std::move(doc), ValidationMode::Strict);
    if (validated.ok()) {
        outcome.format_valid = all_scenes_strict;
        outcome.document = std::move(*validated.document);
        return outcome;
    }
    for (const auto& issue : validated.errors)
        outcome.diagnostics.push_back({std::string(to_string(issue.kind)), issue.message});
    if (mode == ParseMode::Lenient) {
        ValidationResult repaired =
            validate_document(std::move(fallback), ValidationMode::Lenient);
        for (const auto& issue : repaired.warnings)
            outcome.diagnostics.push_back({std::string(to_string(issue.kind)), issue.message});
        if (repaired.ok()) outcome.document = std::move(*repaired.document);
    }
    return outcome;
}

ReferenceRecord parse_reference(std::string_view raw) {
    nlohmann::ordered_json record = nlohmann::ordered_json::parse(raw, nullptr, false);
    if (record.is_discarded() || !record.is_object())
        throw SchemaError("$", "record is not a JSON object");
    ReferenceRecord out;
    if (record.contains("video_id") && record["video_id"].is_string())
        out.video_id = record["video_id"].get<std::string>();
    if (record.contains("video_duration_s")) {
        if (!record["video_duration_s"].is_number())
            throw SchemaError("video_duration_s", "not a number");
        out.video_duration = record["video_duration_s"].get<double>();
    }
    if (!record.contains("reference") || !record["reference"].is_array())
        throw SchemaError("reference", "missing scene array");
    const auto& scenes = record["reference"];
    if (scenes.empty()) throw SchemaError("reference", "a reference must contain at least one scene");

    std::vector<ReferenceScene> parsed;
    ScriptDocument shape;  // reuses the document validators
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const std::string pos = "reference[" + std::to_string(i) + "]";
        SceneParse sp = parse_scene_element(scenes[i], i, ParseMode::Strict);
        if (!sp.scene) {
            throw SchemaError(pos, sp.diagnostics.empty() ? "invalid scene"
                                                          : sp.diagnostics.front().message);
        }
        ReferenceScene ref;
        ref.entry = std::move(*sp.scene);
        // keypoints land in extras during the scene parse; pull them out
        for (auto it = ref.entry.extras.begin(); it != ref.entry.extras.end(); ++it) {
            if (it->first != "keypoints") continue;
            auto kp = nlohmann::ordered_json::parse(it->second);
            if (!kp.is_object()) throw SchemaError(pos + ".keypoints", "not an object");
            for (const auto& [key, list] : kp.items()) {
                auto dim = dimension_from_wire_key(key);
                if (!dim) throw SchemaError(pos + ".keypoints." + key, "unknown dimension key");
                if (!list.is_array()) throw SchemaError(pos + ".keypoints." + key, "not an array");
                for (const auto& item : list) {
                    if (!item.is_string())
                        throw SchemaError(pos + ".keypoints." + key, "keypoint is not a string");
                    std::string kp_text = trim(item.get<std::string>());
                    if (kp_text.empty())
                        throw SchemaError(pos + ".keypoints." + key, "empty keypoint");
                    ref.keypoints.by_dim[*dim].push_back(std::move(kp_text));
                }
            }
            ref.entry.extras.erase(it);
            break;
        }
        if (!ref.keypoints.any())
            throw SchemaError(pos + ".keypoints", "no keypoints in any dimension");
        shape.scenes.push_back(ref.entry);
        parsed.push_back(std::move(ref));
    }
    shape.video_duration = out.video_duration;
    ValidationResult validated = validate_document(std::move(shape), ValidationMode::Strict);
    if (!validated.ok()) {
        const auto& first = validated.errors.front();
        throw SchemaError("reference", std::string(to_string(first.kind)) + ": " + first.message);
    }
    out.scenes = std::move(parsed);
    return out;
}

nlohmann::ordered_json reference_to_wire(const ReferenceRecord& record) {
    nlohmann::ordered_json out;
    out["video_id"] = record.video_id;
    if (record.video_duration) out["video_duration_s"] = *record.video_duration;
    auto scenes = nlohmann::ordered_json::array();
    for (const auto& ref : record.scenes) {
        nlohmann::ordered_json scene;
        scene["timestamp"] = format_timestamp(ref.entry.interval);
        for (Dimension d : kDimensions)
            scene[std::string(wire_key(d))] = ref.entry.caption[d];
        auto keypoints = nlohmann::ordered_json::object();
        for (Dimension d : kDimensions)
            keypoints[std::string(wire_key(d))] = ref.keypoints.by_dim[d];
        scene["keypoints"] = std::move(keypoints);
        for (const auto& [key, raw] : ref.entry.extras)
            scene[key] = nlohmann::ordered_json::parse(raw);
        scenes.push_back(std::move(scene));
    }
    out["reference"] = std::move(scenes);
    return out;
}

}  // namespace sodam
