#include "sodam/judge.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace sodam {

namespace {

// Dimension order used by the judge prompt (differs from reporting order).
constexpr std::array<Dimension, kDimensionCount> kPromptOrder = {
    Dimension::Events,   Dimension::Background, Dimension::Acoustics,
    Dimension::ShotEdit, Dimension::Dialogue,   Dimension::Camera,
};

}  // namespace

std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c) || std::ispunct(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

JudgeVerdict DeterministicJudge::evaluate(const JudgeRequest& request) {
    JudgeVerdict verdict;
    for (Dimension d : kDimensions) {
        const std::string caption = normalize_text(request.caption[d]);
        for (const std::string& keypoint : request.keypoints.by_dim[d]) {
            const std::string needle = normalize_text(keypoint);
            if (!needle.empty() && caption.find(needle) != std::string::npos)
                verdict.hits[d].push_back(keypoint);
        }
    }
    return verdict;
}

std::string render_judge_prompt(const JudgeRequest& request) {
    std::string prompt =
        "You are a strict evaluator for fine-grained audio-enhanced video captions.\n"
        "\n"
        "You will receive:\n"
        "1. A list of ground-truth keypoints already organized in 6 dimensions.\n"
        "2. One model-generated caption to evaluate.\n"
        "\n"
        "The ground-truth keypoints are already atomic and accurate. You only need to "
        "check whether each keypoint is explicitly mentioned or clearly implied in the "
        "model's caption.\n"
        "\n"
        "Rules:\n"
        "- Mark a keypoint as correct if its meaning appears in the model's caption with "
        "the same or equivalent semantics.\n"
        "- Ignore differences in phrasing, tense, or minor wording.\n"
        "- Do NOT infer or guess beyond the caption content.\n"
        "- Do NOT generate new keypoints or summaries.\n"
        "- Do NOT output any text other than the required JSON.\n"
        "\n"
        "Output Format (Strict JSON Only):\n"
        "{\n"
        "  \"by_dim\": {\n";
    for (std::size_t i = 0; i < kPromptOrder.size(); ++i) {
        prompt += "    \"" + std::string(wire_key(kPromptOrder[i])) +
                  "\": {\"correct_keypoints\": [<string>, ...], \"correct_count\": <int>}";
        prompt += i + 1 < kPromptOrder.size() ? ",\n" : "\n";
    }
    prompt +=
        "  }\n"
        "}\n"
        "\n"
        "Ground-truth keypoints (by dimension):\n";
    for (Dimension d : kPromptOrder) {
        prompt += "- " + std::string(wire_key(d)) + ": " +
                  nlohmann::json(request.keypoints.by_dim[d]).dump() + "\n";
    }
    prompt += "\nModel-generated caption to evaluate:\n";
    for (Dimension d : kPromptOrder)
        prompt += std::string(wire_key(d)) + ": " + request.caption[d] + "\n";
    return prompt;
}

JudgeVerdict parse_judge_response(std::string_view raw, const JudgeRequest& request) {
    // Locate the outermost JSON object, tolerating fences and prose.
    auto open = raw.find('{');
    if (open == std::string_view::npos)
        throw UnparsableVerdict("no JSON object in judge response");
    int depth = 0;
    bool in_string = false, escaped = false;
    std::size_t close = std::string_view::npos;
    for (std::size_t i = open; i < raw.size(); ++i) {
        char c = raw[i];
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
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) {
            close = i;
            break;
        }
    }
    if (close == std::string_view::npos)
        throw UnparsableVerdict("unterminated JSON object in judge response");

    auto body = nlohmann::json::parse(raw.substr(open, close - open + 1), nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("by_dim") ||
        !body["by_dim"].is_object())
        throw UnparsableVerdict("judge response lacks a by_dim object");

    JudgeVerdict verdict;
    for (Dimension d : kDimensions) {
        const std::string key(wire_key(d));
        if (!body["by_dim"].contains(key)) continue;
        const auto& entry = body["by_dim"][key];
        if (!entry.is_object() || !entry.contains("correct_keypoints") ||
            !entry["correct_keypoints"].is_array())
            continue;
        const auto& requested = request.keypoints.by_dim[d];
        for (const auto& item : entry["correct_keypoints"]) {
            if (!item.is_string()) continue;
            const std::string hit = item.get<std::string>();
            if (std::find(requested.begin(), requested.end(), hit) != requested.end()) {
                if (std::find(verdict.hits[d].begin(), verdict.hits[d].end(), hit) ==
                    verdict.hits[d].end())
                    verdict.hits[d].push_back(hit);
            } else {
                verdict.warnings.push_back("dropped non-member hit '" + hit + "' in " + key);
            }
        }
    }
    return verdict;
}

std::string content_hash(std::string_view data) {
    // FNV-1a, 64-bit
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

namespace {

std::string default_transport(const JudgeEndpointConfig& config, const std::string& body) {
    httplib::Client client(config.base_url);
    client.set_read_timeout(std::chrono::milliseconds(
        static_cast<long>(config.timeout_seconds * 1000)));
    httplib::Headers headers;
    if (!config.token_env.empty()) {
        if (const char* token = std::getenv(config.token_env.c_str()))
            headers.emplace(config.auth_header, "Bearer " + std::string(token));
    }
    auto response = client.Post(config.path, headers, body, "application/json");
    if (!response)
        throw JudgeError("transport error: " + httplib::to_string(response.error()));
    if (response->status != 200)
        throw JudgeError("judge endpoint returned status " + std::to_string(response->status));
    return response->body;
}

std::string substitute(std::string text, std::string_view placeholder, const std::string& value) {
    for (auto pos = text.find(placeholder); pos != std::string::npos;
         pos = text.find(placeholder, pos + value.size()))
        text.replace(pos, placeholder.size(), value);
    return text;
}

std::string extract_by_path(const nlohmann::json& body, std::string_view dotted_path) {
    const nlohmann::json* node = &body;
    std::size_t start = 0;
    while (start <= dotted_path.size()) {
        auto dot = dotted_path.find('.', start);
        const std::string part(dotted_path.substr(
            start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (node->is_array()) {
            std::size_t index = std::stoul(part);
            if (index >= node->size()) throw JudgeError("response path out of range: " + part);
            node = &(*node)[index];
        } else if (node->is_object() && node->contains(part)) {
            node = &(*node)[part];
        } else {
            throw JudgeError("response path not found: " + part);
        }
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    if (!node->is_string()) throw JudgeError("response content is not a string");
    return node->get<std::string>();
}

}  // namespace

HttpJudge::HttpJudge(JudgeEndpointConfig config, Transport transport)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : default_transport) {}

JudgeVerdict HttpJudge::evaluate(const JudgeRequest& request) {
    const std::string prompt = render_judge_prompt(request);
    const std::string key = content_hash(prompt);

    namespace fs = std::filesystem;
    fs::path cache_file;
    if (!config_.cache_dir.empty()) {
        cache_file = fs::path(config_.cache_dir) / (key + ".json");
        std::ifstream in(cache_file);
        if (in) {
            nlohmann::json entry = nlohmann::json::parse(in, nullptr, false);
            if (!entry.is_discarded() && entry.is_object() &&
                entry.value("prompt_hash", "") == key && entry.contains("raw_response") &&
                entry["raw_response"].is_string()) {
                try {
                    return parse_judge_response(entry["raw_response"].get<std::string>(),
                                                request);
                } catch (const UnparsableVerdict&) {
                    // corrupt entry: fall through to a fresh call
                }
            }
        }
    }

    const std::string body = substitute(
        substitute(config_.request_template, "{{model}}", nlohmann::json(config_.model).dump()),
        "{{prompt}}", nlohmann::json(prompt).dump());

    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(
                static_cast<long>(config_.backoff_initial_ms) << (attempt - 1)));
        }
        try {
            ++network_calls_;
            const std::string raw = transport_(config_, body);
            nlohmann::json parsed = nlohmann::json::parse(raw, nullptr, false);
            if (parsed.is_discarded()) throw JudgeError("endpoint response is not JSON");
            const std::string content = extract_by_path(parsed, config_.response_path);
            JudgeVerdict verdict = parse_judge_response(content, request);
            if (!cache_file.empty()) {
                fs::create_directories(cache_file.parent_path());
                fs::path tmp = cache_file;
                tmp += ".tmp." + std::to_string(
                    std::hash<std::thread::id>{}(std::this_thread::get_id()));
                {
                    std::ofstream out(tmp);
                    out << nlohmann::json{{"prompt_hash", key}, {"raw_response", content}};
                }
                fs::rename(tmp, cache_file);
            }
            return verdict;
        } catch (const JudgeUnavailable&) {
            throw;
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    throw JudgeUnavailable("judge failed after " + std::to_string(config_.retries + 1) +
                           " attempts: " + last_error);
}

}  // namespace sodam
