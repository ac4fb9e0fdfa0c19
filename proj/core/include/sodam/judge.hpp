#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sodam/types.hpp"

namespace sodam {

struct JudgeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnparsableVerdict : JudgeError {
    using JudgeError::JudgeError;
};
struct JudgeUnavailable : JudgeError {
    using JudgeError::JudgeError;
};

/// One evaluation unit: a (merged) predicted caption against the keypoints of
/// its matched reference scene. All six dimensions travel in a single call.
struct JudgeRequest {
    SceneCaption caption;
    KeypointSet keypoints;  // at least one non-empty dimension
    std::string pair_id;
};

struct JudgeVerdict {
    PerDimension<std::vector<std::string>> hits;  // subset of request keypoints
    std::vector<std::string> warnings;

    std::size_t correct_count(Dimension d) const { return hits[d].size(); }
};

class Judge {
public:
    virtual ~Judge() = default;
    virtual JudgeVerdict evaluate(const JudgeRequest& request) = 0;
};

/// Lowercases, strips ASCII punctuation, collapses whitespace.
std::string normalize_text(std::string_view text);

/// Offline judge: a keypoint is covered iff its normalized form is a
/// substring of the normalized caption text of the same dimension.
class DeterministicJudge final : public Judge {
public:
    JudgeVerdict evaluate(const JudgeRequest& request) override;
};

/// Instantiates the checklist evaluator prompt. Byte-stable for identical
/// requests.
std::string render_judge_prompt(const JudgeRequest& request);

/// Extracts the strict-JSON verdict (tolerating code fences), drops hits not
/// present in the request's keypoints (with a warning), and reconciles
/// counts. Throws UnparsableVerdict on anything unusable.
JudgeVerdict parse_judge_response(std::string_view raw, const JudgeRequest& request);

struct JudgeEndpointConfig {
    std::string base_url;                  // e.g. "http://judge.internal:8080"
    std::string path = "/v1/chat/completions";
    std::string auth_header = "Authorization";
    std::string token_env = "SODAM_JUDGE_TOKEN";
    std::string model = "gemini-2.5-flash";
    double timeout_seconds = 60.0;
    int retries = 3;
    int backoff_initial_ms = 250;
    int parallelism = 4;
    std::string cache_dir;  // empty disables the cache
    // "{{model}}" and "{{prompt}}" placeholders; override for non-chat APIs.
    std::string request_template =
        R"({"model": {{model}}, "messages": [{"role": "user", "content": {{prompt}}}], "temperature": 0})";
    // Dotted path to the text content in the endpoint response.
    std::string response_path = "choices.0.message.content";
};

/// LLM-backed judge with a content-addressed on-disk cache (key = hash of the
/// rendered prompt) and retry with exponential backoff. Transport is
/// injectable for tests; the default POSTs over HTTP.
class HttpJudge final : public Judge {
public:
    /// Takes the fully rendered request body; returns the raw response body.
    /// Throws on transport failure.
    using Transport = std::function<std::string(const JudgeEndpointConfig&, const std::string&)>;

    explicit HttpJudge(JudgeEndpointConfig config, Transport transport = {});

    JudgeVerdict evaluate(const JudgeRequest& request) override;

    std::size_t network_calls() const { return network_calls_.load(); }

private:
    JudgeEndpointConfig config_;
    Transport transport_;
    std::atomic<std::size_t> network_calls_{0};
};

/// Stable 64-bit content hash used for cache keys, as a hex string.
std::string content_hash(std::string_view data);

}  // namespace sodam
