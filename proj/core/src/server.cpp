#include "sodam/server.hpp"

#include <chrono>
#include <set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sodam/parse.hpp"

namespace sodam {

ScoreServer::ScoreServer(ServerConfig config, std::shared_ptr<Judge> judge)
    : config_(std::move(config)),
      judge_(std::move(judge)),
      http_(std::make_unique<httplib::Server>()) {
    config_.weights.validate();
    config_.length_policy.validate();

    http_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"status": "ok"})", "application/json");
    });

    http_->Get("/v1/config", [this](const httplib::Request&, httplib::Response& res) {
        nlohmann::ordered_json out;
        out["weights"] = {{"alpha_format", config_.weights.alpha_format},
                          {"alpha_length", config_.weights.alpha_length},
                          {"alpha_timestamp", config_.weights.alpha_timestamp},
                          {"alpha_caption", config_.weights.alpha_caption}};
        out["length_policy"] = {{"min_words", config_.length_policy.min_words},
                                {"max_words", config_.length_policy.max_words},
                                {"decay_span", config_.length_policy.decay_span}};
        out["thresholds"] = config_.score.thresholds;
        out["pooled_average"] = config_.score.pooled_average;
        out["parallelism"] = config_.parallelism;
        res.set_content(out.dump(), "application/json");
    });

    http_->Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded()) {
            res.status = 400;
            res.set_content(R"({"error": "request body is not JSON"})", "application/json");
            return;
        }
        try {
            res.set_content(score_batch(body).dump(), "application/json");
        } catch (const MalformedRequest& e) {
            res.status = 400;
            res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
        }
    });
}

ScoreServer::~ScoreServer() = default;

nlohmann::ordered_json ScoreServer::score_batch(const nlohmann::json& request) {
    const auto started = std::chrono::steady_clock::now();
    if (!request.is_object() || !request.contains("items") || !request["items"].is_array())
        throw MalformedRequest("request must carry a non-empty 'items' array");
    const auto& items = request["items"];
    if (items.empty()) throw MalformedRequest("'items' must not be empty");

    RewardWeights weights = config_.weights;
    if (request.contains("weights")) {
        const auto& w = request["weights"];
        if (!w.is_object()) throw MalformedRequest("'weights' must be an object");
        weights.alpha_format = w.value("alpha_format", weights.alpha_format);
        weights.alpha_length = w.value("alpha_length", weights.alpha_length);
        weights.alpha_timestamp = w.value("alpha_timestamp", weights.alpha_timestamp);
        weights.alpha_caption = w.value("alpha_caption", weights.alpha_caption);
        try {
            weights.validate();
        } catch (const std::exception& e) {
            throw MalformedRequest(e.what());
        }
    }

    std::set<std::string> seen_ids;
    for (const auto& item : items) {
        if (!item.is_object() || !item.contains("rollout_id") ||
            !item["rollout_id"].is_string())
            throw MalformedRequest("each item needs a string 'rollout_id'");
        if (!seen_ids.insert(item["rollout_id"].get<std::string>()).second)
            throw MalformedRequest("duplicate rollout_id '" +
                                   item["rollout_id"].get<std::string>() + "'");
        if (!item.contains("raw_output_text") || !item["raw_output_text"].is_string())
            throw MalformedRequest("each item needs a string 'raw_output_text'");
        if (!item.contains("reference") || !item["reference"].is_array())
            throw MalformedRequest("each item needs a 'reference' scene array");
    }

    // Items are isolated: one item's failure becomes its own error entry.
    auto out_items = nlohmann::ordered_json::array();
    for (const auto& item : items) {
        nlohmann::ordered_json entry;
        entry["rollout_id"] = item["rollout_id"];
        try {
            nlohmann::ordered_json record;
            record["video_id"] = item["rollout_id"];
            record["reference"] = item["reference"];
            ReferenceRecord reference = parse_reference(record.dump());

            RolloutScore scored = score_rollout(item["raw_output_text"].get<std::string>(),
                                                reference.scenes, *judge_, weights,
                                                config_.length_policy, config_.score);
            entry["reward"] = reward_to_json(scored.reward);
            entry["report"] =
                scored.report ? report_to_json(*scored.report) : nlohmann::ordered_json();
            auto diagnostics = nlohmann::ordered_json::array();
            for (const Diagnostic& d : scored.diagnostics)
                diagnostics.push_back(d.position.empty() ? d.message
                                                         : d.position + ": " + d.message);
            entry["diagnostics"] = std::move(diagnostics);
        } catch (const std::exception& e) {
            entry["error"] = e.what();
            entry["reward"] = reward_to_json(RewardBreakdown{});
        }
        out_items.push_back(std::move(entry));
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - started);
    nlohmann::ordered_json out;
    out["items"] = std::move(out_items);
    out["timing_ms"] = static_cast<double>(elapsed.count()) / 1000.0;
    return out;
}

bool ScoreServer::listen() { return http_->listen(config_.host, config_.port); }

void ScoreServer::stop() { http_->stop(); }

int ScoreServer::port() const { return config_.port; }

}  // namespace sodam
