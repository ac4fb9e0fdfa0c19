#pragma once

#include <memory>

#include "sodam/judge.hpp"
#include "sodam/reward.hpp"

namespace httplib {
class Server;
}

namespace sodam {

struct ServerConfig {
    int port = 8080;
    std::string host = "0.0.0.0";
    RewardWeights weights;
    LengthPolicy length_policy;
    ScoreConfig score;
    unsigned parallelism = 4;
};

/// Stateless batch reward scorer for external RL trainers. References travel
/// inline with each request.
///   POST /v1/score  -> per-item RewardBreakdown + MetricReport
///   GET  /healthz   -> {"status": "ok"}
///   GET  /v1/config -> effective configuration
class ScoreServer {
public:
    ScoreServer(ServerConfig config, std::shared_ptr<Judge> judge);
    ~ScoreServer();

    /// Handles one score request body; also the HTTP handler's core, exposed
    /// for direct testing. Throws MalformedRequest on an invalid request.
    nlohmann::ordered_json score_batch(const nlohmann::json& request);

    /// Blocks serving until stop() is called from another thread.
    bool listen();
    void stop();
    int port() const;

private:
    ServerConfig config_;
    std::shared_ptr<Judge> judge_;
    std::unique_ptr<httplib::Server> http_;
};

struct MalformedRequest : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace sodam
