#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "sodam/runner.hpp"
#include "support/wire.hpp"

using namespace sodam;
namespace fx = sodam::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("sodam-runner-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

/// Writes matching reference/prediction JSONL for `count` self-scoring videos.
void write_corpus(const TempDir& dir, std::size_t count, bool skip_last_prediction = false) {
    std::string refs_body, preds_body;
    for (std::size_t v = 0; v < count; ++v) {
        const std::string id = "video-" + std::to_string(v);
        auto refs = fx::self_scoring_references(2 + v % 3);
        refs_body += fx::reference_record_json(id, refs).dump() + "\n";
        if (skip_last_prediction && v + 1 == count) continue;
        preds_body += fx::prediction_record_json(id, fx::document_of(refs, id)).dump() + "\n";
    }
    fx::write_file(dir.file("refs.jsonl"), refs_body);
    fx::write_file(dir.file("preds.jsonl"), preds_body);
}

}  // namespace

TEST_CASE("eval_run scores a matching corpus at 100 and writes the report") {
    TempDir dir;
    write_corpus(dir, 3);
    EvalRunConfig config;
    config.reference_path = dir.file("refs.jsonl");
    config.prediction_path = dir.file("preds.jsonl");
    config.output_path = dir.file("report.json");
    DeterministicJudge judge;

    nlohmann::ordered_json report = eval_run(config, judge);
    CHECK(report["videos"].size() == 3);
    CHECK(report["missing_predictions"].empty());
    CHECK(report["aggregate"]["sodam_avg"] == 100.0);
    CHECK(report["aggregate"]["miou"] == 1.0);

    // written file carries the very same payload
    auto on_disk = nlohmann::ordered_json::parse(fx::read_file(dir.file("report.json")));
    CHECK(on_disk == report);
    CHECK_FALSE(fs::exists(dir.file("report.json.tmp")));
}

TEST_CASE("missing predictions score zero and are listed sorted") {
    TempDir dir;
    write_corpus(dir, 3, /*skip_last_prediction=*/true);
    EvalRunConfig config;
    config.reference_path = dir.file("refs.jsonl");
    config.prediction_path = dir.file("preds.jsonl");
    DeterministicJudge judge;

    nlohmann::ordered_json report = eval_run(config, judge);
    CHECK(report["missing_predictions"] == nlohmann::json::array({"video-2"}));
    const auto& last = report["videos"][2];
    CHECK(last["video_id"] == "video-2");
    CHECK(last["report"]["sodam_avg"] == 0.0);
    CHECK(last["report"]["counts"]["n_reference"] > 0);
    CHECK(report["aggregate"]["sodam_avg"] == doctest::Approx(200.0 / 3.0));
}

TEST_CASE("eval_run output is byte-identical across runs") {
    TempDir dir;
    write_corpus(dir, 4);
    EvalRunConfig config;
    config.reference_path = dir.file("refs.jsonl");
    config.prediction_path = dir.file("preds.jsonl");
    DeterministicJudge judge;

    config.output_path = dir.file("a.json");
    eval_run(config, judge);
    config.output_path = dir.file("b.json");
    config.parallelism = 4;  // worker count must not affect the bytes
    eval_run(config, judge);
    CHECK(fx::read_file(dir.file("a.json")) == fx::read_file(dir.file("b.json")));
}

TEST_CASE("eval_run raises MissingReference for an unreadable path") {
    EvalRunConfig config;
    config.reference_path = "/nonexistent/refs.jsonl";
    config.prediction_path = "/nonexistent/preds.jsonl";
    DeterministicJudge judge;
    CHECK_THROWS_AS(eval_run(config, judge), MissingReference);
}

TEST_CASE("a malformed prediction line degrades to a zero report, not a crash") {
    TempDir dir;
    auto refs = fx::self_scoring_references(2);
    fx::write_file(dir.file("refs.jsonl"),
                   fx::reference_record_json("v0", refs).dump() + "\n");
    fx::write_file(dir.file("preds.jsonl"),
                   "{\"video_id\": \"v0\", \"prediction\": \"not an array\"}\n");

    EvalRunConfig config;
    config.reference_path = dir.file("refs.jsonl");
    config.prediction_path = dir.file("preds.jsonl");
    DeterministicJudge judge;
    nlohmann::ordered_json report = eval_run(config, judge);
    CHECK(report["videos"][0]["report"]["sodam_avg"] == 0.0);
    CHECK(report["missing_predictions"].empty());
}

TEST_CASE("reward_run writes one reward line per reference video") {
    TempDir dir;
    write_corpus(dir, 3, /*skip_last_prediction=*/true);
    RewardRunConfig config;
    config.reference_path = dir.file("refs.jsonl");
    config.prediction_path = dir.file("preds.jsonl");
    config.output_path = dir.file("rewards.jsonl");
    config.length_policy = {1, 10000, 1000};
    DeterministicJudge judge;
    reward_run(config, judge);

    std::istringstream lines(fx::read_file(dir.file("rewards.jsonl")));
    std::string line;
    std::vector<nlohmann::json> rows;
    while (std::getline(lines, line)) rows.push_back(nlohmann::json::parse(line));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0]["video_id"] == "video-0");
    CHECK(rows[0]["reward"]["total"] == 3.0);
    CHECK(rows[1]["reward"]["total"] == 3.0);
    CHECK(rows[2]["reward"]["total"] == 0.0);  // no prediction
}
