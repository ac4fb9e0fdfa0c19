#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "sodam/judge.hpp"
#include "support/fixtures.hpp"

using namespace sodam;

namespace {

JudgeRequest simple_request() {
    JudgeRequest request;
    request.caption[Dimension::Events] = "a red car drives through a night scene";
    request.keypoints.by_dim[Dimension::Events] = {"red car", "night scene", "rain"};
    request.pair_id = "pair-0";
    return request;
}

std::string chat_response(const nlohmann::json& verdict_body) {
    return nlohmann::json{
        {"choices", {{{"message", {{"role", "assistant"}, {"content", verdict_body.dump()}}}}}}}
        .dump();
}

}  // namespace

TEST_CASE("normalize_text lowercases, strips punctuation, collapses whitespace") {
    CHECK(normalize_text("Red  Car!") == "red car");
    CHECK(normalize_text("  a,b;c  ") == "a b c");
    CHECK(normalize_text("...") == "");
}

TEST_CASE("deterministic judge covers normalized substrings only") {
    JudgeVerdict verdict = DeterministicJudge{}.evaluate(simple_request());
    CHECK(verdict.hits[Dimension::Events] ==
          std::vector<std::string>{"red car", "night scene"});
    CHECK(verdict.correct_count(Dimension::Events) == 2);
    CHECK(verdict.hits[Dimension::Dialogue].empty());
}

TEST_CASE("deterministic judge ignores case and punctuation") {
    JudgeRequest request;
    request.caption[Dimension::Camera] = "Slow pan, then a CLOSE-UP.";
    request.keypoints.by_dim[Dimension::Camera] = {"close up", "zoom"};
    JudgeVerdict verdict = DeterministicJudge{}.evaluate(request);
    CHECK(verdict.hits[Dimension::Camera] == std::vector<std::string>{"close up"});
}

TEST_CASE("deterministic judge finds nothing in an empty caption") {
    JudgeRequest request;
    request.keypoints.by_dim[Dimension::Events] = {"anything"};
    JudgeVerdict verdict = DeterministicJudge{}.evaluate(request);
    CHECK(verdict.hits[Dimension::Events].empty());
}

TEST_CASE("judge prompt carries the rules and all six dimension keys") {
    const std::string prompt = render_judge_prompt(simple_request());
    CHECK(prompt.find("Do NOT output any text other than the required JSON.") !=
          std::string::npos);
    CHECK(prompt.find("strict evaluator") != std::string::npos);
    for (Dimension d : kDimensions)
        CHECK(prompt.find(std::string(wire_key(d))) != std::string::npos);
    // empty keypoint dimensions render as empty lists, keys still present
    CHECK(prompt.find("- speech_content: []") != std::string::npos);
}

TEST_CASE("judge prompt is byte-stable") {
    CHECK(render_judge_prompt(simple_request()) == render_judge_prompt(simple_request()));
}

TEST_CASE("parse_judge_response reads a well-formed verdict") {
    nlohmann::json body = {{"by_dim",
                            {{"segment_detail_caption",
                              {{"correct_keypoints", {"red car", "night scene"}},
                               {"correct_count", 2}}}}}};
    JudgeVerdict verdict = parse_judge_response(body.dump(), simple_request());
    CHECK(verdict.correct_count(Dimension::Events) == 2);
}

TEST_CASE("parse_judge_response drops non-member hits and reconciles counts") {
    nlohmann::json body = {{"by_dim",
                            {{"segment_detail_caption",
                              {{"correct_keypoints", {"red car", "invented keypoint"}},
                               {"correct_count", 2}}}}}};
    JudgeVerdict verdict = parse_judge_response(body.dump(), simple_request());
    CHECK(verdict.hits[Dimension::Events] == std::vector<std::string>{"red car"});
    CHECK(verdict.correct_count(Dimension::Events) == 1);
    REQUIRE(verdict.warnings.size() == 1);
}

TEST_CASE("parse_judge_response tolerates fenced output") {
    nlohmann::json body = {{"by_dim", nlohmann::json::object()}};
    const std::string fenced = "```json\n" + body.dump() + "\n```";
    CHECK_NOTHROW(parse_judge_response(fenced, simple_request()));
}

TEST_CASE("parse_judge_response rejects prose") {
    CHECK_THROWS_AS(parse_judge_response("I think the caption is fine.", simple_request()),
                    UnparsableVerdict);
    CHECK_THROWS_AS(parse_judge_response("{\"something\": 1}", simple_request()),
                    UnparsableVerdict);
}

TEST_CASE("http judge caches by prompt content and retries on failure") {
    namespace fs = std::filesystem;
    const fs::path cache_dir =
        fs::temp_directory_path() / ("sodam-judge-cache-" + std::to_string(::getpid()));
    fs::remove_all(cache_dir);

    JudgeEndpointConfig config;
    config.base_url = "http://unit.test";
    config.cache_dir = cache_dir.string();
    config.retries = 2;
    config.backoff_initial_ms = 1;

    nlohmann::json verdict_body = {
        {"by_dim",
         {{"segment_detail_caption",
           {{"correct_keypoints", {"red car"}}, {"correct_count", 1}}}}}};

    SUBCASE("fresh request makes one call and writes through") {
        int calls = 0;
        HttpJudge judge(config, [&](const JudgeEndpointConfig&, const std::string&) {
            ++calls;
            return chat_response(verdict_body);
        });
        JudgeVerdict first = judge.evaluate(simple_request());
        CHECK(calls == 1);
        CHECK(first.correct_count(Dimension::Events) == 1);

        // warm cache: same verdict, zero further network calls
        JudgeVerdict second = judge.evaluate(simple_request());
        CHECK(calls == 1);
        CHECK(second.hits[Dimension::Events] == first.hits[Dimension::Events]);
    }

    SUBCASE("transient failures are retried") {
        int calls = 0;
        HttpJudge judge(config, [&](const JudgeEndpointConfig&, const std::string&) {
            if (++calls < 3) throw JudgeError("connection reset");
            return chat_response(verdict_body);
        });
        JudgeVerdict verdict = judge.evaluate(simple_request());
        CHECK(calls == 3);
        CHECK(verdict.correct_count(Dimension::Events) == 1);
    }

    SUBCASE("exhausted retries raise JudgeUnavailable") {
        HttpJudge judge(config, [](const JudgeEndpointConfig&, const std::string&) -> std::string {
            throw JudgeError("connection refused");
        });
        CHECK_THROWS_AS(judge.evaluate(simple_request()), JudgeUnavailable);
        CHECK(judge.network_calls() == 3);  // 1 + retries
    }

    SUBCASE("corrupt cache entries are treated as misses") {
        const std::string key = content_hash(render_judge_prompt(simple_request()));
        fs::create_directories(cache_dir);
        std::ofstream(cache_dir / (key + ".json")) << "not json at all";
        int calls = 0;
        HttpJudge judge(config, [&](const JudgeEndpointConfig&, const std::string&) {
            ++calls;
            return chat_response(verdict_body);
        });
        CHECK_NOTHROW(judge.evaluate(simple_request()));
        CHECK(calls == 1);
    }

    fs::remove_all(cache_dir);
}

TEST_CASE("content_hash is stable and collision-averse on small edits") {
    CHECK(content_hash("abc") == content_hash("abc"));
    CHECK(content_hash("abc") != content_hash("abd"));
    CHECK(content_hash("").size() == 16);
}
