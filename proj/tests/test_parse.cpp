#include <doctest.h>

#include <nlohmann/json.hpp>

#include "sodam/parse.hpp"
#include "support/fixtures.hpp"

using namespace sodam;

namespace {

nlohmann::ordered_json valid_scene_json(const std::string& timestamp) {
    nlohmann::ordered_json scene;
    scene["timestamp"] = timestamp;
    for (Dimension d : kDimensions)
        scene[std::string(wire_key(d))] = "text for " + std::string(short_name(d));
    return scene;
}

}  // namespace

TEST_CASE("parse_timestamp accepts the wire formats") {
    CHECK(parse_timestamp("00:01-00:10") == TimeInterval(1, 10));
    CHECK(parse_timestamp("0:08 - 0:15") == TimeInterval(8, 15));
    CHECK(parse_timestamp("123:59-124:01") == TimeInterval(7439, 7441));
}

TEST_CASE("parse_timestamp rejects malformed input") {
    CHECK_THROWS_AS(parse_timestamp("00:10-00:10"), NonPositiveDuration);
    CHECK_THROWS_AS(parse_timestamp("00:70-01:10"), SecondsOutOfRange);
    CHECK_THROWS_AS(parse_timestamp("1.5-2.5"), MalformedTimestamp);
    CHECK_THROWS_AS(parse_timestamp("00:1-00:10"), MalformedTimestamp);
    CHECK_THROWS_AS(parse_timestamp(""), MalformedTimestamp);
}

TEST_CASE("parse/format round-trips integer-second intervals") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> seconds(0, 5999);
    for (int i = 0; i < 200; ++i) {
        int a = seconds(rng), b = seconds(rng);
        if (a == b) continue;
        TimeInterval interval(std::min(a, b), std::max(a, b));
        CHECK(parse_timestamp(format_timestamp(interval)) == interval);
    }
}

TEST_CASE("parse_prediction accepts a valid scene array") {
    auto array = nlohmann::ordered_json::array(
        {valid_scene_json("00:00-00:10"), valid_scene_json("00:10-00:25")});
    ParseOutcome outcome = parse_prediction(array.dump(), ParseMode::Strict);
    CHECK(outcome.format_valid);
    REQUIRE(outcome.document.has_value());
    CHECK(outcome.document->scenes.size() == 2);
}

TEST_CASE("parse_prediction never throws on garbage") {
    for (const char* garbage :
         {"I cannot answer", "{\"not\": \"an array\"}", "", "[{]", "42"}) {
        ParseOutcome outcome = parse_prediction(garbage, ParseMode::Lenient);
        CHECK_FALSE(outcome.format_valid);
        CHECK_FALSE(outcome.document.has_value());
        CHECK_FALSE(outcome.diagnostics.empty());
    }
}

TEST_CASE("strict mode flags a missing dimension key by name") {
    auto scene = valid_scene_json("00:00-00:10");
    scene.erase("speech_content");
    auto array = nlohmann::ordered_json::array({scene});
    ParseOutcome outcome = parse_prediction(array.dump(), ParseMode::Strict);
    CHECK_FALSE(outcome.format_valid);
    bool named = false;
    for (const Diagnostic& d : outcome.diagnostics)
        named = named || d.message.find("speech_content") != std::string::npos;
    CHECK(named);
}

TEST_CASE("lenient mode salvages fenced and prose-wrapped output") {
    auto array = nlohmann::ordered_json::array({valid_scene_json("00:00-00:10")});
    const std::string wrapped =
        "Sure! Here is the captioning result:\n```json\n" + array.dump(2) + "\n```\nHope it helps.";

    ParseOutcome lenient = parse_prediction(wrapped, ParseMode::Lenient);
    CHECK(lenient.format_valid);  // extracted array itself is strict-valid
    REQUIRE(lenient.document.has_value());

    // strict mode requires the whole trimmed output to be the array
    ParseOutcome strict = parse_prediction(wrapped, ParseMode::Strict);
    CHECK_FALSE(strict.format_valid);
}

TEST_CASE("unknown fields like storyline are preserved but inert") {
    auto scene = valid_scene_json("00:00-00:10");
    scene["storyline"] = "the hero returns";
    auto array = nlohmann::ordered_json::array({scene});
    ParseOutcome outcome = parse_prediction(array.dump(), ParseMode::Strict);
    REQUIRE(outcome.format_valid);
    REQUIRE(outcome.document->scenes.size() == 1);
    const auto& extras = outcome.document->scenes[0].extras;
    REQUIRE(extras.size() == 1);
    CHECK(extras[0].first == "storyline");
}

TEST_CASE("a scene with an unparsable timestamp is not strict-valid") {
    auto array = nlohmann::ordered_json::array({valid_scene_json("00:10-00:10")});
    ParseOutcome strict = parse_prediction(array.dump(), ParseMode::Strict);
    CHECK_FALSE(strict.format_valid);
    CHECK_FALSE(strict.document.has_value());
}

TEST_CASE("parse_reference reads scenes with keypoints") {
    nlohmann::ordered_json record;
    record["video_id"] = "v1";
    auto scenes = nlohmann::ordered_json::array();
    for (int i = 0; i < 3; ++i) {
        auto scene = valid_scene_json(format_timestamp(TimeInterval(i * 10, (i + 1) * 10)));
        scene["keypoints"] = {{"segment_detail_caption", {"a red car", "rain"}}};
        scenes.push_back(scene);
    }
    record["reference"] = scenes;

    ReferenceRecord parsed = parse_reference(record.dump());
    CHECK(parsed.video_id == "v1");
    REQUIRE(parsed.scenes.size() == 3);
    CHECK(parsed.scenes[0].keypoints.by_dim[Dimension::Events] ==
          std::vector<std::string>{"a red car", "rain"});
}

TEST_CASE("parse_reference rejects schema violations with a field path") {
    auto scene = valid_scene_json("00:00-00:10");
    nlohmann::ordered_json record;
    record["video_id"] = "v1";

    SUBCASE("scene without keypoints") {
        record["reference"] = nlohmann::ordered_json::array({scene});
        CHECK_THROWS_AS(parse_reference(record.dump()), SchemaError);
    }
    SUBCASE("empty scene list") {
        record["reference"] = nlohmann::ordered_json::array();
        CHECK_THROWS_AS(parse_reference(record.dump()), SchemaError);
    }
    SUBCASE("empty keypoint string") {
        scene["keypoints"] = {{"segment_detail_caption", {"  "}}};
        record["reference"] = nlohmann::ordered_json::array({scene});
        CHECK_THROWS_AS(parse_reference(record.dump()), SchemaError);
    }
    SUBCASE("unknown keypoint dimension") {
        scene["keypoints"] = {{"storyline", {"x"}}};
        record["reference"] = nlohmann::ordered_json::array({scene});
        CHECK_THROWS_AS(parse_reference(record.dump()), SchemaError);
    }
}
