#include <doctest.h>

#include "sodam/align.hpp"
#include "sodam/perturb.hpp"
#include "support/fixtures.hpp"

using namespace sodam;
namespace fx = sodam::testing;

TEST_CASE("oversplit halves each scene on a whole-second boundary") {
    ScriptDocument doc;
    SceneCaption caption;
    caption[Dimension::Events] = "one two three four five";
    doc.scenes = {fx::scene(0, 10, caption)};
    std::mt19937_64 rng(0);

    ScriptDocument split = perturb_document(doc, PerturbMode::Oversplit, 0, rng);
    REQUIRE(split.scenes.size() == 2);
    CHECK(split.scenes[0].interval == TimeInterval(0, 5));
    CHECK(split.scenes[1].interval == TimeInterval(5, 10));
    CHECK(split.scenes[0].caption[Dimension::Events] == "one two three");
    CHECK(split.scenes[1].caption[Dimension::Events] == "four five");
}

TEST_CASE("oversplit then merge reproduces the original scene") {
    std::mt19937_64 rng(0);
    auto refs = fx::self_scoring_references(3);
    ScriptDocument base = fx::document_of(refs);
    ScriptDocument split = perturb_document(base, PerturbMode::Oversplit, 0, rng);
    REQUIRE(split.scenes.size() == 6);
    for (std::size_t i = 0; i < base.scenes.size(); ++i) {
        SceneEntry merged =
            merge_group(std::vector{split.scenes[2 * i], split.scenes[2 * i + 1]});
        CHECK(merged.interval == base.scenes[i].interval);
        CHECK(merged.caption == base.scenes[i].caption);
    }
}

TEST_CASE("scenes too short for a whole-second split are kept intact") {
    ScriptDocument doc;
    doc.scenes = {fx::scene(3.0, 4.0)};
    std::mt19937_64 rng(0);
    ScriptDocument split = perturb_document(doc, PerturbMode::Oversplit, 0, rng);
    REQUIRE(split.scenes.size() == 1);
    CHECK(split.scenes[0] == doc.scenes[0]);
}

TEST_CASE("jitter keeps scenes ordered, positive, and inside the video") {
    std::mt19937_64 rng(12);
    auto refs = fx::self_scoring_references(5);
    ScriptDocument base = fx::document_of(refs);
    base.video_duration = 50.0;
    for (int trial = 0; trial < 30; ++trial) {
        ScriptDocument moved = perturb_document(base, PerturbMode::Jitter, 3.0, rng);
        REQUIRE(moved.scenes.size() == base.scenes.size());
        double previous_end = 0.0;
        for (const SceneEntry& scene : moved.scenes) {
            CHECK(scene.interval.start >= previous_end);
            CHECK(scene.interval.end <= 50.0);
            previous_end = scene.interval.end;
        }
    }
}

TEST_CASE("jitter with zero magnitude is the identity") {
    std::mt19937_64 rng(1);
    auto refs = fx::self_scoring_references(3);
    ScriptDocument base = fx::document_of(refs);
    CHECK(perturb_document(base, PerturbMode::Jitter, 0.0, rng) == base);
}

TEST_CASE("jitter is deterministic under a fixed seed") {
    auto refs = fx::self_scoring_references(4);
    ScriptDocument base = fx::document_of(refs);
    std::mt19937_64 a(7), b(7);
    CHECK(perturb_document(base, PerturbMode::Jitter, 2.0, a) ==
          perturb_document(base, PerturbMode::Jitter, 2.0, b));
}

TEST_CASE("an impossible jitter raises DegenerateResult") {
    // the scene lies entirely past the duration cap, so every resample of
    // start >= 4 against end <= 3 collapses
    ScriptDocument doc;
    doc.scenes = {fx::scene(5.0, 6.0)};
    doc.video_duration = 3.0;
    std::mt19937_64 rng(3);
    CHECK_THROWS_AS(perturb_document(doc, PerturbMode::Jitter, 1.0, rng),
                    DegenerateResult);
}

TEST_CASE("drop removes scenes at the requested rate, boundaries exact") {
    auto refs = fx::self_scoring_references(6);
    ScriptDocument base = fx::document_of(refs);
    std::mt19937_64 rng(9);
    CHECK(perturb_document(base, PerturbMode::Drop, 0.0, rng) == base);
    CHECK(perturb_document(base, PerturbMode::Drop, 1.0, rng).scenes.empty());

    std::size_t kept = 0, total = 0;
    for (int trial = 0; trial < 200; ++trial) {
        kept += perturb_document(base, PerturbMode::Drop, 0.5, rng).scenes.size();
        total += base.scenes.size();
    }
    const double keep_rate = static_cast<double>(kept) / static_cast<double>(total);
    CHECK(keep_rate > 0.4);
    CHECK(keep_rate < 0.6);
}

TEST_CASE("surviving scenes are unchanged by drop") {
    auto refs = fx::self_scoring_references(5);
    ScriptDocument base = fx::document_of(refs);
    std::mt19937_64 rng(21);
    ScriptDocument dropped = perturb_document(base, PerturbMode::Drop, 0.4, rng);
    for (const SceneEntry& scene : dropped.scenes) {
        bool found = false;
        for (const SceneEntry& original : base.scenes) found = found || scene == original;
        CHECK(found);
    }
}
