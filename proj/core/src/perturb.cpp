#include "sodam/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace sodam {

namespace {

/// Splits text into (first half of words, rest) so that joining the
/// non-empty parts with one space reproduces the input after whitespace
/// normalization.
std::pair<std::string, std::string> split_words(const std::string& text) {
    std::istringstream stream(text);
    std::vector<std::string> words;
    std::string token;
    while (stream >> token) words.push_back(std::move(token));
    auto join = [](auto first, auto last) {
        std::string out;
        for (auto it = first; it != last; ++it) {
            if (!out.empty()) out += ' ';
            out += *it;
        }
        return out;
    };
    const std::size_t half = (words.size() + 1) / 2;
    return {join(words.begin(), words.begin() + half),
            join(words.begin() + half, words.end())};
}

ScriptDocument oversplit(const ScriptDocument& reference) {
    ScriptDocument out;
    out.video_id = reference.video_id;
    out.video_duration = reference.video_duration;
    for (const SceneEntry& scene : reference.scenes) {
        const double mid =
            std::floor((scene.interval.start + scene.interval.end) / 2.0);
        if (!(scene.interval.start < mid && mid < scene.interval.end)) {
            out.scenes.push_back(scene);  // too short to split on a second boundary
            continue;
        }
        SceneEntry first, second;
        first.interval = TimeInterval(scene.interval.start, mid);
        second.interval = TimeInterval(mid, scene.interval.end);
        for (Dimension d : kDimensions) {
            auto [head, tail] = split_words(scene.caption[d]);
            first.caption[d] = std::move(head);
            second.caption[d] = std::move(tail);
        }
        out.scenes.push_back(std::move(first));
        out.scenes.push_back(std::move(second));
    }
    return out;
}

ScriptDocument jitter(const ScriptDocument& reference, double magnitude,
                      std::mt19937_64& rng) {
    constexpr int kMaxResamples = 64;
    ScriptDocument out;
    out.video_id = reference.video_id;
    out.video_duration = reference.video_duration;
    std::uniform_real_distribution<double> shift(-magnitude, magnitude);
    double previous_end = 0.0;
    for (const SceneEntry& scene : reference.scenes) {
        SceneEntry moved = scene;
        bool placed = false;
        for (int attempt = 0; attempt < kMaxResamples && !placed; ++attempt) {
            double start = scene.interval.start + (magnitude > 0 ? shift(rng) : 0.0);
            double end = scene.interval.end + (magnitude > 0 ? shift(rng) : 0.0);
            start = std::max({0.0, start, previous_end});
            if (out.video_duration) end = std::min(end, *out.video_duration);
            if (start < end) {
                moved.interval = TimeInterval(start, end);
                placed = true;
            }
        }
        if (!placed)
            throw DegenerateResult("jitter collapsed scene at " +
                                   std::to_string(scene.interval.start) + " s");
        previous_end = moved.interval.end;
        out.scenes.push_back(std::move(moved));
    }
    return out;
}

ScriptDocument drop(const ScriptDocument& reference, double magnitude,
                    std::mt19937_64& rng) {
    ScriptDocument out;
    out.video_id = reference.video_id;
    out.video_duration = reference.video_duration;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (const SceneEntry& scene : reference.scenes)
        if (coin(rng) >= magnitude) out.scenes.push_back(scene);
    return out;
}

}  // namespace

ScriptDocument perturb_document(const ScriptDocument& reference, PerturbMode mode,
                                double magnitude, std::mt19937_64& rng) {
    switch (mode) {
        case PerturbMode::Oversplit: return oversplit(reference);
        case PerturbMode::Jitter: return jitter(reference, magnitude, rng);
        case PerturbMode::Drop: return drop(reference, magnitude, rng);
    }
    throw std::invalid_argument("perturb_document: unknown mode");
}

}  // namespace sodam
