#pragma once

// Shared test fixtures: small builders for documents, references, and random
// instances.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sodam/types.hpp"

namespace sodam::testing {

inline SceneCaption caption_with(Dimension dim, std::string text) {
    SceneCaption caption;
    caption[dim] = std::move(text);
    return caption;
}

/// A caption whose six dimension texts are derived from a label.
inline SceneCaption full_caption(const std::string& label) {
    SceneCaption caption;
    for (Dimension d : kDimensions)
        caption[d] = label + " " + std::string(short_name(d)) + " alpha beta gamma";
    return caption;
}

inline SceneEntry scene(double start, double end, SceneCaption caption = {}) {
    SceneEntry entry;
    entry.interval = TimeInterval(start, end);
    entry.caption = std::move(caption);
    return entry;
}

/// A reference whose keypoints are substrings of its own captions, so the
/// deterministic judge scores a self-evaluation at exactly 100.
inline ReferenceScene self_scoring_reference(double start, double end,
                                             const std::string& label) {
    ReferenceScene ref;
    ref.entry = scene(start, end, full_caption(label));
    for (Dimension d : kDimensions) {
        ref.keypoints.by_dim[d] = {label + " " + std::string(short_name(d)),
                                   "alpha beta"};
    }
    return ref;
}

inline std::vector<ReferenceScene> self_scoring_references(std::size_t scenes,
                                                           double scene_seconds = 10.0) {
    std::vector<ReferenceScene> refs;
    for (std::size_t i = 0; i < scenes; ++i) {
        refs.push_back(self_scoring_reference(i * scene_seconds, (i + 1) * scene_seconds,
                                              "scene" + std::to_string(i)));
    }
    return refs;
}

inline ScriptDocument document_of(const std::vector<ReferenceScene>& refs,
                                  std::string video_id = "video") {
    ScriptDocument doc;
    doc.video_id = std::move(video_id);
    for (const ReferenceScene& ref : refs) doc.scenes.push_back(ref.entry);
    return doc;
}

/// Random sorted, non-overlapping intervals with continuous endpoints.
inline std::vector<TimeInterval> random_intervals(std::mt19937_64& rng, std::size_t count,
                                                  double horizon = 100.0) {
    std::uniform_real_distribution<double> point(0.0, horizon);
    std::vector<double> cuts;
    while (cuts.size() < count * 2) {
        double p = point(rng);
        bool distinct = true;
        for (double c : cuts) distinct = distinct && std::abs(c - p) > 1e-9;
        if (distinct) cuts.push_back(p);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<TimeInterval> intervals;
    for (std::size_t i = 0; i < count; ++i)
        intervals.emplace_back(cuts[2 * i], cuts[2 * i + 1]);
    return intervals;
}

}  // namespace sodam::testing
