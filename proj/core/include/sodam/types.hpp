#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sodam {

// ---------------------------------------------------------------------------
// Time intervals
// ---------------------------------------------------------------------------

/// A half-open-in-spirit [start, end] segment in seconds. start < end and
/// start >= 0 are enforced at construction; zero-duration intervals are
/// rejected.
struct TimeInterval {
    double start = 0.0;
    double end = 0.0;

    TimeInterval() = default;
    TimeInterval(double s, double e) : start(s), end(e) {
        if (s < 0.0) throw std::invalid_argument("TimeInterval: negative start");
        if (!(s < e)) throw std::invalid_argument("TimeInterval: start must be < end");
    }

    double length() const { return end - start; }

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

// ---------------------------------------------------------------------------
// Dimensions
// ---------------------------------------------------------------------------

/// The closed set of six caption dimensions, in canonical reporting order.
enum class Dimension : std::size_t {
    Events = 0,
    Background = 1,
    Camera = 2,
    ShotEdit = 3,
    Dialogue = 4,
    Acoustics = 5,
};

inline constexpr std::size_t kDimensionCount = 6;

inline constexpr std::array<Dimension, kDimensionCount> kDimensions = {
    Dimension::Events,    Dimension::Background, Dimension::Camera,
    Dimension::ShotEdit,  Dimension::Dialogue,   Dimension::Acoustics,
};

/// Canonical JSON field name for a dimension.
std::string_view wire_key(Dimension d);

/// Short name used in reports ("events", "shot_edit", ...).
std::string_view short_name(Dimension d);

std::optional<Dimension> dimension_from_wire_key(std::string_view key);
std::optional<Dimension> dimension_from_short_name(std::string_view name);

/// Fixed-size map Dimension -> T, iterable in canonical order.
template <typename T>
class PerDimension {
public:
    T& operator[](Dimension d) { return values_[static_cast<std::size_t>(d)]; }
    const T& operator[](Dimension d) const { return values_[static_cast<std::size_t>(d)]; }

    auto begin() { return values_.begin(); }
    auto end() { return values_.end(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    friend bool operator==(const PerDimension&, const PerDimension&) = default;

private:
    std::array<T, kDimensionCount> values_{};
};

// ---------------------------------------------------------------------------
// Scenes and documents
// ---------------------------------------------------------------------------

/// Free text per dimension. Empty strings are legal; in strict parsing every
/// key must at least be present on the wire.
using SceneCaption = PerDimension<std::string>;

/// One timestamped scene. `extras` holds unknown wire fields (e.g.
/// "storyline") verbatim; they are preserved on round-trip and never scored.
struct SceneEntry {
    TimeInterval interval;
    SceneCaption caption;
    std::vector<std::pair<std::string, std::string>> extras;  // key -> raw JSON text

    friend bool operator==(const SceneEntry&, const SceneEntry&) = default;
};

struct ScriptDocument {
    std::string video_id;
    std::vector<SceneEntry> scenes;
    std::optional<double> video_duration;

    friend bool operator==(const ScriptDocument&, const ScriptDocument&) = default;
};

/// Per-dimension atomic ground-truth elements. A dimension may be empty; it
/// is then excluded from that pair's denominators.
struct KeypointSet {
    PerDimension<std::vector<std::string>> by_dim;

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& v : by_dim) n += v.size();
        return n;
    }
    bool any() const { return total() > 0; }

    friend bool operator==(const KeypointSet&, const KeypointSet&) = default;
};

struct ReferenceScene {
    SceneEntry entry;
    KeypointSet keypoints;  // at least one non-empty dimension

    friend bool operator==(const ReferenceScene&, const ReferenceScene&) = default;
};

// ---------------------------------------------------------------------------
// Alignment
// ---------------------------------------------------------------------------

/// One matched pair: a reference scene and the ordered, contiguous group of
/// prediction scenes aligned to it.
struct MatchedGroup {
    std::size_t reference_index = 0;
    std::vector<std::size_t> prediction_indices;  // non-empty, ascending, contiguous

    friend bool operator==(const MatchedGroup&, const MatchedGroup&) = default;
};

struct AlignmentResult {
    std::vector<MatchedGroup> pairs;               // reference indices strictly ascending
    std::vector<std::size_t> unmatched_references;
    std::vector<std::size_t> unmatched_predictions;
    double path_score = 0.0;  // sum of IoU over diagonal moves

    friend bool operator==(const AlignmentResult&, const AlignmentResult&) = default;
};

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct ThresholdScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    friend bool operator==(const ThresholdScore&, const ThresholdScore&) = default;
};

/// Full evaluation report for one video. F1/mIoU are fractions in [0, 1];
/// SodaM scores are percentages in [0, 100].
struct MetricReport {
    std::vector<std::pair<double, ThresholdScore>> f1_at;  // keyed by threshold, ascending
    double mean_f1 = 0.0;
    double miou = 0.0;
    PerDimension<double> per_dimension_sodam;
    PerDimension<bool> dimension_active;  // false when no reference keypoints in dim
    double sodam_avg = 0.0;
    std::size_t k_matched = 0;
    std::size_t n_reference = 0;
    std::size_t m_prediction_raw = 0;
    std::size_t m_prediction_merged = 0;
    std::size_t judge_calls = 0;

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

// ---------------------------------------------------------------------------
// Rewards
// ---------------------------------------------------------------------------

struct RewardWeights {
    double alpha_format = 0.5;
    double alpha_length = 0.5;
    double alpha_timestamp = 1.0;
    double alpha_caption = 1.0;

    void validate() const {
        const double sum = alpha_format + alpha_length + alpha_timestamp + alpha_caption;
        if (alpha_format < 0 || alpha_length < 0 || alpha_timestamp < 0 || alpha_caption < 0)
            throw std::invalid_argument("RewardWeights: negative weight");
        if (!(sum > 0)) throw std::invalid_argument("RewardWeights: all weights zero");
    }

    friend bool operator==(const RewardWeights&, const RewardWeights&) = default;
};

struct RewardBreakdown {
    double r_format = 0.0;     // {0, 1}
    double r_length = 0.0;     // [0, 1]
    double r_timestamp = 0.0;  // [0, 1]
    double r_caption = 0.0;    // [0, 1]
    double total = 0.0;

    friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ValidationMode { Strict, Lenient };

enum class ValidationIssueKind {
    OverlappingScenes,
    UnorderedScenes,
    ZeroDuration,
    NegativeStart,
    MissingDimension,
    DurationExceeded,
};

std::string_view to_string(ValidationIssueKind kind);

struct ValidationIssue {
    ValidationIssueKind kind;
    std::string message;
};

struct ValidationResult {
    std::optional<ScriptDocument> document;  // present on success
    std::vector<ValidationIssue> errors;     // strict-mode rejections
    std::vector<ValidationIssue> warnings;   // lenient-mode repairs

    bool ok() const { return document.has_value(); }
};

/// Strict mode rejects any invariant violation. Lenient mode sorts scenes,
/// keeps overlaps, and reports what it repaired as warnings.
ValidationResult validate_document(ScriptDocument doc, ValidationMode mode);

// ---------------------------------------------------------------------------
// Wire serialization (shared by parse, cli, serve)
// ---------------------------------------------------------------------------

/// {"video_id": ..., "prediction": [{"timestamp": "MM:SS-MM:SS", <6 dims>}, ...]}
nlohmann::ordered_json document_to_wire(const ScriptDocument& doc);

/// MetricReport with stable key order, suitable for diffing.
nlohmann::ordered_json report_to_json(const MetricReport& report);

nlohmann::ordered_json reward_to_json(const RewardBreakdown& reward);

}  // namespace sodam
