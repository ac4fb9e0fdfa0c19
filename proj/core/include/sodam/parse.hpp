#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sodam/types.hpp"

namespace sodam {

struct TimestampError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MalformedTimestamp : TimestampError {
    using TimestampError::TimestampError;
};
struct SecondsOutOfRange : TimestampError {
    using TimestampError::TimestampError;
};
struct NonPositiveDuration : TimestampError {
    using TimestampError::TimestampError;
};

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), field_path(path) {}
    std::string field_path;
};

/// Parses "MM:SS-MM:SS" (1-3 minute digits, exactly 2 second digits, optional
/// spaces around the dash). Seconds component must be 00-59; start < end.
TimeInterval parse_timestamp(std::string_view text);

/// Renders an interval back to the wire form, rounding to whole seconds.
std::string format_timestamp(const TimeInterval& interval);

enum class ParseMode { Strict, Lenient };

struct Diagnostic {
    std::string position;  // e.g. "prediction[2].timestamp"
    std::string message;
};

struct ParseOutcome {
    std::optional<ScriptDocument> document;
    bool format_valid = false;  // strict validity of the extracted array
    std::vector<Diagnostic> diagnostics;
};

/// Turns raw model output into a ScriptDocument. Never throws: every failure
/// becomes format_valid=false plus diagnostics. Strict mode requires the
/// trimmed output to be exactly the JSON array; lenient mode first strips
/// markdown fences and surrounding prose, and salvages what it can.
ParseOutcome parse_prediction(std::string_view raw, ParseMode mode,
                              std::string video_id = "");

struct ReferenceRecord {
    std::string video_id;
    std::vector<ReferenceScene> scenes;
    std::optional<double> video_duration;
};

/// Parses one reference record (strict validation always). Throws SchemaError
/// with a field path on any violation.
ReferenceRecord parse_reference(std::string_view raw);

/// Reference record back to wire form (used by the perturbation harness and
/// test fixtures).
nlohmann::ordered_json reference_to_wire(const ReferenceRecord& record);

}  // namespace sodam
