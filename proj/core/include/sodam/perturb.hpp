#pragma once

#include <random>
#include <stdexcept>

#include "sodam/parse.hpp"
#include "sodam/types.hpp"

namespace sodam {

enum class PerturbMode { Oversplit, Jitter, Drop };

struct DegenerateResult : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Derives a synthetic prediction from a reference document.
///   oversplit: split each scene at its midpoint, partitioning each
///     dimension's words so that space-joined concatenation reproduces the
///     original text exactly;
///   jitter: shift each boundary by +-magnitude seconds (uniform), clamped to
///     preserve ordering and positivity, resampling degenerate draws up to a
///     bound before raising DegenerateResult;
///   drop: remove each scene independently with probability = magnitude.
/// Deterministic under a fixed rng state.
ScriptDocument perturb_document(const ScriptDocument& reference, PerturbMode mode,
                                double magnitude, std::mt19937_64& rng);

}  // namespace sodam
