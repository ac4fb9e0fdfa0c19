#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "sodam/types.hpp"

namespace sodam {

/// Temporal intersection-over-union of two intervals, in [0, 1].
double iou(const TimeInterval& a, const TimeInterval& b);

/// DP score grid over (references+1) x (predictions+1).
/// scores[0][*] = scores[*][0] = 0; entries never decrease along a row or
/// column.
struct DpTable {
    std::size_t rows = 0;  // N + 1
    std::size_t cols = 0;  // M + 1
    std::vector<double> scores;

    double at(std::size_t i, std::size_t j) const { return scores[i * cols + j]; }
    double& at(std::size_t i, std::size_t j) { return scores[i * cols + j]; }
};

DpTable build_dp_table(std::span<const TimeInterval> references,
                       std::span<const TimeInterval> predictions);

/// IoU-scored monotone alignment of predictions onto references. Rows are
/// references, columns predictions. One optimal path is traced with move
/// preference diag > left > up, applied walking the path forward from the
/// origin; every prediction consumed at reference row i joins the group for
/// reference i (predictions consumed before the first reference row are
/// unmatched). Pure and deterministic.
AlignmentResult align(std::span<const TimeInterval> references,
                      std::span<const TimeInterval> predictions);

/// Merges a non-empty ascending group into one scene: interval spans
/// [min start, max end]; each dimension's texts are joined in order with a
/// single space (empty members skipped). A singleton group is returned
/// unchanged.
SceneEntry merge_group(std::span<const SceneEntry> group);

struct SizeLimitExceeded : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Exhaustive test oracle: enumerates every monotone lattice path (no DP
/// table), scores each by the sum of diagonal IoUs, and keeps the first
/// maximizer found when moves are tried in the order diag, left, up at each
/// forward step. Requires N <= 8 and M <= 8.
AlignmentResult brute_force_align(std::span<const TimeInterval> references,
                                  std::span<const TimeInterval> predictions);

}  // namespace sodam
