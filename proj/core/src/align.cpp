#include "sodam/align.hpp"

#include <algorithm>
#include <cassert>

namespace sodam {

double iou(const TimeInterval& a, const TimeInterval& b) {
    const double intersection =
        std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
    const double union_len = a.length() + b.length() - intersection;
    return union_len > 0.0 ? intersection / union_len : 0.0;
}

DpTable build_dp_table(std::span<const TimeInterval> references,
                       std::span<const TimeInterval> predictions) {
    const std::size_t n = references.size();
    const std::size_t m = predictions.size();
    DpTable table;
    table.rows = n + 1;
    table.cols = m + 1;
    table.scores.assign(table.rows * table.cols, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const double diag =
                table.at(i - 1, j - 1) + iou(references[i - 1], predictions[j - 1]);
            table.at(i, j) = std::max({table.at(i - 1, j), table.at(i, j - 1), diag});
        }
    }
    return table;
}

namespace {

enum class Move : unsigned char { Diag, Left, Up };

/// Builds an AlignmentResult from a forward move sequence starting at (0,0).
/// diag consumes (ref i, pred j) together; left consumes pred j at the
/// current reference row; up consumes ref i with nothing yet assigned.
AlignmentResult result_from_moves(std::span<const Move> moves,
                                  std::span<const TimeInterval> references,
                                  std::span<const TimeInterval> predictions) {
    const std::size_t n = references.size();
    std::vector<std::vector<std::size_t>> groups(n + 1);  // groups[0]: before row 1
    AlignmentResult result;
    std::size_t i = 0, j = 0;
    for (Move move : moves) {
        switch (move) {
            case Move::Diag:
                ++i;
                ++j;
                groups[i].push_back(j - 1);
                result.path_score += iou(references[i - 1], predictions[j - 1]);
                break;
            case Move::Left:
                ++j;
                groups[i].push_back(j - 1);
                break;
            case Move::Up:
                ++i;
                break;
        }
    }
    result.unmatched_predictions = std::move(groups[0]);
    for (std::size_t row = 1; row <= n; ++row) {
        if (groups[row].empty())
            result.unmatched_references.push_back(row - 1);
        else
            result.pairs.push_back({row - 1, std::move(groups[row])});
    }
    return result;
}

}  // namespace

AlignmentResult align(std::span<const TimeInterval> references,
                      std::span<const TimeInterval> predictions) {
    const std::size_t n = references.size();
    const std::size_t m = predictions.size();

    // Suffix table: best achievable score from (i, j) to (n, m). Walking
    // forward with it lets the tie preference apply in path order.
    std::vector<double> suffix((n + 1) * (m + 1), 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& {
        return suffix[i * (m + 1) + j];
    };
    for (std::size_t ii = n + 1; ii-- > 0;) {
        for (std::size_t jj = m + 1; jj-- > 0;) {
            double best = 0.0;
            if (ii < n && jj < m)
                best = std::max(best, iou(references[ii], predictions[jj]) + at(ii + 1, jj + 1));
            if (jj < m) best = std::max(best, at(ii, jj + 1));
            if (ii < n) best = std::max(best, at(ii + 1, jj));
            at(ii, jj) = best;
        }
    }

    std::vector<Move> moves;
    moves.reserve(n + m);
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        const double remaining = at(i, j);
        if (i < n && j < m &&
            iou(references[i], predictions[j]) + at(i + 1, j + 1) >= remaining) {
            moves.push_back(Move::Diag);
            ++i;
            ++j;
        } else if (j < m && at(i, j + 1) >= remaining) {
            moves.push_back(Move::Left);
            ++j;
        } else {
            assert(i < n);
            moves.push_back(Move::Up);
            ++i;
        }
    }
    return result_from_moves(moves, references, predictions);
}

SceneEntry merge_group(std::span<const SceneEntry> group) {
    if (group.empty()) throw std::invalid_argument("merge_group: empty group");
    if (group.size() == 1) return group.front();
    SceneEntry merged;
    double start = group.front().interval.start;
    double end = group.front().interval.end;
    for (const SceneEntry& entry : group.subspan(1)) {
        start = std::min(start, entry.interval.start);
        end = std::max(end, entry.interval.end);
    }
    merged.interval = TimeInterval(start, end);
    for (Dimension d : kDimensions) {
        std::string& text = merged.caption[d];
        for (const SceneEntry& entry : group) {
            if (entry.caption[d].empty()) continue;
            if (!text.empty()) text += ' ';
            text += entry.caption[d];
        }
    }
    return merged;
}

namespace {

struct OracleState {
    std::span<const TimeInterval> references;
    std::span<const TimeInterval> predictions;
    std::vector<Move> current;
    std::vector<Move> best;
    double best_score = -1.0;
};

void enumerate_paths(OracleState& state, std::size_t i, std::size_t j, double score) {
    const std::size_t n = state.references.size();
    const std::size_t m = state.predictions.size();
    if (i == n && j == m) {
        // strictly-greater keeps the first (most-preferred) maximizer
        if (score > state.best_score) {
            state.best_score = score;
            state.best = state.current;
        }
        return;
    }
    if (i < n && j < m) {
        state.current.push_back(Move::Diag);
        enumerate_paths(state, i + 1, j + 1,
                        score + iou(state.references[i], state.predictions[j]));
        state.current.pop_back();
    }
    if (j < m) {
        state.current.push_back(Move::Left);
        enumerate_paths(state, i, j + 1, score);
        state.current.pop_back();
    }
    if (i < n) {
        state.current.push_back(Move::Up);
        enumerate_paths(state, i + 1, j, score);
        state.current.pop_back();
    }
}

}  // namespace

AlignmentResult brute_force_align(std::span<const TimeInterval> references,
                                  std::span<const TimeInterval> predictions) {
    if (references.size() > 8 || predictions.size() > 8)
        throw SizeLimitExceeded("brute_force_align supports at most 8x8 instances");
    OracleState state{references, predictions, {}, {}, -1.0};
    enumerate_paths(state, 0, 0, 0.0);
    return result_from_moves(state.best, references, predictions);
}

}  // namespace sodam
