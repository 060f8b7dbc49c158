#pragma once

#include "lpbf/rl_env.hpp"
#include "lpbf/toolpath.hpp"

namespace lpbf {

enum class Axis { X, Y };

// Boustrophedon sweep: rows traversed in alternating direction, laser on
// along rows and row connectors; gaps inside a row (non-convex domains)
// crossed with the laser off. Starts at the lower-left point, along X.
Toolpath zigzag(const SampleGrid& grid, Axis direction = Axis::X);

// Square islands in checker parity: even (row+col) islands swept along X,
// odd along Y. Islands visited in row-major serpentine order; transitions
// between islands are void moves.
Toolpath chessboard(const SampleGrid& grid, double island_size);

// Greedy adaptive pattern: next point minimizes the heat proxy among
// unvisited neighbors with turning angle >= threshold; the threshold is
// dropped when no candidate qualifies; empty neighborhoods fall back to the
// nearest unvisited point with a void move.
Toolpath atg_greedy(const SampleGrid& grid, const EnvConfig& cfg,
                    double smooth_threshold_deg = 90.0, int start = 0);

}  // namespace lpbf
