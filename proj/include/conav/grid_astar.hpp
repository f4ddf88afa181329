#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "conav/types.hpp"
#include "conav/world.hpp"

namespace conav {

// Extra occupancy painted on top of a grid for one query, e.g. believed
// robot zones. Cells are blocked when their center lies inside the
// axis-aligned square of half side `half_extent` around any point.
struct BlockedOverlay {
    std::vector<Vec2> points;
    double half_extent = 0.5;

    bool blocks(const Vec2& cell_center) const {
        for (const Vec2& p : points)
            if (std::abs(cell_center.x - p.x) <= half_extent &&
                std::abs(cell_center.y - p.y) <= half_extent)
                return true;
        return false;
    }
};

namespace detail {

struct AstarNode {
    double f;
    double g;
    int cell;
};

struct AstarNodeOrder {
    // Min-heap on f; ties prefer the larger g (deeper node), then the
    // smaller cell id for determinism.
    bool operator()(const AstarNode& a, const AstarNode& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.g != b.g) return a.g < b.g;
        return a.cell > b.cell;
    }
};

inline double octile(int dx, int dy) {
    const int ax = std::abs(dx), ay = std::abs(dy);
    const double kSqrt2 = 1.41421356237309504880;
    return ax > ay ? (ax - ay) + kSqrt2 * ay : (ay - ax) + kSqrt2 * ax;
}

}  // namespace detail

// 8-connected shortest path between cell centers, diagonal cost sqrt(2),
// corner cutting disallowed. Accepts any cell of `goal_cells`. Returns the
// path as world points (start cell center first) or empty when no path
// exists.
inline std::vector<Vec2> grid_astar(const GridAbstraction& grid, int sx, int sy,
                                    const std::vector<std::pair<int, int>>& goal_cells,
                                    const BlockedOverlay* overlay = nullptr) {
    if (!grid.in_grid(sx, sy) || goal_cells.empty()) return {};
    const int nx = grid.nx, ny = grid.ny;
    const auto id = [nx](int ix, int iy) { return iy * nx + ix; };

    std::vector<std::uint8_t> blocked(static_cast<std::size_t>(nx) * ny, 0);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            bool b = grid.occupied(ix, iy);
            if (!b && overlay != nullptr) b = overlay->blocks(grid.cell_center(ix, iy));
            blocked[id(ix, iy)] = b ? 1 : 0;
        }
    if (blocked[id(sx, sy)]) return {};

    std::vector<std::uint8_t> is_goal(blocked.size(), 0);
    bool any_goal = false;
    for (const auto& [gx, gy] : goal_cells)
        if (grid.in_grid(gx, gy) && !blocked[id(gx, gy)]) {
            is_goal[id(gx, gy)] = 1;
            any_goal = true;
        }
    if (!any_goal) return {};

    // Admissible heuristic: octile distance to the nearest goal cell.
    const auto heuristic = [&](int ix, int iy) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [gx, gy] : goal_cells)
            best = std::min(best, detail::octile(gx - ix, gy - iy));
        return best;
    };

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> g_cost(blocked.size(), kInf);
    std::vector<int> parent(blocked.size(), -1);
    std::priority_queue<detail::AstarNode, std::vector<detail::AstarNode>, detail::AstarNodeOrder>
        open;
    g_cost[id(sx, sy)] = 0.0;
    open.push({heuristic(sx, sy), 0.0, id(sx, sy)});

    static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    const double kSqrt2 = 1.41421356237309504880;

    int found = -1;
    while (!open.empty()) {
        const detail::AstarNode node = open.top();
        open.pop();
        if (node.g > g_cost[node.cell]) continue;
        if (is_goal[node.cell]) {
            found = node.cell;
            break;
        }
        const int cx = node.cell % nx, cy = node.cell / nx;
        for (int k = 0; k < 8; ++k) {
            const int mx = cx + kDx[k], my = cy + kDy[k];
            if (mx < 0 || my < 0 || mx >= nx || my >= ny) continue;
            if (blocked[id(mx, my)]) continue;
            if (k >= 4 && (blocked[id(cx, my)] || blocked[id(mx, cy)])) continue;
            const double step = k >= 4 ? kSqrt2 : 1.0;
            const double ng = node.g + step;
            if (ng < g_cost[id(mx, my)] - 1e-12) {
                g_cost[id(mx, my)] = ng;
                parent[id(mx, my)] = node.cell;
                open.push({ng + heuristic(mx, my), ng, id(mx, my)});
            }
        }
    }
    if (found < 0) return {};

    std::vector<Vec2> path;
    for (int cell = found; cell >= 0; cell = parent[cell])
        path.push_back(grid.cell_center(cell % nx, cell / nx));
    std::reverse(path.begin(), path.end());
    return path;
}

// Cells whose center lies inside the goal disk; falls back to the cell of
// the disk center when the disk is smaller than one cell.
inline std::vector<std::pair<int, int>> cells_in_disk(const GridAbstraction& grid,
                                                      const GoalDisk& goal) {
    std::vector<std::pair<int, int>> cells;
    const auto [cx, cy] = grid.world_to_cell(goal.center);
    const int reach = static_cast<int>(std::ceil(goal.radius / grid.cell_size)) + 1;
    for (int iy = cy - reach; iy <= cy + reach; ++iy)
        for (int ix = cx - reach; ix <= cx + reach; ++ix)
            if (grid.in_grid(ix, iy) && goal.contains(grid.cell_center(ix, iy)))
                cells.emplace_back(ix, iy);
    if (cells.empty() && grid.in_grid(cx, cy)) cells.emplace_back(cx, cy);
    return cells;
}

inline std::vector<Vec2> grid_path_to_goal(const GridAbstraction& grid, const Vec2& start,
                                           const GoalDisk& goal,
                                           const BlockedOverlay* overlay = nullptr) {
    const auto [sx, sy] = grid.world_to_cell(start);
    return grid_astar(grid, sx, sy, cells_in_disk(grid, goal), overlay);
}

inline double polyline_length(const std::vector<Vec2>& pts) {
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
    return len;
}

}  // namespace conav
