#pragma once

#include <string>
#include <vector>

#include "conav/grid_astar.hpp"
#include "conav/types.hpp"
#include "conav/world.hpp"

namespace conav {

// Time-indexed human position forecast. dwa predictions advance at most
// v_max * dt per step; astar predictions are grid paths to the goal.
struct HumanPrediction {
    enum class Source { dwa, astar };
    Source source = Source::dwa;
    std::vector<Vec2> waypoints;  // first entry is the current human position

    bool empty() const { return waypoints.empty(); }
};

namespace detail {

inline double obstacle_clearance(const Scenario& scenario, const Vec2& p) {
    double best = std::min({p.x - scenario.bounds.lo.x, scenario.bounds.hi.x - p.x,
                            p.y - scenario.bounds.lo.y, scenario.bounds.hi.y - p.y});
    for (const ConvexPolygon& obstacle : scenario.obstacles)
        best = std::min(best, obstacle.distance_to(p));
    return best;
}

}  // namespace detail

// Deterministic dynamic-window rollout used by the motion planner to
// predict the human. Each step scores a fixed grid of (speed, heading-rate)
// commands by goal progress plus a clearance penalty, applies the best one
// and repeats. The resulting positions become the epsilon-tube centers.
inline HumanPrediction predict_dwa(const HumanState& h, const GoalDisk& goal,
                                   const Scenario& scenario, int horizon_steps) {
    if (horizon_steps < 1)
        throw std::invalid_argument("predict_dwa: horizon_steps must be >= 1");
    constexpr int kSpeedSamples = 5;
    constexpr int kHeadingSamples = 11;
    constexpr int kRolloutSteps = 5;
    const double v_max = scenario.human_v_max;
    const double accel = 2.0 * v_max;           // window growth per second
    const double omega_max = 2.0;               // rad/s
    const double dt = scenario.dt;
    const double clear_dist = 0.5;
    const double clear_weight = 0.6;

    HumanPrediction out;
    out.source = HumanPrediction::Source::dwa;
    out.waypoints.reserve(static_cast<std::size_t>(horizon_steps) + 1);
    out.waypoints.push_back(h.position);

    Vec2 pos = h.position;
    double speed = h.velocity.norm();
    double heading = speed > 0.05 ? std::atan2(h.velocity.y, h.velocity.x)
                                  : std::atan2(goal.center.y - pos.y, goal.center.x - pos.x);

    for (int step = 0; step < horizon_steps; ++step) {
        if (goal.contains(pos)) {
            out.waypoints.push_back(pos);
            speed = 0.0;
            continue;
        }
        const double lo = std::max(0.0, speed - accel * dt);
        const double hi = std::min(v_max, speed + accel * dt);
        double best_score = std::numeric_limits<double>::infinity();
        double best_speed = 0.0, best_rate = 0.0;
        Vec2 best_pos = pos;
        double best_heading = heading;
        for (int si = 0; si < kSpeedSamples; ++si) {
            const double s = lo + (hi - lo) * si / (kSpeedSamples - 1);
            for (int wi = 0; wi < kHeadingSamples; ++wi) {
                const double w = -omega_max + 2.0 * omega_max * wi / (kHeadingSamples - 1);
                Vec2 p = pos;
                double th = heading;
                bool feasible = true;
                for (int k = 0; k < kRolloutSteps && feasible; ++k) {
                    th = wrap_angle(th + w * dt);
                    p += Vec2{std::cos(th), std::sin(th)} * (s * dt);
                    feasible = point_in_freespace(scenario, p, scenario.r_h);
                }
                if (!feasible) continue;
                const double clear = detail::obstacle_clearance(scenario, p) - scenario.r_h;
                const double score = distance(p, goal.center) +
                                     clear_weight * std::max(0.0, 1.0 - clear / clear_dist);
                if (score < best_score) {
                    best_score = score;
                    best_speed = s;
                    best_rate = w;
                    th = wrap_angle(heading + w * dt);
                    best_pos = pos + Vec2{std::cos(th), std::sin(th)} * (s * dt);
                    best_heading = th;
                }
            }
        }
        if (!std::isfinite(best_score)) {
            // Fully enclosed: predict no motion.
            out.waypoints.push_back(pos);
            speed = 0.0;
            continue;
        }
        pos = best_pos;
        heading = best_heading;
        speed = best_speed;
        (void)best_rate;
        out.waypoints.push_back(pos);
    }
    return out;
}

// Grid A* path-to-goal for the human, with believed robot zones painted as
// extra obstacles. Covers the whole horizon, as the communication planner
// needs full paths. Returns an empty prediction when the believed zones (or
// the map) leave no route.
inline HumanPrediction predict_astar(const HumanState& h, const GoalDisk& goal,
                                     const GridAbstraction& grid,
                                     const std::vector<Vec2>& belief_obstacles,
                                     double obstacle_half_extent) {
    HumanPrediction out;
    out.source = HumanPrediction::Source::astar;

    auto [sx, sy] = grid.world_to_cell(h.position);
    if (grid.occupied(sx, sy)) {
        // Snap to the nearest free cell one ring out; the inflated grid can
        // swallow the cell of a human walking close to a wall.
        int best_x = -1, best_y = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int iy = sy - 1; iy <= sy + 1; ++iy)
            for (int ix = sx - 1; ix <= sx + 1; ++ix) {
                if (!grid.in_grid(ix, iy) || grid.occupied(ix, iy)) continue;
                const double d = distance(grid.cell_center(ix, iy), h.position);
                if (d < best_d) {
                    best_d = d;
                    best_x = ix;
                    best_y = iy;
                }
            }
        if (best_x < 0) return out;
        sx = best_x;
        sy = best_y;
    }

    BlockedOverlay overlay{belief_obstacles, obstacle_half_extent};
    const std::vector<Vec2> path = grid_astar(grid, sx, sy, cells_in_disk(grid, goal),
                                              belief_obstacles.empty() ? nullptr : &overlay);
    if (path.empty()) return out;
    out.waypoints.push_back(h.position);
    for (std::size_t i = 1; i < path.size(); ++i) out.waypoints.push_back(path[i]);
    return out;
}

// A pedestrian stand-in for the robot, walking from the robot's position
// toward a believed zone (or along the robot's velocity projection when the
// belief is empty).
struct VirtualAgent {
    Vec2 position;
    Vec2 goal;
    double speed = 1.0;

    void advance(double dt) {
        const Vec2 to_goal = goal - position;
        const double d = to_goal.norm();
        const double step = speed * dt;
        position = d <= step ? goal : position + to_goal * (step / d);
    }
};

// One forward-Euler step of the social-forces execution model: relaxation
// toward the goal velocity, exponential repulsion from virtual agents and
// from walls (obstacles plus map bounds).
inline HumanState step_social_forces(const HumanState& h, const GoalDisk& goal,
                                     const std::vector<VirtualAgent>& virtual_agents,
                                     const Scenario& scenario, const SocialForceParams& params,
                                     double dt) {
    const Vec2 to_goal = goal.center - h.position;
    const Vec2 desired = goal.contains(h.position)
                             ? Vec2{}
                             : to_goal.normalized() * params.desired_speed;
    Vec2 accel = (desired - h.velocity) / params.relaxation_time;

    const double contact = scenario.r_h + scenario.r_r;
    for (const VirtualAgent& agent : virtual_agents) {
        const Vec2 diff = h.position - agent.position;
        const double d = diff.norm();
        if (d < 1e-9) continue;
        accel += diff * (params.interaction_strength *
                         std::exp((contact - d) / params.interaction_range) / d);
    }

    for (const ConvexPolygon& obstacle : scenario.obstacles) {
        const Vec2 q = obstacle.closest_point_to(h.position);
        const Vec2 diff = h.position - q;
        const double d = diff.norm();
        if (d < 1e-9) continue;
        accel += diff * (params.wall_strength * std::exp((scenario.r_h - d) / params.wall_range) / d);
    }
    const Rect& b = scenario.bounds;
    const auto add_wall = [&](double d, const Vec2& inward) {
        accel += inward * (params.wall_strength * std::exp((scenario.r_h - d) / params.wall_range));
    };
    add_wall(h.position.x - b.lo.x, {1, 0});
    add_wall(b.hi.x - h.position.x, {-1, 0});
    add_wall(h.position.y - b.lo.y, {0, 1});
    add_wall(b.hi.y - h.position.y, {0, -1});

    HumanState out;
    out.velocity = h.velocity + accel * dt;
    const double speed = out.velocity.norm();
    if (speed > scenario.human_v_max)
        out.velocity = out.velocity * (scenario.human_v_max / speed);
    out.position = h.position + out.velocity * dt;
    return out;
}

}  // namespace conav
