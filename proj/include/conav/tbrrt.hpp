#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "conav/dynamics.hpp"
#include "conav/rng.hpp"
#include "conav/safety.hpp"
#include "conav/world.hpp"

namespace conav {

// A tree node is a state at a specific time step of the planning cycle.
struct RrtVertex {
    RobotState state;
    double time = 0.0;
    int step = 0;        // dt steps since the root
    int parent = -1;     // -1 for the root
    RobotControl edge_control;
    double cost = 0.0;
};

struct RrtTree {
    double t0 = 0.0;
    double dt = 0.1;
    std::vector<RrtVertex> vertices;

    std::size_t size() const { return vertices.size(); }
    bool root_only() const { return vertices.size() <= 1; }

    // Root-to-vertex path segment as a replayable timed plan.
    TimedPlan extract_plan(int vertex_id) const {
        std::vector<int> chain;
        for (int id = vertex_id; id >= 0; id = vertices[static_cast<std::size_t>(id)].parent)
            chain.push_back(id);
        TimedPlan plan;
        plan.t0 = t0;
        plan.dt = dt;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const RrtVertex& v = vertices[static_cast<std::size_t>(*it)];
            plan.states.push_back(v.state);
            if (v.parent >= 0) plan.controls.push_back(v.edge_control);
        }
        return plan;
    }
};

// Per-vertex cost: weighted goal distance, human distance, heading
// misalignment, and the trap count (waypoints of the straight vertex-goal
// segment that land in occupied cells, sampled every cell_size).
inline double vertex_cost(const RobotState& state, const GoalDisk& goal, const Vec2& human,
                          const VertexCostWeights& w, const GridAbstraction& grid) {
    const Vec2 pos = state.position();
    const Vec2 to_goal = goal.center - pos;
    const double d_goal = to_goal.norm();
    const double d_human = distance(pos, human);
    const double heading =
        d_goal > 1e-9 ? angular_difference(state.theta, std::atan2(to_goal.y, to_goal.x)) : 0.0;

    int trapped = 0;
    const int steps = std::max(1, static_cast<int>(std::ceil(d_goal / grid.cell_size)));
    for (int k = 0; k <= steps; ++k) {
        const Vec2 p = pos + to_goal * (static_cast<double>(k) / steps);
        const auto [ix, iy] = grid.world_to_cell(p);
        if (grid.occupied(ix, iy)) ++trapped;
    }
    return w.w_goal_dist * d_goal + w.w_human_dist * d_human + w.w_heading * heading +
           w.w_trap * trapped;
}

inline double vertex_cost(const RrtVertex& v, const GoalDisk& goal, const Vec2& human,
                          const VertexCostWeights& w, const GridAbstraction& grid) {
    return vertex_cost(v.state, goal, human, w, grid);
}

namespace detail {

// Proportional heading controller toward a target point, clipped to bounds.
inline RobotControl steer_toward(const RobotState& from, const Vec2& target,
                                 const ControlBounds& bounds, double dt) {
    const Vec2 diff = target - from.position();
    const double dist = diff.norm();
    if (dist < 1e-9) return {0.0, 0.0};
    const double err = wrap_angle(std::atan2(diff.y, diff.x) - from.theta);
    const double omega = std::clamp(2.5 * err, -bounds.omega_max, bounds.omega_max);
    const double v =
        std::min(bounds.v_max, dist / dt) * std::max(0.0, std::cos(err));
    return {v, omega};
}

}  // namespace detail

// Expands a time-based tree from the root against the predicted human tube.
// Each edge steers one dt step toward a sampled target, filters the nominal
// control through the barrier QP at the child's time step, and is rejected
// if the child leaves free space, the QP is infeasible, or the child's
// barrier against its tube center is negative. A fully blocked root yields
// a root-only tree, which callers treat as a deadlock signal.
inline RrtTree expand_tree(const RobotState& root, double t0, const PredictedHumanTube& tube,
                           const Scenario& scenario, const GridAbstraction& grid, int budget,
                           Rng& rng) {
    const SafetyParams params = scenario.safety_params();
    const ControlBounds& bounds = scenario.control_bounds;
    const Vec2 human = tube.centers.front();
    const int max_depth = scenario.horizon_steps();

    RrtTree tree;
    tree.t0 = t0;
    tree.dt = scenario.dt;
    RrtVertex root_vertex;
    root_vertex.state = root;
    root_vertex.time = t0;
    root_vertex.cost = vertex_cost(root, scenario.robot_goal, human, scenario.vertex_weights, grid);
    tree.vertices.push_back(root_vertex);

    const long attempts_cap = static_cast<long>(budget) * 12;
    for (long attempt = 0; attempt < attempts_cap && tree.size() < static_cast<std::size_t>(budget);
         ++attempt) {
        const Vec2 sample = rng.bernoulli(scenario.goal_bias)
                                ? scenario.robot_goal.center
                                : Vec2{rng.uniform(scenario.bounds.lo.x, scenario.bounds.hi.x),
                                       rng.uniform(scenario.bounds.lo.y, scenario.bounds.hi.y)};

        int nearest = -1;
        double nearest_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tree.vertices.size(); ++i) {
            const RrtVertex& v = tree.vertices[i];
            if (v.step >= max_depth) continue;
            const double d = (v.state.position() - sample).norm_sq();
            if (d < nearest_d) {
                nearest_d = d;
                nearest = static_cast<int>(i);
            }
        }
        if (nearest < 0) break;

        const RrtVertex parent = tree.vertices[static_cast<std::size_t>(nearest)];
        const int child_step = parent.step + 1;
        const Vec2& tube_center = tube.center_at_step(static_cast<std::size_t>(child_step));

        const RobotControl nominal = detail::steer_toward(parent.state, sample, bounds, tree.dt);
        const std::optional<RobotControl> control =
            safe_control(parent.state, nominal, tube_center, params, bounds);
        if (!control) continue;

        const RobotState child = step_dynamics(parent.state, *control, tree.dt, bounds);
        if (!point_in_freespace(scenario, child.position(), scenario.r_r)) continue;
        if (safety_value(child, tube_center, params) < 0.0) continue;

        RrtVertex v;
        v.state = child;
        v.step = child_step;
        v.time = t0 + child_step * tree.dt;
        v.parent = nearest;
        v.edge_control = *control;
        v.cost = vertex_cost(child, scenario.robot_goal, human, scenario.vertex_weights, grid);
        tree.vertices.push_back(v);
    }
    return tree;
}

namespace detail {

// Diverse-selection objective over a vertex subset: each selected vertex
// contributes its cost divided by its summed distance to the other
// selections. Duplicate positions zero a denominator and are excluded via
// an infinite value.
inline double diverse_objective(const RrtTree& tree, const std::vector<int>& subset,
                                const DiverseCostWeights& w) {
    double total = 0.0;
    for (std::size_t a = 0; a < subset.size(); ++a) {
        double denom = 0.0;
        for (std::size_t b = 0; b < subset.size(); ++b) {
            if (a == b) continue;
            denom += distance(tree.vertices[static_cast<std::size_t>(subset[a])].state.position(),
                              tree.vertices[static_cast<std::size_t>(subset[b])].state.position());
        }
        if (denom <= 0.0) return std::numeric_limits<double>::infinity();
        total += w.w_cost * tree.vertices[static_cast<std::size_t>(subset[a])].cost /
                 (w.w_dist * denom);
    }
    return total;
}

inline bool id_tuple_less(const std::vector<int>& a, const std::vector<int>& b) {
    return a < b;
}

}  // namespace detail

struct DiverseSelection {
    std::vector<TimedPlan> plans;
    std::vector<int> vertex_ids;  // ascending
    double objective = 0.0;
    double initial_objective = 0.0;
    int passes = 0;
};

// Local search for p diverse low-cost plans: start from a random p-subset,
// then repeatedly try every outside vertex and keep the best p-combination
// of the enlarged set, until a full pass brings no strict improvement (or
// the pass cap trips). Ties pick the lexicographically smallest id tuple.
inline DiverseSelection select_diverse_plans(const RrtTree& tree, int p,
                                             const DiverseCostWeights& weights, Rng& rng,
                                             int max_passes = 50) {
    const int n = static_cast<int>(tree.size());
    if (p < 1) throw std::invalid_argument("select_diverse_plans: p must be >= 1");
    if (n < p) throw std::runtime_error("select_diverse_plans: insufficient vertices");

    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < p; ++i) {
        const std::size_t j = i + rng.uniform_index(static_cast<std::size_t>(n - i));
        std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
    }
    std::vector<int> selected(ids.begin(), ids.begin() + p);
    std::sort(selected.begin(), selected.end());

    DiverseSelection result;
    result.initial_objective = detail::diverse_objective(tree, selected, weights);
    double current = result.initial_objective;

    std::vector<std::uint8_t> in_selection(static_cast<std::size_t>(n), 0);
    for (int id : selected) in_selection[static_cast<std::size_t>(id)] = 1;

    for (int pass = 0; pass < max_passes; ++pass) {
        ++result.passes;
        bool improved = false;
        for (int candidate = 0; candidate < n; ++candidate) {
            if (in_selection[static_cast<std::size_t>(candidate)]) continue;
            std::vector<int> pool = selected;
            pool.push_back(candidate);
            std::sort(pool.begin(), pool.end());
            // All p-combinations of the p+1 pool: drop one element each.
            std::vector<int> best_combo;
            double best_val = std::numeric_limits<double>::infinity();
            for (std::size_t drop = 0; drop < pool.size(); ++drop) {
                std::vector<int> combo;
                combo.reserve(pool.size() - 1);
                for (std::size_t i = 0; i < pool.size(); ++i)
                    if (i != drop) combo.push_back(pool[i]);
                const double val = detail::diverse_objective(tree, combo, weights);
                if (val < best_val ||
                    (val == best_val && detail::id_tuple_less(combo, best_combo)))
                    best_val = val, best_combo = std::move(combo);
            }
            if (best_val < current) {
                current = best_val;
                for (int id : selected) in_selection[static_cast<std::size_t>(id)] = 0;
                selected = best_combo;
                for (int id : selected) in_selection[static_cast<std::size_t>(id)] = 1;
                improved = true;
            }
        }
        if (!improved) break;
    }

    result.objective = current;
    result.vertex_ids = selected;
    for (int id : selected) result.plans.push_back(tree.extract_plan(id));
    return result;
}

}  // namespace conav
