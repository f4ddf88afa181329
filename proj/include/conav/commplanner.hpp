#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "conav/belief.hpp"
#include "conav/grid_astar.hpp"
#include "conav/human.hpp"
#include "conav/tbrrt.hpp"

namespace conav {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

// Sum of pairwise distances between successive waypoints.
inline double path_cost(const std::vector<Vec2>& waypoints) {
    if (waypoints.empty()) throw std::invalid_argument("path_cost: empty waypoint sequence");
    return polyline_length(waypoints);
}

// Time-aligned clearance between two waypoint sequences: the shorter one is
// padded with its final waypoint, the pointwise minimum distance is taken
// over aligned indices, and sigma_safe is subtracted (clamped at zero).
inline double clearance(const std::vector<Vec2>& g1, const std::vector<Vec2>& g2,
                        double sigma_safe) {
    if (g1.empty() || g2.empty())
        throw std::invalid_argument("clearance: empty waypoint sequence");
    const std::size_t i_max = std::max(g1.size(), g2.size());
    double d_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < i_max; ++i) {
        const Vec2& a = i < g1.size() ? g1[i] : g1.back();
        const Vec2& b = i < g2.size() ? g2[i] : g2.back();
        d_min = std::min(d_min, distance(a, b));
    }
    return std::max(d_min - sigma_safe, 0.0);
}

// One (motion plan, communication signal) branch of the per-cycle search.
struct SearchNode {
    int plan_index = 0;
    int signal_index = 0;
    std::string signal;
    int observation = kNullObservation;
    Belief posterior;
    TimedPlan plan;
    std::vector<Vec2> gamma_r;  // plan discretization completed to the goal
    std::vector<Vec2> gamma_h;  // predicted human path under the posterior
    double d_min = std::numeric_limits<double>::infinity();  // before sigma subtraction
    double cost = kInfiniteCost;
    bool completion_failed = false;
};

// Branch cost: weighted path lengths, inverse clearance and communication
// cost. Infinite when the clearance is zero or the human prediction is
// empty (a cornered human), regardless of the weights.
inline double node_cost(const SearchNode& n, const CostWeights& w) {
    if (n.gamma_h.empty() || n.completion_failed) return kInfiniteCost;
    const double cl = clearance(n.gamma_r, n.gamma_h, w.sigma_safe);
    if (cl == 0.0) return kInfiniteCost;
    return w.eta_r * path_cost(n.gamma_r) + w.eta_h * path_cost(n.gamma_h) + w.eta_p / cl +
           w.eta_c * w.comm_cost(n.signal);
}

// Shared read-only context for the per-cycle search.
struct PlannerContext {
    const Scenario* scenario = nullptr;
    const GridAbstraction* grid = nullptr;
    ZoneLayout layout;
    SensorModel model;
    ReachRelation reach;
    CostWeights weights;
    int threads = 1;
};

inline PlannerContext make_planner_context(const Scenario& scenario, const GridAbstraction& grid,
                                           int threads = 1) {
    PlannerContext ctx;
    ctx.scenario = &scenario;
    ctx.grid = &grid;
    ctx.layout = ZoneLayout::from_scenario(scenario);
    ctx.model = make_sensor_model(scenario.comm_vocab, scenario.conflations);
    ctx.reach = make_cycle_reach(ctx.layout, scenario.control_bounds.v_max, scenario.horizon);
    ctx.weights = scenario.weights;
    ctx.weights.sigma_safe = scenario.sigma_safe;
    ctx.threads = std::max(1, threads);
    return ctx;
}

struct CycleResult {
    std::string signal;
    int plan_index = 0;
    TimedPlan plan;
    Belief posterior;
    double cost = kInfiniteCost;
    bool fallback = false;        // every branch was infinite
    bool root_only = false;       // the tree could not extend at all
    double selection_d_min = 0.0; // time-aligned min distance of the chosen branch
    bool plan_safe = false;       // chosen plan passes plan_in_safe_set vs the tube
    PredictedHumanTube tube;
    std::size_t tree_size = 0;
    std::vector<double> branch_costs;  // plan-major, signal-minor order
    std::vector<Belief> branch_posteriors;
};

namespace detail {

// Discretized plan waypoints extended with a grid path from the plan's
// endpoint to the robot goal.
inline std::vector<Vec2> complete_robot_path(const TimedPlan& plan, const Scenario& scenario,
                                             const GridAbstraction& grid, bool* failed) {
    std::vector<Vec2> waypoints =
        discretize_plan(plan, static_cast<std::size_t>(std::max(1, scenario.waypoint_stride)));
    *failed = false;
    if (scenario.robot_goal.contains(plan.back().position())) return waypoints;
    const std::vector<Vec2> tail =
        grid_path_to_goal(grid, plan.back().position(), scenario.robot_goal);
    if (tail.empty()) {
        *failed = true;
        return waypoints;
    }
    for (std::size_t i = 1; i < tail.size(); ++i) waypoints.push_back(tail[i]);
    return waypoints;
}

inline void evaluate_branch(SearchNode& node, const HumanState& human, const Belief& prior,
                            const PlannerContext& ctx) {
    const Scenario& scenario = *ctx.scenario;
    const RobotState next_state = node.plan.back();
    node.observation = node.signal == kNullSignal
                           ? kNullObservation
                           : observe(human, node.signal, next_state, ctx.model, ctx.layout);
    node.posterior = update_belief(prior, node.observation, ctx.layout, ctx.model, ctx.reach);

    std::vector<Vec2> believed;
    for (int zone : node.posterior.set_zones())
        believed.push_back(ctx.layout.zone_center(zone, human.position));
    const HumanPrediction hp = predict_astar(human, scenario.human_goal, *ctx.grid, believed,
                                             ctx.layout.cell_extent * 0.5);
    node.gamma_h = hp.waypoints;

    node.cost = node_cost(node, ctx.weights);
    if (!node.gamma_h.empty())
        node.d_min = clearance(node.gamma_r, node.gamma_h, 0.0);
}

}  // namespace detail

// One outer iteration of the communication planner: get diverse plans from
// the tree planner, branch over every (plan, signal) pair, score each with
// node_cost, and return the minimizer. Ties prefer the null signal, then
// the lowest plan index. When every branch is infinite the null signal on
// the first plan is returned as the fallback (plain tree-planner behavior).
inline CycleResult plan_cycle(const RobotState& robot, const HumanState& human, double t,
                              const Belief& prior, const PlannerContext& ctx, Rng& rng) {
    const Scenario& scenario = *ctx.scenario;
    if (in_goal(robot, scenario.robot_goal))
        throw std::logic_error("plan_cycle: robot already in goal");

    CycleResult result;

    const HumanPrediction prediction =
        predict_dwa(human, scenario.human_goal, scenario, scenario.horizon_steps());
    result.tube.t0 = t;
    result.tube.dt = scenario.dt;
    result.tube.centers = prediction.waypoints;
    result.tube.radius = scenario.safety_params().combined_radius();

    const RrtTree tree =
        expand_tree(robot, t, result.tube, scenario, *ctx.grid, scenario.rrt_budget, rng);
    result.tree_size = tree.size();
    result.root_only = tree.root_only();

    std::vector<TimedPlan> plans;
    if (tree.root_only()) {
        plans.push_back(tree.extract_plan(0));
    } else {
        const int p = std::min<int>(scenario.p_plans, static_cast<int>(tree.size()));
        plans = select_diverse_plans(tree, p, scenario.diverse_weights, rng).plans;
    }

    // Branches are laid out plan-major so the tie-break order is stable no
    // matter how many threads evaluate them.
    std::vector<SearchNode> nodes;
    nodes.reserve(plans.size() * scenario.comm_vocab.size());
    for (std::size_t pi = 0; pi < plans.size(); ++pi) {
        bool completion_failed = false;
        const std::vector<Vec2> gamma_r =
            detail::complete_robot_path(plans[pi], scenario, *ctx.grid, &completion_failed);
        for (std::size_t si = 0; si < scenario.comm_vocab.size(); ++si) {
            SearchNode node;
            node.plan_index = static_cast<int>(pi);
            node.signal_index = static_cast<int>(si);
            node.signal = scenario.comm_vocab[si];
            node.plan = plans[pi];
            node.gamma_r = gamma_r;
            node.completion_failed = completion_failed;
            nodes.push_back(std::move(node));
        }
    }

    const auto worker = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < nodes.size(); i += stride)
            detail::evaluate_branch(nodes[i], human, prior, ctx);
    };
    if (ctx.threads <= 1 || nodes.size() < 2) {
        worker(0, 1);
    } else {
        const std::size_t count = std::min<std::size_t>(ctx.threads, nodes.size());
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < count; ++k) pool.emplace_back(worker, k, count);
        for (std::thread& th : pool) th.join();
    }

    // Sequential reduction in fixed order keeps the result independent of
    // the evaluation schedule.
    int best = -1;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        result.branch_costs.push_back(nodes[i].cost);
        result.branch_posteriors.push_back(nodes[i].posterior);
        if (nodes[i].cost == kInfiniteCost) continue;
        if (best < 0 || nodes[i].cost < nodes[best].cost) best = static_cast<int>(i);
        // Equal cost: plan-major layout already orders by plan index, but a
        // null signal beats an earlier non-null signal on the same plan.
        else if (nodes[i].cost == nodes[best].cost &&
                 nodes[i].plan_index == nodes[best].plan_index &&
                 nodes[i].signal == kNullSignal && nodes[best].signal != kNullSignal)
            best = static_cast<int>(i);
    }
    if (best < 0) {
        // Theorem-style fallback: default planner behavior, null signal.
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].plan_index == 0 && nodes[i].signal == kNullSignal)
                best = static_cast<int>(i);
        result.fallback = true;
    }

    const SearchNode& chosen = nodes[static_cast<std::size_t>(best)];
    result.signal = chosen.signal;
    result.plan_index = chosen.plan_index;
    result.plan = chosen.plan;
    result.posterior = chosen.posterior;
    result.cost = chosen.cost;
    result.selection_d_min = chosen.d_min;
    result.plan_safe = plan_in_safe_set(chosen.plan, result.tube, scenario.safety_params());
    return result;
}

}  // namespace conav
