#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "conav/vec2.hpp"

namespace conav {

// Planar robot pose. theta is kept wrapped to [-pi, pi) by every update.
struct RobotState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Vec2 position() const { return {x, y}; }
    bool operator==(const RobotState&) const = default;
};

// Unicycle input: linear and angular velocity.
struct RobotControl {
    double v = 0.0;
    double omega = 0.0;
    bool operator==(const RobotControl&) const = default;
};

struct ControlBounds {
    double v_max = 1.0;
    double omega_max = 1.5;

    bool admits(const RobotControl& a) const {
        return std::abs(a.v) <= v_max + 1e-12 && std::abs(a.omega) <= omega_max + 1e-12;
    }
    RobotControl clamp(const RobotControl& a) const {
        return {std::clamp(a.v, -v_max, v_max), std::clamp(a.omega, -omega_max, omega_max)};
    }
};

struct HumanState {
    Vec2 position;
    Vec2 velocity;
};

// Euclidean disk goal region; membership is ||p - center||^2 - r^2 <= 0.
struct GoalDisk {
    Vec2 center;
    double radius = 0.5;

    bool contains(const Vec2& p) const {
        return (p - center).norm_sq() - radius * radius <= 0.0;
    }
};

// Branch-cost weights of the communication planner.
struct CostWeights {
    double eta_r = 1.5;
    double eta_h = 0.25;
    double eta_p = 3.0;
    double eta_c = 1.0;
    std::map<std::string, double> comm_costs;  // null signal always costs 0
    double sigma_safe = 0.5;

    double comm_cost(const std::string& signal) const {
        const auto it = comm_costs.find(signal);
        return it == comm_costs.end() ? 0.0 : it->second;
    }
};

// Per-vertex cost weights of the tree planner (goal distance, human
// distance, heading, trap).
struct VertexCostWeights {
    double w_goal_dist = 1.0;
    double w_human_dist = 0.5;
    double w_heading = 0.3;
    double w_trap = 2.0;
};

// Numerator/denominator weights of the diverse-plan selection objective.
struct DiverseCostWeights {
    double w_cost = 1.0;
    double w_dist = 1.0;
};

struct SafetyParams {
    double epsilon_tube = 0.2;
    double r_h = 0.3;
    double r_r = 0.3;
    double alpha_gain = 1.0;   // class-K slope, 1/s
    double lookahead = 0.1;    // near-identity offset that makes omega act on the barrier
    double qp_margin = 0.01;   // extra radius inside the QP constraint only

    double combined_radius() const { return epsilon_tube + r_h + r_r; }
};

struct SocialForceParams {
    double relaxation_time = 0.5;
    double interaction_strength = 3.0;  // m/s^2 at contact distance
    double interaction_range = 0.4;
    double wall_strength = 2.0;
    double wall_range = 0.3;
    double desired_speed = 1.3;
};

}  // namespace conav
