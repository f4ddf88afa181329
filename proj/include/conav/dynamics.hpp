#pragma once

#include <stdexcept>
#include <vector>

#include "conav/types.hpp"

namespace conav {

// Forward-Euler step of the nonholonomic unicycle. The heading is wrapped
// after every update so downstream angle math never sees values outside
// [-pi, pi).
inline RobotState step_dynamics(const RobotState& s, const RobotControl& a,
                                double dt, const ControlBounds& bounds) {
    if (dt <= 0.0) throw std::invalid_argument("step_dynamics: dt must be positive");
    if (!bounds.admits(a))
        throw std::invalid_argument("step_dynamics: control outside bounds");
    RobotState out;
    out.x = s.x + a.v * std::cos(s.theta) * dt;
    out.y = s.y + a.v * std::sin(s.theta) * dt;
    out.theta = wrap_angle(s.theta + a.omega * dt);
    return out;
}

inline bool in_goal(const RobotState& s, const GoalDisk& g) {
    return g.contains(s.position());
}

// Time-stamped robot path segment. states[k] holds the pose at
// t0 + k * dt; controls[k] produced the transition k -> k+1.
struct TimedPlan {
    double t0 = 0.0;
    double dt = 0.1;
    std::vector<RobotState> states;
    std::vector<RobotControl> controls;

    std::size_t step_count() const { return controls.size(); }
    double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    const RobotState& front() const { return states.front(); }
    const RobotState& back() const { return states.back(); }
    bool stationary() const { return states.size() <= 1; }

    // Re-integrates the recorded controls and checks they reproduce the
    // recorded states within tol meters.
    bool replays(const ControlBounds& bounds, double tol = 1e-9) const {
        if (states.empty() || controls.size() + 1 != states.size()) return states.size() == 1;
        RobotState s = states.front();
        for (std::size_t k = 0; k < controls.size(); ++k) {
            s = step_dynamics(s, controls[k], dt, bounds);
            const RobotState& want = states[k + 1];
            if (std::abs(s.x - want.x) > tol || std::abs(s.y - want.y) > tol ||
                angular_difference(s.theta, want.theta) > tol)
                return false;
        }
        return true;
    }
};

// Every stride-th position of the plan, first and last states always
// included.
inline std::vector<Vec2> discretize_plan(const TimedPlan& plan, std::size_t stride) {
    if (stride < 1) throw std::invalid_argument("discretize_plan: stride must be >= 1");
    if (plan.states.empty()) throw std::invalid_argument("discretize_plan: empty plan");
    std::vector<Vec2> waypoints;
    for (std::size_t i = 0; i < plan.states.size(); i += stride)
        waypoints.push_back(plan.states[i].position());
    const Vec2 last = plan.states.back().position();
    if ((plan.states.size() - 1) % stride != 0) waypoints.push_back(last);
    return waypoints;
}

}  // namespace conav
