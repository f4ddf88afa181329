#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "conav/dynamics.hpp"
#include "conav/geometry.hpp"
#include "conav/types.hpp"

namespace conav {

// Barrier value between the robot base position and a (predicted) human
// position: squared separation minus the squared combined radius
// (tube epsilon + both agent radii). Non-negative means safe.
inline double safety_value(const RobotState& s_r, const Vec2& s_h, const SafetyParams& params) {
    const double r = params.combined_radius();
    return (s_r.position() - s_h).norm_sq() - r * r;
}

// Gradient of safety_value with respect to the robot base position.
inline Vec2 safety_gradient(const RobotState& s_r, const Vec2& s_h) {
    return (s_r.position() - s_h) * 2.0;
}

// Fixed-radius corridor around a deterministic human prediction. centers[k]
// is the predicted human position at t0 + k * dt; queries past the horizon
// pin to the final center.
struct PredictedHumanTube {
    double t0 = 0.0;
    double dt = 0.1;
    std::vector<Vec2> centers;
    double radius = 0.8;  // epsilon_tube + r_h + r_r

    const Vec2& center_at_step(std::size_t k) const {
        return k < centers.size() ? centers[k] : centers.back();
    }

    static PredictedHumanTube stationary(const Vec2& human, double t0, double dt,
                                         const SafetyParams& params) {
        PredictedHumanTube tube;
        tube.t0 = t0;
        tube.dt = dt;
        tube.centers = {human};
        tube.radius = params.combined_radius();
        return tube;
    }
};

// Linearized barrier constraint g . a + c >= 0 on the control (v, omega).
//
// The barrier of safety_value has relative degree two in omega, so the
// constraint is enforced at a point offset `lookahead` ahead of the base;
// both inputs then appear in the input Lie derivative. The constraint
// radius is inflated by lookahead + qp_margin so that keeping the offset
// point clear keeps the base clear as well, including under one-step Euler
// integration.
struct CbfConstraint {
    Vec2 g;       // input direction in (v, omega) space
    double c;     // alpha(B) evaluated at the offset point
    double residual(const RobotControl& a) const { return g.dot({a.v, a.omega}) + c; }
};

inline CbfConstraint cbf_constraint(const RobotState& s_r, const Vec2& tube_point,
                                    const SafetyParams& params) {
    const double ct = std::cos(s_r.theta);
    const double st = std::sin(s_r.theta);
    const double ell = params.lookahead;
    const Vec2 offset_point{s_r.x + ell * ct, s_r.y + ell * st};
    const Vec2 diff = offset_point - tube_point;
    const double r = params.combined_radius() + ell + params.qp_margin;
    // d(offset)/dt = [[cos, -l sin], [sin, l cos]] * (v, omega)
    const Vec2 grad = diff * 2.0;
    CbfConstraint con;
    con.g = {grad.x * ct + grad.y * st, ell * (grad.y * ct - grad.x * st)};
    con.c = params.alpha_gain * (diff.norm_sq() - r * r);
    return con;
}

// Minimizer of ||a - nominal||^2 subject to the barrier half-plane and the
// control box. Solved exactly: the feasible set is the box clipped by one
// half-plane, and the answer is the projection of the nominal point onto
// that polygon. Returns nullopt when the half-plane excludes the whole box.
inline std::optional<RobotControl> safe_control(const RobotState& s_r,
                                                const RobotControl& nominal,
                                                const Vec2& tube_point,
                                                const SafetyParams& params,
                                                const ControlBounds& bounds) {
    const CbfConstraint con = cbf_constraint(s_r, tube_point, params);
    const RobotControl n = bounds.clamp(nominal);
    if (con.residual(n) >= 0.0) return n;

    const std::vector<Vec2> box{{-bounds.v_max, -bounds.omega_max},
                                {bounds.v_max, -bounds.omega_max},
                                {bounds.v_max, bounds.omega_max},
                                {-bounds.v_max, bounds.omega_max}};
    const std::vector<Vec2> feasible = clip_by_halfplane(box, con.g, con.c);
    if (feasible.empty()) return std::nullopt;

    const Vec2 target{n.v, n.omega};
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_point = feasible.front();
    const std::size_t count = feasible.size();
    for (std::size_t i = 0; i < count; ++i) {
        const Vec2 q =
            closest_point_on_segment(feasible[i], feasible[(i + 1) % count], target);
        const double d = (q - target).norm_sq();
        if (d < best) {
            best = d;
            best_point = q;
        }
    }
    return RobotControl{best_point.x, best_point.y};
}

// True iff every plan state keeps a non-negative barrier against the tube
// center of its own time step.
inline bool plan_in_safe_set(const TimedPlan& plan, const PredictedHumanTube& tube,
                             const SafetyParams& params) {
    if (std::abs(plan.dt - tube.dt) > 1e-12 || std::abs(plan.t0 - tube.t0) > 1e-9)
        throw std::invalid_argument("plan_in_safe_set: plan and tube use different time grids");
    for (std::size_t k = 0; k < plan.states.size(); ++k)
        if (safety_value(plan.states[k], tube.center_at_step(k), params) < 0.0) return false;
    return true;
}

}  // namespace conav
