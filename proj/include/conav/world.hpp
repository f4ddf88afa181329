#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "conav/geometry.hpp"
#include "conav/rng.hpp"
#include "conav/types.hpp"

namespace conav {

inline constexpr const char* kScenarioHeader = "conav-scn v1";
inline constexpr const char* kNullSignal = "null";

// Parse failure: malformed file, unknown key, bad arity.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Well-formed file that violates a scenario invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Full trial configuration. Immutable after load; shared read-only across
// parallel trial runners.
struct Scenario {
    std::string map_id;
    Rect bounds{{0, 0}, {10, 10}};
    std::vector<ConvexPolygon> obstacles;

    RobotState robot_start;
    HumanState human_start;
    GoalDisk robot_goal;
    GoalDisk human_goal;

    CostWeights weights;
    std::vector<std::string> comm_vocab{kNullSignal, "north", "south", "east", "west"};
    std::vector<std::vector<std::string>> conflations;  // signal groups sharing one observation

    std::uint64_t seed = 0;
    double dt = 0.1;
    double horizon = 2.0;
    int p_plans = 3;

    double r_r = 0.3;
    double r_h = 0.3;
    double epsilon_tube = 0.2;
    double sigma_safe = 0.5;
    double delta_neighborhood = 3.0;

    // Planner knobs, all defaulted.
    ControlBounds control_bounds;
    double human_v_max = 1.3;
    VertexCostWeights vertex_weights;
    DiverseCostWeights diverse_weights;
    int rrt_budget = 600;
    double goal_bias = 0.1;
    int zone_rows = 3;
    int zone_cols = 3;
    double cell_size = 0.25;
    SocialForceParams sf_params;
    double proximity_thresh = 1.0;
    int step_cap = 2000;
    int waypoint_stride = 2;

    int horizon_steps() const {
        return std::max(1, static_cast<int>(std::lround(horizon / dt)));
    }
    SafetyParams safety_params() const {
        SafetyParams p;
        p.epsilon_tube = epsilon_tube;
        p.r_h = r_h;
        p.r_r = r_r;
        return p;
    }
    bool baseline() const {
        return comm_vocab.size() == 1 && comm_vocab.front() == kNullSignal;
    }
};

// True iff the disk of radius `inflation` at p intersects no obstacle and
// lies inside the map bounds. Obstacle boundaries count as occupied.
inline bool point_in_freespace(const Scenario& scenario, const Vec2& p, double inflation) {
    if (!scenario.bounds.contains_disk(p, inflation)) return false;
    for (const ConvexPolygon& obstacle : scenario.obstacles)
        if (obstacle.distance_to(p) <= inflation) return false;
    return true;
}

// Boolean occupancy grid over the map bounds, cells sampled at their
// centers with a fixed inflation radius.
struct GridAbstraction {
    Vec2 origin;
    double cell_size = 0.25;
    int nx = 0;
    int ny = 0;
    double inflation = 0.3;
    std::vector<std::uint8_t> occupancy;  // 1 = occupied, row-major by iy

    bool in_grid(int ix, int iy) const {
        return ix >= 0 && iy >= 0 && ix < nx && iy < ny;
    }
    bool occupied(int ix, int iy) const {
        return !in_grid(ix, iy) || occupancy[static_cast<std::size_t>(iy) * nx + ix] != 0;
    }
    std::pair<int, int> world_to_cell(const Vec2& p) const {
        return {static_cast<int>(std::floor((p.x - origin.x) / cell_size)),
                static_cast<int>(std::floor((p.y - origin.y) / cell_size))};
    }
    Vec2 cell_center(int ix, int iy) const {
        return {origin.x + (ix + 0.5) * cell_size, origin.y + (iy + 0.5) * cell_size};
    }
};

inline GridAbstraction build_grid(const Scenario& scenario, double cell_size) {
    if (cell_size <= 0.0) throw ValidationError("build_grid: cell_size must be positive");
    if (cell_size > scenario.bounds.width() || cell_size > scenario.bounds.height())
        throw ValidationError("build_grid: cell_size exceeds map extent");
    GridAbstraction grid;
    grid.origin = scenario.bounds.lo;
    grid.cell_size = cell_size;
    grid.inflation = scenario.r_h;
    grid.nx = static_cast<int>(std::ceil(scenario.bounds.width() / cell_size - 1e-9));
    grid.ny = static_cast<int>(std::ceil(scenario.bounds.height() / cell_size - 1e-9));
    grid.occupancy.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 0);
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
            if (!point_in_freespace(scenario, grid.cell_center(ix, iy), grid.inflation))
                grid.occupancy[static_cast<std::size_t>(iy) * grid.nx + ix] = 1;
    return grid;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& token, int line, const std::string& field) {
    double v = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw SchemaError("scenario line " + std::to_string(line) + ", field '" + field +
                          "': expected decimal number, got '" + token + "'");
    return v;
}

inline std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string t;
    while (in >> t) tokens.push_back(t);
    return tokens;
}

}  // namespace detail

inline void validate_scenario(const Scenario& s) {
    if (s.dt <= 0.0) throw ValidationError("validation: dt > 0");
    if (s.horizon < s.dt) throw ValidationError("validation: horizon >= dt");
    if (s.p_plans < 2) throw ValidationError("validation: p_plans >= 2");
    int nulls = 0;
    for (const std::string& sig : s.comm_vocab)
        if (sig == kNullSignal) ++nulls;
    if (nulls != 1)
        throw ValidationError("validation: comm_vocab contains exactly one null signal");
    if (s.weights.comm_cost(kNullSignal) != 0.0)
        throw ValidationError("validation: null signal has comm_cost 0");
    for (const ConvexPolygon& poly : s.obstacles) {
        const std::size_t n = poly.vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = poly.vertices[i], b = poly.vertices[(i + 1) % n],
                       c = poly.vertices[(i + 2) % n];
            if ((b - a).cross(c - b) < -1e-12)
                throw ValidationError("validation: obstacles are convex polygons");
        }
    }
    if (!point_in_freespace(s, s.robot_start.position(), s.r_r))
        throw ValidationError("validation: robot_start lies outside all obstacles");
    if (!point_in_freespace(s, s.human_start.position, s.r_h))
        throw ValidationError("validation: human_start lies outside all obstacles");
    if (!point_in_freespace(s, s.robot_goal.center, s.r_r))
        throw ValidationError("validation: robot_goal lies in free space inside map bounds");
    if (!point_in_freespace(s, s.human_goal.center, s.r_h))
        throw ValidationError("validation: human_goal lies in free space inside map bounds");
    if (s.robot_goal.radius <= 0.0 || s.human_goal.radius <= 0.0)
        throw ValidationError("validation: goal radius > 0");
    for (const auto& group : s.conflations)
        for (const std::string& sig : group) {
            if (sig == kNullSignal)
                throw ValidationError("validation: null signal cannot be conflated");
            bool known = false;
            for (const std::string& v : s.comm_vocab) known |= (v == sig);
            if (!known)
                throw ValidationError("validation: conflate lists unknown signal '" + sig + "'");
        }
}

inline Scenario parse_scenario(std::istream& in, const std::string& origin) {
    Scenario s;
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    std::vector<std::string> seen_keys;

    const auto need = [&](const std::vector<std::string>& tokens, std::size_t argc,
                          const std::string& key) {
        if (tokens.size() != argc + 1)
            throw SchemaError("scenario line " + std::to_string(line_no) + ", field '" + key +
                              "': expected " + std::to_string(argc) + " values");
    };
    const auto once = [&](const std::string& key) {
        for (const std::string& k : seen_keys)
            if (k == key)
                throw SchemaError("scenario line " + std::to_string(line_no) +
                                  ": duplicate field '" + key + "'");
        seen_keys.push_back(key);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        if (!saw_header) {
            if (line != kScenarioHeader)
                throw SchemaError("scenario line " + std::to_string(line_no) +
                                  ": expected header '" + std::string(kScenarioHeader) + "'");
            saw_header = true;
            continue;
        }
        const std::vector<std::string> tokens = detail::split_tokens(line);
        if (tokens.empty()) continue;
        const std::string& key = tokens.front();
        const auto num = [&](std::size_t i) { return detail::parse_double(tokens[i], line_no, key); };

        if (key == "map_id") {
            need(tokens, 1, key), once(key);
            s.map_id = tokens[1];
        } else if (key == "bounds") {
            need(tokens, 4, key), once(key);
            s.bounds = {{num(1), num(2)}, {num(3), num(4)}};
        } else if (key == "dt") {
            need(tokens, 1, key), once(key);
            s.dt = num(1);
        } else if (key == "horizon") {
            need(tokens, 1, key), once(key);
            s.horizon = num(1);
        } else if (key == "p_plans") {
            need(tokens, 1, key), once(key);
            s.p_plans = static_cast<int>(num(1));
        } else if (key == "seed") {
            need(tokens, 1, key), once(key);
            s.seed = static_cast<std::uint64_t>(num(1));
        } else if (key == "robot_start") {
            need(tokens, 3, key), once(key);
            s.robot_start = {num(1), num(2), wrap_angle(num(3))};
        } else if (key == "human_start") {
            need(tokens, 4, key), once(key);
            s.human_start = {{num(1), num(2)}, {num(3), num(4)}};
        } else if (key == "robot_goal") {
            need(tokens, 3, key), once(key);
            s.robot_goal = {{num(1), num(2)}, num(3)};
        } else if (key == "human_goal") {
            need(tokens, 3, key), once(key);
            s.human_goal = {{num(1), num(2)}, num(3)};
        } else if (key == "radii") {
            need(tokens, 2, key), once(key);
            s.r_r = num(1);
            s.r_h = num(2);
        } else if (key == "epsilon_tube") {
            need(tokens, 1, key), once(key);
            s.epsilon_tube = num(1);
        } else if (key == "sigma_safe") {
            need(tokens, 1, key), once(key);
            s.sigma_safe = num(1);
        } else if (key == "delta_neighborhood") {
            need(tokens, 1, key), once(key);
            s.delta_neighborhood = num(1);
        } else if (key == "comm_vocab") {
            once(key);
            if (tokens.size() < 2)
                throw SchemaError("scenario line " + std::to_string(line_no) +
                                  ", field 'comm_vocab': expected at least one signal");
            s.comm_vocab.assign(tokens.begin() + 1, tokens.end());
        } else if (key == "eta") {
            need(tokens, 4, key), once(key);
            s.weights.eta_r = num(1);
            s.weights.eta_h = num(2);
            s.weights.eta_p = num(3);
            s.weights.eta_c = num(4);
        } else if (key == "comm_cost") {
            need(tokens, 2, key);
            s.weights.comm_costs[tokens[1]] = num(2);
        } else if (key == "conflate") {
            if (tokens.size() < 3)
                throw SchemaError("scenario line " + std::to_string(line_no) +
                                  ", field 'conflate': expected at least two signals");
            s.conflations.emplace_back(tokens.begin() + 1, tokens.end());
        } else if (key == "v_max") {
            need(tokens, 1, key), once(key);
            s.control_bounds.v_max = num(1);
        } else if (key == "omega_max") {
            need(tokens, 1, key), once(key);
            s.control_bounds.omega_max = num(1);
        } else if (key == "human_v_max") {
            need(tokens, 1, key), once(key);
            s.human_v_max = num(1);
        } else if (key == "vertex_weights") {
            need(tokens, 4, key), once(key);
            s.vertex_weights = {num(1), num(2), num(3), num(4)};
        } else if (key == "diverse_weights") {
            need(tokens, 2, key), once(key);
            s.diverse_weights = {num(1), num(2)};
        } else if (key == "rrt_budget") {
            need(tokens, 1, key), once(key);
            s.rrt_budget = static_cast<int>(num(1));
        } else if (key == "goal_bias") {
            need(tokens, 1, key), once(key);
            s.goal_bias = num(1);
        } else if (key == "zone_grid") {
            need(tokens, 2, key), once(key);
            s.zone_rows = static_cast<int>(num(1));
            s.zone_cols = static_cast<int>(num(2));
        } else if (key == "cell_size") {
            need(tokens, 1, key), once(key);
            s.cell_size = num(1);
        } else if (key == "sf_params") {
            need(tokens, 6, key), once(key);
            s.sf_params = {num(1), num(2), num(3), num(4), num(5), num(6)};
        } else if (key == "thresh") {
            need(tokens, 1, key), once(key);
            s.proximity_thresh = num(1);
        } else if (key == "step_cap") {
            need(tokens, 1, key), once(key);
            s.step_cap = static_cast<int>(num(1));
        } else if (key == "stride") {
            need(tokens, 1, key), once(key);
            s.waypoint_stride = static_cast<int>(num(1));
        } else if (key == "obstacle") {
            if (tokens.size() < 7 || (tokens.size() - 1) % 2 != 0)
                throw SchemaError("scenario line " + std::to_string(line_no) +
                                  ", field 'obstacle': expected >= 3 x y pairs");
            std::vector<Vec2> pts;
            for (std::size_t i = 1; i + 1 < tokens.size(); i += 2)
                pts.push_back({num(i), num(i + 1)});
            s.obstacles.push_back(ConvexPolygon{std::move(pts)});
        } else {
            throw SchemaError("scenario line " + std::to_string(line_no) + ": unknown field '" +
                              key + "'");
        }
    }
    if (!saw_header)
        throw SchemaError("scenario '" + origin + "': missing header '" +
                          std::string(kScenarioHeader) + "'");
    validate_scenario(s);
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("scenario '" + path + "': cannot open file");
    return parse_scenario(in, path);
}

// Canonical text form. Numbers use shortest round-trip formatting, so
// load(serialize(s)) reproduces s exactly.
inline std::string serialize_scenario(const Scenario& s) {
    using detail::format_double;
    std::ostringstream out;
    out << kScenarioHeader << "\n";
    out << "map_id " << s.map_id << "\n";
    out << "bounds " << format_double(s.bounds.lo.x) << ' ' << format_double(s.bounds.lo.y) << ' '
        << format_double(s.bounds.hi.x) << ' ' << format_double(s.bounds.hi.y) << "\n";
    out << "dt " << format_double(s.dt) << "\n";
    out << "horizon " << format_double(s.horizon) << "\n";
    out << "p_plans " << s.p_plans << "\n";
    out << "seed " << s.seed << "\n";
    out << "robot_start " << format_double(s.robot_start.x) << ' ' << format_double(s.robot_start.y)
        << ' ' << format_double(s.robot_start.theta) << "\n";
    out << "human_start " << format_double(s.human_start.position.x) << ' '
        << format_double(s.human_start.position.y) << ' ' << format_double(s.human_start.velocity.x)
        << ' ' << format_double(s.human_start.velocity.y) << "\n";
    out << "robot_goal " << format_double(s.robot_goal.center.x) << ' '
        << format_double(s.robot_goal.center.y) << ' ' << format_double(s.robot_goal.radius) << "\n";
    out << "human_goal " << format_double(s.human_goal.center.x) << ' '
        << format_double(s.human_goal.center.y) << ' ' << format_double(s.human_goal.radius) << "\n";
    out << "radii " << format_double(s.r_r) << ' ' << format_double(s.r_h) << "\n";
    out << "epsilon_tube " << format_double(s.epsilon_tube) << "\n";
    out << "sigma_safe " << format_double(s.sigma_safe) << "\n";
    out << "delta_neighborhood " << format_double(s.delta_neighborhood) << "\n";
    out << "comm_vocab";
    for (const std::string& sig : s.comm_vocab) out << ' ' << sig;
    out << "\n";
    out << "eta " << format_double(s.weights.eta_r) << ' ' << format_double(s.weights.eta_h) << ' '
        << format_double(s.weights.eta_p) << ' ' << format_double(s.weights.eta_c) << "\n";
    for (const auto& [sig, cost] : s.weights.comm_costs)
        out << "comm_cost " << sig << ' ' << format_double(cost) << "\n";
    for (const auto& group : s.conflations) {
        out << "conflate";
        for (const std::string& sig : group) out << ' ' << sig;
        out << "\n";
    }
    out << "v_max " << format_double(s.control_bounds.v_max) << "\n";
    out << "omega_max " << format_double(s.control_bounds.omega_max) << "\n";
    out << "human_v_max " << format_double(s.human_v_max) << "\n";
    out << "vertex_weights " << format_double(s.vertex_weights.w_goal_dist) << ' '
        << format_double(s.vertex_weights.w_human_dist) << ' '
        << format_double(s.vertex_weights.w_heading) << ' ' << format_double(s.vertex_weights.w_trap)
        << "\n";
    out << "diverse_weights " << format_double(s.diverse_weights.w_cost) << ' '
        << format_double(s.diverse_weights.w_dist) << "\n";
    out << "rrt_budget " << s.rrt_budget << "\n";
    out << "goal_bias " << format_double(s.goal_bias) << "\n";
    out << "zone_grid " << s.zone_rows << ' ' << s.zone_cols << "\n";
    out << "cell_size " << format_double(s.cell_size) << "\n";
    out << "sf_params " << format_double(s.sf_params.relaxation_time) << ' '
        << format_double(s.sf_params.interaction_strength) << ' '
        << format_double(s.sf_params.interaction_range) << ' '
        << format_double(s.sf_params.wall_strength) << ' ' << format_double(s.sf_params.wall_range)
        << ' ' << format_double(s.sf_params.desired_speed) << "\n";
    out << "thresh " << format_double(s.proximity_thresh) << "\n";
    out << "step_cap " << s.step_cap << "\n";
    out << "stride " << s.waypoint_stride << "\n";
    for (const ConvexPolygon& poly : s.obstacles) {
        out << "obstacle";
        for (const Vec2& v : poly.vertices)
            out << ' ' << format_double(v.x) << ' ' << format_double(v.y);
        out << "\n";
    }
    return out.str();
}

inline std::uint64_t scenario_hash(const Scenario& s) {
    return fnv1a64(serialize_scenario(s));
}

}  // namespace conav
