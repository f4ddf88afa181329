#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conav/types.hpp"
#include "conav/world.hpp"

namespace conav {

// Human-centered, axis-aligned tiling of the delta-local neighborhood into
// rows x cols square zones, indexed row-major with row 0 on the north side
// and column 0 on the west side.
struct ZoneLayout {
    int rows = 3;
    int cols = 3;
    double cell_extent = 1.0;
    double delta = 3.0;

    static ZoneLayout from_scenario(const Scenario& s) {
        ZoneLayout layout;
        layout.rows = s.zone_rows;
        layout.cols = s.zone_cols;
        layout.delta = s.delta_neighborhood;
        layout.cell_extent = s.delta_neighborhood / std::max(s.zone_rows, s.zone_cols);
        return layout;
    }

    int zone_count() const { return rows * cols; }

    // Offset of a zone center from the human position.
    Vec2 center_offset(int index) const {
        const int row = index / cols;
        const int col = index % cols;
        return {(col - (cols - 1) * 0.5) * cell_extent, ((rows - 1) * 0.5 - row) * cell_extent};
    }

    Vec2 zone_center(int index, const Vec2& human) const { return human + center_offset(index); }
};

// Zone containing the robot's base coordinates, or none when the robot is
// outside the tiled neighborhood (or farther than delta from the human).
// Cells are half-open toward the north-east, so boundary points resolve
// deterministically.
inline std::optional<int> zone_of(const Vec2& s_r, const HumanState& s_h,
                                  const ZoneLayout& layout) {
    const Vec2 d = s_r - s_h.position;
    if (d.norm() > layout.delta) return std::nullopt;
    const double half_w = layout.cols * layout.cell_extent * 0.5;
    const double half_h = layout.rows * layout.cell_extent * 0.5;
    const int col = static_cast<int>(std::floor((d.x + half_w) / layout.cell_extent));
    const int row = static_cast<int>(std::floor((half_h - d.y) / layout.cell_extent));
    if (col < 0 || col >= layout.cols || row < 0 || row >= layout.rows) return std::nullopt;
    return row * layout.cols + col;
}

// Boolean possibility vector over the neighborhood zones. The all-zero
// vector is the distinguished "no assumption" belief.
struct Belief {
    std::vector<std::uint8_t> bits;

    Belief() = default;
    explicit Belief(int zone_count) : bits(static_cast<std::size_t>(zone_count), 0) {}

    static Belief empty_belief(int zone_count) { return Belief(zone_count); }

    int size() const { return static_cast<int>(bits.size()); }
    bool get(int i) const { return bits[static_cast<std::size_t>(i)] != 0; }
    void set(int i, bool v = true) { bits[static_cast<std::size_t>(i)] = v ? 1 : 0; }
    bool empty() const {
        for (std::uint8_t b : bits)
            if (b) return false;
        return true;
    }
    bool full() const {
        for (std::uint8_t b : bits)
            if (!b) return false;
        return !bits.empty();
    }
    // True when this belief constrains nothing: either no zone or every
    // zone is considered possible.
    bool uninformative() const { return empty() || full(); }
    bool subset_of(const Belief& other) const {
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i] && !other.bits[i]) return false;
        return true;
    }
    bool operator==(const Belief&) const = default;

    std::vector<int> set_zones() const {
        std::vector<int> out;
        for (int i = 0; i < size(); ++i)
            if (get(i)) out.push_back(i);
        return out;
    }
    std::string to_string() const {
        std::string s(bits.size(), '0');
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i]) s[i] = '1';
        return s;
    }
};

inline constexpr int kNullObservation = 0;

// Discretized sensor model over (signal, next-robot-zone) pairs.
//
// Directional signals name the compass side of the human the robot will be
// on. A signal is consistent with a next state when that state's zone lies
// on the named side; consistent pairs map to the signal's observation
// symbol and inconsistent ones degrade to the null observation, so a signal
// that contradicts the robot's actual motion carries no information.
// Conflation groups merge several signals into one shared observation
// symbol, modeling a human who cannot tell them apart.
struct SensorModel {
    std::vector<std::string> signals;        // scenario vocabulary, null included
    std::vector<int> observation_of_signal;  // same order; null -> kNullObservation
    int observation_count = 1;

    int signal_index(const std::string& signal) const {
        for (std::size_t i = 0; i < signals.size(); ++i)
            if (signals[i] == signal) return static_cast<int>(i);
        return -1;
    }
};

inline SensorModel make_sensor_model(const std::vector<std::string>& vocab,
                                     const std::vector<std::vector<std::string>>& conflations) {
    static const std::vector<std::string> known{"north", "south", "east", "west"};
    SensorModel model;
    model.signals = vocab;
    model.observation_of_signal.assign(vocab.size(), -1);
    int next_obs = 1;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        if (vocab[i] == kNullSignal) {
            model.observation_of_signal[i] = kNullObservation;
            continue;
        }
        bool ok = false;
        for (const std::string& k : known) ok |= (k == vocab[i]);
        if (!ok)
            throw ValidationError("sensor model: unknown signal '" + vocab[i] + "'");
        if (model.observation_of_signal[i] >= 0) continue;
        model.observation_of_signal[i] = next_obs;
        // Everything conflated with this signal shares the observation.
        for (const auto& group : conflations) {
            bool in_group = false;
            for (const std::string& g : group) in_group |= (g == vocab[i]);
            if (!in_group) continue;
            for (const std::string& g : group) {
                const int j = model.signal_index(g);
                if (j >= 0) model.observation_of_signal[j] = next_obs;
            }
        }
        ++next_obs;
    }
    model.observation_count = next_obs;
    return model;
}

// Zones on the world-frame compass side named by a signal (strictly
// positive center offset along the corresponding axis).
inline std::vector<std::uint8_t> side_zones(const std::string& signal, const ZoneLayout& layout) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(layout.zone_count()), 0);
    for (int i = 0; i < layout.zone_count(); ++i) {
        const Vec2 off = layout.center_offset(i);
        const double tol = 1e-9;
        const bool on_side = (signal == "east" && off.x > tol) ||
                             (signal == "west" && off.x < -tol) ||
                             (signal == "north" && off.y > tol) ||
                             (signal == "south" && off.y < -tol);
        if (on_side) mask[static_cast<std::size_t>(i)] = 1;
    }
    return mask;
}

// Observation the human receives when the robot emits `signal` while
// intending to move to s_r_next. Deterministic lookup in the sensor model.
inline int observe(const HumanState& s_h, const std::string& signal, const RobotState& s_r_next,
                   const SensorModel& model, const ZoneLayout& layout) {
    const int idx = model.signal_index(signal);
    if (idx < 0) throw std::invalid_argument("observe: unknown signal '" + signal + "'");
    if (signal == kNullSignal) return kNullObservation;
    const std::optional<int> zone = zone_of(s_r_next.position(), s_h, layout);
    if (!zone) return kNullObservation;
    const std::vector<std::uint8_t> side = side_zones(signal, layout);
    return side[static_cast<std::size_t>(*zone)] ? model.observation_of_signal[idx]
                                                 : kNullObservation;
}

// Zones that admit a next robot state consistent with the observation under
// some signal. The null observation admits every zone (any state is
// consistent with silence).
inline std::vector<std::uint8_t> admissible_zones(int observation, const SensorModel& model,
                                                  const ZoneLayout& layout) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(layout.zone_count()), 0);
    if (observation == kNullObservation) {
        std::fill(mask.begin(), mask.end(), std::uint8_t{1});
        return mask;
    }
    for (std::size_t s = 0; s < model.signals.size(); ++s) {
        if (model.observation_of_signal[s] != observation) continue;
        const std::vector<std::uint8_t> side = side_zones(model.signals[s], layout);
        for (std::size_t i = 0; i < mask.size(); ++i) mask[i] |= side[i];
    }
    return mask;
}

// One-cycle zone-to-zone robot reachability over zone representatives.
struct ReachRelation {
    int zone_count = 0;
    std::vector<std::uint8_t> matrix;  // row j, column i: j can reach i

    bool at(int j, int i) const {
        return matrix[static_cast<std::size_t>(j) * zone_count + i] != 0;
    }
    void set(int j, int i, bool v = true) {
        matrix[static_cast<std::size_t>(j) * zone_count + i] = v ? 1 : 0;
    }
    static ReachRelation identity(int n) {
        ReachRelation r;
        r.zone_count = n;
        r.matrix.assign(static_cast<std::size_t>(n) * n, 0);
        for (int i = 0; i < n; ++i) r.set(i, i);
        return r;
    }
    static ReachRelation complete(int n) {
        ReachRelation r;
        r.zone_count = n;
        r.matrix.assign(static_cast<std::size_t>(n) * n, 1);
        return r;
    }
};

// Zone representatives (centers) are connectable within one planning cycle
// iff a straight full-speed rollout covers the separation.
inline ReachRelation make_cycle_reach(const ZoneLayout& layout, double v_max,
                                      double cycle_seconds) {
    const int n = layout.zone_count();
    ReachRelation reach;
    reach.zone_count = n;
    reach.matrix.assign(static_cast<std::size_t>(n) * n, 0);
    const double range = v_max * cycle_seconds + 1e-9;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (distance(layout.center_offset(j), layout.center_offset(i)) <= range)
                reach.set(j, i);
    return reach;
}

// Logical-filtering belief update: posterior zone i is possible iff it is
// admissible under the observation and reachable in one cycle from some
// prior-possible zone. The empty prior constrains nothing, with one
// exception: silence received on an empty prior conveys no information and
// leaves it empty.
inline Belief update_belief(const Belief& prior, int observation, const ZoneLayout& layout,
                            const SensorModel& model, const ReachRelation& reach) {
    const int n = layout.zone_count();
    if (prior.size() != n || reach.zone_count != n)
        throw std::invalid_argument("update_belief: dimension mismatch");
    Belief out(n);
    const bool no_prior = prior.empty();
    if (no_prior && observation == kNullObservation) return out;
    const std::vector<std::uint8_t> admissible = admissible_zones(observation, model, layout);
    for (int i = 0; i < n; ++i) {
        if (!admissible[static_cast<std::size_t>(i)]) continue;
        for (int j = 0; j < n; ++j) {
            if (!no_prior && !prior.get(j)) continue;
            if (reach.at(j, i)) {
                out.set(i);
                break;
            }
        }
    }
    return out;
}

}  // namespace conav
