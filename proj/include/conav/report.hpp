#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conav/dynamics.hpp"
#include "conav/types.hpp"
#include "conav/world.hpp"

namespace conav {

enum class Outcome { GOAL, DEADLOCK, TIMEOUT };

inline const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::GOAL: return "GOAL";
        case Outcome::DEADLOCK: return "DEADLOCK";
        default: return "TIMEOUT";
    }
}

// One simulation step of an episode, as written to the trajectory log.
struct StepRecord {
    double t = 0.0;
    RobotState robot;
    HumanState human;
    std::string belief;       // zone bit string
    std::string signal;       // signal active during this cycle
    double barrier_pred = 0.0;  // barrier vs the cycle's tube center at this step
    double barrier_exec = 0.0;  // barrier vs the actual human position
    bool tube_ok = true;        // human within epsilon of the predicted center
    int cycle = 0;
    bool plan_step = false;     // robot moved along a planned edge this step
};

// Per-cycle decision record.
struct CycleLogRecord {
    int index = 0;
    std::string signal;
    int plan_index = 0;
    double cost = 0.0;
    bool fallback = false;
    bool root_only = false;
    std::size_t tree_size = 0;
    double selection_d_min = 0.0;
    bool plan_safe = false;
    std::vector<double> branch_costs;
};

struct SolutionStep {
    std::string signal;
    TimedPlan plan;
};

// Per-trial outcome and metrics.
struct TrialReport {
    std::string map_id;
    std::uint64_t seed = 0;
    std::optional<double> f_priority;
    bool baseline = false;

    Outcome outcome = Outcome::TIMEOUT;
    double r_cost_to_goal = 0.0;  // executed path length, meters
    double h_cost_to_goal = 0.0;
    std::optional<double> rns;
    std::optional<double> hns;
    int pi = 0;
    double pc = 0.0;  // +inf when a barrier went negative, see proximity_cost
    bool human_reached_goal = false;
    double r_time = 0.0;
    double h_time = 0.0;

    int fallback_cycles = 0;
    int wait_cycles = 0;
    int tube_breach_steps = 0;
    int unsafe_plan_steps = 0;           // plan step with negative barrier, tube held
    int unsafe_plan_steps_breached = 0;  // plan step with negative barrier during a breach
    bool rns_anomalous = false;          // normalized speed above 1
    bool hns_anomalous = false;
};

struct EpisodeResult {
    TrialReport report;
    std::vector<SolutionStep> solution;
    std::vector<StepRecord> steps;
    std::vector<CycleLogRecord> cycles;
    Scenario scenario;  // after seed/priority/baseline overrides
    std::uint64_t episode_hash = 0;
};

}  // namespace conav
