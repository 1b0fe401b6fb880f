#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "psh/errors.hpp"

namespace psh {

// Operating configuration of a pumped-storage unit. Exactly these three modes
// exist; staying in a mode is represented by unchanged commitment, not by a
// self-transition.
enum class Mode { AllOff, Gen, Pump };

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::AllOff: return "alloff";
        case Mode::Gen: return "gen";
        case Mode::Pump: return "pump";
    }
    return "?";
}

inline constexpr Mode kAllModes[] = {Mode::AllOff, Mode::Gen, Mode::Pump};

struct PshUnit {
    std::string id;
    std::string reservoir_id;
    double q_gen_min = 0.0;   // MW
    double q_gen_max = 0.0;   // MW
    double q_pump_min = 0.0;  // MW
    double q_pump_max = 0.0;  // MW
    double eta_gen = 1.0;
    double eta_pump = 1.0;
    // Ordered (from, to) pairs; no self pairs. Defaults to all six pairs.
    std::vector<std::pair<Mode, Mode>> feasible_transitions = all_transitions();
    std::map<Mode, int> min_up_hours;  // optional, per mode
    Mode initial_mode = Mode::AllOff;  // mode in the interval preceding t=0

    static std::vector<std::pair<Mode, Mode>> all_transitions() {
        std::vector<std::pair<Mode, Mode>> out;
        for (Mode a : kAllModes)
            for (Mode b : kAllModes)
                if (a != b) out.emplace_back(a, b);
        return out;
    }

    bool transition_feasible(Mode from, Mode to) const {
        for (const auto& [a, b] : feasible_transitions)
            if (a == from && b == to) return true;
        return false;
    }
};

struct Reservoir {
    std::string id;
    double e_min = 0.0;      // MWh
    double e_max = 0.0;      // MWh
    double e_initial = 0.0;  // MWh
    double e_final = 0.0;    // MWh
    std::optional<int> pump_start_limit;  // max units transitioning into Pump per interval
    bool plant_exclusive = false;
};

struct CostSegment {
    double marginal_price = 0.0;  // $/MWh
    double width = 0.0;           // MW
};

struct ThermalUnit {
    std::string id;
    double q_min = 0.0;  // MW
    double q_max = 0.0;  // MW
    std::vector<CostSegment> cost_segments;  // non-decreasing prices, widths sum to q_max - q_min

    // Cost of producing q MW for one hour, q in [q_min, q_max].
    double cost_at(double q) const {
        double rem = q - q_min;
        double cost = 0.0;
        for (const auto& seg : cost_segments) {
            double take = rem < seg.width ? rem : seg.width;
            if (take <= 0.0) break;
            cost += take * seg.marginal_price;
            rem -= take;
        }
        return cost;
    }
};

struct Horizon {
    int n_intervals = 0;
    double dt_hours = 1.0;
    std::vector<double> net_load;  // MW, length n_intervals
};

struct LegacyBid {
    std::string psh_id;
    std::vector<double> gen_offer_price;  // $/MWh, length T
    std::vector<double> pump_bid_price;   // $/MWh, length T
    std::set<int> pump_window;            // interval indices where pumping may be committed
    std::set<int> gen_window;             // interval indices where generating may be committed
    double daily_max_gen = 0.0;           // MWh
};

struct Case {
    std::vector<PshUnit> psh_units;
    std::vector<Reservoir> reservoirs;
    std::vector<ThermalUnit> thermal_units;
    Horizon horizon;
    std::optional<std::vector<LegacyBid>> legacy_bids;
};

struct Violation {
    std::string code;   // DuplicateId, DanglingReference, BoundViolation, EfficiencyOutOfRange
    std::string field;  // offending field, e.g. "reservoirs[upper].e_initial"
    std::string message;
};

// Pure structural check; returns every violation found.
std::vector<Violation> check_case(const Case& c);

// A Case that passed validation, with resolved index lookups. Immutable.
class ValidatedCase {
public:
    const Case& data() const { return case_; }
    const Horizon& horizon() const { return case_.horizon; }
    const std::vector<PshUnit>& psh_units() const { return case_.psh_units; }
    const std::vector<Reservoir>& reservoirs() const { return case_.reservoirs; }
    const std::vector<ThermalUnit>& thermal_units() const { return case_.thermal_units; }

    int reservoir_index(const std::string& id) const { return reservoir_index_.at(id); }
    int psh_index(const std::string& id) const { return psh_index_.at(id); }
    // Units sharing reservoir r (indices into psh_units).
    const std::vector<int>& units_of_reservoir(int r) const { return units_of_reservoir_[r]; }
    const LegacyBid* legacy_bid_for(const std::string& psh_id) const;

private:
    friend ValidatedCase validate_case(const Case&);
    Case case_;
    std::map<std::string, int> reservoir_index_;
    std::map<std::string, int> psh_index_;
    std::vector<std::vector<int>> units_of_reservoir_;
};

// Throws an Error carrying the first violation's code and listing all
// violations in the message if any check fails.
ValidatedCase validate_case(const Case& c);

}  // namespace psh
