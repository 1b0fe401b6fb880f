#include "psh/types.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace psh {

namespace {

bool finite(double x) { return std::isfinite(x); }

void check_unique_ids(const Case& c, std::vector<Violation>& out) {
    std::set<std::string> seen;
    auto add = [&](const std::string& id, const std::string& field) {
        if (!seen.insert(id).second)
            out.push_back({"DuplicateId", field, "id '" + id + "' is not unique"});
    };
    for (const auto& u : c.psh_units) add(u.id, "psh_units.id");
    for (const auto& r : c.reservoirs) add(r.id, "reservoirs.id");
    for (const auto& t : c.thermal_units) add(t.id, "thermal_units.id");
}

}  // namespace

std::vector<Violation> check_case(const Case& c) {
    std::vector<Violation> v;
    check_unique_ids(c, v);

    std::set<std::string> reservoir_ids, psh_ids;
    for (const auto& r : c.reservoirs) reservoir_ids.insert(r.id);
    for (const auto& u : c.psh_units) psh_ids.insert(u.id);

    for (const auto& u : c.psh_units) {
        const std::string p = "psh_units[" + u.id + "].";
        if (!reservoir_ids.count(u.reservoir_id))
            v.push_back({"DanglingReference", p + "reservoir_id",
                         "references unknown reservoir '" + u.reservoir_id + "'"});
        if (!(u.eta_gen > 0.0 && u.eta_gen <= 1.0))
            v.push_back({"EfficiencyOutOfRange", p + "eta_gen", "eta_gen must be in (0,1]"});
        if (!(u.eta_pump > 0.0 && u.eta_pump <= 1.0))
            v.push_back({"EfficiencyOutOfRange", p + "eta_pump", "eta_pump must be in (0,1]"});
        if (!(0.0 <= u.q_gen_min && u.q_gen_min <= u.q_gen_max))
            v.push_back({"BoundViolation", p + "q_gen_min", "need 0 <= q_gen_min <= q_gen_max"});
        if (!(0.0 <= u.q_pump_min && u.q_pump_min <= u.q_pump_max))
            v.push_back({"BoundViolation", p + "q_pump_min", "need 0 <= q_pump_min <= q_pump_max"});
        for (const auto& [a, b] : u.feasible_transitions)
            if (a == b)
                v.push_back({"BoundViolation", p + "feasible_transitions",
                             "self transition (" + std::string(to_string(a)) + "," +
                                 to_string(b) + ") not allowed"});
        for (const auto& [m, hours] : u.min_up_hours)
            if (hours < 1)
                v.push_back({"BoundViolation", p + "min_up_hours",
                             std::string("min up for ") + to_string(m) + " must be >= 1"});
    }

    for (const auto& r : c.reservoirs) {
        const std::string p = "reservoirs[" + r.id + "].";
        if (!(r.e_min <= r.e_initial && r.e_initial <= r.e_max))
            v.push_back({"BoundViolation", p + "e_initial",
                         "e_initial must lie in [e_min, e_max]"});
        if (!(r.e_min <= r.e_final && r.e_final <= r.e_max))
            v.push_back({"BoundViolation", p + "e_final", "e_final must lie in [e_min, e_max]"});
        if (r.pump_start_limit && *r.pump_start_limit < 1)
            v.push_back({"BoundViolation", p + "pump_start_limit", "must be a positive integer"});
    }

    for (const auto& t : c.thermal_units) {
        const std::string p = "thermal_units[" + t.id + "].";
        if (!(0.0 <= t.q_min && t.q_min <= t.q_max))
            v.push_back({"BoundViolation", p + "q_min", "need 0 <= q_min <= q_max"});
        double width_sum = 0.0;
        double prev_price = -1e300;
        for (const auto& seg : t.cost_segments) {
            if (seg.marginal_price < prev_price)
                v.push_back({"BoundViolation", p + "cost_segments",
                             "segment marginal prices must be non-decreasing"});
            if (seg.width < 0.0)
                v.push_back({"BoundViolation", p + "cost_segments", "segment width must be >= 0"});
            prev_price = seg.marginal_price;
            width_sum += seg.width;
        }
        if (std::abs(width_sum - (t.q_max - t.q_min)) > 1e-9 * (1.0 + t.q_max))
            v.push_back({"BoundViolation", p + "cost_segments",
                         "segment widths must sum to q_max - q_min"});
    }

    const Horizon& h = c.horizon;
    if (h.n_intervals < 1)
        v.push_back({"BoundViolation", "horizon.n_intervals", "need n_intervals >= 1"});
    if (!(h.dt_hours > 0.0))
        v.push_back({"BoundViolation", "horizon.dt_hours", "need dt_hours > 0"});
    if ((int)h.net_load.size() != h.n_intervals)
        v.push_back({"BoundViolation", "horizon.net_load",
                     "net_load length must equal n_intervals"});
    for (double d : h.net_load)
        if (!finite(d)) {
            v.push_back({"BoundViolation", "horizon.net_load", "net_load values must be finite"});
            break;
        }

    if (c.legacy_bids) {
        std::set<std::string> bid_ids;
        for (const auto& b : *c.legacy_bids) {
            const std::string p = "legacy_bids[" + b.psh_id + "].";
            if (!psh_ids.count(b.psh_id))
                v.push_back({"DanglingReference", p + "psh_id",
                             "references unknown PSH unit '" + b.psh_id + "'"});
            if (!bid_ids.insert(b.psh_id).second)
                v.push_back({"DuplicateId", p + "psh_id", "duplicate legacy bid"});
            for (int t : b.pump_window)
                if (b.gen_window.count(t)) {
                    v.push_back({"BoundViolation", p + "pump_window",
                                 "pump_window and gen_window must be disjoint"});
                    break;
                }
            for (int t : b.pump_window)
                if (t < 0 || t >= h.n_intervals)
                    v.push_back({"BoundViolation", p + "pump_window", "interval out of horizon"});
            for (int t : b.gen_window)
                if (t < 0 || t >= h.n_intervals)
                    v.push_back({"BoundViolation", p + "gen_window", "interval out of horizon"});
            if (b.daily_max_gen < 0.0)
                v.push_back({"BoundViolation", p + "daily_max_gen", "must be >= 0"});
            if ((int)b.gen_offer_price.size() != h.n_intervals)
                v.push_back({"BoundViolation", p + "gen_offer_price", "length must equal T"});
            if ((int)b.pump_bid_price.size() != h.n_intervals)
                v.push_back({"BoundViolation", p + "pump_bid_price", "length must equal T"});
        }
    }

    return v;
}

const LegacyBid* ValidatedCase::legacy_bid_for(const std::string& psh_id) const {
    if (!case_.legacy_bids) return nullptr;
    for (const auto& b : *case_.legacy_bids)
        if (b.psh_id == psh_id) return &b;
    return nullptr;
}

ValidatedCase validate_case(const Case& c) {
    auto violations = check_case(c);
    if (!violations.empty()) {
        std::ostringstream oss;
        oss << violations.size() << " violation(s):";
        for (const auto& v : violations)
            oss << "\n  [" << v.code << "] " << v.field << ": " << v.message;
        throw make_error(violations.front().code, oss.str());
    }
    ValidatedCase vc;
    vc.case_ = c;
    for (int i = 0; i < (int)c.reservoirs.size(); ++i)
        vc.reservoir_index_[c.reservoirs[i].id] = i;
    for (int i = 0; i < (int)c.psh_units.size(); ++i)
        vc.psh_index_[c.psh_units[i].id] = i;
    vc.units_of_reservoir_.resize(c.reservoirs.size());
    for (int i = 0; i < (int)c.psh_units.size(); ++i)
        vc.units_of_reservoir_[vc.reservoir_index_.at(c.psh_units[i].reservoir_id)].push_back(i);
    return vc;
}

}  // namespace psh
