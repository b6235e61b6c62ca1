#pragma once

#include <string>
#include <vector>

#include "resdn/net_model.hpp"
#include "resdn/rational.hpp"

namespace resdn {

/// Per active link: its utility (max of both directions) and whether it
/// lies inside the interval. Inactive links are omitted.
struct LinkClass {
    LinkId link;
    Rational utility;
    bool in_interval = false;
};

std::vector<LinkClass> classify_links(const UtilityMap& utilities, const Topology& topology,
                                      const UtilityInterval& interval);

/// In-interval active links over active links; 1 when no link is active.
Rational resdn(const UtilityMap& utilities, const Topology& topology, const UtilityInterval& interval);
inline Rational resdn(const RoutingState& state, const Topology& topology, const UtilityInterval& interval) {
    return resdn(state.utilities(), topology, interval);
}

/// 100 * (1 - active links / |E|). Throws std::invalid_argument("empty topology").
Rational links_saved(const Topology& topology);

/// Mean hop count. Throws std::invalid_argument("no flows") when empty.
Rational avg_path_length(const RoutingState& state);

/// (volume / (m * active_switches/|Z| + n * active_links/|E|)) * (m + n).
/// Throws std::invalid_argument on an inconsistent (all-off, positive
/// volume) state or invalid weights.
Rational traffic_proportionality(const Rational& traffic_volume, const Topology& topology, const Rational& m,
                                 const Rational& n);

/// One result row. Rationals are kept exact and converted when written.
struct MetricsReport {
    std::string heuristic;
    std::string provenance;
    std::size_t matrix_index = 0;
    Rational volume;
    UtilityInterval interval;
    PathBounds bounds;
    std::size_t flows = 0;
    std::size_t fallback_flows = 0;
    Rational resdn;
    Rational links_saved_pct;
    Rational avg_path_length;
    Rational traffic_proportionality;
    std::size_t active_switches = 0;
    std::size_t active_links = 0;
    std::string power_profile;
    double total_power_w = 0.0;
    double avg_power_active_w = 0.0;
    double avg_power_all_w = 0.0;
    std::string status = "ok";  // or the diagnostic of a failed cell
};

/// Stable column order of MetricsReport rows.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& report);

/// Fixed-format decimal used for every floating value written to CSV.
std::string format_decimal(double value, int digits = 6);

}  // namespace resdn
