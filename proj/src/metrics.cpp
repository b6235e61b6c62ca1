#include "resdn/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace resdn {

std::vector<LinkClass> classify_links(const UtilityMap& utilities, const Topology& topology,
                                      const UtilityInterval& interval) {
    std::vector<LinkClass> out;
    for (std::uint32_t l = 0; l < topology.link_count(); ++l) {
        LinkId id{l};
        if (!topology.link_active(id)) continue;
        Rational u = utilities.link_utility(id);
        out.push_back({id, u, interval.contains(u)});
    }
    return out;
}

Rational resdn(const UtilityMap& utilities, const Topology& topology, const UtilityInterval& interval) {
    std::int64_t active = 0;
    std::int64_t inside = 0;
    for (const auto& c : classify_links(utilities, topology, interval)) {
        ++active;
        if (c.in_interval) ++inside;
    }
    if (active == 0) return Rational(1);
    return Rational(inside, active);
}

Rational links_saved(const Topology& topology) {
    if (topology.link_count() == 0) throw std::invalid_argument("empty topology");
    auto total = static_cast<std::int64_t>(topology.link_count());
    auto active = static_cast<std::int64_t>(topology.active_link_count());
    return Rational(100) * (Rational(1) - Rational(active, total));
}

Rational avg_path_length(const RoutingState& state) {
    if (state.flow_count() == 0) throw std::invalid_argument("no flows");
    std::int64_t hops = 0;
    for (const auto& a : state.assignments()) hops += static_cast<std::int64_t>(a.path.hops());
    return Rational(hops, static_cast<std::int64_t>(state.flow_count()));
}

Rational traffic_proportionality(const Rational& traffic_volume, const Topology& topology, const Rational& m,
                                 const Rational& n) {
    if (!m.is_positive() || !n.is_positive()) throw std::invalid_argument("weights m and n must be positive");
    if (traffic_volume.is_negative() || traffic_volume > Rational(1))
        throw std::invalid_argument("traffic volume outside [0, 1]");
    if (topology.switch_count() == 0 || topology.link_count() == 0)
        throw std::invalid_argument("need at least one switch and one link");
    Rational switches(static_cast<std::int64_t>(topology.active_switch_count()),
                      static_cast<std::int64_t>(topology.switch_count()));
    Rational links(static_cast<std::int64_t>(topology.active_link_count()),
                   static_cast<std::int64_t>(topology.link_count()));
    Rational denominator = m * switches + n * links;
    if (traffic_volume.is_zero()) return Rational(0);
    if (denominator.is_zero()) throw std::invalid_argument("inconsistent state: traffic on an all-inactive network");
    return traffic_volume / denominator * (m + n);
}

std::string format_decimal(double value, int digits) {
    if (value == 0.0) value = 0.0;  // drop negative zero
    std::string s = fmt::format("{:.{}f}", value, digits);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

std::string metrics_csv_header() {
    return "matrix,heuristic,provenance,volume,u_min,u_max,hop_slack,max_hops,max_paths,flows,fallback_flows,"
           "resdn,links_saved_pct,avg_path_length,traffic_proportionality,active_switches,active_links,"
           "profile,total_power_w,avg_power_active_w,avg_power_all_w,status";
}

std::string metrics_csv_row(const MetricsReport& r) {
    bool ok = r.status == "ok";
    auto metric = [&](const Rational& v) { return ok ? format_decimal(v.to_double()) : std::string(); };
    std::string status = r.status;
    for (char& c : status) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", r.matrix_index, r.heuristic,
        r.provenance, format_decimal(r.volume.to_double()), format_decimal(r.interval.u_min().to_double()),
        format_decimal(r.interval.u_max().to_double()), r.bounds.slack,
        r.bounds.max_hops ? fmt::format("{}", *r.bounds.max_hops) : std::string(), r.bounds.max_paths, r.flows,
        r.fallback_flows, metric(r.resdn), metric(r.links_saved_pct), metric(r.avg_path_length),
        metric(r.traffic_proportionality), ok ? fmt::format("{}", r.active_switches) : std::string(),
        ok ? fmt::format("{}", r.active_links) : std::string(), r.power_profile,
        ok ? format_decimal(r.total_power_w) : std::string(), ok ? format_decimal(r.avg_power_active_w) : std::string(),
        ok ? format_decimal(r.avg_power_all_w) : std::string(), status);
}

}  // namespace resdn
