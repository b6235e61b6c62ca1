#include "resdn/power.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>
#include "json.hpp"

#include "resdn/ingest.hpp"

namespace resdn {
namespace {

constexpr double kMicro = 1e-6;

}  // namespace

const SwitchPowerProfile& nec_pf5240_profile() {
    static const SwitchPowerProfile profile{"nec", 118.33, 0.52, 711.30, 29.25};
    return profile;
}

const SwitchPowerProfile& ovs_profile() {
    static const SwitchPowerProfile profile{"ovs", 48.7397, std::nullopt, 775.53, 356.743};
    return profile;
}

const SwitchPowerProfile& zodiac_fx_profile() {
    static const SwitchPowerProfile profile{"zodiac", 15.0, 0.15, 775.53, 1455.13};
    return profile;
}

const SwitchPowerProfile& builtin_profile(std::string_view name) {
    if (name == "nec") return nec_pf5240_profile();
    if (name == "ovs") return ovs_profile();
    if (name == "zodiac") return zodiac_fx_profile();
    throw std::invalid_argument(fmt::format("unknown power profile '{}' (expected nec|ovs|zodiac)", name));
}

SwitchPowerProfile parse_profile(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(fmt::format("profile: {}", e.what()));
    }
    if (!j.is_object()) throw std::invalid_argument("profile: expected a JSON object");
    auto number = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_number())
            throw std::invalid_argument(fmt::format("profile: '{}' must be a number", key));
        double v = j[key].get<double>();
        if (v < 0) throw std::invalid_argument(fmt::format("profile: '{}' must be >= 0", key));
        return v;
    };
    SwitchPowerProfile p;
    if (!j.contains("name") || !j["name"].is_string()) throw std::invalid_argument("profile: 'name' must be a string");
    p.name = j["name"].get<std::string>();
    p.base_w = number("base_w");
    if (j.contains("port_w") && !j["port_w"].is_null()) p.port_w = number("port_w");
    p.e_packet_in_uw = number("e_packet_in_uw");
    p.e_flow_mod_uw = number("e_flow_mod_uw");
    return p;
}

SwitchPowerProfile load_profile(const std::filesystem::path& path) { return parse_profile(read_text_file(path)); }

double p_config(const SwitchPowerProfile& profile, std::span<const double> loads) {
    if (!profile.port_w) return 0.0;
    double total = 0.0;
    for (double c : loads) total += c * *profile.port_w;
    return total;
}

double p_control(const SwitchPowerProfile& profile, const ControlRates& rates) {
    return rates.packet_in_per_s * profile.e_packet_in_uw * kMicro + rates.flow_mod_per_s * profile.e_flow_mod_uw * kMicro;
}

double switch_power(const SwitchPowerProfile& profile, std::span<const double> loads, const ControlRates& rates) {
    return profile.base_w + p_config(profile, loads) + p_control(profile, rates);
}

PortLoadVector derive_port_loads(const Topology& topology, const RoutingState& state, SwitchId id) {
    PortLoadVector loads;
    if (!topology.switch_active(id)) return loads;
    for (const auto& n : topology.neighbors(id)) {
        if (!topology.link_active(n.link)) continue;
        loads.push_back(std::min(1.0, state.utilities().link_utility(n.link).to_double()));
    }
    return loads;
}

std::vector<ControlRates> derive_control_rates(const RoutingState& state, std::size_t switch_count,
                                               double window_s) {
    if (!(window_s > 0)) throw std::invalid_argument("window must be positive");
    std::vector<double> packet_in(switch_count, 0.0);
    std::vector<double> flow_mod(switch_count, 0.0);
    for (const auto& a : state.assignments()) {
        packet_in.at(a.path.source().value) += 1.0;
        for (SwitchId s : a.path.nodes()) flow_mod.at(s.value) += 1.0;
    }
    std::vector<ControlRates> rates(switch_count);
    for (std::size_t s = 0; s < switch_count; ++s) rates[s] = {packet_in[s] / window_s, flow_mod[s] / window_s};
    return rates;
}

NetworkPowerReport network_power_report(const Topology& topology, const RoutingState& state,
                                        const SwitchPowerProfile& profile, double window_s) {
    NetworkPowerReport report;
    report.per_switch_w.assign(topology.switch_count(), 0.0);
    auto rates = derive_control_rates(state, topology.switch_count(), window_s);
    std::size_t active = 0;
    for (std::uint32_t s = 0; s < topology.switch_count(); ++s) {
        SwitchId id{s};
        if (!topology.switch_active(id)) continue;
        ++active;
        auto loads = derive_port_loads(topology, state, id);
        report.per_switch_w[s] = switch_power(profile, loads, rates[s]);
        report.total_w += report.per_switch_w[s];
    }
    report.no_active_switches = active == 0;
    report.average_active_w = active == 0 ? 0.0 : report.total_w / static_cast<double>(active);
    report.average_all_w =
        topology.switch_count() == 0 ? 0.0 : report.total_w / static_cast<double>(topology.switch_count());
    return report;
}

}  // namespace resdn
