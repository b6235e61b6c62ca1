#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "resdn/net_model.hpp"

namespace resdn {

/// Switch power constants: P_base and P_port in watts, control-message
/// energies in microwatts per packet.
struct SwitchPowerProfile {
    std::string name;
    double base_w = 0.0;
    /// Per port at full line speed; empty when the vendor gives no value
    /// (the port term is then 0).
    std::optional<double> port_w;
    double e_packet_in_uw = 0.0;
    double e_flow_mod_uw = 0.0;
};

/// NEC PF 5240, Open vSwitch and Zodiac FX measurements.
const SwitchPowerProfile& nec_pf5240_profile();
const SwitchPowerProfile& ovs_profile();
const SwitchPowerProfile& zodiac_fx_profile();

/// "nec", "ovs" or "zodiac"; throws std::invalid_argument otherwise.
const SwitchPowerProfile& builtin_profile(std::string_view name);

/// JSON object {"name", "base_w", "port_w" (number or null),
/// "e_packet_in_uw", "e_flow_mod_uw"}. Throws on missing or negative values.
SwitchPowerProfile load_profile(const std::filesystem::path& path);
SwitchPowerProfile parse_profile(std::string_view json_text);

/// One c_i in [0, 1] per active port.
using PortLoadVector = std::vector<double>;

struct ControlRates {
    double packet_in_per_s = 0.0;
    double flow_mod_per_s = 0.0;
};

double p_config(const SwitchPowerProfile& profile, std::span<const double> loads);
double p_control(const SwitchPowerProfile& profile, const ControlRates& rates);
/// P_base + P_config + P_control for an active switch.
double switch_power(const SwitchPowerProfile& profile, std::span<const double> loads, const ControlRates& rates);

/// c_i = max directed utility of each active incident link (clamped to 1).
/// Empty for an inactive switch.
PortLoadVector derive_port_loads(const Topology& topology, const RoutingState& state, SwitchId id);

/// PacketIn at the ingress switch of each flow, FlowMod at every switch on
/// its path, both averaged over the window. Indexed by switch id.
std::vector<ControlRates> derive_control_rates(const RoutingState& state, std::size_t switch_count,
                                               double window_s);

struct NetworkPowerReport {
    std::vector<double> per_switch_w;  // 0 for inactive switches
    double total_w = 0.0;
    double average_active_w = 0.0;
    double average_all_w = 0.0;
    bool no_active_switches = false;
};

NetworkPowerReport network_power_report(const Topology& topology, const RoutingState& state,
                                        const SwitchPowerProfile& profile, double window_s);

}  // namespace resdn
