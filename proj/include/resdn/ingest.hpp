#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "resdn/net_model.hpp"
#include "resdn/rational.hpp"

namespace resdn {

/// Demands by switch name; ids are resolved against a topology by bind_flows.
struct TrafficMatrix {
    struct Entry {
        std::string source;
        std::string destination;
        Rational rate;  // Mbps, > 0
        int line = 0;
    };
    std::vector<Entry> entries;
    Rational window_s{900};

    [[nodiscard]] Rational total_rate() const;
};

/// Line format: `node <id>`, `link <id> <id> <bandwidth_mbps>`, `#` comments,
/// ids match [A-Za-z0-9_]+. Errors are InputError with the line number.
TopologyDescription parse_topology(std::string_view text);

/// CSV `src,dst,rate_mbps`; optional header, `#` comments, blank lines.
/// Zero-rate entries are dropped. Unknown ids are not checked here.
TrafficMatrix parse_traffic_matrix(std::string_view text);

/// Resolves names; throws InputError naming the line for unknown ids or
/// src == dst.
FlowSet bind_flows(const TrafficMatrix& matrix, const Topology& topology);

/// sum(rate) / sum(directed link capacity).
Rational traffic_volume(const TrafficMatrix& matrix, const Topology& topology);

/// Multiplies every rate by one factor so traffic_volume() == target.
/// Throws std::invalid_argument for an empty matrix or target outside (0, 1].
TrafficMatrix scale_to_volume(const TrafficMatrix& matrix, const Topology& topology, const Rational& target);

std::string read_text_file(const std::filesystem::path& path);
std::string format_topology(const Topology& topology);
std::string format_traffic_matrix(const TrafficMatrix& matrix);

/// Synthetic demand matrix: a flow count drawn uniformly from
/// [min_flows, max_flows] (capped by the number of ordered pairs), distinct
/// ordered switch pairs, log-normal rates with the given mean rounded to
/// 0.01 Mbps. Fully determined by the seed.
struct TrafficGenerator {
    std::size_t min_flows = 82;
    std::size_t max_flows = 462;
    double mean_rate_mbps = 7.79;
    double sigma = 1.0;
};
TrafficMatrix generate_traffic_matrix(const Topology& topology, std::uint64_t seed,
                                      const TrafficGenerator& options = {});

}  // namespace resdn
