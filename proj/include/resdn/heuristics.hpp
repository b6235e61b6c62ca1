#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "resdn/net_model.hpp"
#include "resdn/rational.hpp"

namespace resdn {

/// Result of a routing strategy.
///
/// Every input flow has exactly one path. `topology` is the network after
/// idle links and switches were switched off. Paths of flows flagged in
/// `fallback` may violate u_max (and possibly capacity); all others
/// respect the strategy's guard.
struct HeuristicOutcome {
    std::string name;
    std::string provenance;
    RoutingState state;
    Topology topology;
    std::vector<std::uint8_t> fallback;  // per assignment
    std::size_t candidate_links = 0;     // NSP/NMU: under-utilized links considered
    std::size_t rerouted_links = 0;      // NSP/NMU: candidates whose flows moved
    std::vector<Rational> resdn_trace;   // MaxRESDN: RESDN after each flow

    [[nodiscard]] std::size_t fallback_count() const;
};

/// Memoized enumerate_paths over one fixed topology.
class PathCache {
public:
    PathCache(const Topology& topology, PathBounds bounds) : topology_(&topology), bounds_(bounds) {}
    const std::vector<Path>& get(SwitchId source, SwitchId destination);
    [[nodiscard]] const PathBounds& bounds() const { return bounds_; }

private:
    const Topology* topology_;
    PathBounds bounds_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<Path>> paths_;
};

/// Throws InputError/std::invalid_argument for flows that do not fit the
/// topology (unknown endpoints, src == dst, non-positive rate).
void check_flows(const Topology& topology, const FlowSet& flows);

struct PathChoice {
    Path path;
    bool fallback = false;
};

/// Candidates whose links would exceed u_max after adding the flow are
/// dropped; among the rest the path with the highest RESDN of the network
/// that would remain switched on (links carrying flow) wins. Ties go to
/// the path waking fewer idle links, then fewer hops, then lower node ids. Without survivors the path with the
/// smallest resulting maximum link utility is returned, flagged.
/// Throws std::runtime_error("disconnected") when no path exists.
PathChoice path_max_resdn(const RoutingState& state, const Topology& topology, const Flow& flow,
                          const UtilityInterval& interval, const PathBounds& bounds);
PathChoice path_max_resdn(const RoutingState& state, const Topology& topology, const Flow& flow,
                          const UtilityInterval& interval, PathCache& cache);

/// Routes flows in input order with path_max_resdn, then switches idle
/// links and switches off.
HeuristicOutcome max_resdn(const Topology& topology, const FlowSet& flows, const UtilityInterval& interval,
                           const PathBounds& bounds);

/// Every flow on its first candidate path that fits link capacity.
HeuristicOutcome shortest_path_routing(const Topology& topology, const FlowSet& flows, const PathBounds& bounds);

enum class RerouteRule { kNextShortest, kMaxUtility };

/// Empties under-utilized links (0 < U < u_min) by detouring their flows
/// over active links. Applied on top of an existing outcome.
HeuristicOutcome reroute_underutilized(const HeuristicOutcome& base, const UtilityInterval& interval,
                                       const PathBounds& bounds, RerouteRule rule);

/// NSP and NMU starting from shortest-path routing.
HeuristicOutcome nsp(const Topology& topology, const FlowSet& flows, const UtilityInterval& interval,
                     const PathBounds& bounds);
HeuristicOutcome nmu(const Topology& topology, const FlowSet& flows, const UtilityInterval& interval,
                     const PathBounds& bounds);

enum class FlowOrdering { kShortestPathFirst, kShortestPathLast, kSmallestDemandFirst, kHighestDemandFirst };

std::string_view ordering_name(FlowOrdering ordering);  // "SPF", ...

/// Indices of `flows` in processing order (stable for ties).
std::vector<std::size_t> ordering_sequence(const Topology& topology, const FlowSet& flows, FlowOrdering ordering,
                                           const PathBounds& bounds);

/// Flows in the given order each take the capacity-feasible candidate that
/// switches on the fewest new components, weighting switches 3 and links 1.
HeuristicOutcome ordered_greedy(const Topology& topology, const FlowSet& flows, FlowOrdering ordering,
                                const PathBounds& bounds);

/// Best of the four ordered variants, alone and followed by NSP or NMU, by
/// links saved, then RESDN, then the fixed order SPF, SPF+NSP, SPF+NMU,
/// SPL, ... HDF+NMU. `provenance` names the winner.
HeuristicOutcome best_combination(const Topology& topology, const FlowSet& flows, const UtilityInterval& interval,
                                  const PathBounds& bounds);

/// All twelve candidates considered by best_combination, in fixed order.
std::vector<HeuristicOutcome> combination_candidates(const Topology& topology, const FlowSet& flows,
                                                     const UtilityInterval& interval, const PathBounds& bounds);

/// maxresdn | nsp | nmu | spf | spl | sdf | hdf | b
const std::vector<std::string>& heuristic_names();
HeuristicOutcome run_heuristic(std::string_view name, const Topology& topology, const FlowSet& flows,
                               const UtilityInterval& interval, const PathBounds& bounds);

}  // namespace resdn
