#include "resdn/heuristics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "resdn/metrics.hpp"

namespace resdn {
namespace {

/// Active and in-interval link counts of the network that would stay on:
/// topology-active links carrying flow in at least one direction.
struct LinkCounts {
    std::int64_t active = 0;
    std::int64_t inside = 0;

    [[nodiscard]] Rational ratio() const { return active == 0 ? Rational(1) : Rational(inside, active); }
};

LinkCounts count_loaded_links(const UtilityMap& utilities, const Topology& topology, const UtilityInterval& interval) {
    LinkCounts counts;
    for (std::uint32_t l = 0; l < topology.link_count(); ++l) {
        LinkId id{l};
        if (!topology.link_active(id)) continue;
        Rational u = utilities.link_utility(id);
        if (!u.is_positive()) continue;
        ++counts.active;
        if (interval.contains(u)) ++counts.inside;
    }
    return counts;
}

Rational added_utility(const Topology& topology, const Flow& flow, DirectedLink d) {
    return flow.rate / topology.bandwidth(d);
}

/// Largest directed utility on the path after adding the flow.
Rational peak_after(const UtilityMap& utilities, const Topology& topology, const Flow& flow, const Path& path) {
    Rational peak;
    for (const auto& d : path.links()) peak = std::max(peak, utilities.at(d) + added_utility(topology, flow, d));
    return peak;
}

bool fits_under(const UtilityMap& utilities, const Topology& topology, const Flow& flow, const Path& path,
                const Rational& limit) {
    return std::all_of(path.links().begin(), path.links().end(), [&](const DirectedLink& d) {
        return utilities.at(d) + added_utility(topology, flow, d) <= limit;
    });
}

/// First path (in candidate order) minimizing the resulting peak utility.
const Path& least_loaded(const std::vector<Path>& candidates, const UtilityMap& utilities, const Topology& topology,
                         const Flow& flow) {
    const Path* best = &candidates.front();
    Rational best_peak = peak_after(utilities, topology, flow, *best);
    for (const auto& p : candidates) {
        Rational peak = peak_after(utilities, topology, flow, p);
        if (peak < best_peak) {
            best = &p;
            best_peak = peak;
        }
    }
    return *best;
}

LinkCounts counts_with(LinkCounts counts, const UtilityMap& utilities, const Topology& topology, const Flow& flow,
                       const Path& path, const UtilityInterval& interval) {
    for (const auto& d : path.links()) {
        Rational forward = utilities.at(DirectedLink{d.link, Direction::kForward});
        Rational reverse = utilities.at(DirectedLink{d.link, Direction::kReverse});
        Rational before = std::max(forward, reverse);
        if (before.is_positive()) {
            --counts.active;
            if (interval.contains(before)) --counts.inside;
        }
        Rational delta = added_utility(topology, flow, d);
        if (d.direction == Direction::kForward)
            forward += delta;
        else
            reverse += delta;
        Rational after = std::max(forward, reverse);
        ++counts.active;
        if (interval.contains(after)) ++counts.inside;
    }
    return counts;
}

std::size_t idle_links_on(const UtilityMap& utilities, const Path& path) {
    return static_cast<std::size_t>(std::count_if(path.links().begin(), path.links().end(),
                                                  [&](const DirectedLink& d) { return utilities.idle(d.link); }));
}

const std::vector<Path>& candidates_or_throw(PathCache& cache, const Topology& topology, const Flow& flow) {
    const auto& candidates = cache.get(flow.source, flow.destination);
    if (candidates.empty())
        throw std::runtime_error(fmt::format("disconnected: no path from {} to {}", topology.name(flow.source),
                                             topology.name(flow.destination)));
    return candidates;
}

HeuristicOutcome finish(std::string name, const Topology& topology, RoutingState state,
                        std::vector<std::uint8_t> fallback) {
    HeuristicOutcome outcome;
    outcome.name = std::move(name);
    outcome.topology = prune_idle(state, topology);
    outcome.state = std::move(state);
    outcome.fallback = std::move(fallback);
    return outcome;
}

/// Replaces the crossing of `link` in `path` by the detour (given from
/// link.a to link.b), then short-cuts any loop the splice created.
std::vector<SwitchId> splice_detour(const Topology& topology, const Path& path, LinkId link,
                                    const std::vector<SwitchId>& detour_a_to_b) {
    const auto& nodes = path.nodes();
    std::size_t k = 0;
    while (k < path.links().size() && path.links()[k].link != link) ++k;
    if (k == path.links().size()) throw std::logic_error("splice_detour: path does not cross link");

    std::vector<SwitchId> detour = detour_a_to_b;
    if (path.links()[k].direction == Direction::kReverse) std::reverse(detour.begin(), detour.end());

    std::vector<SwitchId> spliced(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(k));
    spliced.insert(spliced.end(), detour.begin(), detour.end());
    spliced.insert(spliced.end(), nodes.begin() + static_cast<std::ptrdiff_t>(k) + 2, nodes.end());

    std::vector<SwitchId> simple;
    std::vector<int> position(topology.switch_count(), -1);
    for (SwitchId v : spliced) {
        if (position[v.value] >= 0) {
            auto keep = static_cast<std::size_t>(position[v.value]) + 1;
            for (std::size_t i = keep; i < simple.size(); ++i) position[simple[i].value] = -1;
            simple.resize(keep);
        } else {
            position[v.value] = static_cast<int>(simple.size());
            simple.push_back(v);
        }
    }
    return simple;
}

}  // namespace

std::size_t HeuristicOutcome::fallback_count() const {
    return static_cast<std::size_t>(std::count(fallback.begin(), fallback.end(), std::uint8_t{1}));
}

const std::vector<Path>& PathCache::get(SwitchId source, SwitchId destination) {
    auto key = std::make_pair(source.value, destination.value);
    auto it = paths_.find(key);
    if (it == paths_.end()) it = paths_.emplace(key, enumerate_paths(*topology_, source, destination, bounds_)).first;
    return it->second;
}

void check_flows(const Topology& topology, const FlowSet& flows) {
    for (std::size_t i = 0; i < flows.size(); ++i) {
        try {
            validate_flow(topology, flows[i]);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(fmt::format("flow {}: {}", i, e.what()));
        }
    }
}

PathChoice path_max_resdn(const RoutingState& state, const Topology& topology, const Flow& flow,
                          const UtilityInterval& interval, PathCache& cache) {
    const auto& candidates = candidates_or_throw(cache, topology, flow);
    const UtilityMap& utilities = state.utilities();
    LinkCounts base = count_loaded_links(utilities, topology, interval);

    const Path* best = nullptr;
    Rational best_ratio;
    std::size_t best_new_links = 0;
    for (const auto& p : candidates) {
        if (!fits_under(utilities, topology, flow, p, interval.u_max())) continue;
        Rational ratio = counts_with(base, utilities, topology, flow, p, interval).ratio();
        std::size_t new_links = idle_links_on(utilities, p);
        // Candidates come sorted by hops then node ids, so strict comparisons
        // keep the remaining tie-break.
        if (best == nullptr || ratio > best_ratio || (ratio == best_ratio && new_links < best_new_links)) {
            best = &p;
            best_ratio = ratio;
            best_new_links = new_links;
        }
    }
    if (best != nullptr) return {*best, false};
    return {least_loaded(candidates, utilities, topology, flow), true};
}

PathChoice path_max_resdn(const RoutingState& state, const Topology& topology, const Flow& flow,
                          const UtilityInterval& interval, const PathBounds& bounds) {
    PathCache cache(topology, bounds);
    return path_max_resdn(state, topology, flow, interval, cache);
}

HeuristicOutcome max_resdn(const Topology& topology, const FlowSet& flows, const UtilityInterval& interval,
                           const PathBounds& bounds) {
    check_flows(topology, flows);
    PathCache cache(topology, bounds);
    RoutingState state(topology);
    std::vector<std::uint8_t> fallback;
    std::vector<Rational> trace;
    for (const auto& flow : flows) {
        PathChoice choice = path_max_resdn(state, topology, flow, interval, cache);
        state.add(topology, flow, std::move(choice.path));
        fallback.push_back(choice.fallback ? 1 : 0);
        trace.push_back(count_loaded_links(state.utilities(), topology, interval).ratio());
    }
    HeuristicOutcome outcome = finish("maxresdn", topology, std::move(state), std::move(fallback));
    outcome.provenance = "MaxRESDN";
    outcome.resdn_trace = std::move(trace);
    return outcome;
}

HeuristicOutcome shortest_path_routing(const Topology& topology, const FlowSet& flows, const PathBounds& bounds) {
    check_flows(topology, flows);
    PathCache cache(topology, bounds);
    RoutingState state(topology);
    std::vector<std::uint8_t> fallback;
    for (const auto& flow : flows) {
        const auto& candidates = candidates_or_throw(cache, topology, flow);
        auto it = std::find_if(candidates.begin(), candidates.end(), [&](const Path& p) {
            return fits_under(state.utilities(), topology, flow, p, Rational(1));
        });
        bool flagged = it == candidates.end();
        const Path& chosen = flagged ? least_loaded(candidates, state.utilities(), topology, flow) : *it;
        state.add(topology, flow, chosen);
        fallback.push_back(flagged ? 1 : 0);
    }
    auto outcome = finish("shortest", topology, std::move(state), std::move(fallback));
    outcome.provenance = "SP";
    return outcome;
}

HeuristicOutcome reroute_underutilized(const HeuristicOutcome& base, const UtilityInterval& interval,
                                       const PathBounds& bounds, RerouteRule rule) {
    Topology topology = base.topology;
    RoutingState state = base.state;

    // Candidate list is fixed up front and ordered by endpoint ids.
    std::vector<LinkId> candidates;
    std::vector<std::uint8_t> excluded(topology.link_count(), 0);
    for (std::uint32_t l = 0; l < topology.link_count(); ++l) {
        LinkId id{l};
        if (!topology.link_active(id)) continue;
        Rational u = state.utilities().link_utility(id);
        if (u.is_positive() && u < interval.u_min()) {
            candidates.push_back(id);
            excluded[l] = 1;
        }
    }
    std::sort(candidates.begin(), candidates.end(), [&](LinkId x, LinkId y) {
        const Link& lx = topology.link(x);
        const Link& ly = topology.link(y);
        return std::minmax(lx.a, lx.b) < std::minmax(ly.a, ly.b);
    });

    std::size_t rerouted = 0;
    for (LinkId e : candidates) {
        if (!topology.link_active(e) || state.utilities().idle(e)) continue;
        const Link& link = topology.link(e);

        // Load to move in each direction of e.
        Rational forward_load;
        Rational reverse_load;
        std::vector<std::size_t> crossing;
        for (std::size_t i = 0; i < state.assignments().size(); ++i) {
            const auto& a = state.assignments()[i];
            for (const auto& d : a.path.links()) {
                if (d.link != e) continue;
                crossing.push_back(i);
                (d.direction == Direction::kForward ? forward_load : reverse_load) += a.flow.rate;
            }
        }

        auto detours = enumerate_paths(topology, link.a, link.b, bounds, excluded);
        auto admissible = [&](const Path& p) {
            for (const auto& d : p.links()) {
                if (forward_load.is_positive() &&
                    state.utilities().at(d) + forward_load / topology.bandwidth(d) > interval.u_max())
                    return false;
                DirectedLink r = d.reversed();
                if (reverse_load.is_positive() &&
                    state.utilities().at(r) + reverse_load / topology.bandwidth(r) > interval.u_max())
                    return false;
            }
            return true;
        };

        const Path* chosen = nullptr;
        Rational chosen_peak;
        for (const auto& p : detours) {
            if (!admissible(p)) continue;
            if (rule == RerouteRule::kNextShortest) {
                chosen = &p;
                break;
            }
            Rational peak;
            for (const auto& d : p.links()) peak = std::max(peak, state.utilities().link_utility(d.link));
            if (chosen == nullptr || peak > chosen_peak) {
                chosen = &p;
                chosen_peak = peak;
            }
        }
        if (chosen == nullptr) continue;  // every alternative would exceed u_max

        for (std::size_t i : crossing) {
            const auto& a = state.assignments()[i];
            auto nodes = splice_detour(topology, a.path, e, chosen->nodes());
            state.reroute(topology, i, Path(topology, std::move(nodes)));
        }
        ++rerouted;
        if (state.utilities().idle(e)) topology.set_link_active(e, false);
    }

    HeuristicOutcome outcome;
    outcome.name = base.name;
    outcome.provenance = base.provenance;
    outcome.topology = prune_idle(state, topology);
    outcome.state = std::move(state);
    outcome.fallback = base.fallback;
    outcome.candidate_links = candidates.size();
    outcome.rerouted_links = rerouted;
    return outcome;
}

namespace {

// Shortest paths on the full network: nothing is switched off yet, so
// detours may still use idle links.
HeuristicOutcome shortest_path_start(const Topology& topology, const FlowSet& flows, const PathBounds& bounds) {
    auto base = shortest_path_routing(topology, flows, bounds);
    base.topology = topology;
    return base;
}

}  // namespace

HeuristicOutcome nsp(const Topology& topology, const FlowSet& flows, const UtilityInterval& interval,
                     const PathBounds& bounds) {
    auto outcome = reroute_underutilized(shortest_path_start(topology, flows, bounds), interval, bounds,
                                         RerouteRule::kNextShortest);
    outcome.name = "nsp";
    outcome.provenance = "NSP";
    return outcome;
}

HeuristicOutcome nmu(const Topology& topology, const FlowSet& flows, const UtilityInterval& interval,
                     const PathBounds& bounds) {
    auto outcome = reroute_underutilized(shortest_path_start(topology, flows, bounds), interval, bounds,
                                         RerouteRule::kMaxUtility);
    outcome.name = "nmu";
    outcome.provenance = "NMU";
    return outcome;
}

std::string_view ordering_name(FlowOrdering ordering) {
    switch (ordering) {
        case FlowOrdering::kShortestPathFirst: return "SPF";
        case FlowOrdering::kShortestPathLast: return "SPL";
        case FlowOrdering::kSmallestDemandFirst: return "SDF";
        case FlowOrdering::kHighestDemandFirst: return "HDF";
    }
    return "?";
}

std::vector<std::size_t> ordering_sequence(const Topology& topology, const FlowSet& flows, FlowOrdering ordering,
                                           const PathBounds& bounds) {
    std::vector<std::size_t> order(flows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (ordering == FlowOrdering::kSmallestDemandFirst || ordering == FlowOrdering::kHighestDemandFirst) {
        bool ascending = ordering == FlowOrdering::kSmallestDemandFirst;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return ascending ? flows[x].rate < flows[y].rate : flows[y].rate < flows[x].rate;
        });
        return order;
    }
    PathCache cache(topology, bounds);
    std::vector<std::size_t> hops(flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) hops[i] = candidates_or_throw(cache, topology, flows[i]).front().hops();
    bool ascending = ordering == FlowOrdering::kShortestPathFirst;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return ascending ? hops[x] < hops[y] : hops[y] < hops[x];
    });
    return order;
}

HeuristicOutcome ordered_greedy(const Topology& topology, const FlowSet& flows, FlowOrdering ordering,
                                const PathBounds& bounds) {
    check_flows(topology, flows);
    constexpr std::int64_t kSwitchWeight = 3;
    constexpr std::int64_t kLinkWeight = 1;

    PathCache cache(topology, bounds);
    auto order = ordering_sequence(topology, flows, ordering, bounds);
    RoutingState working(topology);
    std::vector<int> switch_users(topology.switch_count(), 0);
    std::vector<std::optional<Path>> chosen(flows.size());
    std::vector<std::uint8_t> fallback(flows.size(), 0);

    for (std::size_t i : order) {
        const Flow& flow = flows[i];
        const auto& candidates = candidates_or_throw(cache, topology, flow);
        const Path* best = nullptr;
        std::int64_t best_delta = 0;
        for (const auto& p : candidates) {
            if (!fits_under(working.utilities(), topology, flow, p, Rational(1))) continue;
            std::int64_t delta = 0;
            for (SwitchId s : p.nodes())
                if (switch_users[s.value] == 0) delta += kSwitchWeight;
            for (const auto& d : p.links())
                if (working.utilities().idle(d.link)) delta += kLinkWeight;
            if (best == nullptr || delta < best_delta) {
                best = &p;
                best_delta = delta;
            }
        }
        if (best == nullptr) {
            best = &least_loaded(candidates, working.utilities(), topology, flow);
            fallback[i] = 1;
        }
        for (SwitchId s : best->nodes()) ++switch_users[s.value];
        working.add(topology, flow, *best);
        chosen[i] = *best;
    }

    std::vector<Assignment> assignments;
    assignments.reserve(flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) assignments.push_back({flows[i], std::move(*chosen[i])});
    auto outcome = finish(std::string(ordering_name(ordering)), topology, RoutingState(topology, std::move(assignments)),
                          std::move(fallback));
    std::transform(outcome.name.begin(), outcome.name.end(), outcome.name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    outcome.provenance = std::string(ordering_name(ordering));
    return outcome;
}

std::vector<HeuristicOutcome> combination_candidates(const Topology& topology, const FlowSet& flows,
                                                     const UtilityInterval& interval, const PathBounds& bounds) {
    std::vector<HeuristicOutcome> all;
    for (auto ordering : {FlowOrdering::kShortestPathFirst, FlowOrdering::kShortestPathLast,
                          FlowOrdering::kSmallestDemandFirst, FlowOrdering::kHighestDemandFirst}) {
        HeuristicOutcome base = ordered_greedy(topology, flows, ordering, bounds);
        HeuristicOutcome with_nsp = reroute_underutilized(base, interval, bounds, RerouteRule::kNextShortest);
        with_nsp.provenance = base.provenance + "+NSP";
        HeuristicOutcome with_nmu = reroute_underutilized(base, interval, bounds, RerouteRule::kMaxUtility);
        with_nmu.provenance = base.provenance + "+NMU";
        all.push_back(std::move(base));
        all.push_back(std::move(with_nsp));
        all.push_back(std::move(with_nmu));
    }
    return all;
}

HeuristicOutcome best_combination(const Topology& topology, const FlowSet& flows, const UtilityInterval& interval,
                                  const PathBounds& bounds) {
    auto all = combination_candidates(topology, flows, interval, bounds);
    std::size_t best = 0;
    Rational best_saved = links_saved(all[0].topology);
    Rational best_resdn = resdn(all[0].state, all[0].topology, interval);
    for (std::size_t i = 1; i < all.size(); ++i) {
        Rational saved = links_saved(all[i].topology);
        Rational r = resdn(all[i].state, all[i].topology, interval);
        if (saved > best_saved || (saved == best_saved && r > best_resdn)) {
            best = i;
            best_saved = saved;
            best_resdn = r;
        }
    }
    HeuristicOutcome outcome = std::move(all[best]);
    outcome.name = "b";
    return outcome;
}

const std::vector<std::string>& heuristic_names() {
    static const std::vector<std::string> names{"maxresdn", "nsp", "nmu", "spf", "spl", "sdf", "hdf", "b"};
    return names;
}

HeuristicOutcome run_heuristic(std::string_view name, const Topology& topology, const FlowSet& flows,
                               const UtilityInterval& interval, const PathBounds& bounds) {
    if (name == "maxresdn") return max_resdn(topology, flows, interval, bounds);
    if (name == "nsp") return nsp(topology, flows, interval, bounds);
    if (name == "nmu") return nmu(topology, flows, interval, bounds);
    if (name == "spf") return ordered_greedy(topology, flows, FlowOrdering::kShortestPathFirst, bounds);
    if (name == "spl") return ordered_greedy(topology, flows, FlowOrdering::kShortestPathLast, bounds);
    if (name == "sdf") return ordered_greedy(topology, flows, FlowOrdering::kSmallestDemandFirst, bounds);
    if (name == "hdf") return ordered_greedy(topology, flows, FlowOrdering::kHighestDemandFirst, bounds);
    if (name == "b") return best_combination(topology, flows, interval, bounds);
    throw std::invalid_argument(
        fmt::format("unknown heuristic '{}' (expected maxresdn|nsp|nmu|spf|spl|sdf|hdf|b)", name));
}

}  // namespace resdn
