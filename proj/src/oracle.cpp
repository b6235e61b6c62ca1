#include "resdn/oracle.hpp"

#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "resdn/metrics.hpp"

namespace resdn {

std::string_view constraint_name(Constraint c) {
    switch (c) {
        case Constraint::kCapacity: return "capacity";
        case Constraint::kInteriorBalance: return "interior-balance";
        case Constraint::kDelivery: return "delivery";
        case Constraint::kInactiveSwitch: return "inactive-switch";
        case Constraint::kSwitchActivity: return "switch-activity";
        case Constraint::kLinkSwitch: return "link-switch";
        case Constraint::kInactiveLink: return "inactive-link";
    }
    return "?";
}

std::size_t ConstraintReport::count(Constraint c) const {
    std::size_t n = 0;
    for (const auto& v : violations) n += v.constraint == c ? 1 : 0;
    return n;
}

std::string ConstraintReport::summary() const {
    if (violations.empty()) return "all constraints satisfied";
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += fmt::format("{}: {}", constraint_name(v.constraint), v.detail);
    }
    return out;
}

ConstraintReport verify_constraints(const Topology& topology, const RoutingState& state) {
    ConstraintReport report;
    auto add = [&](Constraint c, std::string detail) { report.violations.push_back({c, std::move(detail)}); };
    auto link_name = [&](LinkId id) {
        const Link& l = topology.link(id);
        return fmt::format("{}-{}", topology.name(l.a), topology.name(l.b));
    };

    std::vector<Rational> load(2 * topology.link_count());
    std::vector<std::uint8_t> switch_carries(topology.switch_count(), 0);

    for (std::size_t f = 0; f < state.assignments().size(); ++f) {
        const Assignment& a = state.assignments()[f];
        std::string flow_name = fmt::format("flow {} ({}->{})", f, topology.name(a.flow.source),
                                            topology.name(a.flow.destination));

        // F_ij counts per switch, rebuilt from the traversed links.
        std::map<std::uint32_t, int> out_degree;
        std::map<std::uint32_t, int> in_degree;
        for (const auto& d : a.path.links()) {
            SwitchId tail = topology.tail(d);
            SwitchId head = topology.head(d);
            ++out_degree[tail.value];
            ++in_degree[head.value];
            load[d.index()] += a.flow.rate;
            switch_carries[tail.value] = 1;
            switch_carries[head.value] = 1;
            if (!topology.switch_active(tail) || !topology.switch_active(head))
                add(Constraint::kInactiveSwitch,
                    fmt::format("{} uses link {} at an inactive switch", flow_name, link_name(d.link)));
            if (!topology.link_active(d.link))
                add(Constraint::kInactiveLink, fmt::format("{} uses inactive link {}", flow_name, link_name(d.link)));
        }

        for (const auto& [node, in] : in_degree) {
            SwitchId s{node};
            if (s == a.flow.source || s == a.flow.destination) continue;
            if (out_degree[node] != in)
                add(Constraint::kInteriorBalance, fmt::format("{} unbalanced at {}", flow_name, topology.name(s)));
        }
        for (const auto& [node, out] : out_degree) {
            SwitchId s{node};
            if (s == a.flow.source || s == a.flow.destination) continue;
            if (in_degree[node] != out)
                add(Constraint::kInteriorBalance, fmt::format("{} unbalanced at {}", flow_name, topology.name(s)));
        }

        int leaves_source = out_degree[a.flow.source.value] - in_degree[a.flow.source.value];
        int reaches_destination = in_degree[a.flow.destination.value] - out_degree[a.flow.destination.value];
        if (a.path.source() != a.flow.source || a.path.destination() != a.flow.destination || leaves_source != 1 ||
            reaches_destination != 1)
            add(Constraint::kDelivery, fmt::format("{} path {} does not deliver", flow_name, to_string(topology, a.path)));
    }

    for (std::uint32_t l = 0; l < topology.link_count(); ++l) {
        for (auto dir : {Direction::kForward, Direction::kReverse}) {
            DirectedLink d{LinkId{l}, dir};
            if (load[d.index()] > topology.bandwidth(d)) {
                add(Constraint::kCapacity,
                    fmt::format("link {}->{} carries {} Mbps over capacity {} Mbps", topology.name(topology.tail(d)),
                                topology.name(topology.head(d)), format_decimal(load[d.index()].to_double()),
                                format_decimal(topology.bandwidth(d).to_double())));
            }
        }
        const Link& link = topology.link(LinkId{l});
        if (link.active && (!topology.switch_active(link.a) || !topology.switch_active(link.b)))
            add(Constraint::kLinkSwitch, fmt::format("link {} active with an inactive endpoint", link_name(LinkId{l})));
    }

    for (std::uint32_t s = 0; s < topology.switch_count(); ++s) {
        if (topology.switch_active(SwitchId{s}) && !switch_carries[s])
            add(Constraint::kSwitchActivity, fmt::format("switch {} active without flow", topology.name(SwitchId{s})));
    }
    return report;
}

namespace {

class ExhaustiveSearch {
public:
    ExhaustiveSearch(const Topology& topology, const FlowSet& flows, const UtilityInterval& interval,
                     std::vector<const std::vector<Path>*> candidates)
        : topology_(topology),
          flows_(flows),
          interval_(interval),
          candidates_(std::move(candidates)),
          load_(2 * topology.link_count()),
          choice_(flows.size(), 0) {}

    void run() { descend(0); }

    std::uint64_t visited = 0;
    std::uint64_t feasible = 0;
    bool found = false;
    std::vector<std::size_t> best_choice;

private:
    Rational link_utility(LinkId id) const {
        std::size_t base = 2 * static_cast<std::size_t>(id.value);
        const Rational& w = topology_.link(id).bandwidth;
        return std::max(load_[base], load_[base + 1]) / w;
    }

    void update(const Flow& flow, const Path& path, bool remove) {
        for (const auto& d : path.links()) {
            Rational before = link_utility(d.link);
            if (before.is_positive()) {
                --active_;
                if (interval_.contains(before)) --inside_;
            }
            bool over_before = load_[d.index()] > topology_.bandwidth(d);
            if (remove)
                load_[d.index()] -= flow.rate;
            else
                load_[d.index()] += flow.rate;
            bool over_after = load_[d.index()] > topology_.bandwidth(d);
            overloaded_ += static_cast<int>(over_after) - static_cast<int>(over_before);
            Rational after = link_utility(d.link);
            if (after.is_positive()) {
                ++active_;
                if (interval_.contains(after)) ++inside_;
            }
        }
        hops_ += remove ? -static_cast<std::int64_t>(path.hops()) : static_cast<std::int64_t>(path.hops());
    }

    void leaf() {
        ++visited;
        if (overloaded_ > 0) return;
        ++feasible;
        // Compare inside/active (1 when nothing is active) against the best.
        std::int64_t num = active_ == 0 ? 1 : inside_;
        std::int64_t den = active_ == 0 ? 1 : active_;
        if (found) {
            __int128 lhs = static_cast<__int128>(num) * best_den_;
            __int128 rhs = static_cast<__int128>(best_num_) * den;
            if (lhs < rhs || (lhs == rhs && hops_ >= best_hops_)) return;
        }
        found = true;
        best_num_ = num;
        best_den_ = den;
        best_hops_ = hops_;
        best_choice = choice_;
    }

    void descend(std::size_t k) {
        if (k == flows_.size()) {
            leaf();
            return;
        }
        const auto& options = *candidates_[k];
        for (std::size_t i = 0; i < options.size(); ++i) {
            choice_[k] = i;
            update(flows_[k], options[i], false);
            descend(k + 1);
            update(flows_[k], options[i], true);
        }
    }

    const Topology& topology_;
    const FlowSet& flows_;
    const UtilityInterval& interval_;
    std::vector<const std::vector<Path>*> candidates_;
    std::vector<Rational> load_;
    std::vector<std::size_t> choice_;
    std::int64_t active_ = 0;
    std::int64_t inside_ = 0;
    std::int64_t hops_ = 0;
    int overloaded_ = 0;
    std::int64_t best_num_ = 0;
    std::int64_t best_den_ = 1;
    std::int64_t best_hops_ = 0;
};

}  // namespace

OracleResult exact_max_resdn(const Topology& topology, const FlowSet& flows, const UtilityInterval& interval,
                             const PathBounds& bounds, std::uint64_t budget) {
    check_flows(topology, flows);
    PathCache cache(topology, bounds);
    std::vector<const std::vector<Path>*> candidates;
    std::uint64_t combinations = 1;
    for (const auto& flow : flows) {
        const auto& paths = cache.get(flow.source, flow.destination);
        if (paths.empty())
            throw std::runtime_error(fmt::format("disconnected: no path from {} to {}", topology.name(flow.source),
                                                 topology.name(flow.destination)));
        candidates.push_back(&paths);
        if (combinations > std::numeric_limits<std::uint64_t>::max() / paths.size())
            combinations = std::numeric_limits<std::uint64_t>::max();
        else
            combinations *= paths.size();
    }
    if (combinations > budget)
        throw std::runtime_error(
            fmt::format("oracle budget exceeded: {} path combinations > budget {}", combinations, budget));

    ExhaustiveSearch search(topology, flows, interval, candidates);
    search.run();

    OracleResult result;
    result.combinations = combinations;
    result.visited = search.visited;
    result.feasible = search.feasible;
    result.found = search.found;
    if (!search.found) return result;

    std::vector<Assignment> assignments;
    for (std::size_t k = 0; k < flows.size(); ++k)
        assignments.push_back({flows[k], (*candidates[k])[search.best_choice[k]]});
    RoutingState state(topology, std::move(assignments));
    result.optimum.name = "oracle";
    result.optimum.provenance = "exhaustive";
    result.optimum.topology = prune_idle(state, topology);
    result.optimum.fallback.assign(flows.size(), 0);
    result.optimum.state = std::move(state);

    // Only capacity is tracked during the search; candidate paths over
    // active elements satisfy the structural constraints once idle parts
    // are switched off. Confirm on the returned optimum.
    auto report = verify_constraints(result.optimum.topology, result.optimum.state);
    if (!report.feasible())
        throw std::logic_error(fmt::format("oracle optimum failed verification: {}", report.summary()));
    return result;
}

}  // namespace resdn
