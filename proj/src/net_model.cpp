#include "resdn/net_model.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

namespace resdn {

InputError::InputError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, message) : message), line_(line) {}

// ---------------------------------------------------------------------------
// Topology

Topology Topology::build(const TopologyDescription& description) {
    std::map<std::string, int> declared;  // name -> line
    for (const auto& node : description.nodes) {
        if (node.name.empty()) throw InputError(node.line, "empty switch name");
        auto [it, inserted] = declared.emplace(node.name, node.line);
        if (!inserted) throw InputError(node.line, fmt::format("duplicate node '{}'", node.name));
    }

    Topology topology;
    for (const auto& [name, line] : declared) topology.names_.push_back(name);
    topology.switch_active_.assign(topology.names_.size(), true);
    topology.adjacency_.resize(topology.names_.size());

    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& spec : description.links) {
        auto a = topology.find(spec.a);
        auto b = topology.find(spec.b);
        if (!a) throw InputError(spec.line, fmt::format("unknown endpoint '{}'", spec.a));
        if (!b) throw InputError(spec.line, fmt::format("unknown endpoint '{}'", spec.b));
        if (*a == *b) throw InputError(spec.line, fmt::format("self-loop on '{}'", spec.a));
        if (!spec.bandwidth.is_positive())
            throw InputError(spec.line, fmt::format("non-positive bandwidth on link {}-{}", spec.a, spec.b));
        auto key = std::minmax(a->value, b->value);
        if (!seen.insert(key).second)
            throw InputError(spec.line, fmt::format("duplicate link {}-{}", spec.a, spec.b));

        LinkId id{static_cast<std::uint32_t>(topology.links_.size())};
        topology.links_.push_back(Link{*a, *b, spec.bandwidth, true});
        topology.adjacency_[a->value].push_back({*b, id});
        topology.adjacency_[b->value].push_back({*a, id});
    }
    for (auto& list : topology.adjacency_) {
        std::sort(list.begin(), list.end(),
                  [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
    }
    return topology;
}

std::optional<SwitchId> Topology::find(std::string_view name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name,
                               [](const std::string& x, std::string_view y) { return x < y; });
    if (it == names_.end() || *it != name) return std::nullopt;
    return SwitchId{static_cast<std::uint32_t>(it - names_.begin())};
}

SwitchId Topology::id(std::string_view name) const {
    auto found = find(name);
    if (!found) throw InputError(0, fmt::format("unknown switch '{}'", name));
    return *found;
}

std::optional<LinkId> Topology::link_between(SwitchId x, SwitchId y) const {
    const auto& list = adjacency_.at(x.value);
    auto it = std::lower_bound(list.begin(), list.end(), y,
                               [](const Neighbor& n, SwitchId v) { return n.node < v; });
    if (it == list.end() || it->node != y) return std::nullopt;
    return it->link;
}

std::optional<DirectedLink> Topology::directed(SwitchId from, SwitchId to) const {
    auto id = link_between(from, to);
    if (!id) return std::nullopt;
    return DirectedLink{*id, links_[id->value].a == from ? Direction::kForward : Direction::kReverse};
}

SwitchId Topology::tail(DirectedLink d) const {
    const Link& l = link(d.link);
    return d.direction == Direction::kForward ? l.a : l.b;
}

SwitchId Topology::head(DirectedLink d) const {
    const Link& l = link(d.link);
    return d.direction == Direction::kForward ? l.b : l.a;
}

std::size_t Topology::active_switch_count() const {
    return static_cast<std::size_t>(std::count(switch_active_.begin(), switch_active_.end(), true));
}

std::size_t Topology::active_link_count() const {
    return static_cast<std::size_t>(
        std::count_if(links_.begin(), links_.end(), [](const Link& l) { return l.active; }));
}

void Topology::set_link_active(LinkId id, bool active) {
    Link& l = links_.at(id.value);
    if (active && (!switch_active_[l.a.value] || !switch_active_[l.b.value]))
        throw std::logic_error(fmt::format("cannot activate link {}-{}: endpoint switch inactive",
                                           names_[l.a.value], names_[l.b.value]));
    l.active = active;
}

void Topology::set_switch_active(SwitchId id, bool active) {
    if (!active) {
        for (const auto& n : adjacency_.at(id.value)) {
            if (links_[n.link.value].active)
                throw std::logic_error(
                    fmt::format("cannot deactivate switch {}: incident link active", names_[id.value]));
        }
    }
    switch_active_.at(id.value) = active;
}

Rational Topology::directed_capacity() const {
    Rational total;
    for (const auto& l : links_) total += l.bandwidth * Rational(2);
    return total;
}

bool operator==(const Link& x, const Link& y) {
    return x.a == y.a && x.b == y.b && x.bandwidth == y.bandwidth && x.active == y.active;
}

bool operator==(const Topology& x, const Topology& y) {
    return x.names_ == y.names_ && x.switch_active_ == y.switch_active_ && x.links_ == y.links_;
}

void validate_flow(const Topology& topology, const Flow& flow) {
    if (flow.source.value >= topology.switch_count() || flow.destination.value >= topology.switch_count())
        throw std::invalid_argument("flow endpoint out of range");
    if (flow.source == flow.destination)
        throw std::invalid_argument(
            fmt::format("flow source equals destination ('{}')", topology.name(flow.source)));
    if (!flow.rate.is_positive())
        throw std::invalid_argument(fmt::format("flow {}->{} has non-positive rate",
                                                topology.name(flow.source), topology.name(flow.destination)));
}

// ---------------------------------------------------------------------------
// Path

Path::Path(const Topology& topology, std::vector<SwitchId> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw std::invalid_argument("path needs at least one hop");
    std::vector<SwitchId> sorted = nodes_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("path repeats a switch");
    links_.reserve(nodes_.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        if (nodes_[i].value >= topology.switch_count() || nodes_[i + 1].value >= topology.switch_count())
            throw std::invalid_argument("path switch out of range");
        auto d = topology.directed(nodes_[i], nodes_[i + 1]);
        if (!d)
            throw std::invalid_argument(fmt::format("no link between {} and {}", topology.name(nodes_[i]),
                                                    topology.name(nodes_[i + 1])));
        links_.push_back(*d);
    }
}

bool Path::contains(SwitchId id) const { return std::find(nodes_.begin(), nodes_.end(), id) != nodes_.end(); }

bool Path::traverses(LinkId id) const {
    return std::any_of(links_.begin(), links_.end(), [&](const DirectedLink& d) { return d.link == id; });
}

bool path_order(const Path& x, const Path& y) {
    if (x.hops() != y.hops()) return x.hops() < y.hops();
    return x.nodes() < y.nodes();
}

std::string to_string(const Topology& topology, const Path& path) {
    std::string out;
    for (std::size_t i = 0; i < path.nodes().size(); ++i) {
        if (i > 0) out += '-';
        out += topology.name(path.nodes()[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Utilities and routing state

Rational UtilityMap::link_utility(LinkId id) const {
    const Rational& f = values_.at(2 * static_cast<std::size_t>(id.value));
    const Rational& r = values_.at(2 * static_cast<std::size_t>(id.value) + 1);
    return std::max(f, r);
}

bool UtilityMap::idle(LinkId id) const {
    return values_.at(2 * static_cast<std::size_t>(id.value)).is_zero() &&
           values_.at(2 * static_cast<std::size_t>(id.value) + 1).is_zero();
}

UtilityMap compute_utilities(const Topology& topology, std::span<const Assignment> assignment) {
    // Sum rates per directed link first, divide once: the result is the same
    // rational whatever the accumulation order.
    std::vector<Rational> load(2 * topology.link_count());
    for (const auto& a : assignment) {
        for (const auto& d : a.path.links()) load[d.index()] += a.flow.rate;
    }
    UtilityMap utilities(topology.link_count());
    for (std::uint32_t l = 0; l < topology.link_count(); ++l) {
        for (auto dir : {Direction::kForward, Direction::kReverse}) {
            DirectedLink d{LinkId{l}, dir};
            if (!load[d.index()].is_zero()) utilities.at(d) = load[d.index()] / topology.bandwidth(d);
        }
    }
    return utilities;
}

RoutingState::RoutingState(const Topology& topology, std::vector<Assignment> assignments)
    : assignments_(std::move(assignments)), utilities_(compute_utilities(topology, assignments_)) {}

void RoutingState::apply(const Topology& topology, const Flow& flow, const Path& path, bool remove) {
    for (const auto& d : path.links()) {
        Rational delta = flow.rate / topology.bandwidth(d);
        if (remove)
            utilities_.at(d) -= delta;
        else
            utilities_.at(d) += delta;
    }
}

void RoutingState::add(const Topology& topology, const Flow& flow, Path path) {
    if (path.source() != flow.source || path.destination() != flow.destination)
        throw std::invalid_argument("path endpoints do not match flow");
    apply(topology, flow, path, false);
    assignments_.push_back({flow, std::move(path)});
}

void RoutingState::reroute(const Topology& topology, std::size_t index, Path path) {
    Assignment& a = assignments_.at(index);
    if (path.source() != a.flow.source || path.destination() != a.flow.destination)
        throw std::invalid_argument("path endpoints do not match flow");
    apply(topology, a.flow, a.path, true);
    apply(topology, a.flow, path, false);
    a.path = std::move(path);
}

bool RoutingState::consistent(const Topology& topology) const {
    return utilities_ == compute_utilities(topology, assignments_);
}

UtilityInterval::UtilityInterval(Rational u_min, Rational u_max) : u_min_(u_min), u_max_(u_max) {
    if (u_min_.is_negative() || u_max_ > Rational(1) || u_min_ > u_max_)
        throw std::invalid_argument(fmt::format("invalid utility interval [{}, {}]: need 0 <= u_min <= u_max <= 1",
                                                u_min_.to_double(), u_max_.to_double()));
}

// ---------------------------------------------------------------------------
// Path enumeration

namespace {

struct Search {
    const Topology& topology;
    std::span<const std::uint8_t> excluded;
    SwitchId destination;
    std::vector<int> distance;  // hops to destination, -1 when unreachable
    std::size_t bound = 0;
    std::vector<std::uint8_t> on_path;
    std::vector<SwitchId> stack;
    std::vector<std::vector<SwitchId>> found;

    bool usable(const Topology::Neighbor& n) const {
        if (!topology.link_active(n.link) || !topology.switch_active(n.node)) return false;
        return excluded.empty() || !excluded[n.link.value];
    }

    void distances() {
        distance.assign(topology.switch_count(), -1);
        std::deque<SwitchId> queue{destination};
        distance[destination.value] = 0;
        while (!queue.empty()) {
            SwitchId u = queue.front();
            queue.pop_front();
            for (const auto& n : topology.neighbors(u)) {
                if (!usable(n) || distance[n.node.value] >= 0) continue;
                distance[n.node.value] = distance[u.value] + 1;
                queue.push_back(n.node);
            }
        }
    }

    void walk(SwitchId u) {
        if (u == destination) {
            found.push_back(stack);
            return;
        }
        std::size_t hops = stack.size() - 1;
        for (const auto& n : topology.neighbors(u)) {
            if (!usable(n) || on_path[n.node.value]) continue;
            int d = distance[n.node.value];
            if (d < 0 || hops + 1 + static_cast<std::size_t>(d) > bound) continue;
            on_path[n.node.value] = 1;
            stack.push_back(n.node);
            walk(n.node);
            stack.pop_back();
            on_path[n.node.value] = 0;
        }
    }
};

}  // namespace

std::vector<Path> enumerate_paths(const Topology& topology, SwitchId source, SwitchId destination,
                                  const PathBounds& bounds, std::span<const std::uint8_t> excluded) {
    if (source == destination) throw std::invalid_argument("enumerate_paths: source equals destination");
    if (!excluded.empty() && excluded.size() != topology.link_count())
        throw std::invalid_argument("enumerate_paths: exclusion mask size mismatch");
    if (!topology.switch_active(source) || !topology.switch_active(destination)) return {};

    Search search{topology, excluded, destination, {}, 0, {}, {}, {}};
    search.distances();
    int shortest = search.distance[source.value];
    if (shortest < 0) return {};
    int bound = bounds.max_hops ? *bounds.max_hops : shortest + bounds.slack;
    if (bound < shortest) return {};
    search.bound = static_cast<std::size_t>(bound);
    search.on_path.assign(topology.switch_count(), 0);
    search.on_path[source.value] = 1;
    search.stack.push_back(source);
    search.walk(source);

    std::sort(search.found.begin(), search.found.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x < y;
    });
    if (search.found.size() > bounds.max_paths) search.found.resize(bounds.max_paths);

    std::vector<Path> paths;
    paths.reserve(search.found.size());
    for (auto& nodes : search.found) paths.emplace_back(topology, std::move(nodes));
    return paths;
}

Topology prune_idle(const RoutingState& state, const Topology& topology) {
    Topology pruned = topology;
    const UtilityMap& u = state.utilities();
    for (std::uint32_t l = 0; l < pruned.link_count(); ++l) {
        LinkId id{l};
        if (pruned.link_active(id) && u.idle(id)) pruned.set_link_active(id, false);
    }
    for (std::uint32_t s = 0; s < pruned.switch_count(); ++s) {
        SwitchId id{s};
        if (!pruned.switch_active(id)) continue;
        bool any = false;
        for (const auto& n : pruned.neighbors(id)) any = any || pruned.link_active(n.link);
        if (!any) pruned.set_switch_active(id, false);
    }
    return pruned;
}

}  // namespace resdn
