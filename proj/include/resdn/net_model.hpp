#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "resdn/rational.hpp"

namespace resdn {

// Switch ids are assigned in ascending name order, so comparing ids (and
// sequences of ids) is the same as comparing switch names.
struct SwitchId {
    std::uint32_t value = 0;
    friend auto operator<=>(SwitchId, SwitchId) = default;
};

struct LinkId {
    std::uint32_t value = 0;
    friend auto operator<=>(LinkId, LinkId) = default;
};

/// Forward means from Link::a to Link::b.
enum class Direction : std::uint8_t { kForward = 0, kReverse = 1 };

struct DirectedLink {
    LinkId link;
    Direction direction = Direction::kForward;

    /// Dense index in [0, 2 * link_count).
    [[nodiscard]] std::size_t index() const {
        return 2 * static_cast<std::size_t>(link.value) + static_cast<std::size_t>(direction);
    }
    [[nodiscard]] DirectedLink reversed() const {
        return {link, direction == Direction::kForward ? Direction::kReverse : Direction::kForward};
    }
    friend auto operator<=>(DirectedLink, DirectedLink) = default;
};

struct Link {
    SwitchId a;
    SwitchId b;
    Rational bandwidth;  // Mbps
    bool active = true;
};

/// Raised for malformed input; carries the 1-based line it refers to (0 if none).
class InputError : public std::runtime_error {
public:
    InputError(int line, const std::string& message);
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

/// Unvalidated topology as read from a file.
struct TopologyDescription {
    struct Node {
        std::string name;
        int line = 0;
    };
    struct LinkSpec {
        std::string a;
        std::string b;
        Rational bandwidth;
        int line = 0;
    };
    std::vector<Node> nodes;
    std::vector<LinkSpec> links;
};

/// Switches and bidirectional capacitated links with activity flags.
///
/// Invariants: link endpoints exist, no self-loops, at most one link per
/// unordered pair, bandwidths positive, and an active link has both
/// endpoint switches active. Mutators reject changes that would break the
/// last rule.
class Topology {
public:
    Topology() = default;

    /// All switches and links start active.
    static Topology build(const TopologyDescription& description);

    [[nodiscard]] std::size_t switch_count() const { return names_.size(); }
    [[nodiscard]] std::size_t link_count() const { return links_.size(); }

    [[nodiscard]] const std::string& name(SwitchId id) const { return names_.at(id.value); }
    [[nodiscard]] std::optional<SwitchId> find(std::string_view name) const;
    /// Throws InputError("unknown switch ...") when absent.
    [[nodiscard]] SwitchId id(std::string_view name) const;

    [[nodiscard]] const Link& link(LinkId id) const { return links_.at(id.value); }
    [[nodiscard]] std::optional<LinkId> link_between(SwitchId x, SwitchId y) const;
    [[nodiscard]] std::optional<DirectedLink> directed(SwitchId from, SwitchId to) const;
    [[nodiscard]] SwitchId tail(DirectedLink d) const;
    [[nodiscard]] SwitchId head(DirectedLink d) const;
    [[nodiscard]] const Rational& bandwidth(DirectedLink d) const { return link(d.link).bandwidth; }

    /// (neighbor, link) pairs sorted by neighbor id.
    struct Neighbor {
        SwitchId node;
        LinkId link;
    };
    [[nodiscard]] std::span<const Neighbor> neighbors(SwitchId id) const { return adjacency_.at(id.value); }

    [[nodiscard]] bool switch_active(SwitchId id) const { return switch_active_.at(id.value); }
    [[nodiscard]] bool link_active(LinkId id) const { return links_.at(id.value).active; }
    [[nodiscard]] std::size_t active_switch_count() const;
    [[nodiscard]] std::size_t active_link_count() const;

    /// Throws std::logic_error when activating a link with an inactive endpoint.
    void set_link_active(LinkId id, bool active);
    /// Throws std::logic_error when deactivating a switch with an active link.
    void set_switch_active(SwitchId id, bool active);

    /// Sum of directed capacities (each link counted in both directions).
    [[nodiscard]] Rational directed_capacity() const;

    friend bool operator==(const Topology& x, const Topology& y);

private:
    std::vector<std::string> names_;
    std::vector<bool> switch_active_;
    std::vector<Link> links_;
    std::vector<std::vector<Neighbor>> adjacency_;
};

bool operator==(const Link& x, const Link& y);

/// A demand f = (source, destination, rate in Mbps).
struct Flow {
    SwitchId source;
    SwitchId destination;
    Rational rate;
    friend bool operator==(const Flow&, const Flow&) = default;
};

using FlowSet = std::vector<Flow>;

/// Throws std::invalid_argument for source == destination or rate <= 0.
void validate_flow(const Topology& topology, const Flow& flow);

/// Simple path of at least one hop over existing links. The traversed
/// directed links are resolved once at construction.
class Path {
public:
    Path() = default;
    /// Throws std::invalid_argument when nodes are not adjacent, repeat, or
    /// fewer than two are given.
    Path(const Topology& topology, std::vector<SwitchId> nodes);

    [[nodiscard]] const std::vector<SwitchId>& nodes() const { return nodes_; }
    [[nodiscard]] const std::vector<DirectedLink>& links() const { return links_; }
    [[nodiscard]] std::size_t hops() const { return links_.size(); }
    [[nodiscard]] SwitchId source() const { return nodes_.front(); }
    [[nodiscard]] SwitchId destination() const { return nodes_.back(); }
    [[nodiscard]] bool contains(SwitchId id) const;
    [[nodiscard]] bool traverses(LinkId id) const;

    friend bool operator==(const Path& x, const Path& y) { return x.nodes_ == y.nodes_; }

private:
    std::vector<SwitchId> nodes_;
    std::vector<DirectedLink> links_;
};

/// Fewer hops first, then lexicographic by node ids.
bool path_order(const Path& x, const Path& y);

std::string to_string(const Topology& topology, const Path& path);

struct Assignment {
    Flow flow;
    Path path;
};

/// Directed utility U_ij per DirectedLink::index(); inactive links hold 0.
class UtilityMap {
public:
    UtilityMap() = default;
    explicit UtilityMap(std::size_t link_count) : values_(2 * link_count) {}

    [[nodiscard]] const Rational& at(DirectedLink d) const { return values_.at(d.index()); }
    Rational& at(DirectedLink d) { return values_.at(d.index()); }
    /// Max of the two directed utilities.
    [[nodiscard]] Rational link_utility(LinkId id) const;
    [[nodiscard]] bool idle(LinkId id) const;
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] const std::vector<Rational>& values() const { return values_; }

    friend bool operator==(const UtilityMap&, const UtilityMap&) = default;

private:
    std::vector<Rational> values_;
};

/// U_ij = sum of lambda_f / W_ij over flows whose path traverses (i, j).
UtilityMap compute_utilities(const Topology& topology, std::span<const Assignment> assignment);

/// Flow-to-path assignment with cached directed utilities.
class RoutingState {
public:
    RoutingState() = default;
    explicit RoutingState(const Topology& topology) : utilities_(topology.link_count()) {}
    RoutingState(const Topology& topology, std::vector<Assignment> assignments);

    [[nodiscard]] const std::vector<Assignment>& assignments() const { return assignments_; }
    [[nodiscard]] const UtilityMap& utilities() const { return utilities_; }
    [[nodiscard]] std::size_t flow_count() const { return assignments_.size(); }

    void add(const Topology& topology, const Flow& flow, Path path);
    void reroute(const Topology& topology, std::size_t index, Path path);

    /// Cached utilities equal a fresh recomputation.
    [[nodiscard]] bool consistent(const Topology& topology) const;

private:
    void apply(const Topology& topology, const Flow& flow, const Path& path, bool remove);

    std::vector<Assignment> assignments_;
    UtilityMap utilities_;
};

/// Inclusive utility interval [u_min, u_max] with 0 <= u_min <= u_max <= 1.
class UtilityInterval {
public:
    UtilityInterval() = default;
    /// Throws std::invalid_argument on violation.
    UtilityInterval(Rational u_min, Rational u_max);

    [[nodiscard]] const Rational& u_min() const { return u_min_; }
    [[nodiscard]] const Rational& u_max() const { return u_max_; }
    [[nodiscard]] bool contains(const Rational& u) const { return u_min_ <= u && u <= u_max_; }

    friend bool operator==(const UtilityInterval&, const UtilityInterval&) = default;

private:
    Rational u_min_{0};
    Rational u_max_{1};
};

/// Limits on path enumeration. The hop bound is max_hops when set,
/// otherwise the shortest hop count plus slack; at most max_paths survive.
struct PathBounds {
    int slack = 2;
    std::size_t max_paths = 50;
    std::optional<int> max_hops;

    friend bool operator==(const PathBounds&, const PathBounds&) = default;
};

/// Simple paths over active links and switches within the bounds, sorted by
/// path_order and truncated to bounds.max_paths. `excluded`, when non-empty,
/// is indexed by link id and removes flagged links from the search.
/// Returns an empty list when no path exists.
std::vector<Path> enumerate_paths(const Topology& topology, SwitchId source, SwitchId destination,
                                  const PathBounds& bounds,
                                  std::span<const std::uint8_t> excluded = {});

/// Links with both directions idle become inactive; then switches without
/// an active incident link become inactive. Nothing is activated.
Topology prune_idle(const RoutingState& state, const Topology& topology);

}  // namespace resdn
