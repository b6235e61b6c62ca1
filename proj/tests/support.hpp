#pragma once

// Test fixtures, random instance generators and brute-force recounts that
// share no code with the library beyond the data types.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "resdn/ingest.hpp"
#include "resdn/net_model.hpp"
#include "resdn/rational.hpp"

namespace support {

using resdn::Flow;
using resdn::FlowSet;
using resdn::Path;
using resdn::Rational;
using resdn::SwitchId;
using resdn::Topology;
using resdn::UtilityInterval;

inline Topology make_topology(std::string_view text) { return Topology::build(resdn::parse_topology(text)); }

inline Topology triangle() { return make_topology("node A\nnode B\nnode C\nlink A B 100\nlink B C 100\nlink A C 100\n"); }

// A-B-C-D-A ring
inline Topology square() {
    return make_topology("node A\nnode B\nnode C\nnode D\nlink A B 100\nlink B C 100\nlink C D 100\nlink A D 100\n");
}

inline Flow flow(const Topology& t, std::string_view a, std::string_view b, Rational rate) {
    return Flow{t.id(a), t.id(b), rate};
}

inline Path path(const Topology& t, std::initializer_list<std::string_view> names) {
    std::vector<SwitchId> nodes;
    for (auto n : names) nodes.push_back(t.id(n));
    return Path(t, std::move(nodes));
}

inline std::vector<std::string> names(const Topology& t, const Path& p) {
    std::vector<std::string> out;
    for (SwitchId s : p.nodes()) out.push_back(t.name(s));
    return out;
}

inline int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

struct Instance {
    Topology topology;
    FlowSet flows;
    UtilityInterval interval;
};

/// Connected topology on 2..max_switches nodes (random tree plus extra
/// links), bandwidths from {10, 20, 50, 100}, rates multiples of 5.
inline Topology random_topology(std::mt19937_64& rng, int max_switches) {
    int n = uniform(rng, 2, max_switches);
    static const char* kBandwidth[] = {"10", "20", "50", "100"};
    std::string text;
    for (int i = 0; i < n; ++i) text += "node S" + std::to_string(i) + "\n";
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) edges.emplace_back(uniform(rng, 0, i - 1), i);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool present = std::any_of(edges.begin(), edges.end(), [&](auto e) {
                return (e.first == i && e.second == j) || (e.first == j && e.second == i);
            });
            if (!present && uniform(rng, 0, 9) < 4) edges.emplace_back(i, j);
        }
    }
    for (auto [a, b] : edges)
        text += "link S" + std::to_string(a) + " S" + std::to_string(b) + " " + kBandwidth[uniform(rng, 0, 3)] + "\n";
    return make_topology(text);
}

inline UtilityInterval random_interval(std::mt19937_64& rng) {
    int lo = uniform(rng, 0, 16);
    int hi = uniform(rng, lo, 20);
    return UtilityInterval(Rational(lo, 20), Rational(hi, 20));
}

inline Instance random_instance(std::mt19937_64& rng, int max_switches, int max_flows) {
    Instance inst{random_topology(rng, max_switches), {}, random_interval(rng)};
    int n = static_cast<int>(inst.topology.switch_count());
    int count = uniform(rng, 1, max_flows);
    for (int k = 0; k < count; ++k) {
        int a = uniform(rng, 0, n - 1);
        int b = uniform(rng, 0, n - 2);
        if (b >= a) ++b;
        inst.flows.push_back(Flow{SwitchId{static_cast<std::uint32_t>(a)}, SwitchId{static_cast<std::uint32_t>(b)},
                                  Rational(5 * uniform(rng, 1, 12))});
    }
    return inst;
}

/// Every simple path from src to dst over active elements, found by trying
/// every ordered selection of intermediate nodes.
inline std::vector<std::vector<SwitchId>> all_simple_paths(const Topology& t, SwitchId src, SwitchId dst) {
    std::vector<SwitchId> others;
    for (std::uint32_t i = 0; i < t.switch_count(); ++i) {
        if (SwitchId{i} != src && SwitchId{i} != dst) others.push_back(SwitchId{i});
    }
    auto usable = [&](SwitchId a, SwitchId b) {
        auto l = t.link_between(a, b);
        return l && t.link_active(*l) && t.switch_active(a) && t.switch_active(b);
    };
    std::vector<std::vector<SwitchId>> out;
    std::size_t k = others.size();
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<SwitchId> mid;
        for (std::size_t i = 0; i < k; ++i) {
            if (mask & (1u << i)) mid.push_back(others[i]);
        }
        std::sort(mid.begin(), mid.end());
        do {
            std::vector<SwitchId> seq{src};
            seq.insert(seq.end(), mid.begin(), mid.end());
            seq.push_back(dst);
            bool ok = true;
            for (std::size_t i = 0; i + 1 < seq.size() && ok; ++i) ok = usable(seq[i], seq[i + 1]);
            if (ok) out.push_back(seq);
        } while (std::next_permutation(mid.begin(), mid.end()));
    }
    return out;
}

/// Expected enumerate_paths output: hop window, order, cap.
inline std::vector<std::vector<SwitchId>> expected_paths(const Topology& t, SwitchId src, SwitchId dst,
                                                         const resdn::PathBounds& bounds) {
    if (!t.switch_active(src) || !t.switch_active(dst)) return {};
    auto all = all_simple_paths(t, src, dst);
    if (all.empty()) return {};
    std::size_t shortest = all.front().size();
    for (const auto& p : all) shortest = std::min(shortest, p.size());
    std::size_t limit = bounds.max_hops ? static_cast<std::size_t>(*bounds.max_hops)
                                        : shortest - 1 + static_cast<std::size_t>(bounds.slack);
    std::vector<std::vector<SwitchId>> kept;
    for (auto& p : all) {
        if (p.size() - 1 <= limit) kept.push_back(p);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x < y;
    });
    if (kept.size() > bounds.max_paths) kept.resize(bounds.max_paths);
    return kept;
}

/// Directed loads keyed by (tail name, head name), summed flow by flow.
inline std::map<std::pair<std::string, std::string>, Rational> loads_by_name(const Topology& t,
                                                                              const resdn::RoutingState& state) {
    std::map<std::pair<std::string, std::string>, Rational> load;
    for (const auto& a : state.assignments()) {
        const auto& nodes = a.path.nodes();
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) load[{t.name(nodes[i]), t.name(nodes[i + 1])}] += a.flow.rate;
    }
    return load;
}

/// Link utility (larger direction) of every link, recomputed from scratch.
inline std::vector<Rational> link_utilities(const Topology& t, const resdn::RoutingState& state) {
    auto load = loads_by_name(t, state);
    std::vector<Rational> out;
    for (std::uint32_t l = 0; l < t.link_count(); ++l) {
        const auto& link = t.link(resdn::LinkId{l});
        std::string a = t.name(link.a);
        std::string b = t.name(link.b);
        Rational ab = load.count({a, b}) ? load[{a, b}] : Rational(0);
        Rational ba = load.count({b, a}) ? load[{b, a}] : Rational(0);
        out.push_back(std::max(ab, ba) / link.bandwidth);
    }
    return out;
}

inline Rational resdn_recount(const Topology& t, const resdn::RoutingState& state, const UtilityInterval& iv) {
    auto u = link_utilities(t, state);
    std::int64_t on = 0;
    std::int64_t in = 0;
    for (std::uint32_t l = 0; l < t.link_count(); ++l) {
        if (!t.link(resdn::LinkId{l}).active) continue;
        ++on;
        if (iv.u_min() <= u[l] && u[l] <= iv.u_max()) ++in;
    }
    return on == 0 ? Rational(1) : Rational(in, on);
}

}  // namespace support
