#include <gtest/gtest.h>

#include <random>

#include "resdn/heuristics.hpp"
#include "resdn/metrics.hpp"
#include "resdn/oracle.hpp"
#include "support.hpp"

using namespace resdn;
using support::flow;
using support::names;
using support::path;
using support::triangle;

namespace {

const UtilityInterval kThirtyNinety(Rational(3, 10), Rational(9, 10));

std::vector<std::string> route_of(const HeuristicOutcome& o, std::size_t i) {
    return names(o.topology, o.state.assignments().at(i).path);
}

using Strings = std::vector<std::string>;

// A-B direct, a 2-hop detour A-C-B and a 3-hop detour A-D-E-B
Topology two_detours() {
    return support::make_topology(
        "node A\nnode B\nnode C\nnode D\nnode E\n"
        "link A B 100\nlink A C 100\nlink C B 100\nlink A D 100\nlink D E 100\nlink E B 100\n");
}

}  // namespace

TEST(MaxResdn, SingleFlowTakesDirectLink) {
    Topology t = triangle();
    auto o = max_resdn(t, {flow(t, "A", "B", Rational(50))}, kThirtyNinety, PathBounds{});
    EXPECT_EQ(route_of(o, 0), (Strings{"A", "B"}));
    EXPECT_EQ(o.state.utilities().at(*t.directed(t.id("A"), t.id("B"))), Rational(1, 2));
    EXPECT_EQ(resdn::resdn(o.state, o.topology, kThirtyNinety), Rational(1));
    EXPECT_FALSE(o.topology.link_active(*t.link_between(t.id("B"), t.id("C"))));
    EXPECT_FALSE(o.topology.link_active(*t.link_between(t.id("A"), t.id("C"))));
    EXPECT_EQ(o.fallback_count(), 0u);
}

TEST(MaxResdn, EmptyFlowSet) {
    Topology t = triangle();
    auto o = max_resdn(t, {}, kThirtyNinety, PathBounds{});
    EXPECT_EQ(o.topology.active_link_count(), 0u);
    EXPECT_EQ(resdn::resdn(o.state, o.topology, kThirtyNinety), Rational(1));
}

TEST(MaxResdn, SecondFlowDetoursUnderUmax) {
    Topology t = triangle();
    auto o = max_resdn(t, {flow(t, "A", "B", Rational(80)), flow(t, "A", "B", Rational(30))}, kThirtyNinety,
                       PathBounds{});
    EXPECT_EQ(route_of(o, 0), (Strings{"A", "B"}));
    EXPECT_EQ(route_of(o, 1), (Strings{"A", "C", "B"}));
    EXPECT_EQ(o.state.utilities().at(*t.directed(t.id("A"), t.id("C"))), Rational(3, 10));
    EXPECT_EQ(o.state.utilities().at(*t.directed(t.id("C"), t.id("B"))), Rational(3, 10));
    EXPECT_EQ(resdn::resdn(o.state, o.topology, kThirtyNinety), Rational(1));
    ASSERT_EQ(o.resdn_trace.size(), 2u);
    EXPECT_EQ(o.resdn_trace[0], Rational(1));
}

TEST(MaxResdn, UnknownEndpointRejectedBeforeRouting) {
    Topology t = triangle();
    FlowSet flows{flow(t, "A", "B", Rational(1)), Flow{SwitchId{7}, t.id("A"), Rational(1)}};
    EXPECT_THROW(max_resdn(t, flows, kThirtyNinety, PathBounds{}), std::exception);
}

TEST(PathMaxResdn, SingleCandidate) {
    Topology t = support::make_topology("node A\nnode B\nlink A B 100\n");
    auto c = path_max_resdn(RoutingState(t), t, flow(t, "A", "B", Rational(10)), kThirtyNinety, PathBounds{});
    EXPECT_EQ(names(t, c.path), (Strings{"A", "B"}));
    EXPECT_FALSE(c.fallback);
}

TEST(PathMaxResdn, FallbackWhenEveryCandidateBreaksUmax) {
    Topology t = triangle();
    RoutingState s(t, {{flow(t, "A", "B", Rational(80)), path(t, {"A", "B"})},
                       {flow(t, "A", "C", Rational(85)), path(t, {"A", "C"})}});
    auto c = path_max_resdn(s, t, flow(t, "A", "B", Rational(20)), kThirtyNinety, PathBounds{});
    EXPECT_TRUE(c.fallback);
    // direct: 1.0 peak, detour: 1.05 peak
    EXPECT_EQ(names(t, c.path), (Strings{"A", "B"}));
}

TEST(PathMaxResdn, Disconnected) {
    Topology t = support::make_topology("node A\nnode B\nnode C\nlink A B 10\n");
    try {
        (void)path_max_resdn(RoutingState(t), t, flow(t, "A", "C", Rational(1)), kThirtyNinety, PathBounds{});
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("disconnected"), std::string::npos);
    }
}

TEST(PathMaxResdn, EqualResdnPrefersFewerNewLinks) {
    // A-B and C-A carry light flows; C->B direct or via A both leave RESDN
    // at 0, but only the direct path wakes B-C.
    Topology t = triangle();
    RoutingState s(t, {{flow(t, "A", "B", Rational(10)), path(t, {"A", "B"})},
                       {flow(t, "C", "A", Rational(10)), path(t, {"C", "A"})}});
    auto c = path_max_resdn(s, t, flow(t, "C", "B", Rational(5)), kThirtyNinety, PathBounds{});
    EXPECT_EQ(names(t, c.path), (Strings{"C", "A", "B"}));
}

TEST(Nsp, NoCandidatesLeavesRoutingAlone) {
    Topology t = triangle();
    auto o = nsp(t, {flow(t, "A", "B", Rational(50))}, kThirtyNinety, PathBounds{});
    EXPECT_EQ(route_of(o, 0), (Strings{"A", "B"}));
    EXPECT_EQ(o.candidate_links, 0u);
}

TEST(Nsp, EmptiesUnderutilizedLink) {
    Topology t = triangle();
    auto o = nsp(t, {flow(t, "A", "B", Rational(10))}, kThirtyNinety, PathBounds{});
    EXPECT_EQ(route_of(o, 0), (Strings{"A", "C", "B"}));
    EXPECT_FALSE(o.topology.link_active(*t.link_between(t.id("A"), t.id("B"))));
    EXPECT_NEAR(links_saved(o.topology).to_double(), 33.333333, 1e-6);
    EXPECT_EQ(o.rerouted_links, 1u);
}

TEST(Nsp, StaysWhenDetourWouldExceedUmax) {
    Topology t = triangle();
    FlowSet flows{flow(t, "A", "B", Rational(10)), flow(t, "A", "C", Rational(85))};
    auto o = nsp(t, flows, kThirtyNinety, PathBounds{});
    EXPECT_EQ(route_of(o, 0), (Strings{"A", "B"}));
    EXPECT_TRUE(o.topology.link_active(*t.link_between(t.id("A"), t.id("B"))));
    EXPECT_EQ(o.rerouted_links, 0u);
}

TEST(Nmu, PrefersDetourThroughBusiestLink) {
    Topology t = two_detours();
    UtilityInterval iv(Rational(15, 100), Rational(9, 10));
    FlowSet flows{flow(t, "A", "B", Rational(10)), flow(t, "A", "C", Rational(20)), flow(t, "C", "B", Rational(20)),
                  flow(t, "D", "E", Rational(60))};
    auto by_nsp = nsp(t, flows, iv, PathBounds{});
    auto by_nmu = nmu(t, flows, iv, PathBounds{});
    EXPECT_EQ(route_of(by_nsp, 0), (Strings{"A", "C", "B"}));
    EXPECT_EQ(route_of(by_nmu, 0), (Strings{"A", "D", "E", "B"}));
}

TEST(Nmu, SingleAlternativeMatchesNsp) {
    Topology t = triangle();
    FlowSet flows{flow(t, "A", "B", Rational(10))};
    auto a = nsp(t, flows, kThirtyNinety, PathBounds{});
    auto b = nmu(t, flows, kThirtyNinety, PathBounds{});
    EXPECT_EQ(route_of(a, 0), route_of(b, 0));
    EXPECT_EQ(a.topology, b.topology);
}

TEST(Nmu, NothingUnderutilized) {
    Topology t = triangle();
    auto o = nmu(t, {flow(t, "A", "B", Rational(50)), flow(t, "B", "C", Rational(40))}, kThirtyNinety, PathBounds{});
    EXPECT_EQ(route_of(o, 0), (Strings{"A", "B"}));
    EXPECT_EQ(route_of(o, 1), (Strings{"B", "C"}));
    EXPECT_EQ(o.candidate_links, 0u);
}

TEST(Ordering, SequenceRules) {
    Topology t = support::make_topology("node A\nnode B\nnode C\nnode D\nlink A B 100\nlink B C 100\nlink C D 100\n");
    FlowSet flows{flow(t, "A", "B", Rational(5)), flow(t, "A", "D", Rational(3)), flow(t, "B", "D", Rational(9))};
    using V = std::vector<std::size_t>;
    EXPECT_EQ(ordering_sequence(t, flows, FlowOrdering::kSmallestDemandFirst, PathBounds{}), (V{1, 0, 2}));
    EXPECT_EQ(ordering_sequence(t, flows, FlowOrdering::kHighestDemandFirst, PathBounds{}), (V{2, 0, 1}));
    EXPECT_EQ(ordering_sequence(t, flows, FlowOrdering::kShortestPathFirst, PathBounds{}), (V{0, 2, 1}));
    EXPECT_EQ(ordering_sequence(t, flows, FlowOrdering::kShortestPathLast, PathBounds{}), (V{1, 2, 0}));
    EXPECT_EQ(ordering_name(FlowOrdering::kHighestDemandFirst), "HDF");
}

TEST(OrderedGreedy, SingleFlowGetsShortestPath) {
    Topology t = support::square();
    for (auto ord : {FlowOrdering::kShortestPathFirst, FlowOrdering::kShortestPathLast,
                     FlowOrdering::kSmallestDemandFirst, FlowOrdering::kHighestDemandFirst}) {
        auto o = ordered_greedy(t, {flow(t, "A", "C", Rational(10))}, ord, PathBounds{});
        EXPECT_EQ(route_of(o, 0), (Strings{"A", "B", "C"}));
    }
}

TEST(OrderedGreedy, ReusesActiveSwitchesAndLinks) {
    // Z-C carries the big flow first; A->C then goes through Z rather than
    // waking B, although A-B-C sorts first.
    Topology t = support::make_topology("node A\nnode B\nnode C\nnode Z\nlink A B 100\nlink B C 100\nlink A Z 100\nlink Z C 100\n");
    FlowSet flows{flow(t, "A", "C", Rational(30)), flow(t, "Z", "C", Rational(60))};
    auto o = ordered_greedy(t, flows, FlowOrdering::kHighestDemandFirst, PathBounds{});
    EXPECT_EQ(route_of(o, 0), (Strings{"A", "Z", "C"}));
    EXPECT_EQ(route_of(o, 1), (Strings{"Z", "C"}));
    EXPECT_FALSE(o.topology.switch_active(t.id("B")));
}

TEST(OrderedGreedy, RespectsCapacityThenFallsBack) {
    Topology t = triangle();
    FlowSet flows{flow(t, "A", "B", Rational(70)), flow(t, "A", "B", Rational(60))};
    auto o = ordered_greedy(t, flows, FlowOrdering::kHighestDemandFirst, PathBounds{});
    EXPECT_EQ(route_of(o, 1), (Strings{"A", "C", "B"}));
    EXPECT_EQ(o.fallback_count(), 0u);

    FlowSet too_much{flow(t, "A", "B", Rational(90)), flow(t, "A", "C", Rational(90)), flow(t, "A", "B", Rational(50))};
    auto f = ordered_greedy(t, too_much, FlowOrdering::kShortestPathFirst, PathBounds{});
    EXPECT_EQ(f.fallback_count(), 1u);
    EXPECT_EQ(f.fallback[2], 1);
}

TEST(BestCombination, SingleFlowFirstVariantWins) {
    Topology t = triangle();
    auto o = best_combination(t, {flow(t, "A", "B", Rational(50))}, kThirtyNinety, PathBounds{});
    EXPECT_EQ(o.name, "b");
    EXPECT_EQ(o.provenance, "SPF");
}

TEST(BestCombination, PostPassWinsWhenItSavesMost) {
    // SPF routes the small flow first and keeps A-B on; NSP then empties it.
    Topology t = triangle();
    FlowSet flows{flow(t, "A", "B", Rational(10)), flow(t, "A", "C", Rational(60)), flow(t, "B", "C", Rational(50))};
    auto all = combination_candidates(t, flows, kThirtyNinety, PathBounds{});
    ASSERT_EQ(all.size(), 12u);
    EXPECT_EQ(all[0].provenance, "SPF");
    EXPECT_EQ(all[1].provenance, "SPF+NSP");
    EXPECT_EQ(all[2].provenance, "SPF+NMU");
    EXPECT_EQ(all[11].provenance, "HDF+NMU");
    EXPECT_EQ(all[0].topology.active_link_count(), 3u);
    EXPECT_EQ(all[1].topology.active_link_count(), 2u);
    auto best = best_combination(t, flows, kThirtyNinety, PathBounds{});
    EXPECT_EQ(best.provenance, "SPF+NSP");
    EXPECT_EQ(best.topology.active_link_count(), 2u);
}

TEST(BestCombination, MatchesBestCandidateOnRandomInstances) {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 60; ++round) {
        auto inst = support::random_instance(rng, 6, 5);
        auto all = combination_candidates(inst.topology, inst.flows, inst.interval, PathBounds{});
        auto best = best_combination(inst.topology, inst.flows, inst.interval, PathBounds{});
        std::size_t fewest = all.front().topology.active_link_count();
        for (const auto& c : all) fewest = std::min(fewest, c.topology.active_link_count());
        EXPECT_EQ(best.topology.active_link_count(), fewest);
        // first candidate in fixed order among those with fewest links and top RESDN
        Rational top(-1);
        std::string winner;
        for (const auto& c : all) {
            if (c.topology.active_link_count() != fewest) continue;
            Rational r = resdn::resdn(c.state, c.topology, inst.interval);
            if (r > top) {
                top = r;
                winner = c.provenance;
            }
        }
        EXPECT_EQ(best.provenance, winner);
    }
}

TEST(PostPass, NeverLowersLinksSaved) {
    std::mt19937_64 rng(41);
    for (int round = 0; round < 150; ++round) {
        auto inst = support::random_instance(rng, 6, 5);
        for (auto ord : {FlowOrdering::kShortestPathFirst, FlowOrdering::kHighestDemandFirst}) {
            auto base = ordered_greedy(inst.topology, inst.flows, ord, PathBounds{});
            for (auto rule : {RerouteRule::kNextShortest, RerouteRule::kMaxUtility}) {
                auto after = reroute_underutilized(base, inst.interval, PathBounds{}, rule);
                EXPECT_LE(after.topology.active_link_count(), base.topology.active_link_count());
                EXPECT_TRUE(after.state.consistent(after.topology));
            }
        }
    }
}

TEST(Heuristics, InvariantsOnRandomInstances) {
    std::mt19937_64 rng(51);
    for (int round = 0; round < 150; ++round) {
        auto inst = support::random_instance(rng, 6, 5);
        for (const auto& name : heuristic_names()) {
            auto o = run_heuristic(name, inst.topology, inst.flows, inst.interval, PathBounds{});
            auto again = run_heuristic(name, inst.topology, inst.flows, inst.interval, PathBounds{});
            ASSERT_EQ(o.state.flow_count(), inst.flows.size()) << name;
            EXPECT_EQ(o.topology, again.topology) << name;
            EXPECT_TRUE(o.state.consistent(o.topology)) << name;
            bool guards_umax = name == "maxresdn" || name == "nsp" || name == "nmu";
            bool any_fallback = o.fallback_count() > 0;
            for (std::size_t i = 0; i < o.state.flow_count(); ++i) {
                const auto& a = o.state.assignments()[i];
                EXPECT_EQ(a.flow, inst.flows[i]) << name;
                EXPECT_EQ(a.path.source(), a.flow.source);
                EXPECT_EQ(a.path.destination(), a.flow.destination);
                if (any_fallback) continue;
                for (const auto& d : a.path.links()) {
                    EXPECT_LE(o.state.utilities().at(d), Rational(1)) << name;
                    // NSP/NMU start from capacity-only shortest paths, so only
                    // MaxRESDN holds u_max for every flow.
                    if (guards_umax && name == "maxresdn") EXPECT_LE(o.state.utilities().at(d), inst.interval.u_max()) << name;
                }
            }
            // nothing carrying load is switched off
            for (std::uint32_t l = 0; l < o.topology.link_count(); ++l) {
                if (!o.state.utilities().idle(LinkId{l})) EXPECT_TRUE(o.topology.link_active(LinkId{l})) << name;
            }
            if (!any_fallback) EXPECT_TRUE(verify_constraints(o.topology, o.state).feasible()) << name;
        }
    }
}

TEST(MaxResdn, TraceMatchesReplay) {
    std::mt19937_64 rng(61);
    for (int round = 0; round < 100; ++round) {
        auto inst = support::random_instance(rng, 6, 5);
        auto o = max_resdn(inst.topology, inst.flows, inst.interval, PathBounds{});
        ASSERT_EQ(o.resdn_trace.size(), inst.flows.size());
        RoutingState replay(inst.topology);
        for (std::size_t i = 0; i < inst.flows.size(); ++i) {
            replay.add(inst.topology, inst.flows[i], o.state.assignments()[i].path);
            Topology pruned = prune_idle(replay, inst.topology);
            EXPECT_EQ(o.resdn_trace[i], support::resdn_recount(pruned, replay, inst.interval));
        }
    }
}

TEST(Heuristics, UnknownName) {
    Topology t = triangle();
    EXPECT_THROW(run_heuristic("ecmp", t, {}, kThirtyNinety, PathBounds{}), std::invalid_argument);
}
