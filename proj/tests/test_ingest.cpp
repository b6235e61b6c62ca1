#include <gtest/gtest.h>

#include <random>
#include <set>

#include "resdn/ingest.hpp"
#include "support.hpp"

using namespace resdn;

namespace {

int line_of(auto&& fn) {
    try {
        fn();
    } catch (const InputError& e) {
        return e.line();
    }
    return -1;
}

std::string message_of(auto&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(ParseTopology, SmallestFile) {
    auto d = parse_topology("node A\nnode B\nlink A B 100");
    ASSERT_EQ(d.nodes.size(), 2u);
    ASSERT_EQ(d.links.size(), 1u);
    EXPECT_EQ(d.links[0].bandwidth, Rational(100));
}

TEST(ParseTopology, CommentsAndBlankLines) {
    auto d = parse_topology("# net\n\nnode A   # first\nnode B\n  link A B 2.5\n");
    EXPECT_EQ(d.nodes.size(), 2u);
    EXPECT_EQ(d.links[0].bandwidth, Rational(5, 2));
}

TEST(ParseTopology, Errors) {
    EXPECT_NE(message_of([] { parse_topology("node A\nlink A A 100\n"); }).find("self-loop"), std::string::npos);
    EXPECT_EQ(line_of([] { parse_topology("node A\nlink A A 100\n"); }), 2);
    EXPECT_NE(message_of([] { parse_topology("node A\nnode A\n"); }).find("duplicate node"), std::string::npos);
    EXPECT_NE(message_of([] { parse_topology("node A\nnode B\nlink A B 1\nlink B A 1\n"); }).find("duplicate link"),
              std::string::npos);
    EXPECT_EQ(line_of([] { parse_topology("node A\nnode B\nlink A B 1\nlink B A 1\n"); }), 4);
    EXPECT_NE(message_of([] { parse_topology("node A-1\n"); }).find("syntax error"), std::string::npos);
    EXPECT_NE(message_of([] { parse_topology("router A\n"); }).find("syntax error"), std::string::npos);
    EXPECT_NE(message_of([] { parse_topology("node A\nnode B\nlink A B\n"); }).find("syntax error"), std::string::npos);
    EXPECT_NE(message_of([] { parse_topology("node A\nnode B\nlink A B -3\n"); }).find("non-positive bandwidth"),
              std::string::npos);
}

TEST(ParseTopology, GeantLikeFixture) {
    auto d = parse_topology(read_text_file(RESDN_DATA_DIR "/geant_like.topo"));
    EXPECT_EQ(d.nodes.size(), 22u);
    EXPECT_EQ(d.links.size(), 36u);
}

// Arbitrary bytes either parse or fail with a line number; nothing else escapes.
TEST(ParseTopology, TotalOnRandomBytes) {
    std::mt19937_64 rng(3);
    const std::string alphabet = "nodelink AB01 \n#.-,\t\x01\xff";
    for (int i = 0; i < 2000; ++i) {
        std::string text;
        int len = support::uniform(rng, 0, 60);
        for (int k = 0; k < len; ++k) text += alphabet[static_cast<std::size_t>(support::uniform(rng, 0, static_cast<int>(alphabet.size()) - 1))];
        try {
            (void)parse_topology(text);
            (void)parse_traffic_matrix(text);
        } catch (const InputError& e) {
            EXPECT_GE(e.line(), 1);
        }
    }
}

TEST(ParseTrafficMatrix, OneFlow) {
    auto m = parse_traffic_matrix("A,B,7.79");
    ASSERT_EQ(m.entries.size(), 1u);
    EXPECT_EQ(m.entries[0].rate, Rational(779, 100));
    EXPECT_EQ(m.window_s, Rational(900));
}

TEST(ParseTrafficMatrix, EmptyHeaderZeroAndNegative) {
    EXPECT_TRUE(parse_traffic_matrix("").entries.empty());
    auto m = parse_traffic_matrix("src,dst,rate_mbps\n# c\nA,B,0\nB,A,3\n");
    ASSERT_EQ(m.entries.size(), 1u);
    EXPECT_EQ(m.entries[0].line, 4);
    EXPECT_NE(message_of([] { parse_traffic_matrix("A,B,-1"); }).find("negative rate"), std::string::npos);
    EXPECT_EQ(line_of([] { parse_traffic_matrix("A,B,1\nA,B\n"); }), 2);
}

TEST(BindFlows, UnknownNodeNamesLine) {
    Topology t = support::triangle();
    auto m = parse_traffic_matrix("A,B,1\nA,Z,2\n");
    EXPECT_EQ(line_of([&] { bind_flows(m, t); }), 2);
    auto same = parse_traffic_matrix("A,A,1\n");
    EXPECT_EQ(line_of([&] { bind_flows(same, t); }), 1);
}

TEST(ScaleToVolume, SolvesForFactor) {
    // 5 links of 100 Mbps: directed capacity 1000
    Topology t = support::make_topology(
        "node A\nnode B\nnode C\nnode D\nnode E\nlink A B 100\nlink B C 100\nlink C D 100\nlink D E 100\nlink A E 100\n");
    auto m = parse_traffic_matrix("A,B,60\nC,D,40\n");
    auto s = scale_to_volume(m, t, Rational(1, 5));
    EXPECT_EQ(s.total_rate(), Rational(200));
    EXPECT_EQ(s.entries[0].rate, Rational(120));
    EXPECT_EQ(traffic_volume(s, t), Rational(1, 5));
    auto same = scale_to_volume(m, t, Rational(1, 10));
    EXPECT_EQ(same.entries[0].rate, Rational(60));
}

TEST(ScaleToVolume, Errors) {
    Topology t = support::triangle();
    EXPECT_NE(message_of([&] { scale_to_volume(TrafficMatrix{}, t, Rational(1, 2)); }).find("nothing to scale"),
              std::string::npos);
    auto m = parse_traffic_matrix("A,B,1\n");
    EXPECT_THROW(scale_to_volume(m, t, Rational(0)), std::invalid_argument);
    EXPECT_THROW(scale_to_volume(m, t, Rational(3, 2)), std::invalid_argument);
}

TEST(ScaleToVolume, ExactOnRandomMatrices) {
    Topology t = Topology::build(parse_topology(read_text_file(RESDN_DATA_DIR "/geant_like.topo")));
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto m = generate_traffic_matrix(t, seed);
        for (int pct = 10; pct <= 100; pct += 15) {
            Rational target(pct, 100);
            EXPECT_EQ(traffic_volume(scale_to_volume(m, t, target), t), target);
        }
    }
}

TEST(Generator, ShapeAndDeterminism) {
    Topology t = Topology::build(parse_topology(read_text_file(RESDN_DATA_DIR "/geant_like.topo")));
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto m = generate_traffic_matrix(t, seed);
        EXPECT_GE(m.entries.size(), 82u);
        EXPECT_LE(m.entries.size(), 462u);
        std::set<std::pair<std::string, std::string>> pairs;
        for (const auto& e : m.entries) {
            EXPECT_NE(e.source, e.destination);
            EXPECT_TRUE(e.rate.is_positive());
            pairs.insert({e.source, e.destination});
        }
        EXPECT_EQ(pairs.size(), m.entries.size());
        EXPECT_EQ(format_traffic_matrix(m), format_traffic_matrix(generate_traffic_matrix(t, seed)));
    }
}

TEST(Generator, MeanRateNearTarget) {
    Topology t = Topology::build(parse_topology(read_text_file(RESDN_DATA_DIR "/geant_like.topo")));
    Rational total;
    std::size_t n = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        auto m = generate_traffic_matrix(t, seed);
        total += m.total_rate();
        n += m.entries.size();
    }
    EXPECT_NEAR(total.to_double() / static_cast<double>(n), 7.79, 0.4);
}

TEST(Format, RoundTrips) {
    Topology t = support::square();
    EXPECT_EQ(Topology::build(parse_topology(format_topology(t))), t);
    auto m = parse_traffic_matrix("A,B,1.25\nC,D,3\n");
    auto again = parse_traffic_matrix(format_traffic_matrix(m));
    ASSERT_EQ(again.entries.size(), 2u);
    EXPECT_EQ(again.entries[0].rate, Rational(5, 4));
}

TEST(Fixture, ShippedMatricesBind) {
    Topology t = Topology::build(parse_topology(read_text_file(RESDN_DATA_DIR "/geant_like.topo")));
    for (int i = 1; i <= 3; ++i) {
        auto m = parse_traffic_matrix(read_text_file(std::string(RESDN_DATA_DIR) + "/geant_like_tm" + std::to_string(i) + ".csv"));
        EXPECT_EQ(bind_flows(m, t).size(), m.entries.size());
        EXPECT_EQ(format_traffic_matrix(m), format_traffic_matrix(generate_traffic_matrix(t, static_cast<std::uint64_t>(i))));
    }
}
