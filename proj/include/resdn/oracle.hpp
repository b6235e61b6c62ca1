#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "resdn/heuristics.hpp"
#include "resdn/net_model.hpp"

namespace resdn {

/// Constraints of the RESDN integer program, plus the requirement that
/// assigned links are switched on.
enum class Constraint {
    kCapacity,         // sum of rates on a directed link <= W
    kInteriorBalance,  // in-flow == out-flow at switches other than src/dst
    kDelivery,         // the path leaves the source and reaches the destination
    kInactiveSwitch,   // no flow over a link touching an inactive switch
    kSwitchActivity,   // an active switch carries flow on some incident link
    kLinkSwitch,       // an active link has both endpoint switches active
    kInactiveLink,     // no flow over an inactive link
};

std::string_view constraint_name(Constraint c);
inline constexpr Constraint kAllConstraints[] = {Constraint::kCapacity,       Constraint::kInteriorBalance,
                                                 Constraint::kDelivery,       Constraint::kInactiveSwitch,
                                                 Constraint::kSwitchActivity, Constraint::kLinkSwitch,
                                                 Constraint::kInactiveLink};

struct Violation {
    Constraint constraint;
    std::string detail;  // names the offending link, switch or flow
};

struct ConstraintReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool feasible() const { return violations.empty(); }
    [[nodiscard]] bool passed(Constraint c) const { return count(c) == 0; }
    [[nodiscard]] std::size_t count(Constraint c) const;
    [[nodiscard]] std::string summary() const;
};

/// Checks every constraint literally against the assignment; never mutates.
ConstraintReport verify_constraints(const Topology& topology, const RoutingState& state);

struct OracleResult {
    HeuristicOutcome optimum;    // valid only when found
    bool found = false;          // some combination was feasible
    std::uint64_t combinations = 0;  // product of candidate counts
    std::uint64_t visited = 0;       // leaves of the search, equals combinations
    std::uint64_t feasible = 0;
};

/// Exhaustive maximizer of RESDN (after switching off idle links) over
/// every combination of bounded candidate paths. Optimality is relative to
/// that candidate universe. Ties go to fewer total hops, then to the
/// earliest combination in candidate order.
/// Throws std::runtime_error when the combination count exceeds `budget`
/// or some flow has no candidate ("disconnected").
OracleResult exact_max_resdn(const Topology& topology, const FlowSet& flows, const UtilityInterval& interval,
                             const PathBounds& bounds, std::uint64_t budget = 1'000'000);

}  // namespace resdn
