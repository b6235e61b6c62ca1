// resdn command line: run grids, parameter sweeps, peak search and the
// exhaustive oracle on small instances.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include "CLI11.hpp"

#include "resdn/harness.hpp"
#include "resdn/oracle.hpp"

using namespace resdn;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<Rational> parse_list(const std::string& text) {
    std::vector<Rational> out;
    for (const auto& s : split(text, ',')) out.push_back(Rational::parse(s));
    return out;
}

// grid given as "a,b,c" or "from:to:step"
std::vector<Rational> parse_grid(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.size() == 3)
        return rational_grid(Rational::parse(parts[0]), Rational::parse(parts[1]), Rational::parse(parts[2]));
    return parse_list(text);
}

struct Flags {
    std::string config;
    std::string topology;
    std::vector<std::string> traffic;
    std::size_t matrices = 0;
    std::string volumes;
    std::string heuristics;
    std::string profile;
    std::string profile_file;
    std::string interval;  // "table" or "u,v"
    std::string basis;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool shuffle = false;
    int slack = -1;
    int max_hops = -1;
    std::size_t max_paths = 0;
    std::string out;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config, "JSON config file (flags override it)");
    app->add_option("--topology", f.topology, "topology file");
    app->add_option("--traffic", f.traffic, "traffic matrix CSV (repeatable)");
    app->add_option("--matrices", f.matrices, "generate this many matrices from the seed when no --traffic");
    app->add_option("--volumes", f.volumes, "comma separated fractions, e.g. 0.2,0.5");
    app->add_option("--profile", f.profile, "nec|ovs|zodiac");
    app->add_option("--profile-file", f.profile_file, "JSON power profile");
    app->add_option("--umin-umax", f.interval, "'table' or u_min,u_max");
    app->add_option("--volume-basis", f.basis, "saturation|capacity");
    app->add_option("--seed", f.seed, "random seed")->each([&](const std::string&) { f.seed_set = true; });
    app->add_flag("--shuffle", f.shuffle, "shuffle flow order (seeded)");
    app->add_option("--hop-slack", f.slack, "extra hops over the shortest path");
    app->add_option("--max-hops", f.max_hops, "absolute hop bound");
    app->add_option("--max-paths", f.max_paths, "candidate paths per pair");
    app->add_option("--out", f.out, "output directory");
}

ExperimentConfig build_config(const Flags& f) {
    ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    if (!f.topology.empty()) c.topology_path = f.topology;
    if (!f.traffic.empty()) c.traffic_paths.assign(f.traffic.begin(), f.traffic.end());
    if (f.matrices > 0) c.generated_matrices = f.matrices;
    if (!f.volumes.empty()) c.volumes = parse_list(f.volumes);
    if (!f.heuristics.empty()) c.heuristics = split(f.heuristics, ',');
    if (!f.profile.empty()) c.profile = f.profile;
    if (!f.profile_file.empty()) c.profile_path = f.profile_file;
    if (f.interval == "table") {
        c.fixed_interval.reset();
        c.schedule = table_v_schedule();
    } else if (!f.interval.empty()) {
        auto pair = parse_list(f.interval);
        if (pair.size() != 2) throw std::invalid_argument("--umin-umax expects 'table' or u_min,u_max");
        c.fixed_interval = UtilityInterval(pair[0], pair[1]);
    }
    if (!f.basis.empty()) c.volume_basis = parse_volume_basis(f.basis);
    if (f.seed_set) c.seed = f.seed;
    if (f.shuffle) c.shuffle_flows = true;
    if (f.slack >= 0) c.bounds.slack = f.slack;
    if (f.max_hops > 0) c.bounds.max_hops = f.max_hops;
    if (f.max_paths > 0) c.bounds.max_paths = f.max_paths;
    if (!f.out.empty()) c.output_dir = f.out;
    if (c.topology_path.empty()) throw std::invalid_argument("--topology is required");
    return c;
}

void report(const std::vector<std::filesystem::path>& files) {
    for (const auto& p : files) fmt::print("wrote {}\n", p.string());
}

int run_oracle(const Flags& f, const std::string& heuristics) {
    ExperimentConfig c = build_config(f);
    Workload w = load_workload(c);
    if (!f.heuristics.empty()) c.heuristics = split(heuristics, ',');
    for (const auto& v : c.volumes) {
        UtilityInterval interval = interval_for(c, v);
        for (std::size_t m = 0; m < w.matrices.size(); ++m) {
            FlowSet flows = flows_at_volume(c, w, m, v);
            OracleResult r = exact_max_resdn(w.topology, flows, interval, c.bounds);
            fmt::print("matrix {} volume {} interval [{}, {}]: {} combinations, {} feasible\n", m,
                       format_decimal(v.to_double()), format_decimal(interval.u_min().to_double()),
                       format_decimal(interval.u_max().to_double()), r.combinations, r.feasible);
            if (!r.found) {
                fmt::print("  no capacity-feasible combination\n");
                continue;
            }
            Rational best = resdn::resdn(r.optimum.state, r.optimum.topology, interval);
            fmt::print("  optimum RESDN {} ({}), links saved {}%\n", best.to_string(),
                       format_decimal(best.to_double()), format_decimal(links_saved(r.optimum.topology).to_double()));
            for (const auto& h : c.heuristics) {
                HeuristicOutcome o = run_heuristic(h, w.topology, flows, interval, c.bounds);
                Rational value = resdn::resdn(o.state, o.topology, interval);
                bool ok = verify_constraints(o.topology, o.state).feasible();
                fmt::print("  {:<9} RESDN {} gap {}{}\n", h, format_decimal(value.to_double()),
                           format_decimal((best - value).to_double()), ok ? "" : " (violates constraints)");
            }
        }
    }
    fmt::print("optimality is relative to the bounded candidate paths (slack {}, max {} paths{})\n", c.bounds.slack,
               c.bounds.max_paths, c.bounds.max_hops ? fmt::format(", hop bound {}", *c.bounds.max_hops) : "");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy-aware SDN routing simulator"};
    app.require_subcommand(1);

    Flags f;
    std::string grid;
    std::string fixed;
    std::string sweep_heuristic;

    auto* run = app.add_subcommand("run", "route every heuristic x volume cell and write results.csv");
    add_common(run, f);
    run->add_option("--heuristics", f.heuristics, "comma separated, default all");

    auto* umin = app.add_subcommand("sweep-umin", "links saved against u_min at fixed u_max");
    add_common(umin, f);
    umin->add_option("--grid", grid, "u_min values: a,b,c or from:to:step");
    umin->add_option("--fixed-umax", fixed, "u_max held fixed (default 0.95)");
    umin->add_option("--heuristic", sweep_heuristic, "default maxresdn");

    auto* umax = app.add_subcommand("sweep-umax", "links saved against u_max at fixed u_min");
    add_common(umax, f);
    umax->add_option("--grid", grid, "u_max values: a,b,c or from:to:step");
    umax->add_option("--fixed-umin", fixed, "u_min held fixed (default 0.30)");
    umax->add_option("--heuristic", sweep_heuristic, "default maxresdn");

    auto* peaks = app.add_subcommand("peaks", "coordinate ascent for the best (u_min, u_max) per volume");
    add_common(peaks, f);
    peaks->add_option("--heuristic", sweep_heuristic, "default maxresdn");

    auto* oracle = app.add_subcommand("oracle", "exhaustive optimum and heuristic gaps on a small instance");
    add_common(oracle, f);
    oracle->add_option("--heuristics", f.heuristics, "comma separated, default all");

    std::string generate_out;
    auto* generate = app.add_subcommand("generate", "write a synthetic traffic matrix CSV for a topology");
    add_common(generate, f);
    generate->add_option("--file", generate_out, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (oracle->parsed()) return run_oracle(f, f.heuristics);
        if (generate->parsed()) {
            ExperimentConfig c = build_config(f);
            auto topology = Topology::build(parse_topology(read_text_file(c.topology_path)));
            TrafficMatrix m = generate_traffic_matrix(topology, c.seed);
            std::FILE* out = std::fopen(generate_out.c_str(), "wb");
            if (out == nullptr) throw std::runtime_error(fmt::format("cannot write {}", generate_out));
            fmt::print(out, "{}", format_traffic_matrix(m));
            std::fclose(out);
            fmt::print("wrote {} ({} flows)\n", generate_out, m.entries.size());
            return 0;
        }

        ExperimentConfig c = build_config(f);
        if (!sweep_heuristic.empty()) c.sweep_heuristic = sweep_heuristic;
        validate_config(c);
        Workload w = load_workload(c);
        Outputs out;
        if (run->parsed()) {
            out.rows = run_experiment(c, w);
            std::size_t failed = 0;
            for (const auto& r : out.rows) failed += r.status == "ok" ? 0 : 1;
            if (failed > 0) fmt::print(stderr, "{} of {} cells failed, see the status column\n", failed, out.rows.size());
        } else if (umin->parsed()) {
            if (!fixed.empty()) c.fixed_umax = Rational::parse(fixed);
            if (!grid.empty()) c.umin_grid = parse_grid(grid);
            out.series.push_back(sweep_umin(c, w, c.fixed_umax, c.umin_grid));
        } else if (umax->parsed()) {
            if (!fixed.empty()) c.fixed_umin = Rational::parse(fixed);
            if (!grid.empty()) c.umax_grid = parse_grid(grid);
            out.series.push_back(sweep_umax(c, w, c.fixed_umin, c.umax_grid));
        } else if (peaks->parsed()) {
            out.peaks = find_peak_params(c, w, c.volumes);
            for (const auto& p : *out.peaks)
                fmt::print("volume {}: u_min* {} u_max* {} links saved {}%{}\n", format_decimal(p.volume.to_double()),
                           format_decimal(p.u_min.to_double()), format_decimal(p.u_max.to_double()),
                           format_decimal(p.links_saved_pct), p.zero_savings ? " (nothing saved)" : "");
        }
        report(emit_outputs(out, c, c.output_dir));
    } catch (const std::exception& e) {
        fmt::print(stderr, "resdn: {}\n", e.what());
        return 1;
    }
    return 0;
}
