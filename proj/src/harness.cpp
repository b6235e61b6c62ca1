#include "resdn/harness.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include "json.hpp"

namespace resdn {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kVersion = "1.0.0";

Rational pct(std::int64_t v) { return Rational(v, 100); }

std::string decimal(const Rational& r) { return format_decimal(r.to_double(), 9); }

// JSON numbers arrive as doubles; their shortest decimal form is exact
// for anything a person would type ("0.31").
Rational json_rational(const json& j, std::string_view key) {
    if (j.is_number()) return Rational::parse(fmt::format("{}", j.get<double>()));
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    throw std::invalid_argument(fmt::format("config: '{}' must be a number", key));
}

std::vector<Rational> json_rationals(const json& j, std::string_view key) {
    if (!j.is_array()) throw std::invalid_argument(fmt::format("config: '{}' must be an array", key));
    std::vector<Rational> out;
    for (const auto& v : j) out.push_back(json_rational(v, key));
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_absolute() || base.empty()) return path;
    return base / path;
}

Rational unit_peak(const Topology& topology, const TrafficMatrix& matrix, const PathBounds& bounds) {
    FlowSet flows = bind_flows(matrix, topology);
    PathCache cache(topology, bounds);
    std::vector<Rational> load(2 * topology.link_count());
    for (const auto& f : flows) {
        const auto& paths = cache.get(f.source, f.destination);
        if (paths.empty())
            throw std::runtime_error(fmt::format("disconnected: no path from {} to {}", topology.name(f.source),
                                                 topology.name(f.destination)));
        for (const auto& d : paths.front().links()) load[d.index()] += f.rate;
    }
    Rational peak;
    for (std::uint32_t l = 0; l < topology.link_count(); ++l) {
        for (auto dir : {Direction::kForward, Direction::kReverse}) {
            DirectedLink d{LinkId{l}, dir};
            peak = std::max(peak, load[d.index()] / topology.bandwidth(d));
        }
    }
    return peak;
}

MetricsReport blank_row(const ExperimentConfig& config, const Workload& workload, std::size_t matrix_index,
                        std::string_view heuristic, const Rational& volume, const UtilityInterval& interval) {
    MetricsReport r;
    r.heuristic = std::string(heuristic);
    r.matrix_index = matrix_index;
    r.volume = volume;
    r.interval = interval;
    r.bounds = config.bounds;
    r.power_profile = workload.profile.name;
    return r;
}

SweepPoint sweep_point(const ExperimentConfig& config, const Workload& workload, const Rational& volume,
                       const Rational& parameter, const Rational& u_min, const Rational& u_max) {
    SweepPoint point;
    point.volume = volume;
    point.parameter = parameter;
    UtilityInterval interval;
    try {
        interval = UtilityInterval(u_min, u_max);
    } catch (const std::exception& e) {
        point.valid = false;
        point.status = fmt::format("invalid: {}", e.what());
        return point;
    }
    std::size_t ok = 0;
    std::string last_error;
    for (std::size_t m = 0; m < workload.matrices.size(); ++m) {
        MetricsReport row = run_cell(config, workload, m, config.sweep_heuristic, volume, interval);
        if (row.status != "ok") {
            last_error = row.status;
            continue;
        }
        ++ok;
        point.links_saved_pct += row.links_saved_pct.to_double();
        point.resdn += row.resdn.to_double();
    }
    if (ok == 0) {
        point.valid = false;
        point.status = last_error;
        return point;
    }
    point.links_saved_pct /= static_cast<double>(ok);
    point.resdn /= static_cast<double>(ok);
    return point;
}

/// Index of the best valid point; ties to the smaller parameter.
std::optional<std::size_t> argmax(const std::vector<SweepPoint>& points) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].valid) continue;
        if (!best) {
            best = i;
            continue;
        }
        const SweepPoint& b = points[*best];
        if (points[i].links_saved_pct > b.links_saved_pct ||
            (points[i].links_saved_pct == b.links_saved_pct && points[i].parameter < b.parameter))
            best = i;
    }
    return best;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    out << content;
    out.close();
    if (!out) throw std::runtime_error(fmt::format("write failed: {}", path.string()));
}

}  // namespace

const std::vector<ScheduleEntry>& table_v_schedule() {
    static const std::vector<ScheduleEntry> schedule = [] {
        const std::int64_t volume[] = {20, 30, 40, 50, 60, 70, 80, 90};
        const std::int64_t u_min[] = {31, 28, 30, 25, 20, 19, 15, 12};
        const std::int64_t u_max[] = {82, 85, 90, 90, 92, 95, 95, 95};
        std::vector<ScheduleEntry> s;
        for (int i = 0; i < 8; ++i) s.push_back({pct(volume[i]), UtilityInterval(pct(u_min[i]), pct(u_max[i]))});
        return s;
    }();
    return schedule;
}

std::string_view volume_basis_name(VolumeBasis basis) {
    return basis == VolumeBasis::kSaturation ? "saturation" : "capacity";
}

VolumeBasis parse_volume_basis(std::string_view text) {
    if (text == "saturation") return VolumeBasis::kSaturation;
    if (text == "capacity") return VolumeBasis::kCapacity;
    throw std::invalid_argument(fmt::format("unknown volume basis '{}' (expected saturation|capacity)", text));
}

std::vector<Rational> default_volumes() {
    std::vector<Rational> v;
    for (const auto& e : table_v_schedule()) v.push_back(e.volume);
    return v;
}

std::vector<Rational> rational_grid(const Rational& from, const Rational& to, const Rational& step) {
    if (!step.is_positive()) throw std::invalid_argument("grid step must be positive");
    std::vector<Rational> grid;
    for (Rational x = from; x <= to; x += step) grid.push_back(x);
    return grid;
}

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(fmt::format("config: {}", e.what()));
    }
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");

    ExperimentConfig c;
    for (const auto& [key, v] : j.items()) {
        if (key == "topology") {
            c.topology_path = resolve(base_dir, v.get<std::string>());
        } else if (key == "traffic") {
            c.traffic_paths.clear();
            if (v.is_string()) {
                c.traffic_paths.push_back(resolve(base_dir, v.get<std::string>()));
            } else {
                for (const auto& t : v) c.traffic_paths.push_back(resolve(base_dir, t.get<std::string>()));
            }
        } else if (key == "generated_matrices") {
            c.generated_matrices = v.get<std::size_t>();
        } else if (key == "volumes") {
            c.volumes = json_rationals(v, key);
        } else if (key == "schedule") {
            if (v.is_string() && v.get<std::string>() == "table") {
                c.schedule = table_v_schedule();
                continue;
            }
            if (!v.is_array()) throw std::invalid_argument("config: 'schedule' must be \"table\" or an array");
            c.schedule.clear();
            for (const auto& e : v)
                c.schedule.push_back({json_rational(e.at("volume"), "volume"),
                                      UtilityInterval(json_rational(e.at("u_min"), "u_min"),
                                                      json_rational(e.at("u_max"), "u_max"))});
        } else if (key == "interval") {
            if (v.is_null()) {
                c.fixed_interval.reset();
                continue;
            }
            auto pair = json_rationals(v, key);
            if (pair.size() != 2) throw std::invalid_argument("config: 'interval' must be [u_min, u_max]");
            c.fixed_interval = UtilityInterval(pair[0], pair[1]);
        } else if (key == "heuristics") {
            c.heuristics = v.get<std::vector<std::string>>();
        } else if (key == "profile") {
            c.profile = v.get<std::string>();
        } else if (key == "profile_path") {
            if (v.is_null())
                c.profile_path.reset();
            else
                c.profile_path = resolve(base_dir, v.get<std::string>());
        } else if (key == "hop_slack") {
            c.bounds.slack = v.get<int>();
        } else if (key == "max_paths") {
            c.bounds.max_paths = v.get<std::size_t>();
        } else if (key == "max_hops") {
            if (v.is_null())
                c.bounds.max_hops.reset();
            else
                c.bounds.max_hops = v.get<int>();
        } else if (key == "seed") {
            c.seed = v.get<std::uint64_t>();
        } else if (key == "shuffle_flows") {
            c.shuffle_flows = v.get<bool>();
        } else if (key == "volume_basis") {
            c.volume_basis = parse_volume_basis(v.get<std::string>());
        } else if (key == "m") {
            c.m = json_rational(v, key);
        } else if (key == "n") {
            c.n = json_rational(v, key);
        } else if (key == "sweep_heuristic") {
            c.sweep_heuristic = v.get<std::string>();
        } else if (key == "fixed_umax") {
            c.fixed_umax = json_rational(v, key);
        } else if (key == "fixed_umin") {
            c.fixed_umin = json_rational(v, key);
        } else if (key == "umin_grid") {
            c.umin_grid = json_rationals(v, key);
        } else if (key == "umax_grid") {
            c.umax_grid = json_rationals(v, key);
        } else if (key == "output_dir") {
            c.output_dir = resolve(base_dir, v.get<std::string>());
        } else {
            throw std::invalid_argument(fmt::format("config: unknown key '{}'", key));
        }
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path), path.parent_path());
}

std::string config_to_json(const ExperimentConfig& c) {
    auto decimals = [](const std::vector<Rational>& values) {
        ordered_json a = ordered_json::array();
        for (const auto& v : values) a.push_back(decimal(v));
        return a;
    };
    ordered_json j;
    j["topology"] = c.topology_path.generic_string();
    ordered_json traffic = ordered_json::array();
    for (const auto& p : c.traffic_paths) traffic.push_back(p.generic_string());
    j["traffic"] = traffic;
    j["generated_matrices"] = c.generated_matrices;
    j["volumes"] = decimals(c.volumes);
    ordered_json schedule = ordered_json::array();
    for (const auto& e : c.schedule)
        schedule.push_back({{"volume", decimal(e.volume)},
                            {"u_min", decimal(e.interval.u_min())},
                            {"u_max", decimal(e.interval.u_max())}});
    j["schedule"] = schedule;
    if (c.fixed_interval)
        j["interval"] = {decimal(c.fixed_interval->u_min()), decimal(c.fixed_interval->u_max())};
    else
        j["interval"] = nullptr;
    j["heuristics"] = c.heuristics;
    j["profile"] = c.profile;
    j["profile_path"] = c.profile_path ? ordered_json(c.profile_path->generic_string()) : ordered_json(nullptr);
    j["hop_slack"] = c.bounds.slack;
    j["max_paths"] = c.bounds.max_paths;
    j["max_hops"] = c.bounds.max_hops ? ordered_json(*c.bounds.max_hops) : ordered_json(nullptr);
    j["seed"] = c.seed;
    j["shuffle_flows"] = c.shuffle_flows;
    j["volume_basis"] = std::string(volume_basis_name(c.volume_basis));
    j["m"] = decimal(c.m);
    j["n"] = decimal(c.n);
    j["sweep_heuristic"] = c.sweep_heuristic;
    j["fixed_umax"] = decimal(c.fixed_umax);
    j["fixed_umin"] = decimal(c.fixed_umin);
    j["umin_grid"] = decimals(c.umin_grid);
    j["umax_grid"] = decimals(c.umax_grid);
    j["output_dir"] = c.output_dir.generic_string();
    return j.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& c) {
    if (c.heuristics.empty()) throw std::invalid_argument("nothing to run");
    if (c.volumes.empty()) throw std::invalid_argument("nothing to run: no volumes");
    const auto& known = heuristic_names();
    for (const auto& h : c.heuristics) {
        if (std::find(known.begin(), known.end(), h) == known.end())
            throw std::invalid_argument(fmt::format("unknown heuristic '{}'", h));
    }
    if (std::find(known.begin(), known.end(), c.sweep_heuristic) == known.end())
        throw std::invalid_argument(fmt::format("unknown heuristic '{}'", c.sweep_heuristic));
    for (const auto& v : c.volumes) {
        if (!v.is_positive() || v > Rational(1))
            throw std::invalid_argument(fmt::format("volume {} outside (0, 1]", decimal(v)));
        if (!c.fixed_interval) (void)interval_for(c, v);
    }
    if (!c.profile_path) (void)builtin_profile(c.profile);
    if (!c.m.is_positive() || !c.n.is_positive()) throw std::invalid_argument("m and n must be positive");
    if (c.traffic_paths.empty() && c.generated_matrices == 0) throw std::invalid_argument("nothing to run: no traffic");
}

Workload load_workload(const ExperimentConfig& c) {
    Workload w;
    w.topology = Topology::build(parse_topology(read_text_file(c.topology_path)));
    if (c.traffic_paths.empty()) {
        // matrix i comes from seed + i
        for (std::size_t i = 0; i < c.generated_matrices; ++i)
            w.matrices.push_back(generate_traffic_matrix(w.topology, c.seed + i));
    } else {
        for (const auto& p : c.traffic_paths) {
            try {
                w.matrices.push_back(parse_traffic_matrix(read_text_file(p)));
            } catch (const InputError& e) {
                throw std::runtime_error(fmt::format("{}: {}", p.string(), e.what()));
            }
        }
    }
    w.profile = c.profile_path ? load_profile(*c.profile_path) : builtin_profile(c.profile);
    for (const auto& m : w.matrices) {
        if (c.volume_basis == VolumeBasis::kSaturation && !m.entries.empty())
            w.unit_peak_utility.push_back(unit_peak(w.topology, m, c.bounds));
        else
            w.unit_peak_utility.emplace_back(0);
    }
    return w;
}

UtilityInterval interval_for(const ExperimentConfig& c, const Rational& volume) {
    if (c.fixed_interval) return *c.fixed_interval;
    for (const auto& e : c.schedule) {
        if (e.volume == volume) return e.interval;
    }
    throw std::invalid_argument(fmt::format("schedule has no interval for volume {}", decimal(volume)));
}

FlowSet flows_at_volume(const ExperimentConfig& c, const Workload& w, std::size_t matrix_index,
                        const Rational& volume) {
    const TrafficMatrix& matrix = w.matrices.at(matrix_index);
    TrafficMatrix scaled;
    if (c.volume_basis == VolumeBasis::kCapacity) {
        scaled = scale_to_volume(matrix, w.topology, volume);
    } else {
        if (matrix.entries.empty()) throw std::invalid_argument("nothing to scale: empty traffic matrix");
        if (!volume.is_positive() || volume > Rational(1))
            throw std::invalid_argument(fmt::format("volume {} outside (0, 1]", decimal(volume)));
        Rational factor = volume / w.unit_peak_utility.at(matrix_index);
        scaled = matrix;
        for (auto& e : scaled.entries) e.rate *= factor;
    }
    FlowSet flows = bind_flows(scaled, w.topology);
    if (c.shuffle_flows) {
        std::mt19937_64 rng(c.seed * 1000003u + matrix_index);
        std::shuffle(flows.begin(), flows.end(), rng);
    }
    return flows;
}

MetricsReport run_cell(const ExperimentConfig& c, const Workload& w, std::size_t matrix_index,
                       std::string_view heuristic, const Rational& volume, const UtilityInterval& interval) {
    MetricsReport r = blank_row(c, w, matrix_index, heuristic, volume, interval);
    try {
        FlowSet flows = flows_at_volume(c, w, matrix_index, volume);
        r.flows = flows.size();
        HeuristicOutcome outcome = run_heuristic(heuristic, w.topology, flows, interval, c.bounds);
        r.provenance = outcome.provenance;
        r.fallback_flows = outcome.fallback_count();
        r.resdn = resdn::resdn(outcome.state, outcome.topology, interval);
        r.links_saved_pct = links_saved(outcome.topology);
        r.avg_path_length = flows.empty() ? Rational(0) : avg_path_length(outcome.state);
        r.traffic_proportionality = traffic_proportionality(volume, outcome.topology, c.m, c.n);
        r.active_switches = outcome.topology.active_switch_count();
        r.active_links = outcome.topology.active_link_count();
        auto power = network_power_report(outcome.topology, outcome.state, w.profile,
                                          w.matrices.at(matrix_index).window_s.to_double());
        r.total_power_w = power.total_w;
        r.avg_power_active_w = power.average_active_w;
        r.avg_power_all_w = power.average_all_w;
    } catch (const std::exception& e) {
        r.status = fmt::format("error: {}", e.what());
    }
    return r;
}

std::vector<MetricsReport> run_experiment(const ExperimentConfig& c) {
    validate_config(c);
    return run_experiment(c, load_workload(c));
}

std::vector<MetricsReport> run_experiment(const ExperimentConfig& c, const Workload& w) {
    validate_config(c);
    std::vector<MetricsReport> rows;
    for (std::size_t m = 0; m < w.matrices.size(); ++m) {
        for (const auto& h : c.heuristics) {
            for (const auto& v : c.volumes) rows.push_back(run_cell(c, w, m, h, v, interval_for(c, v)));
        }
    }
    return rows;
}

Series sweep_umin(const ExperimentConfig& c, const Rational& fixed_umax, const std::vector<Rational>& grid) {
    validate_config(c);
    return sweep_umin(c, load_workload(c), fixed_umax, grid);
}

Series sweep_umax(const ExperimentConfig& c, const Rational& fixed_umin, const std::vector<Rational>& grid) {
    validate_config(c);
    return sweep_umax(c, load_workload(c), fixed_umin, grid);
}

Series sweep_umin(const ExperimentConfig& c, const Workload& w, const Rational& fixed_umax,
                  const std::vector<Rational>& grid) {
    if (grid.empty()) throw std::invalid_argument("empty sweep grid");
    Series s{"umin", {}};
    for (const auto& v : c.volumes) {
        for (const auto& p : grid) s.points.push_back(sweep_point(c, w, v, p, p, fixed_umax));
    }
    return s;
}

Series sweep_umax(const ExperimentConfig& c, const Workload& w, const Rational& fixed_umin,
                  const std::vector<Rational>& grid) {
    if (grid.empty()) throw std::invalid_argument("empty sweep grid");
    Series s{"umax", {}};
    for (const auto& v : c.volumes) {
        for (const auto& p : grid) s.points.push_back(sweep_point(c, w, v, p, fixed_umin, p));
    }
    return s;
}

std::vector<PeakParams> find_peak_params(const ExperimentConfig& c, const std::vector<Rational>& volumes) {
    validate_config(c);
    return find_peak_params(c, load_workload(c), volumes);
}

std::vector<PeakParams> find_peak_params(const ExperimentConfig& c, const Workload& w,
                                         const std::vector<Rational>& volumes) {
    if (c.umin_grid.empty() || c.umax_grid.empty()) throw std::invalid_argument("empty sweep grid");
    std::vector<PeakParams> peaks;
    for (const auto& v : volumes) {
        std::vector<SweepPoint> first;
        for (const auto& p : c.umin_grid) first.push_back(sweep_point(c, w, v, p, p, c.fixed_umax));
        auto i = argmax(first);
        if (!i) throw std::runtime_error(fmt::format("no valid u_min at volume {}", decimal(v)));
        Rational u_min = first[*i].parameter;

        std::vector<SweepPoint> second;
        for (const auto& p : c.umax_grid) second.push_back(sweep_point(c, w, v, p, u_min, p));
        auto k = argmax(second);
        if (!k) throw std::runtime_error(fmt::format("no valid u_max at volume {}", decimal(v)));

        PeakParams peak;
        peak.volume = v;
        peak.u_min = u_min;
        peak.u_max = second[*k].parameter;
        peak.links_saved_pct = second[*k].links_saved_pct;
        peak.zero_savings = first[*i].links_saved_pct == 0.0 && second[*k].links_saved_pct == 0.0;
        peaks.push_back(peak);
    }
    return peaks;
}

std::string results_csv(const std::vector<MetricsReport>& rows) {
    std::string out = metrics_csv_header() + "\n";
    for (const auto& r : rows) out += metrics_csv_row(r) + "\n";
    return out;
}

std::string series_csv(const Series& s) {
    std::string out = fmt::format("volume,{},valid,links_saved_pct,resdn,status\n", s.name);
    for (const auto& p : s.points) {
        std::string status = p.status;
        std::replace(status.begin(), status.end(), ',', ';');
        out += fmt::format("{},{},{},{},{},{}\n", format_decimal(p.volume.to_double()),
                           format_decimal(p.parameter.to_double()), p.valid ? 1 : 0,
                           p.valid ? format_decimal(p.links_saved_pct) : std::string(),
                           p.valid ? format_decimal(p.resdn) : std::string(), status);
    }
    return out;
}

std::string peaks_csv(const std::vector<PeakParams>& peaks) {
    std::string out = "volume,u_min,u_max,links_saved_pct,zero_savings\n";
    for (const auto& p : peaks)
        out += fmt::format("{},{},{},{},{}\n", format_decimal(p.volume.to_double()), format_decimal(p.u_min.to_double()),
                           format_decimal(p.u_max.to_double()), format_decimal(p.links_saved_pct),
                           p.zero_savings ? 1 : 0);
    return out;
}

std::vector<std::filesystem::path> emit_outputs(const Outputs& outputs, const ExperimentConfig& config,
                                                const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error(fmt::format("cannot create {}: {}", dir.string(), ec.message()));

    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        auto path = dir / name;
        write_file(path, content);
        written.push_back(path);
    };
    if (!outputs.rows.empty()) emit("results.csv", results_csv(outputs.rows));
    for (const auto& s : outputs.series) emit(fmt::format("series_{}.csv", s.name), series_csv(s));
    if (outputs.peaks) emit("series_peaks.csv", peaks_csv(*outputs.peaks));

    ordered_json manifest;
    manifest["tool"] = "resdn";
    manifest["version"] = std::string(kVersion);
    manifest["fmt_version"] = FMT_VERSION;
    manifest["json_version"] = fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                           NLOHMANN_JSON_VERSION_PATCH);
    manifest["seed"] = config.seed;
    manifest["config"] = ordered_json::parse(config_to_json(config));
    ordered_json files = ordered_json::array();
    for (const auto& p : written) files.push_back(p.filename().generic_string());
    manifest["files"] = files;
    emit("manifest.json", manifest.dump(2) + "\n");
    return written;
}

}  // namespace resdn
