#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "resdn/heuristics.hpp"
#include "resdn/ingest.hpp"
#include "resdn/metrics.hpp"
#include "resdn/net_model.hpp"
#include "resdn/power.hpp"
#include "resdn/rational.hpp"

namespace resdn {

struct ScheduleEntry {
    Rational volume;
    UtilityInterval interval;
};

/// Volumes 0.2 .. 0.9 with their (u_min, u_max) pairs, percent -> fraction.
const std::vector<ScheduleEntry>& table_v_schedule();

/// How a target volume turns into a rate scale factor.
///  saturation: 1.0 is the load at which plain shortest-path routing (first
///              candidate, no capacity check) brings its busiest directed
///              link to capacity.
///  capacity:   sum(rate) / sum(directed capacity), as scale_to_volume.
enum class VolumeBasis { kSaturation, kCapacity };
std::string_view volume_basis_name(VolumeBasis basis);
VolumeBasis parse_volume_basis(std::string_view text);

/// 0.2, 0.3, ..., 0.9
std::vector<Rational> default_volumes();
/// from, from+step, ..., up to and including `to`
std::vector<Rational> rational_grid(const Rational& from, const Rational& to, const Rational& step);

struct ExperimentConfig {
    std::filesystem::path topology_path;
    std::vector<std::filesystem::path> traffic_paths;  // empty: generate from seed
    std::size_t generated_matrices = 1;
    std::vector<Rational> volumes = default_volumes();  // each in (0, 1]
    std::vector<ScheduleEntry> schedule = table_v_schedule();
    std::optional<UtilityInterval> fixed_interval;     // overrides schedule
    std::vector<std::string> heuristics = heuristic_names();
    std::string profile = "nec";
    std::optional<std::filesystem::path> profile_path;  // overrides profile
    PathBounds bounds;
    std::uint64_t seed = 1;
    bool shuffle_flows = false;
    VolumeBasis volume_basis = VolumeBasis::kSaturation;
    Rational m{3};
    Rational n{1};
    // sweeps
    std::string sweep_heuristic = "maxresdn";
    Rational fixed_umax{95, 100};
    Rational fixed_umin{30, 100};
    std::vector<Rational> umin_grid = rational_grid(Rational(5, 100), Rational(90, 100), Rational(5, 100));
    std::vector<Rational> umax_grid = rational_grid(Rational(40, 100), Rational(1), Rational(5, 100));
    std::filesystem::path output_dir = "out";
};

/// JSON object; unknown keys are rejected. Relative paths resolve against
/// `base_dir`.
ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
/// Deterministic JSON echo (used in the manifest).
std::string config_to_json(const ExperimentConfig& config);

/// Throws std::invalid_argument for volumes outside (0, 1], schedule gaps,
/// an unknown heuristic or profile, or "nothing to run".
void validate_config(const ExperimentConfig& config);

/// Loaded inputs shared by every cell.
struct Workload {
    Topology topology;
    std::vector<TrafficMatrix> matrices;
    SwitchPowerProfile profile;
    /// Busiest directed utility of plain shortest-path routing at the
    /// matrix's own rates, one per matrix (saturation basis).
    std::vector<Rational> unit_peak_utility;
};
Workload load_workload(const ExperimentConfig& config);

UtilityInterval interval_for(const ExperimentConfig& config, const Rational& volume);

/// The matrix scaled to the volume under the configured basis, bound to the
/// topology (shuffled when configured).
FlowSet flows_at_volume(const ExperimentConfig& config, const Workload& workload, std::size_t matrix_index,
                        const Rational& volume);

/// Routes, prunes and measures one cell. Errors become a diagnostic row.
MetricsReport run_cell(const ExperimentConfig& config, const Workload& workload, std::size_t matrix_index,
                       std::string_view heuristic, const Rational& volume, const UtilityInterval& interval);

/// Rows ordered by (matrix, heuristic in config order, volume in config order).
std::vector<MetricsReport> run_experiment(const ExperimentConfig& config);
std::vector<MetricsReport> run_experiment(const ExperimentConfig& config, const Workload& workload);

struct SweepPoint {
    Rational volume;
    Rational parameter;
    bool valid = true;        // false: interval invalid or every cell failed
    double links_saved_pct = 0.0;  // mean over matrices
    double resdn = 0.0;
    std::string status = "ok";
};

struct Series {
    std::string name;  // "umin" or "umax"
    std::vector<SweepPoint> points;  // grouped by volume, grid order
};

/// Links saved by the sweep heuristic at each u_min (u_max fixed) for every
/// configured volume.
Series sweep_umin(const ExperimentConfig& config, const Rational& fixed_umax, const std::vector<Rational>& grid);
Series sweep_umax(const ExperimentConfig& config, const Rational& fixed_umin, const std::vector<Rational>& grid);
Series sweep_umin(const ExperimentConfig& config, const Workload& workload, const Rational& fixed_umax,
                  const std::vector<Rational>& grid);
Series sweep_umax(const ExperimentConfig& config, const Workload& workload, const Rational& fixed_umin,
                  const std::vector<Rational>& grid);

struct PeakParams {
    Rational volume;
    Rational u_min;
    Rational u_max;
    double links_saved_pct = 0.0;
    bool zero_savings = false;  // nothing saved anywhere on the sweeps
};

/// One round of coordinate ascent per volume: best u_min at fixed_umax,
/// then best u_max at that u_min. Ties go to the smaller value.
std::vector<PeakParams> find_peak_params(const ExperimentConfig& config, const std::vector<Rational>& volumes);
std::vector<PeakParams> find_peak_params(const ExperimentConfig& config, const Workload& workload,
                                         const std::vector<Rational>& volumes);

std::string results_csv(const std::vector<MetricsReport>& rows);
std::string series_csv(const Series& series);
std::string peaks_csv(const std::vector<PeakParams>& peaks);

struct Outputs {
    std::vector<MetricsReport> rows;
    std::vector<Series> series;
    std::optional<std::vector<PeakParams>> peaks;
};

/// results.csv, series_<name>.csv, series_peaks.csv, manifest.json.
/// Returns the written paths. Throws std::runtime_error naming the path on
/// I/O failure.
std::vector<std::filesystem::path> emit_outputs(const Outputs& outputs, const ExperimentConfig& config,
                                                const std::filesystem::path& dir);

}  // namespace resdn
