// io.hpp — file formats, run configuration, result records, and sweeps
//
// Formats are line-oriented text: CSV with a mandatory header for traces and
// maps ('#' starts a comment), JSON for configs and result records. All
// physical quantities carry their unit in the key/column name.

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "acceptorloss/loss.hpp"
#include "acceptorloss/resonator.hpp"

namespace acceptorloss {

inline constexpr int config_schema_version = 1;

// Columns: freq_hz,re,im  or  freq_hz,mag_db,phase_rad (auto-detected from
// the header). Throws SchemaError (with line number) or NonMonotonicFrequency.
S21Trace parse_s21_csv(const std::filesystem::path& path);

// Columns: x_um,y_um,weight,sxx,syy,szz,sxy,syz,szx. An optional metadata
// comment '# total_bulk_participation = <v>' pins the total; when present it
// must agree with the summed weights to 1e-6.
StrainField parse_strain_map(const std::filesystem::path& path);

// Two-column text (bin center Hz, participation per Hz) with the bin edges
// recoverable from the header comment.
void write_loss_spectrum(const std::filesystem::path& path, const LossSpectrum& spectrum);
LossSpectrum parse_loss_spectrum(const std::filesystem::path& path);

// Columns: concentration_cm3,q
std::vector<DopingPoint> parse_doping_csv(const std::filesystem::path& path);

// Columns: n_photons,tan_delta
std::vector<SaturationPoint> parse_saturation_csv(const std::filesystem::path& path);

// -- run configuration and records -------------------------------------------

struct RunConfig {
    int schema_version = config_schema_version;
    std::string command;
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json axes = nlohmann::json::array();  // sweep axes, up to 3
};

RunConfig parse_config(const std::filesystem::path& path);
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

// Canonical form: sorted-key JSON dump. parse/serialize round-trips to the
// identical byte string.
std::string canonical_config(const RunConfig& config);

// FNV-1a 64-bit over the canonical form, as 16 hex digits.
std::string config_hash(const RunConfig& config);

struct ResultRecord {
    std::string run_id;
    std::string command;
    std::string config_hash;
    nlohmann::json outputs = nlohmann::json::object();
    std::optional<std::string> error;
    std::string toolkit_version;
    std::string timestamp_utc;

    nlohmann::json to_json() const;
};

// UTC ISO-8601; honors SOURCE_DATE_EPOCH for reproducible runs.
std::string current_timestamp_utc();

ResultRecord make_record(const RunConfig& config, const nlohmann::json& outputs);
void write_record(const std::filesystem::path& path, const ResultRecord& record);

// -- command evaluation and sweeps --------------------------------------------

// Pure evaluation of one toolkit command: validated params in, outputs out.
// Unknown parameter keys are rejected. Commands: simulate-steady,
// critical-rabi, saturation-ratio, loss-estimate, photon-calib, sat-model,
// spectrum-build, doping-fit, sat-fit, fit-s21.
nlohmann::json run_command(const std::string& command, const nlohmann::json& params);

struct SweepAxis {
    std::string param;
    std::vector<double> values;
};

// Axis spec: {"param": name, "values": [...]} or {"param", "linspace":
// [start, stop, num]} or {"param", "logspace": [start, stop, num]} (start
// and stop are values, geometrically spaced).
SweepAxis parse_axis(const nlohmann::json& j);

// Cartesian product over up to 3 axes in row-major declaration order.
// Per-point failures are captured in the record's error field; the sweep
// continues. Result ordering is independent of the worker count.
std::vector<ResultRecord> run_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes,
                                    unsigned workers = 1);

// Columnar text: axis columns then the union of scalar output keys.
void write_sweep_table(const std::filesystem::path& path,
                       const std::vector<SweepAxis>& axes,
                       const std::vector<ResultRecord>& records);

} // namespace acceptorloss
