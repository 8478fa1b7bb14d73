// acceptorloss_cli.cpp — command-line front end for the acceptor-loss toolkit
//
// Each subcommand assembles a parameter object (config file first, flags
// override), evaluates it through the shared command registry, writes a
// ResultRecord JSON into the output directory, and prints a short summary.
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptorloss/errors.hpp"
#include "acceptorloss/io.hpp"
#include "acceptorloss/version.hpp"

namespace {

using acceptorloss::RunConfig;
using nlohmann::json;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    unsigned workers = 1;
};

std::filesystem::path output_dir(const CommonOptions& common) {
    if (!common.out_dir.empty()) return common.out_dir;
    if (const char* env = std::getenv("ACCEPTORLOSS_OUT")) return env;
    return ".";
}

// One pending flag value: remembered only if the user passed it.
struct FlagStore {
    json values = json::object();

    void set_number(const std::string& key, double v) { values[key] = v; }
    void set_text(const std::string& key, const std::string& v) { values[key] = v; }
    void set_bool(const std::string& key, bool v) { values[key] = v; }
};

// Declares a --flag-name option bound to params key "flag_key".
void add_number_flag(CLI::App* cmd, FlagStore& store, const std::string& flag,
                     const std::string& key, const std::string& help) {
    cmd->add_option_function<double>(
        flag, [&store, key](const double& v) { store.set_number(key, v); }, help);
}

void add_text_flag(CLI::App* cmd, FlagStore& store, const std::string& flag,
                   const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&store, key](const std::string& v) { store.set_text(key, v); }, help);
}

void add_bool_flag(CLI::App* cmd, FlagStore& store, const std::string& flag,
                   const std::string& key, const std::string& help) {
    cmd->add_flag_function(
        flag, [&store, key](std::int64_t count) { store.set_bool(key, count > 0); }, help);
}

RunConfig assemble_config(const std::string& command, const CommonOptions& common,
                          const FlagStore& flags) {
    RunConfig config;
    if (!common.config_path.empty()) {
        config = acceptorloss::parse_config(common.config_path);
        // for 'sweep' the config names the target command instead
        if (command != "sweep" && config.command != command)
            throw acceptorloss::SchemaError("config file is for command '" + config.command +
                                            "' but '" + command + "' was invoked");
    } else {
        config.command = command;
    }
    for (const auto& [key, value] : flags.values.items()) config.params[key] = value;
    return config;
}

void print_outputs(const json& outputs) {
    for (const auto& [key, value] : outputs.items()) {
        if (value.is_array()) continue;  // curves go to files, not the console
        std::cout << "  " << key << " = " << value.dump() << '\n';
    }
}

int execute(const std::string& command, const CommonOptions& common, const FlagStore& flags) {
    const RunConfig config = assemble_config(command, common, flags);
    const std::filesystem::path out = output_dir(common);
    std::filesystem::create_directories(out);

    if (command == "sweep") {
        if (config.axes.empty())
            throw acceptorloss::SchemaError("sweep requires 'axes' in the config file");
        std::vector<acceptorloss::SweepAxis> axes;
        for (const auto& axis_json : config.axes) axes.push_back(acceptorloss::parse_axis(axis_json));

        RunConfig base = config;
        base.axes = json::array();
        base.command = config.command;
        const auto records = acceptorloss::run_sweep(base, axes, common.workers);

        RunConfig sweep_id = config;  // hash includes the axes
        acceptorloss::ResultRecord summary;
        json records_json = json::array();
        std::size_t failed = 0;
        for (const auto& r : records) {
            records_json.push_back(r.to_json());
            if (r.error) ++failed;
        }
        json outputs;
        outputs["n_points"] = records.size();
        outputs["n_failed"] = failed;
        summary = acceptorloss::make_record(sweep_id, outputs);
        summary.command = "sweep:" + config.command;
        summary.run_id = "sweep-" + config.command + "-" + acceptorloss::config_hash(sweep_id);

        const auto record_path = out / (summary.run_id + ".json");
        acceptorloss::write_record(record_path, summary);
        std::ofstream list(out / (summary.run_id + ".records.json"));
        list << records_json.dump(2) << '\n';
        acceptorloss::write_sweep_table(out / (summary.run_id + ".dat"), axes, records);

        std::cout << summary.run_id << ": " << records.size() << " points, " << failed
                  << " failed\n";
        std::cout << "  record:  " << record_path.string() << '\n';
        std::cout << "  records: " << (out / (summary.run_id + ".records.json")).string() << '\n';
        std::cout << "  table:   " << (out / (summary.run_id + ".dat")).string() << '\n';
        return 0;
    }

    const json outputs = acceptorloss::run_command(config.command, config.params);
    const acceptorloss::ResultRecord record = acceptorloss::make_record(config, outputs);
    const auto record_path = out / (record.run_id + ".json");
    acceptorloss::write_record(record_path, record);

    if (command == "spectrum-build") {
        // Flat two-column curve for plotting, alongside the record.
        acceptorloss::LossSpectrum spectrum;
        spectrum.bin_edges_hz = outputs.at("bin_edges_hz").get<std::vector<double>>();
        spectrum.p_per_hz = outputs.at("p_per_hz").get<std::vector<double>>();
        spectrum.underflow_weight = outputs.at("underflow_weight").get<double>();
        spectrum.overflow_weight = outputs.at("overflow_weight").get<double>();
        const auto spectrum_path = out / (record.run_id + ".spectrum.dat");
        acceptorloss::write_loss_spectrum(spectrum_path, spectrum);
        std::cout << "  spectrum: " << spectrum_path.string() << '\n';
    }
    if (outputs.contains("secular_valid") && !outputs.at("secular_valid").get<bool>())
        std::cerr << "warning: secular approximation invalid (|delta_lower - delta_upper| < "
                     "10 |omega|); analytic in-field populations are unreliable here\n";
    if (outputs.contains("regime_warning") && outputs.at("regime_warning").get<bool>())
        std::cerr << "warning: log-log curvature above threshold; points are not all in the "
                     "n >> n_c power-law regime\n";

    std::cout << record.run_id << ":\n";
    print_outputs(outputs);
    std::cout << "  record: " << record_path.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptor-induced bulk dielectric loss toolkit"};
    app.set_version_flag("--version", acceptorloss::toolkit_version);
    app.require_subcommand(1);

    CommonOptions common;
    FlagStore flags;
    std::string invoked;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", common.config_path, "JSON config file (flags override)");
        cmd->add_option("--out", common.out_dir,
                        "output directory (default: $ACCEPTORLOSS_OUT or '.')");
        cmd->callback([&invoked, cmd]() { invoked = cmd->get_name(); });
    };

    // fit-s21
    {
        CLI::App* cmd = app.add_subcommand("fit-s21", "fit a complex S21 trace");
        add_common(cmd);
        add_text_flag(cmd, flags, "--input", "input", "CSV trace (freq_hz,re,im or mag/phase)");
        add_number_flag(cmd, flags, "--power-dbm", "power_dbm", "source power (dBm)");
        add_number_flag(cmd, flags, "--attenuation-db", "attenuation_db",
                        "input-chain attenuation applied before the device");
    }
    // photon-calib
    {
        CLI::App* cmd = app.add_subcommand("photon-calib", "input power to photon number");
        add_common(cmd);
        add_number_flag(cmd, flags, "--f0-ghz", "f0_ghz", "resonance frequency (GHz)");
        add_number_flag(cmd, flags, "--q", "q", "loaded quality factor");
        add_number_flag(cmd, flags, "--qe", "qe", "coupling quality factor");
        add_number_flag(cmd, flags, "--pin-dbm", "pin_dbm", "source power (dBm)");
        add_number_flag(cmd, flags, "--attenuation-db", "attenuation_db", "line attenuation (dB)");
    }
    // simulate-steady
    {
        CLI::App* cmd = app.add_subcommand("simulate-steady", "four-level steady state");
        add_common(cmd);
        add_number_flag(cmd, flags, "--gamma-prime-hz", "gamma_prime_hz", "rate |3>->|1| (1/s)");
        add_number_flag(cmd, flags, "--gamma-tilde-hz", "gamma_tilde_hz", "rate |3>->|2| (1/s)");
        add_number_flag(cmd, flags, "--nbar", "nbar", "thermal phonon occupancy");
        add_number_flag(cmd, flags, "--omega-rads", "omega_rads", "|Omega| (rad/s)");
        add_number_flag(cmd, flags, "--omega-phase-rad", "omega_phase_rad", "arg(Omega)");
        add_bool_flag(cmd, flags, "--field", "field_on", "lift spin degeneracies");
        add_number_flag(cmd, flags, "--delta-lower-rads", "delta_lower_rads",
                        "lower-branch Zeeman splitting (rad/s)");
        add_number_flag(cmd, flags, "--delta-upper-rads", "delta_upper_rads",
                        "upper-branch Zeeman splitting (rad/s)");
        add_text_flag(cmd, flags, "--method", "method", "analytic | numeric | both");
    }
    // critical-rabi
    {
        CLI::App* cmd = app.add_subcommand("critical-rabi", "critical Rabi frequency");
        add_common(cmd);
        add_number_flag(cmd, flags, "--gamma-prime-hz", "gamma_prime_hz", "rate |3>->|1| (1/s)");
        add_number_flag(cmd, flags, "--gamma-tilde-hz", "gamma_tilde_hz", "rate |3>->|2| (1/s)");
        add_number_flag(cmd, flags, "--nbar", "nbar", "thermal phonon occupancy");
        add_bool_flag(cmd, flags, "--field", "field_on", "in-field (dark-state) case");
    }
    // saturation-ratio
    {
        CLI::App* cmd = app.add_subcommand("saturation-ratio",
                                           "saturation-power ratio Pc(B=0)/Pc(B>0)");
        add_common(cmd);
        add_number_flag(cmd, flags, "--nbar", "nbar", "thermal phonon occupancy");
        add_number_flag(cmd, flags, "--branching", "branching", "gamma_tilde / gamma_prime");
        add_number_flag(cmd, flags, "--t-mk", "t_mk", "temperature (mK), with --f-ghz");
        add_number_flag(cmd, flags, "--f-ghz", "f_ghz", "transition frequency (GHz)");
    }
    // loss-estimate
    {
        CLI::App* cmd = app.add_subcommand("loss-estimate", "first-principles loss tangent / Q");
        add_common(cmd);
        add_number_flag(cmd, flags, "--n-cm3", "n_cm3", "dopant concentration (cm^-3)");
        add_number_flag(cmd, flags, "--mu-debye", "mu_debye",
                        "dipole (Debye, orientation factor included)");
        add_number_flag(cmd, flags, "--epsilon-r", "epsilon_r", "dielectric constant");
        add_number_flag(cmd, flags, "--p-per-ghz", "p_per_ghz",
                        "participation density at the probe (1/GHz)");
        add_text_flag(cmd, flags, "--spectrum", "spectrum_file", "spectrum file (full integral)");
        add_number_flag(cmd, flags, "--f-ghz", "f_ghz", "probe frequency (GHz)");
        add_number_flag(cmd, flags, "--linewidth-mhz", "linewidth_mhz", "homogeneous linewidth");
    }
    // spectrum-build
    {
        CLI::App* cmd = app.add_subcommand("spectrum-build",
                                           "strain map -> weighted participation spectrum");
        add_common(cmd);
        add_text_flag(cmd, flags, "--strain-map", "strain_map", "strain map CSV");
        add_number_flag(cmd, flags, "--bin-start-ghz", "bin_start_ghz", "first bin edge (GHz)");
        add_number_flag(cmd, flags, "--bin-stop-ghz", "bin_stop_ghz", "last bin edge (GHz)");
        add_number_flag(cmd, flags, "--bin-width-ghz", "bin_width_ghz", "bin width (GHz)");
        add_number_flag(cmd, flags, "--probe-f-ghz", "probe_f_ghz", "report P at this frequency");
    }
    // doping-fit
    {
        CLI::App* cmd = app.add_subcommand("doping-fit", "fixed-slope log-log Q vs doping fit");
        add_common(cmd);
        add_text_flag(cmd, flags, "--points", "points_file", "CSV concentration_cm3,q");
        add_number_flag(cmd, flags, "--predict-at-cm3", "predict_at_cm3",
                        "extrapolate Q at this concentration");
    }
    // sat-fit
    {
        CLI::App* cmd = app.add_subcommand("sat-fit",
                                           "joint log-log saturation fit, nc ratio extraction");
        add_common(cmd);
        add_text_flag(cmd, flags, "--zero-field", "zero_field_file", "CSV n_photons,tan_delta");
        add_text_flag(cmd, flags, "--in-field", "in_field_file", "CSV n_photons,tan_delta");
    }
    // sat-model
    {
        CLI::App* cmd = app.add_subcommand("sat-model", "power-dependent loss tangent model");
        add_common(cmd);
        add_number_flag(cmd, flags, "--tan-delta0", "tan_delta0", "zero-drive loss tangent");
        add_number_flag(cmd, flags, "--nc", "nc", "critical photon number");
        add_number_flag(cmd, flags, "--beta", "beta", "saturation exponent");
        add_number_flag(cmd, flags, "--a-thermal", "a_thermal", "thermal factor A(T)");
        add_number_flag(cmd, flags, "--t-mk", "t_mk", "temperature (mK), with --f-ghz");
        add_number_flag(cmd, flags, "--f-ghz", "f_ghz", "frequency (GHz)");
        add_number_flag(cmd, flags, "--n-photons", "n_photons", "drive photon number");
    }
    // sweep
    {
        CLI::App* cmd = app.add_subcommand("sweep", "Cartesian sweep over a command's params");
        add_common(cmd);
        cmd->add_option("--workers", common.workers, "worker threads (result order is fixed)");
    }

    try {
        app.parse(argc, argv);
        return execute(invoked, common, flags);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const acceptorloss::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const acceptorloss::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
