// commands.cpp — pure command evaluators shared by the CLI and the sweep
// driver. Parameters arrive as JSON with units encoded in the key names;
// unknown keys are rejected.

#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include "acceptorloss/constants.hpp"
#include "acceptorloss/errors.hpp"
#include "acceptorloss/fourlevel.hpp"
#include "acceptorloss/io.hpp"
#include "acceptorloss/loss.hpp"
#include "acceptorloss/resonator.hpp"

namespace acceptorloss {

namespace {

using nlohmann::json;

class ParamReader {
public:
    explicit ParamReader(const json& params) : params_(params) {
        if (!params.is_object()) throw SchemaError("params must be a JSON object");
    }

    bool has(const std::string& key) const { return params_.contains(key); }

    double number(const std::string& key) {
        require(key);
        return as_number(key);
    }

    double number_or(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        return as_number(key);
    }

    std::optional<double> maybe_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return as_number(key);
    }

    std::string text(const std::string& key) {
        require(key);
        return as_text(key);
    }

    std::string text_or(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        return as_text(key);
    }

    bool flag_or(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        consumed_.insert(key);
        const json& v = params_.at(key);
        if (!v.is_boolean()) throw SchemaError("param '" + key + "' must be a boolean");
        return v.get<bool>();
    }

    void finish() const {
        for (const auto& [key, value] : params_.items())
            if (!consumed_.count(key)) throw SchemaError("unknown param key: " + key);
    }

private:
    void require(const std::string& key) const {
        if (!params_.contains(key)) throw SchemaError("missing required param: " + key);
    }
    double as_number(const std::string& key) {
        consumed_.insert(key);
        const json& v = params_.at(key);
        if (!v.is_number()) throw SchemaError("param '" + key + "' must be a number");
        return v.get<double>();
    }
    std::string as_text(const std::string& key) {
        consumed_.insert(key);
        const json& v = params_.at(key);
        if (!v.is_string()) throw SchemaError("param '" + key + "' must be a string");
        return v.get<std::string>();
    }

    const json& params_;
    std::set<std::string> consumed_;
};

FourLevelParams four_level_from(ParamReader& reader) {
    FourLevelParams p;
    p.gamma_prime = reader.number("gamma_prime_hz");
    p.gamma_tilde = reader.number_or("gamma_tilde_hz", 0.0);
    p.nbar = reader.number("nbar");
    const double omega = reader.number_or("omega_rads", 0.0);
    const double phase = reader.number_or("omega_phase_rad", 0.0);
    p.omega_rabi = std::polar(omega, phase);
    p.delta_lower = reader.number_or("delta_lower_rads", 0.0);
    p.delta_upper = reader.number_or("delta_upper_rads", 0.0);
    return p;
}

void emit_populations(json& out, const std::string& prefix, const DensityMatrix4& rho) {
    out[prefix + "rho11"] = rho(0, 0).real();
    out[prefix + "rho22"] = rho(1, 1).real();
    out[prefix + "rho33"] = rho(2, 2).real();
    out[prefix + "rho44"] = rho(3, 3).real();
}

json cmd_simulate_steady(ParamReader& reader) {
    const FourLevelParams p = four_level_from(reader);
    const bool field_on = reader.flag_or("field_on", false);
    const std::string method = reader.text_or("method", "analytic");
    reader.finish();
    if (method != "analytic" && method != "numeric" && method != "both")
        throw SchemaError("method must be 'analytic', 'numeric', or 'both'");

    json out;
    DensityMatrix4 primary;
    if (method == "analytic" || method == "both") {
        const DensityMatrix4 rho =
            field_on ? steady_state_analytic_field(p) : steady_state_analytic_zero_field(p);
        emit_populations(out, method == "both" ? "analytic_" : "", rho);
        primary = rho;
    }
    if (method == "numeric" || method == "both") {
        const DensityMatrix4 rho = steady_state_numeric(build_liouvillian(p, field_on));
        emit_populations(out, method == "both" ? "numeric_" : "", rho);
        primary = rho;
        if (method == "both") {
            double max_err = 0.0;
            const DensityMatrix4 analytic =
                field_on ? steady_state_analytic_field(p) : steady_state_analytic_zero_field(p);
            for (int i = 0; i < 4; ++i)
                max_err = std::max(max_err, std::abs(analytic(i, i).real() - rho(i, i).real()));
            out["max_population_discrepancy"] = max_err;
        }
    }

    const double diff = primary(0, 0).real() - primary(2, 2).real();
    out["population_difference"] = diff;
    out["equilibrium_difference"] = equilibrium_population_difference(p.nbar);
    out["difference_ratio"] = diff / equilibrium_population_difference(p.nbar);
    if (field_on) out["secular_valid"] = secular_approximation_valid(p);
    return out;
}

json cmd_critical_rabi(ParamReader& reader) {
    const FourLevelParams p = four_level_from(reader);
    const bool field_on = reader.flag_or("field_on", false);
    reader.finish();
    const double omega_c = field_on ? critical_rabi_field(p) : critical_rabi_zero_field(p);
    json out;
    out["omega_c_rads"] = omega_c;
    out["omega_c_sq_rads2"] = omega_c * omega_c;
    out["field_on"] = field_on;
    return out;
}

double nbar_from(ParamReader& reader) {
    const auto nbar = reader.maybe_number("nbar");
    const auto t_mk = reader.maybe_number("t_mk");
    const auto f_ghz = reader.maybe_number("f_ghz");
    if (nbar && (t_mk || f_ghz))
        throw SchemaError("give either nbar or (t_mk and f_ghz), not both");
    if (nbar) return *nbar;
    if (t_mk && f_ghz) return nbar_from_temperature(*f_ghz * 1e9, *t_mk * 1e-3);
    throw SchemaError("missing required param: nbar (or t_mk with f_ghz)");
}

json cmd_saturation_ratio(ParamReader& reader) {
    const double branching = reader.number("branching");
    const double nbar = nbar_from(reader);
    reader.finish();
    json out;
    out["ratio"] = saturation_ratio(nbar, branching);
    out["nbar"] = nbar;
    out["branching"] = branching;
    return out;
}

json cmd_loss_estimate(ParamReader& reader) {
    DopantSpec dopant;
    dopant.concentration_cm3 = reader.number("n_cm3");
    dopant.dipole_debye = reader.number("mu_debye");
    dopant.epsilon_r = reader.number_or("epsilon_r", constants::silicon_epsilon_r);

    json out;
    if (reader.has("spectrum_file")) {
        const std::string path = reader.text("spectrum_file");
        const double f_hz = reader.number("f_ghz") * 1e9;
        const double linewidth_hz =
            reader.number_or("linewidth_mhz", default_linewidth_hz / 1e6) * 1e6;
        reader.finish();
        const LossSpectrum spectrum = parse_loss_spectrum(path);
        const double tan_delta = loss_tangent_full(spectrum, f_hz, linewidth_hz, dopant);
        out["tan_delta"] = tan_delta;
        out["q"] = 1.0 / tan_delta;
        out["method"] = "full";
    } else {
        const double p_per_hz = reader.number("p_per_ghz") * 1e-9;
        reader.finish();
        const double tan_delta = loss_tangent_narrowband(p_per_hz, dopant);
        out["tan_delta"] = tan_delta;
        out["q"] = 1.0 / tan_delta;
        out["method"] = "narrowband";
    }
    return out;
}

json cmd_photon_calib(ParamReader& reader) {
    const double f0_hz = reader.number("f0_ghz") * 1e9;
    const double q = reader.number("q");
    const double qe = reader.number("qe");
    const double pin_dbm = reader.number("pin_dbm");
    const double attenuation_db = reader.number_or("attenuation_db", 0.0);
    reader.finish();
    const double pin_at_device_dbm = pin_dbm - attenuation_db;
    const double pin_watts = constants::dbm_to_watts(pin_at_device_dbm);
    json out;
    out["pin_dbm_at_device"] = pin_at_device_dbm;
    out["pin_watts_at_device"] = pin_watts;
    out["n_photons"] = photon_number(pin_watts, f0_hz, q, qe);
    return out;
}

json cmd_sat_model(ParamReader& reader) {
    SaturationFitParams p;
    p.tan_delta0 = reader.number("tan_delta0");
    p.n_c = reader.number("nc");
    p.beta = reader.number_or("beta", 1.0);
    if (reader.has("a_thermal")) {
        p.a_thermal = reader.number("a_thermal");
        if (reader.has("t_mk") || reader.has("f_ghz"))
            throw SchemaError("give either a_thermal or (t_mk and f_ghz), not both");
    } else if (reader.has("t_mk")) {
        const double t_mk = reader.number("t_mk");
        const double f_ghz = reader.number("f_ghz");
        p.a_thermal = thermal_factor(f_ghz * 1e9, t_mk * 1e-3);
    } else {
        p.a_thermal = 1.0;
    }
    const double n = reader.number("n_photons");
    reader.finish();
    json out;
    out["tan_delta"] = saturation_model(n, p);
    out["a_thermal"] = p.a_thermal;
    return out;
}

json cmd_spectrum_build(ParamReader& reader) {
    const std::string map_path = reader.text("strain_map");
    const double bin_start_ghz = reader.number_or("bin_start_ghz", 0.0);
    const double bin_stop_ghz = reader.number_or("bin_stop_ghz", 150.0);
    const double bin_width_ghz = reader.number_or("bin_width_ghz", 0.5);
    const double probe_f_ghz = reader.number_or("probe_f_ghz", 6.0);
    reader.finish();

    const StrainField field = parse_strain_map(map_path);
    AcceptorParams params;  // boron defaults
    const auto samples = splitting_map(field, params);
    const LossSpectrum spectrum = weighted_participation(
        samples, uniform_bins(bin_start_ghz * 1e9, bin_stop_ghz * 1e9, bin_width_ghz * 1e9));

    json out;
    out["n_cells"] = field.cells.size();
    out["total_bulk_participation"] = field.total_bulk_participation;
    out["spectrum_total_participation"] = spectrum.total_participation();
    out["p_at_probe_per_ghz"] = spectrum.value_at(probe_f_ghz * 1e9) * 1e9;
    out["probe_f_ghz"] = probe_f_ghz;
    out["underflow_weight"] = spectrum.underflow_weight;
    out["overflow_weight"] = spectrum.overflow_weight;
    out["bin_edges_hz"] = spectrum.bin_edges_hz;
    out["p_per_hz"] = spectrum.p_per_hz;
    return out;
}

json cmd_doping_fit(ParamReader& reader) {
    const std::string path = reader.text("points_file");
    const auto predict_at = reader.maybe_number("predict_at_cm3");
    reader.finish();
    const auto points = parse_doping_csv(path);
    const DopingFitResult fit = doping_fit(points);
    json out;
    out["a_cm3"] = fit.a_cm3;
    out["n_points"] = points.size();
    if (predict_at) {
        out["predict_at_cm3"] = *predict_at;
        out["q_predicted"] = fit.predicted_q(*predict_at);
    }
    return out;
}

json cmd_sat_fit(ParamReader& reader) {
    const std::string zero_path = reader.text("zero_field_file");
    const std::string field_path = reader.text("in_field_file");
    reader.finish();
    const SaturationLogLogFit fit = fit_saturation_loglog(parse_saturation_csv(zero_path),
                                                          parse_saturation_csv(field_path));
    json out;
    out["slope_a"] = fit.slope_a;
    out["beta"] = 2.0 * fit.slope_a;
    out["intercept_zero_field"] = fit.intercept_zero_field;
    out["intercept_in_field"] = fit.intercept_in_field;
    out["nc_ratio"] = fit.nc_ratio;
    out["regime_warning"] = fit.regime_warning;
    return out;
}

json cmd_fit_s21(ParamReader& reader) {
    const std::string path = reader.text("input");
    const auto power_dbm = reader.maybe_number("power_dbm");
    const double attenuation_db = reader.number_or("attenuation_db", 0.0);
    reader.finish();

    S21Trace trace = parse_s21_csv(path);
    if (power_dbm) trace.power_dbm_at_device = *power_dbm - attenuation_db;
    const ResonatorFit fit = fit_s21(trace);

    json out;
    out["a"] = fit.baseline_a;
    out["phi_rad"] = fit.phase_rad;
    out["tau_s"] = fit.delay_s;
    out["f0_hz"] = fit.f0_hz;
    out["q"] = fit.q_loaded;
    out["qc"] = fit.q_coupling;
    out["df_hz"] = fit.asymmetry_hz;
    out["qi"] = fit.q_internal;
    out["residual_rms"] = fit.residual_rms;
    const char* names[7] = {"a", "phi_rad", "tau_s", "f0_hz", "q", "qc", "df_hz"};
    for (int i = 0; i < 7; ++i)
        out[std::string("stderr_") + names[i]] = fit.stderr_params[static_cast<std::size_t>(i)];
    if (power_dbm) {
        out["power_dbm_at_device"] = trace.power_dbm_at_device;
        out["n_photons"] = photon_number(constants::dbm_to_watts(trace.power_dbm_at_device),
                                         fit.f0_hz, fit.q_loaded, fit.q_coupling);
    }
    return out;
}

} // namespace

json run_command(const std::string& command, const json& params) {
    ParamReader reader(params);
    if (command == "simulate-steady") return cmd_simulate_steady(reader);
    if (command == "critical-rabi") return cmd_critical_rabi(reader);
    if (command == "saturation-ratio") return cmd_saturation_ratio(reader);
    if (command == "loss-estimate") return cmd_loss_estimate(reader);
    if (command == "photon-calib") return cmd_photon_calib(reader);
    if (command == "sat-model") return cmd_sat_model(reader);
    if (command == "spectrum-build") return cmd_spectrum_build(reader);
    if (command == "doping-fit") return cmd_doping_fit(reader);
    if (command == "sat-fit") return cmd_sat_fit(reader);
    if (command == "fit-s21") return cmd_fit_s21(reader);
    throw SchemaError("unknown command: " + command);
}

std::vector<ResultRecord> run_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes,
                                    unsigned workers) {
    if (axes.empty() || axes.size() > 3)
        throw SchemaError("sweep supports 1 to 3 axes");
    for (const SweepAxis& axis : axes)
        if (axis.values.empty()) throw SchemaError("sweep axis has no values");

    std::size_t total = 1;
    for (const SweepAxis& axis : axes) total *= axis.values.size();

    std::vector<ResultRecord> records(total);
    std::atomic<std::size_t> cursor{0};

    auto evaluate_point = [&](std::size_t flat) {
        // Row-major decode over axis declaration order.
        std::size_t rem = flat;
        std::vector<std::size_t> idx(axes.size());
        for (std::size_t d = axes.size(); d-- > 0;) {
            idx[d] = rem % axes[d].values.size();
            rem /= axes[d].values.size();
        }
        RunConfig point = base;
        point.axes = nlohmann::json::array();
        for (std::size_t d = 0; d < axes.size(); ++d)
            point.params[axes[d].param] = axes[d].values[idx[d]];

        ResultRecord record;
        try {
            record = make_record(point, run_command(point.command, point.params));
        } catch (const std::exception& e) {
            record = make_record(point, nlohmann::json::object());
            record.error = e.what();
        }
        for (std::size_t d = 0; d < axes.size(); ++d)
            record.outputs["axis_" + axes[d].param] = axes[d].values[idx[d]];
        records[flat] = std::move(record);
    };

    const unsigned n_workers = std::max(1u, workers);
    if (n_workers == 1 || total < 2) {
        for (std::size_t k = 0; k < total; ++k) evaluate_point(k);
    } else {
        auto drain = [&]() {
            for (;;) {
                const std::size_t k = cursor.fetch_add(1);
                if (k >= total) return;
                evaluate_point(k);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(drain);
        for (auto& th : pool) th.join();
    }
    return records;
}

void write_sweep_table(const std::filesystem::path& path, const std::vector<SweepAxis>& axes,
                       const std::vector<ResultRecord>& records) {
    // Columns: axis values, then the sorted union of scalar output keys.
    std::set<std::string> keys;
    for (const ResultRecord& r : records)
        for (const auto& [key, value] : r.outputs.items())
            if (value.is_number() || value.is_boolean())
                if (key.rfind("axis_", 0) != 0) keys.insert(key);

    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write sweep table: " + path.string());
    out.precision(17);
    out << '#';
    for (const SweepAxis& axis : axes) out << ' ' << axis.param;
    for (const std::string& key : keys) out << ' ' << key;
    out << " error\n";
    for (const ResultRecord& r : records) {
        for (const SweepAxis& axis : axes) {
            const auto it = r.outputs.find("axis_" + axis.param);
            out << (it != r.outputs.end() ? it->get<double>()
                                          : std::numeric_limits<double>::quiet_NaN())
                << ' ';
        }
        for (const std::string& key : keys) {
            const auto it = r.outputs.find(key);
            if (it == r.outputs.end()) {
                out << "nan ";
            } else if (it->is_boolean()) {
                out << (it->get<bool>() ? 1 : 0) << ' ';
            } else {
                out << it->get<double>() << ' ';
            }
        }
        out << (r.error ? 1 : 0) << '\n';
    }
}

} // namespace acceptorloss
