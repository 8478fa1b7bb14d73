#include "acceptorloss/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include "acceptorloss/errors.hpp"
#include "acceptorloss/version.hpp"

namespace acceptorloss {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, long line_no) {
    const std::string t = trim(s);
    double value = 0.0;
    const char* begin = t.data();
    const char* end = begin + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw SchemaError("expected a number, got '" + t + "'", line_no);
    return value;
}

struct CsvReader {
    std::ifstream file;
    long line_no = 0;

    explicit CsvReader(const std::filesystem::path& path) : file(path) {
        if (!file) throw SchemaError("cannot open file: " + path.string());
    }

    // Returns the next non-comment, non-blank line, or nullopt at EOF.
    std::optional<std::string> next(std::vector<std::string>* comments = nullptr) {
        std::string line;
        while (std::getline(file, line)) {
            ++line_no;
            const std::string t = trim(line);
            if (t.empty()) continue;
            if (t.front() == '#') {
                if (comments) comments->push_back(t);
                continue;
            }
            return t;
        }
        return std::nullopt;
    }
};

bool header_matches(const std::vector<std::string>& header,
                    const std::vector<std::string>& expected) {
    if (header.size() != expected.size()) return false;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] != expected[i]) return false;
    return true;
}

} // namespace

S21Trace parse_s21_csv(const std::filesystem::path& path) {
    CsvReader reader(path);
    const auto header_line = reader.next();
    if (!header_line) throw SchemaError("empty s21 file: " + path.string());
    const auto header = split_csv(*header_line);

    bool mag_phase = false;
    if (header_matches(header, {"freq_hz", "re", "im"})) {
        mag_phase = false;
    } else if (header_matches(header, {"freq_hz", "mag_db", "phase_rad"})) {
        mag_phase = true;
    } else {
        throw SchemaError("s21 header must be 'freq_hz,re,im' or 'freq_hz,mag_db,phase_rad'",
                          reader.line_no);
    }

    S21Trace trace;
    while (const auto line = reader.next()) {
        const auto fields = split_csv(*line);
        if (fields.size() != 3)
            throw SchemaError("expected 3 columns, got " + std::to_string(fields.size()),
                              reader.line_no);
        const double f = parse_double(fields[0], reader.line_no);
        const double c1 = parse_double(fields[1], reader.line_no);
        const double c2 = parse_double(fields[2], reader.line_no);
        if (!trace.frequencies_hz.empty() && !(f > trace.frequencies_hz.back()))
            throw NonMonotonicFrequency("s21 frequencies must be strictly ascending at line " +
                                        std::to_string(reader.line_no));
        trace.frequencies_hz.push_back(f);
        if (mag_phase) {
            const double mag = std::pow(10.0, c1 / 20.0);
            trace.values.push_back(std::polar(mag, c2));
        } else {
            trace.values.emplace_back(c1, c2);
        }
    }
    if (trace.frequencies_hz.empty()) throw SchemaError("s21 file has no data rows");
    return trace;
}

StrainField parse_strain_map(const std::filesystem::path& path) {
    CsvReader reader(path);
    std::vector<std::string> comments;
    const auto header_line = reader.next(&comments);
    if (!header_line) throw SchemaError("empty strain map: " + path.string());
    if (!header_matches(split_csv(*header_line),
                        {"x_um", "y_um", "weight", "sxx", "syy", "szz", "sxy", "syz", "szx"}))
        throw SchemaError(
            "strain map header must be 'x_um,y_um,weight,sxx,syy,szz,sxy,syz,szx'",
            reader.line_no);

    StrainField field;
    double weight_sum = 0.0;
    long row = 0;
    while (const auto line = reader.next(&comments)) {
        ++row;
        const auto fields = split_csv(*line);
        if (fields.size() != 9)
            throw SchemaError("strain map row " + std::to_string(row) + ": expected 9 columns",
                              reader.line_no);
        StrainCell cell;
        cell.x_um = parse_double(fields[0], reader.line_no);
        cell.y_um = parse_double(fields[1], reader.line_no);
        cell.weight = parse_double(fields[2], reader.line_no);
        cell.strain.xx = parse_double(fields[3], reader.line_no);
        cell.strain.yy = parse_double(fields[4], reader.line_no);
        cell.strain.zz = parse_double(fields[5], reader.line_no);
        cell.strain.xy = parse_double(fields[6], reader.line_no);
        cell.strain.yz = parse_double(fields[7], reader.line_no);
        cell.strain.zx = parse_double(fields[8], reader.line_no);
        if (cell.weight < 0.0)
            throw NegativeWeight("strain map row " + std::to_string(row) +
                                 ": negative participation weight");
        weight_sum += cell.weight;
        field.cells.push_back(cell);
    }
    if (field.cells.empty()) throw SchemaError("strain map has no cells");

    field.total_bulk_participation = weight_sum;
    for (const std::string& c : comments) {
        const auto pos = c.find("total_bulk_participation");
        if (pos == std::string::npos) continue;
        const auto eq = c.find('=', pos);
        if (eq == std::string::npos)
            throw SchemaError("malformed total_bulk_participation metadata line");
        const double declared = parse_double(c.substr(eq + 1), -1);
        if (std::abs(declared - weight_sum) > 1e-6)
            throw SchemaError("declared total_bulk_participation " + std::to_string(declared) +
                              " disagrees with summed weights " + std::to_string(weight_sum));
        field.total_bulk_participation = declared;
    }
    if (field.total_bulk_participation > 1.0 + 1e-9)
        throw SchemaError("total bulk participation exceeds 1");
    return field;
}

void write_loss_spectrum(const std::filesystem::path& path, const LossSpectrum& spectrum) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write file: " + path.string());
    out.precision(17);
    out << "# loss spectrum: bin_center_hz p_per_hz\n";
    out << "# bin_edges_hz:";
    for (double e : spectrum.bin_edges_hz) out << ' ' << e;
    out << '\n';
    out << "# underflow_weight: " << spectrum.underflow_weight << '\n';
    out << "# overflow_weight: " << spectrum.overflow_weight << '\n';
    for (std::size_t k = 0; k + 1 < spectrum.bin_edges_hz.size(); ++k)
        out << 0.5 * (spectrum.bin_edges_hz[k] + spectrum.bin_edges_hz[k + 1]) << ' '
            << spectrum.p_per_hz[k] << '\n';
}

LossSpectrum parse_loss_spectrum(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open file: " + path.string());
    LossSpectrum spectrum;
    std::string line;
    long line_no = 0;
    std::vector<double> centers, values;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            std::istringstream meta(t.substr(1));
            std::string key;
            meta >> key;
            if (key == "bin_edges_hz:") {
                double e;
                while (meta >> e) spectrum.bin_edges_hz.push_back(e);
            } else if (key == "underflow_weight:") {
                meta >> spectrum.underflow_weight;
            } else if (key == "overflow_weight:") {
                meta >> spectrum.overflow_weight;
            }
            continue;
        }
        std::istringstream row(t);
        double c, v;
        if (!(row >> c >> v)) throw SchemaError("expected 'center value' row", line_no);
        centers.push_back(c);
        values.push_back(v);
    }
    if (spectrum.bin_edges_hz.size() < 2)
        throw SchemaError("loss spectrum file lacks bin_edges_hz metadata");
    if (values.size() + 1 != spectrum.bin_edges_hz.size())
        throw SchemaError("loss spectrum row count disagrees with bin edges");
    spectrum.p_per_hz = values;
    return spectrum;
}

std::vector<DopingPoint> parse_doping_csv(const std::filesystem::path& path) {
    CsvReader reader(path);
    const auto header_line = reader.next();
    if (!header_line || !header_matches(split_csv(*header_line), {"concentration_cm3", "q"}))
        throw SchemaError("doping file header must be 'concentration_cm3,q'");
    std::vector<DopingPoint> points;
    while (const auto line = reader.next()) {
        const auto fields = split_csv(*line);
        if (fields.size() != 2) throw SchemaError("expected 2 columns", reader.line_no);
        points.push_back(
            {parse_double(fields[0], reader.line_no), parse_double(fields[1], reader.line_no)});
    }
    return points;
}

std::vector<SaturationPoint> parse_saturation_csv(const std::filesystem::path& path) {
    CsvReader reader(path);
    const auto header_line = reader.next();
    if (!header_line || !header_matches(split_csv(*header_line), {"n_photons", "tan_delta"}))
        throw SchemaError("saturation file header must be 'n_photons,tan_delta'");
    std::vector<SaturationPoint> points;
    while (const auto line = reader.next()) {
        const auto fields = split_csv(*line);
        if (fields.size() != 2) throw SchemaError("expected 2 columns", reader.line_no);
        points.push_back(
            {parse_double(fields[0], reader.line_no), parse_double(fields[1], reader.line_no)});
    }
    return points;
}

RunConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("config must be a JSON object");
    RunConfig config;
    for (const auto& [key, value] : j.items()) {
        if (key == "schema_version") {
            if (!value.is_number_integer()) throw SchemaError("schema_version must be an integer");
            config.schema_version = value.get<int>();
        } else if (key == "command") {
            if (!value.is_string()) throw SchemaError("command must be a string");
            config.command = value.get<std::string>();
        } else if (key == "params") {
            if (!value.is_object()) throw SchemaError("params must be an object");
            config.params = value;
        } else if (key == "axes") {
            if (!value.is_array()) throw SchemaError("axes must be an array");
            config.axes = value;
        } else {
            throw SchemaError("unknown config key: " + key);
        }
    }
    if (config.schema_version != config_schema_version)
        throw SchemaError("unsupported schema_version " + std::to_string(config.schema_version));
    if (config.command.empty()) throw SchemaError("config missing 'command'");
    return config;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

nlohmann::json config_to_json(const RunConfig& config) {
    nlohmann::json j;
    j["schema_version"] = config.schema_version;
    j["command"] = config.command;
    j["params"] = config.params;
    if (!config.axes.empty()) j["axes"] = config.axes;
    return j;
}

std::string canonical_config(const RunConfig& config) {
    // nlohmann::json keeps object keys sorted, so dump() is canonical.
    return config_to_json(config).dump();
}

std::string config_hash(const RunConfig& config) {
    const std::string canon = canonical_config(config);
    std::uint64_t hash = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char c : canon) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string current_timestamp_utc() {
    std::time_t now = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long pinned = std::strtoll(epoch, &end, 10);
        if (end && *end == '\0') now = static_cast<std::time_t>(pinned);
    }
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

nlohmann::json ResultRecord::to_json() const {
    nlohmann::json j;
    j["run_id"] = run_id;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["outputs"] = outputs;
    if (error) j["error"] = *error;
    j["toolkit_version"] = toolkit_version;
    j["timestamp_utc"] = timestamp_utc;
    return j;
}

ResultRecord make_record(const RunConfig& config, const nlohmann::json& outputs) {
    ResultRecord record;
    record.command = config.command;
    record.config_hash = config_hash(config);
    record.run_id = config.command + "-" + record.config_hash;
    record.outputs = outputs;
    record.toolkit_version = toolkit_version;
    record.timestamp_utc = current_timestamp_utc();
    return record;
}

void write_record(const std::filesystem::path& path, const ResultRecord& record) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write record: " + path.string());
    out << record.to_json().dump(2) << '\n';
}

SweepAxis parse_axis(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("sweep axis must be an object");
    SweepAxis axis;
    bool have_values = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "param") {
            axis.param = value.get<std::string>();
        } else if (key == "values") {
            if (!value.is_array() || value.empty())
                throw SchemaError("axis 'values' must be a non-empty array");
            for (const auto& v : value) axis.values.push_back(v.get<double>());
            have_values = true;
        } else if (key == "linspace" || key == "logspace") {
            if (!value.is_array() || value.size() != 3)
                throw SchemaError("axis '" + key + "' must be [start, stop, num]");
            const double start = value[0].get<double>();
            const double stop = value[1].get<double>();
            const auto num = value[2].get<long>();
            if (num < 1) throw SchemaError("axis point count must be >= 1");
            if (key == "logspace" && !(start > 0.0 && stop > 0.0))
                throw SchemaError("logspace endpoints must be > 0");
            for (long k = 0; k < num; ++k) {
                const double t = num == 1 ? 0.0 : static_cast<double>(k) / (num - 1);
                axis.values.push_back(key == "linspace"
                                          ? start + t * (stop - start)
                                          : start * std::pow(stop / start, t));
            }
            have_values = true;
        } else {
            throw SchemaError("unknown axis key: " + key);
        }
    }
    if (axis.param.empty()) throw SchemaError("sweep axis missing 'param'");
    if (!have_values) throw SchemaError("sweep axis missing values/linspace/logspace");
    return axis;
}

} // namespace acceptorloss
