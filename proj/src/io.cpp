#include "mosum/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mosum {

using nlohmann::json;

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        fields.push_back(field);
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

double parse_double(const std::string& text, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
        if (pos != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw validation_error(std::string("cannot parse ") + what + " from '" + text + "'");
    }
}

long parse_long(const std::string& text, const char* what) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(text, &pos);
        if (pos != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw validation_error(std::string("cannot parse ") + what + " from '" + text + "'");
    }
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    return s.substr(b, e - b + 1);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return in;
}

} // namespace

void write_events_csv(const EventSeries& events, std::ostream& out) {
    out << "component_id,time\n";
    for (int j = 0; j < events.dim(); ++j)
        for (double t : events.components[static_cast<std::size_t>(j)])
            out << j + 1 << ',' << format_double(t) << '\n';
}

void write_events_csv(const EventSeries& events, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_events_csv(events, out);
}

EventSeries read_events_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw validation_error("events CSV is empty");
    auto header = split_csv_line(strip(line));
    if (header.size() < 2 || strip(header[0]) != "component_id" || strip(header[1]) != "time")
        throw validation_error("events CSV must start with header 'component_id,time'");

    std::vector<std::vector<double>> components;
    double horizon = 0.0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = strip(line);
        if (text.empty())
            continue;
        const auto fields = split_csv_line(text);
        if (fields.size() != 2)
            throw validation_error("events CSV line " + std::to_string(line_no) +
                                   ": expected 2 fields");
        const long id = parse_long(strip(fields[0]), "component_id");
        if (id < 1)
            throw validation_error("component_id must be a positive integer (1-based)");
        const double t = parse_double(strip(fields[1]), "time");
        if (components.size() < static_cast<std::size_t>(id))
            components.resize(static_cast<std::size_t>(id));
        components[static_cast<std::size_t>(id - 1)].push_back(t);
        horizon = std::max(horizon, t);
    }
    if (components.empty())
        throw validation_error("events CSV has no data rows");
    return EventSeries(std::move(components), horizon);
}

EventSeries read_events_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_events_csv(in);
}

void write_path_csv(const SampledPath& path, std::ostream& out) {
    out << "t";
    for (int i = 1; i <= path.dim(); ++i)
        out << ",z_" << i;
    out << '\n';
    for (Eigen::Index k = 0; k < path.grid_points(); ++k) {
        out << format_double(path.time_at(k));
        for (int i = 0; i < path.dim(); ++i)
            out << ',' << format_double(path.values(i, k));
        out << '\n';
    }
}

void write_path_csv(const SampledPath& path, const std::filesystem::path& file) {
    auto out = open_out(file);
    write_path_csv(path, out);
}

SampledPath read_path_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw validation_error("path CSV is empty");
    const auto header = split_csv_line(strip(line));
    if (header.size() < 2 || strip(header[0]) != "t")
        throw validation_error("path CSV must start with header 't,z_1,...'");
    const auto p = static_cast<int>(header.size() - 1);

    std::vector<double> times;
    std::vector<double> flat;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = strip(line);
        if (text.empty())
            continue;
        const auto fields = split_csv_line(text);
        if (fields.size() != header.size())
            throw validation_error("path CSV line " + std::to_string(line_no) +
                                   ": field count mismatch");
        times.push_back(parse_double(strip(fields[0]), "t"));
        for (int i = 0; i < p; ++i)
            flat.push_back(parse_double(strip(fields[static_cast<std::size_t>(i) + 1]), "z"));
    }
    if (times.size() < 2)
        throw validation_error("path CSV needs at least two grid points");
    const double step = times[1] - times[0];
    if (!(step > 0.0))
        throw validation_error("path CSV times must be increasing");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (std::abs(times[k] - times[k - 1] - step) > 1e-9 * std::max(1.0, std::abs(times[k])))
            throw validation_error("path CSV grid is not uniform");
    if (std::abs(times[0]) > 1e-12)
        throw validation_error("path CSV must start at t = 0");

    SampledPath path;
    path.grid_step = step;
    path.horizon = times.back();
    path.values.resize(p, static_cast<Eigen::Index>(times.size()));
    for (std::size_t k = 0; k < times.size(); ++k)
        for (int i = 0; i < p; ++i)
            path.values(i, static_cast<Eigen::Index>(k)) =
                flat[k * static_cast<std::size_t>(p) + static_cast<std::size_t>(i)];
    return path;
}

SampledPath read_path_csv(const std::filesystem::path& file) {
    auto in = open_in(file);
    return read_path_csv(in);
}

void write_mosum_csv(const MosumSeries& series, std::ostream& out) {
    out << "t";
    for (int i = 1; i <= series.dim(); ++i)
        out << ",m_" << i;
    out << ",norm,quadform\n";
    for (Eigen::Index j = 0; j < series.size(); ++j) {
        out << format_double(series.time_at(j));
        for (int i = 0; i < series.dim(); ++i)
            out << ',' << format_double(series.vectors(i, j));
        out << ',' << format_double(series.norms[j]) << ','
            << format_double(series.has_quadform() ? series.quadform[j]
                                                   : std::numeric_limits<double>::quiet_NaN())
            << '\n';
    }
}

void write_mosum_csv(const MosumSeries& series, const std::filesystem::path& file) {
    auto out = open_out(file);
    write_mosum_csv(series, out);
}

namespace {

json threshold_spec_to_json(const ThresholdSpec& spec) {
    switch (spec.kind) {
    case ThresholdSpec::Kind::GumbelSublinear:
        return json{{"mode", "gumbel"}};
    case ThresholdSpec::Kind::LinearMc:
        return json{{"mode", "linear_mc"},
                    {"n_mc", spec.n_mc},
                    {"grid_points_per_unit", spec.grid_points_per_unit},
                    {"seed", spec.seed}};
    case ThresholdSpec::Kind::Explicit:
        return json{{"mode", "explicit"}, {"beta", spec.beta}};
    }
    throw validation_error("unknown threshold mode");
}

ThresholdSpec threshold_spec_from_json(const json& j) {
    ThresholdSpec spec;
    const std::string mode = j.value("mode", "gumbel");
    if (mode == "gumbel") {
        spec.kind = ThresholdSpec::Kind::GumbelSublinear;
    } else if (mode == "linear_mc") {
        spec.kind = ThresholdSpec::Kind::LinearMc;
        spec.n_mc = j.value("n_mc", 5000);
        spec.grid_points_per_unit = j.value("grid_points_per_unit", 2000);
        spec.seed = j.value("seed", std::uint64_t{1});
    } else if (mode == "explicit") {
        spec.kind = ThresholdSpec::Kind::Explicit;
        spec.beta = j.at("beta").get<double>();
    } else {
        throw validation_error("unknown threshold mode '" + mode + "'");
    }
    return spec;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw validation_error("matrix JSON must be a nonempty array of rows");
    const auto rows = j.size();
    const auto cols = j.front().size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols)
            throw validation_error("matrix JSON rows have unequal length");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        arr.push_back(v[i]);
    return arr;
}

Vector vector_from_json(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

} // namespace

json to_json(const SegmentationConfig& config) {
    return json{{"bandwidth_h", config.bandwidth_h},
                {"eta", config.eta},
                {"alpha", config.alpha},
                {"grid_step", config.grid_step},
                {"scale_mode", to_string(config.scale_mode)},
                {"threshold_mode", threshold_spec_to_json(config.threshold)},
                {"variance_floor", config.variance_floor}};
}

SegmentationConfig segmentation_config_from_json(const json& j) {
    SegmentationConfig config;
    config.bandwidth_h = j.at("bandwidth_h").get<double>();
    config.eta = j.value("eta", 0.75);
    config.alpha = j.value("alpha", 0.05);
    config.grid_step = j.value("grid_step", 1.0);
    config.scale_mode = scale_mode_from_string(j.value("scale_mode", std::string("local_diag")));
    if (j.contains("threshold_mode"))
        config.threshold = threshold_spec_from_json(j.at("threshold_mode"));
    config.variance_floor = j.value("variance_floor", 1e-8);
    return config;
}

json to_json(const ThresholdResult& result) {
    json j{{"beta", result.beta}, {"mode", result.mode}, {"dim", result.dim},
           {"alpha", result.alpha}};
    if (result.horizon > 0.0)
        j["horizon"] = result.horizon;
    if (result.bandwidth > 0.0)
        j["bandwidth"] = result.bandwidth;
    if (result.mode == "linear_mc") {
        j["gamma"] = result.gamma;
        j["n_mc"] = result.n_mc;
        j["grid_points_per_unit"] = result.grid_points_per_unit;
        j["seed"] = result.seed;
    }
    return j;
}

json to_json(const ChangeSpec& spec) {
    json regimes = json::array();
    for (std::size_t r = 0; r < spec.drifts.size(); ++r)
        regimes.push_back(json{{"drift", vector_to_json(spec.drifts[r])},
                               {"covariance", matrix_to_json(spec.covariances[r])}});
    return json{{"horizon", spec.horizon},
                {"change_points", spec.change_points},
                {"regime_labels", spec.regime_labels},
                {"regimes", std::move(regimes)}};
}

ChangeSpec change_spec_from_json(const json& j) {
    std::vector<Vector> drifts;
    std::vector<Matrix> covs;
    for (const auto& regime : j.at("regimes")) {
        drifts.push_back(vector_from_json(regime.at("drift")));
        covs.push_back(matrix_from_json(regime.at("covariance")));
    }
    return ChangeSpec(j.at("horizon").get<double>(),
                      j.at("change_points").get<std::vector<double>>(),
                      j.at("regime_labels").get<std::vector<int>>(), std::move(drifts),
                      std::move(covs));
}

json to_json(const RenewalScenario& scenario) {
    json segments = json::array();
    for (const auto& seg : scenario.segments) {
        json mus = json::array();
        json sigmas = json::array();
        for (const auto& par : seg) {
            mus.push_back(par.mu);
            sigmas.push_back(par.sigma);
        }
        segments.push_back(json{{"mu", std::move(mus)}, {"sigma", std::move(sigmas)}});
    }
    json dependence;
    if (scenario.dependence.kind == Dependence::Kind::SharedComponent)
        dependence = json{{"type", "shared_component"}, {"corr", scenario.dependence.corr}};
    else
        dependence = json{{"type", "independent"}};
    return json{{"name", scenario.name},
                {"horizon", scenario.horizon},
                {"dim", scenario.dim},
                {"change_points", scenario.change_points},
                {"segments", std::move(segments)},
                {"dependence", std::move(dependence)}};
}

RenewalScenario scenario_from_json(const json& j) {
    RenewalScenario scenario;
    scenario.name = j.value("name", std::string("custom"));
    scenario.horizon = j.at("horizon").get<double>();
    scenario.dim = j.value("dim", 0);
    scenario.change_points = j.at("change_points").get<std::vector<double>>();
    for (const auto& seg : j.at("segments")) {
        std::vector<double> mus;
        std::vector<double> sigmas;
        const auto read_list = [&](const json& field, std::vector<double>& out) {
            if (field.is_number())
                out.assign(1, field.get<double>());
            else
                out = field.get<std::vector<double>>();
        };
        read_list(seg.at("mu"), mus);
        read_list(seg.at("sigma"), sigmas);
        if (scenario.dim == 0)
            scenario.dim = static_cast<int>(std::max(mus.size(), sigmas.size()));
        const auto p = static_cast<std::size_t>(scenario.dim);
        std::vector<InterEventParams> pars(p);
        for (std::size_t c = 0; c < p; ++c) {
            pars[c].mu = mus.size() == 1 ? mus[0] : mus.at(c);
            pars[c].sigma = sigmas.size() == 1 ? sigmas[0] : sigmas.at(c);
        }
        scenario.segments.push_back(std::move(pars));
    }
    if (j.contains("dependence")) {
        const auto& dep = j.at("dependence");
        const std::string type = dep.value("type", "independent");
        if (type == "shared_component") {
            scenario.dependence.kind = Dependence::Kind::SharedComponent;
            scenario.dependence.corr = dep.value("corr", 0.2);
        } else if (type != "independent") {
            throw validation_error("unknown dependence type '" + type + "'");
        }
    }
    scenario.validate();
    return scenario;
}

RenewalScenario load_scenario(const std::string& name_or_path) {
    const auto names = scenario_preset_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end())
        return scenario_preset(name_or_path);
    if (!std::filesystem::exists(name_or_path))
        throw validation_error("'" + name_or_path +
                               "' is neither a scenario preset nor an existing file");
    return scenario_from_json(read_json(name_or_path));
}

json to_json(const SegmentationResult& result) {
    json estimates = json::array();
    for (const auto& e : result.estimates) {
        estimates.push_back(json{{"time", e.time},
                                 {"peak_norm", e.peak_norm},
                                 {"peak_quadform", e.peak_quadform},
                                 {"window_lo", e.window_lo},
                                 {"window_hi", e.window_hi},
                                 {"d_hat", vector_to_json(e.d_hat)},
                                 {"sigma2_pre", e.sigma2_pre},
                                 {"sigma2_post", e.sigma2_post}});
    }
    return json{{"schema_version", 1},
                {"horizon", result.horizon},
                {"dim", result.dim},
                {"config", to_json(result.config)},
                {"threshold", to_json(result.threshold)},
                {"beta_used", result.beta_used},
                {"warnings", result.warnings},
                {"q_hat", result.q_hat()},
                {"estimates", std::move(estimates)}};
}

SegmentationResult segmentation_result_from_json(const json& j) {
    SegmentationResult result;
    result.horizon = j.at("horizon").get<double>();
    result.dim = j.at("dim").get<int>();
    result.config = segmentation_config_from_json(j.at("config"));
    result.beta_used = j.at("beta_used").get<double>();
    if (j.contains("warnings"))
        result.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& e : j.at("estimates")) {
        EstimateRecord rec;
        rec.time = e.at("time").get<double>();
        rec.peak_norm = e.value("peak_norm", 0.0);
        rec.peak_quadform = e.value("peak_quadform", 0.0);
        rec.window_lo = e.value("window_lo", 0.0);
        rec.window_hi = e.value("window_hi", 0.0);
        rec.d_hat = vector_from_json(e.at("d_hat"));
        rec.sigma2_pre = e.value("sigma2_pre", 0.0);
        rec.sigma2_post = e.value("sigma2_post", 0.0);
        result.estimates.push_back(std::move(rec));
    }
    return result;
}

json to_json(const ExperimentReport& report) {
    // wall_clock_seconds is deliberately not serialized so seeded runs are
    // byte-identical.
    return json{{"schema_version", 1},
                {"scenario", report.scenario},
                {"estimator_mode", report.estimator_mode},
                {"n_reps", report.n_reps},
                {"base_seed", report.base_seed},
                {"change_points", report.change_points},
                {"detection_rates", report.detection_rates},
                {"mean_spurious", report.mean_spurious},
                {"mean_duplicate", report.mean_duplicate},
                {"rate_all_detected", report.rate_all_detected},
                {"rate_any_estimate", report.rate_any_estimate},
                {"config", to_json(report.config)}};
}

std::string dump_json(const json& j) {
    return j.dump(2) + "\n";
}

void write_json(const json& j, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << dump_json(j);
}

json read_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    json j;
    in >> j;
    return j;
}

} // namespace mosum
