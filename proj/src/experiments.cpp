#include "loccsim/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "loccsim/coherent.hpp"
#include "loccsim/rates.hpp"
#include "loccsim/rng.hpp"
#include "loccsim/unravel.hpp"
#include "loccsim/version.hpp"

namespace loccsim {

using nlohmann::json;

namespace {

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

const json& require_key(const json& params, const std::string& key,
                        const std::string& experiment) {
    auto it = params.find(key);
    if (it == params.end()) {
        std::ostringstream msg;
        msg << "config error: missing key 'parameters." << key
            << "' for experiment '" << experiment << "'";
        throw ConfigError(msg.str());
    }
    return *it;
}

double number_or(const json& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    if (!it->is_number())
        throw ConfigError("config error: 'parameters." + key + "' must be a number");
    return it->get<double>();
}

std::int64_t integer_or(const json& params, const std::string& key,
                        std::int64_t fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    if (!it->is_number_integer())
        throw ConfigError("config error: 'parameters." + key + "' must be an integer");
    return it->get<std::int64_t>();
}

LoccGeneratorOptions generator_options_from_json(const json& params) {
    LoccGeneratorOptions options;
    if (auto it = params.find("convention"); it != params.end()) {
        const std::string name = it->get<std::string>();
        if (name == "main_text")
            options.convention = DriftConvention::main_text;
        else if (name == "appendix")
            options.convention = DriftConvention::appendix;
        else if (name == "feedback_average")
            options.convention = DriftConvention::feedback_average;
        else
            throw ConfigError("config error: unknown convention '" + name + "'");
    }
    if (auto it = params.find("include_local_drift"); it != params.end())
        options.include_local_drift = it->get<bool>();
    return options;
}

std::vector<double> time_grid(double omega, double periods, int points) {
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(points));
    const double t_max = periods * 2.0 * M_PI / omega;
    for (int i = 0; i < points; ++i)
        times.push_back(t_max * static_cast<double>(i) / static_cast<double>(points - 1));
    return times;
}

void run_revival(const ExperimentConfig& config, std::ostream& log) {
    const json& params = config.parameters;
    const LoccParams p = locc_params_from_json(params);
    const auto dim = static_cast<Index>(integer_or(params, "dim", 24));
    const double periods = number_or(params, "periods", 3.1);
    const int points = static_cast<int>(integer_or(params, "points", 311));
    if (points < 2) throw ConfigError("config error: 'parameters.points' must be >= 2");

    std::vector<double> nbars;
    for (const auto& v : require_key(params, "nbar", "revival"))
        nbars.push_back(v.get<double>());

    RevivalOptions options;
    options.dim = dim;
    options.dt_factor = number_or(params, "dt_factor", 1e-3);
    options.generator = generator_options_from_json(params);

    const CoherentParams coherent{p.omega, p.coupling()};
    const auto times = time_grid(p.omega, periods, points);

    std::vector<std::vector<double>> rows;
    for (double nbar : nbars) {
        log << "revival: nbar=" << nbar << ", dim=" << dim << "\n";
        const auto curve = revival_curve(p, nbar, times, options);
        for (std::size_t i = 0; i < times.size(); ++i)
            rows.push_back({nbar, times[i], p.omega * times[i],
                            signal_thermal(coherent, nbar, times[i]), curve[i]});
    }
    write_csv(config.output_path, config.resolved(),
              {"nbar", "t", "omega_t", "P_coherent_analytic", "P_locc_numeric"}, rows);
}

void run_trajectories(const ExperimentConfig& config, std::ostream& log) {
    const json& params = config.parameters;
    const LoccParams p = locc_params_from_json(params);
    const auto dim = static_cast<Index>(integer_or(params, "dim", 10));
    const double nbar = number_or(params, "nbar", 0.0);
    const double periods = number_or(params, "t_final_periods", 1.0);
    const double dt = number_or(params, "dt_factor", 1e-3) * 2.0 * M_PI / p.omega;
    const int n_traj = static_cast<int>(integer_or(params, "n_traj", 100));
    const auto seed = static_cast<std::uint64_t>(integer_or(params, "seed", 1));
    const int current_files =
        static_cast<int>(integer_or(params, "record_current_trajectories", 0));

    const DensityState rho0 = product(thermal_state(dim, nbar), qubit_plus());
    const double t_final = periods * 2.0 * M_PI / p.omega;

    EnsembleOptions options;
    options.sample_stride = static_cast<int>(integer_or(params, "sample_stride", 0));

    log << "trajectories: n_traj=" << n_traj << ", dim=" << dim << "\n";
    const EnsembleResult ensemble =
        ensemble_average(rho0, p, t_final, dt, n_traj, seed, options);

    const auto ops = fock_operators(dim);
    const OperatorMatrix x_full = tensor(ops.x, identity({2}));
    const OperatorMatrix sz_full = tensor(identity({dim}), pauli_z());
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < ensemble.times.size(); ++i) {
        const auto& state = ensemble.mean_states[i];
        rows.push_back({ensemble.times[i],
                        expectation(x_full, state).real(),
                        expectation(sz_full, state).real(),
                        readout_L_population(state),
                        purity(state)});
    }
    write_csv(config.output_path, config.resolved(),
              {"t", "mean_x", "mean_sz", "P_L", "purity_of_mean"}, rows);

    // Per-trajectory homodyne records, re-derived from the same stream seeds.
    for (int k = 0; k < current_files; ++k) {
        const auto record = simulate_trajectory(
            rho0, p, t_final, dt, derive_stream_seed(seed, static_cast<std::uint64_t>(k)));
        std::vector<std::vector<double>> current_rows;
        current_rows.reserve(record.times.size());
        for (std::size_t i = 0; i < record.times.size(); ++i)
            current_rows.push_back(
                {record.times[i], record.current_A[i], record.current_B[i]});
        std::ostringstream path;
        path << config.output_path << ".traj" << k << ".csv";
        write_csv(path.str(), config.resolved(), {"t", "J_A", "J_B"}, current_rows);
    }
}

void run_kraus_audit(const ExperimentConfig& config, std::ostream& log) {
    const json& params = config.parameters;
    const LoccParams p = locc_params_from_json(params);
    const auto dim = static_cast<Index>(integer_or(params, "dim", 8));
    const int n_samples = static_cast<int>(integer_or(params, "samples", 50));
    const auto seed = static_cast<std::uint64_t>(integer_or(params, "seed", 20));

    std::vector<double> dts;
    if (auto it = params.find("dt_list"); it != params.end())
        for (const auto& v : *it) dts.push_back(v.get<double>());
    else
        dts = {1e-3, 3.16e-4, 1e-4, 3.16e-5, 1e-5, 3.16e-6, 1e-6};
    if (dts.size() < 4)
        throw ConfigError("config error: 'parameters.dt_list' needs >= 4 values");

    log << "kraus-audit: dim=" << dim << ", " << dts.size() << " dt values\n";

    const auto samples = channel_sample_states({dim, 2}, n_samples, seed);
    const LindbladGenerator locc_gen = build_locc_generator(p, dim);

    const auto ops = fock_operators(dim);
    OperatorMatrix m_meas(p.alpha * ops.x.mat, {dim});
    OperatorMatrix f_fb(0.5 * p.beta * pauli_z().mat, {2});
    const LindbladGenerator pair_gen = pair_generator(m_meas, f_fb, 0);

    json report;
    std::vector<double> defects, pair_distances;
    for (double dt : dts) {
        const KrausSet raw = kraus_from_generator(locc_gen, dt);
        defects.push_back(completeness_defect(raw));

        const KrausSet forward = product_form_pair(m_meas, f_fb, 0, dt);
        const KrausSet backward = product_form_pair(f_fb, m_meas, 1, dt);
        const KrausSet composed = compose(backward, forward);
        const KrausSet pair_raw = kraus_from_generator(pair_gen, dt);
        pair_distances.push_back(channel_distance(composed, pair_raw, samples));
    }
    report["dt"] = dts;
    report["completeness_defect"] = defects;
    report["completeness_exponent"] = fit_log_slope(dts, defects);
    report["composed_vs_generator_distance"] = pair_distances;
    report["composed_vs_generator_exponent"] = fit_log_slope(dts, pair_distances);

    // Mixing invariance at the first dt, with the paper's Hadamard-type
    // transformation on a two-operator set and a random unitary on the
    // full LOCC set.
    const double dt0 = dts.front();
    {
        const KrausSet raw = kraus_from_generator(locc_gen, dt0);
        GaussianStream gauss(seed + 1);
        Matrix g(static_cast<Index>(raw.operators.size()),
                 static_cast<Index>(raw.operators.size()));
        for (Index i = 0; i < g.rows(); ++i)
            for (Index j = 0; j < g.cols(); ++j)
                g(i, j) = Complex(gauss.next(), gauss.next());
        const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
        report["mixing_invariance_distance"] =
            channel_distance(raw, mix_kraus(raw, q), samples);
    }

    {
        const KrausSet raw = kraus_from_generator(locc_gen, dt0);
        const KrausSet forward = product_form_pair(m_meas, f_fb, 0, dt0);
        const KrausSet backward = product_form_pair(f_fb, m_meas, 1, dt0);
        const KrausSet composed = compose(backward, forward);
        report["separability_defect_raw_locc"] = separability_defect(raw);
        report["separability_defect_product_form"] = separability_defect(forward);
        report["separability_defect_composed"] = separability_defect(composed);
        report["product_form_set"] = kraus_set_json(forward);
    }

    write_json(config.output_path, config.resolved(), report);
}

void run_rates(const ExperimentConfig& config, std::ostream& log) {
    const json& params = config.parameters;
    json results = json::array();

    auto report_for = [&](const Scenario& s) {
        const RateReport r = symmetric_split(s);
        json entry;
        entry["label"] = s.label;
        entry["m_a_kg"] = s.m_a;
        entry["m_b_kg"] = s.m_b;
        entry["d_m"] = s.d;
        entry["l_m"] = s.l;
        entry["omega_rad_s"] = s.omega;
        entry["g_rad_s"] = r.g;
        entry["gamma_symmetric_rad_s"] = r.gamma_symmetric;
        entry["gamma_asymmetric_rad_s"] = r.gamma_asymmetric;
        entry["gamma_symmetric_hz_over_2pi"] = r.gamma_symmetric / (2.0 * M_PI);
        entry["gamma_asymmetric_hz_over_2pi"] = r.gamma_asymmetric / (2.0 * M_PI);
        entry["notes"] = r.notes;
        return entry;
    };

    if (auto it = params.find("scenario"); it != params.end()) {
        const std::string label = it->get<std::string>();
        const auto& presets = scenario_presets();
        auto found = presets.find(label);
        if (found == presets.end())
            throw ConfigError("config error: unknown scenario '" + label + "'");
        log << "rates: scenario " << label << "\n";
        results.push_back(report_for(found->second));
    } else if (params.contains("m_a")) {
        Scenario s{require_key(params, "m_a", "rates").get<double>(),
                   require_key(params, "m_b", "rates").get<double>(),
                   require_key(params, "d", "rates").get<double>(),
                   require_key(params, "l", "rates").get<double>(),
                   require_key(params, "omega", "rates").get<double>(),
                   "custom"};
        results.push_back(report_for(s));
    } else {
        log << "rates: all presets\n";
        for (const auto& [label, s] : scenario_presets())
            results.push_back(report_for(s));
    }

    write_json(config.output_path, config.resolved(),
               json{{"scenarios", results}});
}

void run_blackhole(const ExperimentConfig& config, std::ostream& log) {
    const json& params = config.parameters;
    json results = json::array();
    const json& masses = require_key(params, "masses", "blackhole");
    for (const auto& mv : masses) {
        const double mass = mv.get<double>();
        const BlackHoleComparison cmp = blackhole_comparison(mass);
        log << "blackhole: M=" << mass << " kg\n";
        results.push_back(json{{"mass_kg", mass},
                               {"locc_heating_W", cmp.locc_heating_W},
                               {"hawking_power_W", cmp.hawking_power_W},
                               {"ratio", cmp.ratio},
                               {"ratio_over_1920pi", cmp.ratio / (1920.0 * M_PI)}});
    }
    write_json(config.output_path, config.resolved(),
               json{{"comparisons", results}});
}

} // namespace

json ExperimentConfig::resolved() const {
    return json{{"experiment", experiment},
                {"parameters", parameters},
                {"output", {{"path", output_path}, {"format", output_format}}}};
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::ostringstream msg;
        msg << "config error at line " << line_of_byte(text, e.byte) << ": "
            << e.what();
        throw ConfigError(msg.str());
    }
    return config_from_json(doc);
}

ExperimentConfig config_from_json(const json& doc) {
    if (!doc.is_object())
        throw ConfigError("config error: document must be a JSON object");
    ExperimentConfig config;
    if (!doc.contains("experiment"))
        throw ConfigError("config error: missing key 'experiment'");
    config.experiment = doc["experiment"].get<std::string>();
    static const char* known[] = {"revival", "trajectories", "kraus-audit",
                                  "rates", "blackhole"};
    bool ok = false;
    for (const char* k : known) ok = ok || config.experiment == k;
    if (!ok)
        throw ConfigError("config error: unknown experiment '" + config.experiment + "'");

    config.parameters = doc.value("parameters", json::object());
    if (!config.parameters.is_object())
        throw ConfigError("config error: 'parameters' must be an object");

    const json out = doc.value("output", json::object());
    config.output_path = out.value("path", config.experiment + ".out");
    config.output_format = out.value("format",
                                     config.experiment == "revival" ||
                                             config.experiment == "trajectories"
                                         ? "csv"
                                         : "json");
    if (config.output_format != "csv" && config.output_format != "json")
        throw ConfigError("config error: output.format must be 'csv' or 'json'");

    // Shared invariants.
    if (config.parameters.contains("dim") &&
        config.parameters["dim"].get<std::int64_t>() < 2)
        throw ConfigError("config error: 'parameters.dim' must be >= 2");
    if (config.parameters.contains("dt_factor") &&
        config.parameters["dt_factor"].get<double>() <= 0.0)
        throw ConfigError("config error: 'parameters.dt_factor' must be > 0");
    return config;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("config error: --set expects key.path=value, got '" +
                          assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty())
            throw ConfigError("config error: empty key segment in '" + path + "'");
        if (dot == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DomainError("fit_log_slope: need matching lists with >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0)
            throw DomainError("fit_log_slope: values must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LoccParams locc_params_from_json(const json& params) {
    const double omega = number_or(params, "omega", 1.0);
    if (omega <= 0.0)
        throw ConfigError("config error: 'parameters.omega' must be > 0");
    if (params.contains("symmetric_rate")) {
        const double rate = params["symmetric_rate"].get<double>();
        if (rate < 0.0)
            throw ConfigError("config error: 'parameters.symmetric_rate' must be >= 0");
        return LoccParams::symmetric(rate * omega, omega);
    }
    if (!params.contains("alpha") || !params.contains("beta"))
        throw ConfigError(
            "config error: need 'parameters.alpha' and 'parameters.beta' (or 'parameters.symmetric_rate')");
    const double alpha = params["alpha"].get<double>();
    const double beta = params["beta"].get<double>();
    if (alpha < 0.0 || beta < 0.0)
        throw ConfigError("config error: alpha and beta must be >= 0");
    return {alpha, beta, omega};
}

json kraus_set_json(const KrausSet& set) {
    json ops = json::array();
    for (const auto& k : set.operators) {
        json rows = json::array();
        for (Index i = 0; i < k.mat.rows(); ++i) {
            json row = json::array();
            for (Index j = 0; j < k.mat.cols(); ++j)
                row.push_back(json::array({k.mat(i, j).real(), k.mat(i, j).imag()}));
            rows.push_back(std::move(row));
        }
        ops.push_back(std::move(rows));
    }
    std::vector<std::int64_t> dims;
    if (!set.operators.empty())
        for (Index d : set.operators.front().dims) dims.push_back(d);
    return json{{"dt", set.dt},
                {"order_label", set.order_label},
                {"dims", dims},
                {"operators", std::move(ops)}};
}

json scenario_table_json() {
    json table;
    for (const auto& [label, s] : scenario_presets())
        table[label] = json{{"m_a_kg", s.m_a}, {"m_b_kg", s.m_b},
                            {"d_m", s.d},      {"l_m", s.l},
                            {"omega_rad_s", s.omega}};
    return table;
}

std::string format_full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const json& config,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open output file: " + path);
    out << "# format: " << kFormatVersion << "\n";
    out << "# config: " << config.dump() << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << format_full_precision(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
    if (!out)
        throw Error("failed writing output file: " + path);
}

void write_json(const std::string& path, const json& config,
                const json& results) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open output file: " + path);
    const json doc{{"format", kFormatVersion}, {"config", config},
                   {"results", results}};
    out << doc.dump(2) << "\n";
    if (!out)
        throw Error("failed writing output file: " + path);
}

void run_experiment(const ExperimentConfig& config, std::ostream& log) {
    if (config.experiment == "revival")
        run_revival(config, log);
    else if (config.experiment == "trajectories")
        run_trajectories(config, log);
    else if (config.experiment == "kraus-audit")
        run_kraus_audit(config, log);
    else if (config.experiment == "rates")
        run_rates(config, log);
    else if (config.experiment == "blackhole")
        run_blackhole(config, log);
    else
        throw ConfigError("config error: unknown experiment '" + config.experiment + "'");
}

} // namespace loccsim
