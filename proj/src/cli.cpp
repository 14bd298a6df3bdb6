#include <surflow/cli.hpp>
#include <surflow/dynamics.hpp>
#include <surflow/fields.hpp>
#include <surflow/mesh_generators.hpp>
#include <surflow/off_io.hpp>
#include <surflow/serialization.hpp>
#include <surflow/stability.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

namespace surflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kSelectors = {"mesh-info", "decompose", "flow", "stability-thm1", "stability-thm2"};

const std::map<std::string, std::set<std::string>> kParams = {
    {"mesh-info", {}},
    {"decompose", {"v"}},
    {"flow", {"T", "dt", "sample_every", "omega0", "c0", "forcing"}},
    {"stability-thm1", {"T", "dt", "sample_every", "omega0", "gamma0", "enstrophy_tol", "growth_tol", "stream_tol"}},
    {"stability-thm2", {"T", "n_steps", "omega0", "c0"}},
};

void require(bool ok, const std::string& message)
{
    if (!ok) throw ContractError(message);
}

double positive(const json& j, const char* key, double fallback)
{
    const double value = j.contains(key) ? j.at(key).get<double>() : fallback;
    require(std::isfinite(value) && value > 0.0, std::string("config: '") + key + "' must be > 0");
    return value;
}

std::string resolve(const ExperimentConfig& config, const std::string& path)
{
    const fs::path p(path);
    return p.is_absolute() || config.base_dir.empty() ? path : (config.base_dir / p).string();
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
    return s.str();
}

json to_json(const Vector& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

json to_json(const Matrix& m)
{
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
    return rows;
}

Vector coefficients_param(const json& params, const char* key, Index dimension, Index default_unit)
{
    Vector c = Vector::Zero(dimension);
    if (!params.contains(key)) {
        if (default_unit >= 0 && default_unit < dimension) c[default_unit] = 1.0;
        return c;
    }
    const auto values = params.at(key).get<std::vector<double>>();
    require(static_cast<Index>(values.size()) == dimension,
            std::string("config: '") + key + "' needs " + std::to_string(dimension) + " entries");
    for (Index i = 0; i < dimension; ++i) c[i] = values[static_cast<size_t>(i)];
    return c;
}

HarmonicBasis basis_for(const OperatorSet& ops, const TopologyReport& topo)
{
    if (topo.genus == 0) {
        HarmonicBasis empty;
        empty.forms = Matrix::Zero(ops.num_edges, 0);
        empty.mass_forms = empty.forms;
        empty.rotation = Matrix::Zero(0, 0);
        return empty;
    }
    return harmonic_basis(ops, topo.genus, ops.options.harmonic_tol);
}

class Writer {
public:
    Writer(fs::path dir, std::string prefix) : dir_(std::move(dir)), prefix_(std::move(prefix))
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw ContractError("cannot create output directory '" + dir_.string() + "'");
    }

    std::string path(const std::string& suffix) const { return (dir_ / (prefix_ + "_" + suffix)).string(); }

    void json_file(const std::string& suffix, const json& j) const
    {
        std::ofstream out(path(suffix));
        if (!out) throw ContractError("cannot write '" + path(suffix) + "'");
        out << j.dump(2) << '\n';
    }

private:
    fs::path dir_;
    std::string prefix_;
};

void write_csv(const std::string& path, const std::vector<std::string>& header, const Matrix& rows)
{
    std::ofstream out(path);
    if (!out) throw ContractError("cannot write '" + path + "'");
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n' << std::setprecision(17);
    for (Index r = 0; r < rows.rows(); ++r) {
        for (Index c = 0; c < rows.cols(); ++c) out << (c ? "," : "") << rows(r, c);
        out << '\n';
    }
}

std::vector<std::string> coefficient_names(Index n)
{
    std::vector<std::string> names;
    for (Index i = 1; i <= n; ++i) names.push_back("c_" + std::to_string(i));
    return names;
}

double relative_drift(const std::vector<FlowDiagnostics>& d, double FlowDiagnostics::*field)
{
    const double start = d.front().*field;
    double worst = 0.0;
    for (const auto& s : d) worst = std::max(worst, std::abs(s.*field - start));
    return start != 0.0 ? worst / std::abs(start) : worst;
}

} // namespace

ExperimentConfig parse_config(const json& doc, const std::string& selector, const fs::path& base_dir)
{
    require(kSelectors.contains(selector), "unknown experiment '" + selector + "'");
    require(doc.is_object(), "config: top level must be an object");
    static const std::set<std::string> top = {"experiment", "mesh", "operators", "params", "seed", "output_dir", "timestamp"};
    for (const auto& [key, _] : doc.items()) require(top.contains(key), "config: unknown key '" + key + "'");

    ExperimentConfig config;
    config.experiment = selector;
    config.base_dir = base_dir;
    if (doc.contains("experiment")) {
        const auto named = doc.at("experiment").get<std::string>();
        require(kSelectors.contains(named), "unknown experiment '" + named + "'");
        require(named == selector, "config: experiment '" + named + "' does not match subcommand '" + selector + "'");
    }

    require(doc.contains("mesh") && doc.at("mesh").is_object(), "config: 'mesh' object is required");
    config.mesh = doc.at("mesh");
    require(config.mesh.contains("generator") != config.mesh.contains("off"),
            "config: mesh needs exactly one of 'generator' or 'off'");

    if (doc.contains("operators")) {
        const json& o = doc.at("operators");
        require(o.is_object(), "config: 'operators' must be an object");
        static const std::set<std::string> keys = {"wedge_rule", "linear_tol", "eigen_tol", "harmonic_tol", "max_eigen_iterations"};
        for (const auto& [key, _] : o.items()) require(keys.contains(key), "config: unknown operator option '" + key + "'");
        if (o.contains("wedge_rule")) {
            const auto rule = o.at("wedge_rule").get<std::string>();
            require(rule == "midpoint" || rule == "galerkin", "config: wedge_rule must be 'midpoint' or 'galerkin'");
            config.operators.wedge_rule = rule == "midpoint" ? WedgeRule::midpoint : WedgeRule::galerkin;
        }
        config.operators.linear_tol = positive(o, "linear_tol", config.operators.linear_tol);
        config.operators.eigen_tol = positive(o, "eigen_tol", config.operators.eigen_tol);
        config.operators.harmonic_tol = positive(o, "harmonic_tol", config.operators.harmonic_tol);
        if (o.contains("max_eigen_iterations")) {
            config.operators.max_eigen_iterations = o.at("max_eigen_iterations").get<int>();
            require(config.operators.max_eigen_iterations > 0, "config: 'max_eigen_iterations' must be > 0");
        }
    }

    if (doc.contains("params")) {
        config.params = doc.at("params");
        require(config.params.is_object(), "config: 'params' must be an object");
        const auto& allowed = kParams.at(selector);
        for (const auto& [key, _] : config.params.items()) {
            require(allowed.contains(key), "config: parameter '" + key + "' is not used by " + selector);
        }
        for (const char* key : {"T", "dt", "enstrophy_tol", "growth_tol", "stream_tol"}) {
            if (config.params.contains(key)) positive(config.params, key, 1.0);
        }
        for (const char* key : {"sample_every", "n_steps"}) {
            if (config.params.contains(key)) require(config.params.at(key).get<int>() > 0, std::string("config: '") + key + "' must be > 0");
        }
    }
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("output_dir")) config.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("timestamp")) config.timestamp = doc.at("timestamp").get<std::string>();
    return config;
}

ExperimentConfig load_config(const std::string& path, const std::string& selector)
{
    std::ifstream in(path);
    if (!in) throw ContractError("cannot read config '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ContractError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config(doc, selector, fs::path(path).parent_path());
}

SurfaceMesh build_mesh(const ExperimentConfig& config, std::string* tag)
{
    const json& m = config.mesh;
    auto set_tag = [&](const std::string& t) {
        if (tag != nullptr) *tag = t;
    };
    if (m.contains("off")) {
        const auto path = resolve(config, m.at("off").get<std::string>());
        set_tag(fs::path(path).stem().string());
        return load_off(path);
    }
    const auto generator = m.at("generator").get<std::string>();
    if (generator == "flat_torus") {
        const Index nx = m.value("nx", Index{32});
        const Index ny = m.value("ny", nx);
        const double Lx = m.value("Lx", 2.0 * M_PI);
        const double Ly = m.value("Ly", Lx);
        set_tag("torus" + std::to_string(nx) + "x" + std::to_string(ny));
        return generate_flat_torus(nx, ny, Lx, Ly);
    }
    if (generator == "genus2") {
        const int level = m.value("subdivision", 0);
        require(level >= 0 && level <= 4, "config: genus2 subdivision must be in 0..4");
        set_tag("genus2s" + std::to_string(level));
        return generate_genus2(level);
    }
    if (generator == "sphere") {
        const int level = m.value("subdivision", 2);
        require(level >= 0 && level <= 6, "config: sphere subdivision must be in 0..6");
        set_tag("sphere" + std::to_string(level));
        return generate_sphere(level);
    }
    if (generator == "tetrahedron") {
        set_tag("tet");
        return generate_tetrahedron();
    }
    throw ContractError("config: unknown mesh generator '" + generator + "'");
}

json run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream& out, std::ostream& log)
{
    auto note = [&](const std::string& msg) {
        if (options.verbose) log << "surflow: " << msg << '\n';
    };

    std::string tag;
    const SurfaceMesh mesh = build_mesh(config, &tag);
    const TopologyReport topo = topology(mesh);
    note("mesh " + tag + ": V=" + std::to_string(topo.V) + " E=" + std::to_string(topo.E) + " F=" + std::to_string(topo.F));

    fs::path dir = ".";
    if (options.out_dir) dir = *options.out_dir;
    else if (config.output_dir) dir = resolve(config, *config.output_dir);
    else if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') dir = env;
    const Writer writer(dir, config.experiment + "_" + tag + "_" + config.timestamp.value_or(utc_timestamp()));

    json summary = {{"experiment", config.experiment}, {"mesh", tag}};

    if (config.experiment == "mesh-info") {
        summary = {{"V", topo.V}, {"E", topo.E}, {"F", topo.F}, {"chi", topo.euler_characteristic}, {"genus", topo.genus}};
        json full = summary;
        full["connected"] = topo.connected;
        full["closed"] = topo.closed;
        full["orientable"] = topo.orientable;
        writer.json_file("summary.json", full);
        out << summary.dump() << '\n';
        return summary;
    }

    const OperatorSet ops = assemble(mesh, config.operators);
    note("operators assembled");
    if (options.dump_operators) {
        const std::pair<const char*, const SparseMatrix*> mats[] = {{"d0", &ops.d0}, {"d1", &ops.d1}, {"M0", &ops.M0},
                                                                    {"M1", &ops.M1}, {"M2", &ops.M2}, {"W1", &ops.W1}};
        for (const auto& [name, mat] : mats) save_matrix_market(*mat, writer.path(std::string(name) + ".mtx"));
    }
    const HarmonicBasis basis = basis_for(ops, topo);
    note("harmonic basis of dimension " + std::to_string(basis.dimension()));
    const FieldContext fields{mesh, ops, basis.dimension() > 0 ? &basis : nullptr, config.seed};
    const json& p = config.params;
    summary["genus"] = topo.genus;
    if (basis.dimension() > 0) {
        summary["harmonic"] = {{"dimension", basis.dimension()}, {"spectral_gap", basis.spectral_gap},
                               {"residual", basis.residual}, {"gram_defect", basis.gram_defect}};
    }

    if (config.experiment == "decompose") {
        const Cochain v = parse_field_spec(p.value("v", "random"), 1, fields, false);
        const HodgeParts parts = hodge_decompose(ops, basis, v);
        const double vv = inner(ops, v, v);
        summary["v_norm"] = std::sqrt(vv);
        summary["psi_norm"] = norm(ops, parts.psi);
        summary["coexact_norm"] = norm(ops, parts.coexact);
        summary["gamma_norm"] = norm(ops, parts.gamma);
        summary["exact_norm"] = norm(ops, parts.exact);
        summary["coefficients"] = to_json(parts.coefficients);
        summary["orthogonality"] = vv > 0.0 ? std::abs(inner(ops, parts.coexact, parts.gamma)) / vv : 0.0;
        summary["iterations"] = parts.iterations;
        save_cochain(parts.psi, writer.path("psi.bin"));
        save_cochain(parts.coexact, writer.path("coexact.bin"));
        save_cochain(parts.gamma, writer.path("gamma.bin"));
        save_cochain(parts.exact, writer.path("exact.bin"));
    } else if (config.experiment == "flow") {
        std::optional<Vector> forcing;
        if (p.contains("forcing")) forcing = parse_field_spec(p.at("forcing").get<std::string>(), 1, fields, false).values();
        const EulerFlow flow(ops, basis, forcing);
        const double T = p.value("T", 1.0);
        const double dt = p.value("dt", 1e-3);
        const int every = p.value("sample_every", 10);
        const FlowState initial = flow.make_state(parse_field_spec(p.value("omega0", "cos_x_cos_y"), 0, fields, true).values(),
                                                  coefficients_param(p, "c0", basis.dimension(), -1));
        note("integrating flow to T=" + std::to_string(T));
        const Trajectory traj = flow.integrate(initial, T, dt, every);
        const auto& d = traj.diagnostics;
        summary["T"] = T;
        summary["dt"] = dt;
        summary["samples"] = d.size();
        summary["cfl"] = flow.cfl_number(initial, dt);
        summary["energy_drift"] = relative_drift(d, &FlowDiagnostics::energy);
        summary["enstrophy_drift"] = relative_drift(d, &FlowDiagnostics::enstrophy);
        double vort = 0.0;
        for (const auto& s : d) vort = std::max(vort, std::abs(s.total_vorticity));
        summary["total_vorticity_max"] = vort;
        summary["final_c"] = to_json(d.back().c);
        write_trajectory_csv(traj, writer.path("trajectory.csv"));
        save_cochain({0, traj.samples.back().omega}, writer.path("omega_final.bin"));
        save_cochain({0, flow.recover_pressure(traj.samples.back())}, writer.path("pressure_final.bin"));
    } else if (config.experiment == "stability-thm1") {
        require(basis.dimension() > 0, "stability-thm1 needs a surface of genus >= 1");
        const Vector gamma0 = parse_field_spec(p.value("gamma0", "harmonic:1"), 1, fields, false).values();
        const Vector omega0 = parse_field_spec(p.value("omega0", "cos_x"), 0, fields, true).values();
        Thm1Options opt;
        opt.T = p.value("T", 1.0);
        opt.dt = p.value("dt", 1e-3);
        opt.sample_every = p.value("sample_every", 10);
        opt.keep_omega = false;
        const SpectralReport spectrum = lambda_min(ops);
        note("lambda_min = " + std::to_string(spectrum.lambda_min));
        const Thm1Report r = linearize_thm1(ops, basis, gamma0, omega0, opt, spectrum);
        const double etol = p.value("enstrophy_tol", 1e-3);
        const double gtol = p.value("growth_tol", 0.05);
        const double stol = p.value("stream_tol", 1e-8);
        summary["lambda_min"] = r.lambda_min;
        summary["gamma0_coefficients"] = to_json(r.gamma0_coefficients);
        summary["gamma0_residual"] = r.gamma0_residual;
        summary["bound_slope"] = to_json(r.bound_slope);
        summary["constancy_cv"] = to_json(r.constancy_cv);
        summary["checks"] = {{"enstrophy_constant", enstrophy_conservation_check(r, etol)},
                             {"linear_growth", linear_growth_check(r, gtol)},
                             {"stream_bound", stream_bound_check(r, spectrum, stol)}};
        Matrix rows(r.times.size(), 4 + r.coefficients.cols());
        rows << r.times, r.enstrophy, r.stream_norm2, r.stream_bound, r.coefficients;
        std::vector<std::string> header = {"t", "enstrophy", "stream_norm2", "stream_bound"};
        for (auto& name : coefficient_names(r.coefficients.cols())) header.push_back(name);
        write_csv(writer.path("series.csv"), header, rows);
    } else if (config.experiment == "stability-thm2") {
        require(basis.dimension() > 0, "stability-thm2 needs a surface of genus >= 1");
        const Vector omega0 = parse_field_spec(p.value("omega0", "random"), 0, fields, true).values();
        const Vector c0 = coefficients_param(p, "c0", basis.dimension(), 0);
        const Thm2Report r = run_thm2(ops, basis, omega0, c0, p.value("T", 100.0), p.value("n_steps", 10000));
        summary["A"] = to_json(r.A);
        summary["skew_defect"] = r.skew_defect;
        summary["norm_drift"] = r.norm_drift;
        summary["final_c"] = to_json(Vector(r.coefficients.bottomRows(1).transpose()));
        Matrix rows(r.times.size(), 2 + r.coefficients.cols());
        rows << r.times, r.norms, r.coefficients;
        std::vector<std::string> header = {"t", "norm"};
        for (auto& name : coefficient_names(r.coefficients.cols())) header.push_back(name);
        write_csv(writer.path("series.csv"), header, rows);
    }

    writer.json_file("summary.json", summary);
    out << summary.dump(2) << '\n';
    return summary;
}

int run_cli(int argc, char** argv)
{
    CLI::App app{"Structure-preserving incompressible flow on triangle meshes"};
    app.require_subcommand(1, 1);
    std::string config_path;
    std::string out_dir;
    RunOptions options;
    for (const auto& name : kSelectors) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config and " + std::string(kOutputDirEnv) + ")");
        sub->add_flag("--verbose", options.verbose, "progress on stderr");
        sub->add_flag("--dump-operators", options.dump_operators, "write operator matrices as Matrix Market files");
    }

    auto fail = [](int code, const char* kind, std::string message) {
        for (char& ch : message) {
            if (ch == '\n' || ch == '\r') ch = ' ';
        }
        std::cerr << "surflow: error: " << kind << ": " << message << '\n';
        return code;
    };

    if (argc > 1 && argv[1][0] != '-' && !kSelectors.contains(argv[1])) {
        return fail(2, "usage", std::string("unknown experiment '") + argv[1] + "'");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "usage", e.what());
    }

    try {
        const std::string selector = app.get_subcommands().front()->get_name();
        if (!out_dir.empty()) options.out_dir = out_dir;
        const ExperimentConfig config = load_config(config_path, selector);
        run_experiment(config, options, std::cout, std::cerr);
        return 0;
    } catch (const ContractError& e) {
        return fail(2, "contract", e.what());
    } catch (const NumericalError& e) {
        return fail(3, "numerical", e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(2, "contract", std::string("config: ") + e.what());
    } catch (const fs::filesystem_error& e) {
        return fail(2, "contract", e.what());
    } catch (const std::exception& e) {
        return fail(3, "numerical", e.what());
    }
}

} // namespace surflow
