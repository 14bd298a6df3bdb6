#include "support.hpp"

#include <surflow/cli.hpp>
#include <surflow/serialization.hpp>

#include <doctest.h>
#include <json.hpp>

#include <unsupported/Eigen/SparseExtra>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace test;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("surflow_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_config(const fs::path& dir, const json& config)
{
    const fs::path path = dir / "config.json";
    std::ofstream(path) << config.dump(2);
    return path;
}

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const fs::path& dir, const std::string& args, const std::string& env = "")
{
    const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = env + " '" + std::string(SURFLOW_CLI_PATH) + "' " + args + " > '" + out.string() + "' 2> '" +
                            err.string() + "'";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::vector<fs::path> files_matching(const fs::path& dir, const std::string& suffix)
{
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().filename().string().ends_with(suffix)) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

json torus_config(const std::string& experiment, Index n = 8)
{
    return {{"experiment", experiment}, {"mesh", {{"generator", "flat_torus"}, {"nx", n}, {"ny", n}}}, {"timestamp", "fixed"}};
}

} // namespace

TEST_SUITE("cli_io")
{
    TEST_CASE("named fields")
    {
        const auto& s = torus(32);
        const auto ctx = s.fields();
        const Cochain h = parse_field_spec("harmonic:1", 1, ctx, false);
        CHECK(h.degree() == 1);
        CHECK(h.values() == s.basis.forms.col(0));
        const Cochain c = parse_field_spec("cos_x", 0, ctx, true);
        const Vector raw = sample_on_chart(s.mesh, [](const Vector2& p) { return std::cos(p.x()); });
        CHECK((c.values() - raw).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK(std::abs(s.ops.mean0(c.values())) <= 1e-15);
        CHECK(parse_field_spec("random:42", 0, ctx, true).values() == parse_field_spec("random:42", 0, ctx, true).values());
        CHECK(parse_field_spec("random:42", 1, ctx, false).values() == parse_field_spec("random:42", 1, ctx, false).values());
        CHECK(parse_field_spec("random:42", 0, ctx, true).values() != parse_field_spec("random:43", 0, ctx, true).values());
        CHECK((parse_field_spec("0.5*harmonic:2", 1, ctx, false).values() - 0.5 * s.basis.forms.col(1)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(parse_field_spec("zero", 1, ctx, false).values().isZero(0.0));
    }

    TEST_CASE("field spec errors")
    {
        const auto& s = torus(16);
        const auto ctx = s.fields();
        CHECK_THROWS_WITH_AS(parse_field_spec("vortex_street", 0, ctx, true), doctest::Contains("unknown field spec"), ContractError);
        CHECK_THROWS_AS(parse_field_spec("cos_x", 1, ctx, false), ContractError);
        CHECK_THROWS_AS(parse_field_spec("harmonic:3", 1, ctx, false), ContractError);
        CHECK_THROWS_AS(parse_field_spec("harmonic:0", 1, ctx, false), ContractError);
        CHECK_THROWS_AS(parse_field_spec("x*cos_x", 0, ctx, true), ContractError);
        CHECK_THROWS_AS(parse_field_spec("/nonexistent/field.bin", 0, ctx, true), ContractError);

        const fs::path dir = scratch_dir("spec_errors");
        const std::string path = (dir / "small.bin").string();
        save_cochain(Cochain(0, Vector::Ones(5)), path);
        CHECK_THROWS_WITH_AS(parse_field_spec(path, 0, ctx, true), doctest::Contains("does not match"), ContractError);
        CHECK_THROWS_AS(parse_field_spec(path, 1, ctx, false), ContractError);
    }

    TEST_CASE("fields on embedded meshes")
    {
        const auto& g = genus2(0);
        const auto ctx = g.fields();
        CHECK(std::abs(g.ops.mean0(parse_field_spec("cos_x", 0, ctx, true).values())) <= 1e-14);
        CHECK(parse_field_spec("handle:2", 0, ctx, true).values().cwiseAbs().maxCoeff() > 0.1);
        CHECK_THROWS_AS(parse_field_spec("dx", 1, ctx, false), ContractError);
        CHECK_THROWS_AS(parse_field_spec("handle:1", 0, torus(16).fields(), true), ContractError);
    }

    TEST_CASE("cochain file round trip is bitwise")
    {
        const auto& s = genus2(0);
        const fs::path dir = scratch_dir("roundtrip");
        for (int degree = 0; degree < 3; ++degree) {
            std::mt19937_64 rng(degree);
            const Cochain original(degree, random_vector(mass(s.ops, degree).rows(), rng));
            const std::string path = (dir / ("c" + std::to_string(degree) + ".bin")).string();
            save_cochain(original, path);
            CHECK(fs::file_size(path) == static_cast<std::uintmax_t>(8 * original.size()));
            const json meta = json::parse(slurp(cochain_sidecar_path(path)));
            CHECK(meta.at("degree") == degree);
            CHECK(meta.at("cells") == original.size());
            CHECK(meta.at("format") == "float64-le");
            const Cochain back = load_cochain(path);
            CHECK(back.degree() == degree);
            CHECK(std::memcmp(back.values().data(), original.values().data(), sizeof(double) * original.size()) == 0);
        }
        // A loaded cochain feeds parse_field_spec.
        const Vector w = s.field0("random:1");
        const std::string wpath = (dir / "w.bin").string();
        save_cochain(Cochain(0, w), wpath);
        CHECK(parse_field_spec(wpath, 0, s.fields(), false).values() == w);
    }

    TEST_CASE("truncated cochain file is rejected")
    {
        const fs::path dir = scratch_dir("truncated");
        const std::string path = (dir / "t.bin").string();
        save_cochain(Cochain(1, Vector::Ones(10)), path);
        fs::resize_file(path, 40);
        CHECK_THROWS_WITH_AS(load_cochain(path), doctest::Contains("truncated"), ContractError);
    }

    TEST_CASE("matrix market export")
    {
        const auto ops = assemble(generate_tetrahedron());
        const fs::path dir = scratch_dir("mtx");
        const std::string path = (dir / "M1.mtx").string();
        save_matrix_market(ops.M1, path);
        SparseMatrix back;
        REQUIRE(Eigen::loadMarket(back, path));
        CHECK(Matrix(back - ops.M1).cwiseAbs().maxCoeff() <= 1e-15 * Matrix(ops.M1).cwiseAbs().maxCoeff());
    }

    TEST_CASE("config validation")
    {
        const json good = torus_config("flow");
        CHECK_NOTHROW(parse_config(good, "flow"));
        CHECK_THROWS_WITH_AS(parse_config(good, "simulate"), doctest::Contains("unknown experiment"), ContractError);
        CHECK_THROWS_AS(parse_config(good, "decompose"), ContractError);

        auto bad_dt = good;
        bad_dt["params"] = {{"dt", 0.0}};
        CHECK_THROWS_WITH_AS(parse_config(bad_dt, "flow"), doctest::Contains("'dt' must be > 0"), ContractError);
        auto bad_tol = good;
        bad_tol["operators"] = {{"linear_tol", -1e-3}};
        CHECK_THROWS_AS(parse_config(bad_tol, "flow"), ContractError);
        auto bad_rule = good;
        bad_rule["operators"] = {{"wedge_rule", "trapezoid"}};
        CHECK_THROWS_AS(parse_config(bad_rule, "flow"), ContractError);
        auto unknown = good;
        unknown["colour"] = "blue";
        CHECK_THROWS_AS(parse_config(unknown, "flow"), ContractError);
        auto wrong_param = good;
        wrong_param["params"] = {{"n_steps", 3}};
        CHECK_THROWS_AS(parse_config(wrong_param, "flow"), ContractError);
        auto no_mesh = good;
        no_mesh.erase("mesh");
        CHECK_THROWS_AS(parse_config(no_mesh, "flow"), ContractError);

        auto galerkin = good;
        galerkin["operators"] = {{"wedge_rule", "galerkin"}, {"eigen_tol", 1e-9}};
        const auto config = parse_config(galerkin, "flow");
        CHECK(config.operators.wedge_rule == WedgeRule::galerkin);
        CHECK(config.operators.eigen_tol == 1e-9);
    }

    TEST_CASE("mesh-info through the binary")
    {
        const fs::path dir = scratch_dir("mesh_info");
        const json config = {{"mesh", {{"generator", "flat_torus"}, {"nx", 8}, {"ny", 8}, {"Lx", 1.0}, {"Ly", 1.0}}}};
        const auto r = run_cli(dir, "mesh-info --config '" + write_config(dir, config).string() + "' --out '" + (dir / "out").string() + "'");
        CHECK(r.code == 0);
        CHECK(json::parse(r.out) == json::parse(R"({"V":64,"E":192,"F":128,"chi":0,"genus":1})"));
        const auto summaries = files_matching(dir / "out", "_summary.json");
        REQUIRE(summaries.size() == 1);
        CHECK(summaries[0].filename().string().starts_with("mesh-info_torus8x8_"));
    }

    TEST_CASE("mesh-info on the OFF asset")
    {
        const fs::path dir = scratch_dir("mesh_info_off");
        const json config = {{"mesh", {{"off", std::string(SURFLOW_ASSET_DIR) + "/genus2.off"}}}};
        const auto r = run_cli(dir, "mesh-info --config '" + write_config(dir, config).string() + "' --out '" + dir.string() + "'");
        CHECK(r.code == 0);
        CHECK(json::parse(r.out).at("genus") == 2);
        CHECK(json::parse(r.out).at("chi") == -2);
    }

    TEST_CASE("stability-thm2 on the torus")
    {
        const fs::path dir = scratch_dir("thm2");
        json config = torus_config("stability-thm2", 16);
        config["params"] = {{"omega0", "random:3"}, {"c0", {0.6, -0.8}}, {"T", 100.0}, {"n_steps", 1000}};
        const auto r = run_cli(dir, "stability-thm2 --config '" + write_config(dir, config).string() + "' --out '" + dir.string() + "'");
        REQUIRE(r.code == 0);
        const json summary = json::parse(r.out);
        CHECK(summary.at("skew_defect").get<double>() <= 1e-12);
        CHECK(summary.at("norm_drift").get<double>() <= 1e-12);
        CHECK(files_matching(dir, "_series.csv").size() == 1);
    }

    TEST_CASE("stability-thm1 with zero perturbation writes all-zero series")
    {
        const fs::path dir = scratch_dir("thm1_zero");
        json config = torus_config("stability-thm1", 16);
        config["params"] = {{"omega0", "zero"}, {"T", 0.5}, {"dt", 0.01}};
        const auto r = run_cli(dir, "stability-thm1 --config '" + write_config(dir, config).string() + "' --out '" + dir.string() + "'");
        REQUIRE(r.code == 0);
        const auto series = files_matching(dir, "_series.csv");
        REQUIRE(series.size() == 1);
        std::istringstream csv(slurp(series[0]));
        std::string line;
        std::getline(csv, line);
        CHECK(line == "t,enstrophy,stream_norm2,stream_bound,c_1,c_2");
        int rows = 0;
        while (std::getline(csv, line)) {
            std::istringstream fields(line);
            std::string cell;
            std::getline(fields, cell, ','); // time
            while (std::getline(fields, cell, ',')) CHECK(std::stod(cell) == 0.0);
            ++rows;
        }
        CHECK(rows == 6);
        const json summary = json::parse(r.out);
        CHECK(summary.at("checks").at("enstrophy_constant") == true);
        CHECK(summary.at("checks").at("linear_growth") == true);
    }

    TEST_CASE("flow run is reproducible and writes the trajectory")
    {
        const fs::path dir = scratch_dir("flow");
        json config = torus_config("flow", 16);
        config["params"] = {{"omega0", "random:9"}, {"c0", {0.2, 0.1}}, {"T", 0.2}, {"dt", 0.01}, {"sample_every", 5}};
        const std::string cfg = write_config(dir, config).string();
        REQUIRE(run_cli(dir, "flow --config '" + cfg + "' --out '" + (dir / "a").string() + "' --dump-operators").code == 0);
        REQUIRE(run_cli(dir, "flow --config '" + cfg + "' --out '" + (dir / "b").string() + "'").code == 0);
        for (const auto& file : files_matching(dir / "b", "")) {
            CHECK(slurp(file) == slurp(dir / "a" / file.filename()));
        }
        const auto csv = files_matching(dir / "a", "_trajectory.csv");
        REQUIRE(csv.size() == 1);
        std::istringstream in(slurp(csv[0]));
        std::string header;
        std::getline(in, header);
        CHECK(header == "t,energy,enstrophy,total_vorticity,c_1,c_2");
        for (const char* name : {"d0", "d1", "M0", "M1", "M2", "W1"}) {
            CHECK(files_matching(dir / "a", std::string("_") + name + ".mtx").size() == 1);
        }
        CHECK(files_matching(dir / "b", ".mtx").empty());
        const auto final_omega = files_matching(dir / "a", "_omega_final.bin");
        REQUIRE(final_omega.size() == 1);
        CHECK(load_cochain(final_omega[0].string()).size() == 256);
    }

    TEST_CASE("decompose run")
    {
        const fs::path dir = scratch_dir("decompose");
        json config = torus_config("decompose", 16);
        config["params"] = {{"v", "harmonic:2"}};
        const auto r = run_cli(dir, "decompose --config '" + write_config(dir, config).string() + "' --out '" + dir.string() + "'");
        REQUIRE(r.code == 0);
        const json summary = json::parse(r.out);
        CHECK(summary.at("psi_norm").get<double>() <= 1e-8);
        CHECK(std::abs(summary.at("coefficients")[1].get<double>() - 1.0) <= 1e-8);
    }

    TEST_CASE("output directory from the environment")
    {
        const fs::path dir = scratch_dir("env");
        const auto r = run_cli(dir, "mesh-info --config '" + write_config(dir, torus_config("mesh-info")).string() + "'",
                               std::string(kOutputDirEnv) + "='" + (dir / "env_out").string() + "'");
        CHECK(r.code == 0);
        CHECK(files_matching(dir / "env_out", "_summary.json").size() == 1);
    }

    TEST_CASE("exit codes and one-line errors")
    {
        const fs::path dir = scratch_dir("exit_codes");
        const std::string cfg = write_config(dir, torus_config("flow")).string();

        auto r = run_cli(dir, "simulate --config '" + cfg + "'");
        CHECK(r.code == 2);
        CHECK(r.err.starts_with("surflow: error: "));
        CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

        r = run_cli(dir, "flow --config '" + (dir / "missing.json").string() + "'");
        CHECK(r.code == 2);
        CHECK(r.err.find("cannot read config") != std::string::npos);

        std::ofstream(dir / "broken.json") << "{ not json";
        r = run_cli(dir, "flow --config '" + (dir / "broken.json").string() + "'");
        CHECK(r.code == 2);
        CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

        json sphere = {{"mesh", {{"generator", "sphere"}, {"subdivision", 1}}}};
        r = run_cli(dir, "stability-thm2 --config '" + write_config(dir, sphere).string() + "' --out '" + dir.string() + "'");
        CHECK(r.code == 2);
        CHECK(r.err.starts_with("surflow: error: contract:"));

        json blowup = torus_config("flow", 8);
        blowup["params"] = {{"omega0", "1e6*random:1"}, {"T", 1000.0}, {"dt", 1.0}};
        r = run_cli(dir, "flow --config '" + write_config(dir, blowup).string() + "' --out '" + dir.string() + "'");
        CHECK(r.code == 3);
        CHECK(r.err == "surflow: error: numerical: blow-up detected\n");
    }
}
