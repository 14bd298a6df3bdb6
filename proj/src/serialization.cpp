#include <surflow/serialization.hpp>

#include <json.hpp>
#include <unsupported/Eigen/SparseExtra>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>

namespace surflow {

namespace {

std::uint64_t to_little_endian(std::uint64_t bits)
{
    if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(bits);
    return bits;
}

} // namespace

std::string cochain_sidecar_path(const std::string& path)
{
    return std::filesystem::path(path).replace_extension(".json").string();
}

void save_cochain(const Cochain& cochain, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractError("cannot write '" + path + "'");
    for (Index i = 0; i < cochain.size(); ++i) {
        const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(cochain.values()[i]));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    nlohmann::json meta = {{"degree", cochain.degree()}, {"cells", cochain.size()}, {"format", "float64-le"}};
    std::ofstream side(cochain_sidecar_path(path));
    if (!side) throw ContractError("cannot write sidecar for '" + path + "'");
    side << meta.dump(2) << '\n';
}

Cochain load_cochain(const std::string& path)
{
    std::ifstream side(cochain_sidecar_path(path));
    if (!side) throw ContractError("missing sidecar for '" + path + "'");
    nlohmann::json meta;
    try {
        side >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw ContractError("bad sidecar for '" + path + "': " + e.what());
    }
    if (meta.value("format", "") != "float64-le") throw ContractError("unsupported cochain format in '" + path + "'");
    const int degree = meta.at("degree").get<int>();
    const auto cells = meta.at("cells").get<Index>();

    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContractError("cannot read '" + path + "'");
    Vector values(cells);
    for (Index i = 0; i < cells; ++i) {
        std::uint64_t bits = 0;
        if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw ContractError("truncated cochain file '" + path + "'");
        values[i] = std::bit_cast<double>(to_little_endian(bits));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw ContractError("cochain file '" + path + "' is longer than its sidecar says");
    return {degree, std::move(values)};
}

void save_matrix_market(const SparseMatrix& matrix, const std::string& path)
{
    if (!Eigen::saveMarket(matrix, path)) throw ContractError("cannot write '" + path + "'");
}

void write_trajectory_csv(const Trajectory& trajectory, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ContractError("cannot write '" + path + "'");
    const Index n = trajectory.diagnostics.empty() ? 0 : trajectory.diagnostics.front().c.size();
    out << "t,energy,enstrophy,total_vorticity";
    for (Index i = 1; i <= n; ++i) out << ",c_" << i;
    out << '\n' << std::setprecision(17);
    for (const auto& d : trajectory.diagnostics) {
        out << d.t << ',' << d.energy << ',' << d.enstrophy << ',' << d.total_vorticity;
        for (Index i = 0; i < n; ++i) out << ',' << d.c[i];
        out << '\n';
    }
}

} // namespace surflow
