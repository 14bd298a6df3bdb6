#include <surflow/off_io.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace surflow {

namespace {

// Whitespace tokenizer that skips '#' comments.
class Tokens {
public:
    explicit Tokens(std::istream& in)
    {
        std::string line;
        while (std::getline(in, line)) {
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) tokens_.push_back(tok);
        }
    }

    bool done() const { return pos_ >= tokens_.size(); }

    const std::string& next()
    {
        if (done()) throw ContractError("parse error: unexpected end of OFF file");
        return tokens_[pos_++];
    }

    template <typename T>
    T number()
    {
        const std::string& tok = next();
        std::istringstream ss(tok);
        T value{};
        ss >> value;
        if (ss.fail() || !ss.eof()) throw ContractError("parse error: bad number '" + tok + "'");
        return value;
    }

private:
    std::vector<std::string> tokens_;
    size_t pos_ = 0;
};

} // namespace

SurfaceMesh read_off(std::istream& in)
{
    Tokens tokens(in);
    if (tokens.done() || tokens.next() != "OFF") throw ContractError("parse error: missing OFF header");
    const auto nv = tokens.number<long long>();
    const auto nf = tokens.number<long long>();
    tokens.number<long long>(); // edge count, unused
    if (nv <= 0 || nf <= 0) throw ContractError("parse error: bad element counts");

    std::vector<Vector3> positions(static_cast<size_t>(nv));
    for (auto& p : positions) {
        for (int k = 0; k < 3; ++k) p[k] = tokens.number<double>();
    }
    std::vector<Triangle> triangles(static_cast<size_t>(nf));
    for (auto& t : triangles) {
        if (tokens.number<long long>() != 3) throw ContractError("non-triangle face");
        for (int k = 0; k < 3; ++k) {
            const auto v = tokens.number<long long>();
            if (v < 0 || v >= nv) throw ContractError("parse error: face index out of range");
            t[static_cast<size_t>(k)] = static_cast<Index>(v);
        }
    }
    return SurfaceMesh::from_embedded(std::move(positions), std::move(triangles));
}

SurfaceMesh load_off(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open OFF file: " + path);
    return read_off(in);
}

void write_off(const SurfaceMesh& mesh, std::ostream& out)
{
    if (mesh.metric_mode() != MetricMode::embedded) throw ContractError("OFF export needs an embedded mesh");
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.num_edges() << '\n';
    out << std::setprecision(17);
    for (const auto& p : mesh.positions()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void save_off(const SurfaceMesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ContractError("cannot write OFF file: " + path);
    write_off(mesh, out);
}

} // namespace surflow
