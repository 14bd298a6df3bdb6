#include <surflow/fields.hpp>
#include <surflow/serialization.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace surflow {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

const FlatChart& require_chart(const SurfaceMesh& mesh)
{
    if (!mesh.chart()) throw ContractError("field needs a flat chart (intrinsic torus)");
    return *mesh.chart();
}

bool starts_with(const std::string& s, const std::string& prefix)
{
    return s.rfind(prefix, 0) == 0;
}

std::uint64_t parse_seed(const std::string& spec, std::uint64_t fallback)
{
    const auto colon = spec.find(':');
    if (colon == std::string::npos) return fallback;
    try {
        return std::stoull(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw ContractError("bad seed in field spec '" + spec + "'");
    }
}

// Analytic scalar field g(x, y) with x, y scaled to period 2 pi on a chart.
Vector sample_xy(const SurfaceMesh& mesh, const std::function<double(double, double)>& g)
{
    if (mesh.chart()) {
        const auto& chart = *mesh.chart();
        return sample_on_chart(mesh, [&](const Vector2& p) { return g(two_pi * p.x() / chart.Lx, two_pi * p.y() / chart.Ly); });
    }
    return sample_on_positions(mesh, [&](const Vector3& p) { return g(p.x(), p.y()); });
}

} // namespace

Vector sample_on_chart(const SurfaceMesh& mesh, const std::function<double(const Vector2&)>& f)
{
    const auto& chart = require_chart(mesh);
    Vector out(mesh.num_vertices());
    for (Index v = 0; v < mesh.num_vertices(); ++v) out[v] = f(chart.coords[static_cast<size_t>(v)]);
    return out;
}

Vector sample_on_positions(const SurfaceMesh& mesh, const std::function<double(const Vector3&)>& f)
{
    if (mesh.metric_mode() != MetricMode::embedded) throw ContractError("field needs an embedded mesh");
    Vector out(mesh.num_vertices());
    for (Index v = 0; v < mesh.num_vertices(); ++v) out[v] = f(mesh.positions()[static_cast<size_t>(v)]);
    return out;
}

Vector integrate_one_form(const SurfaceMesh& mesh, const std::function<Vector2(const Vector2&)>& form)
{
    static constexpr std::array<double, 4> nodes = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                                    0.8611363115940526};
    static constexpr std::array<double, 4> weights = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                      0.3478548451374538};
    const auto& chart = require_chart(mesh);
    Vector out(mesh.num_edges());
    for (Index e = 0; e < mesh.num_edges(); ++e) {
        const auto& edge = mesh.edges()[static_cast<size_t>(e)];
        const Vector2 start = chart.coords[static_cast<size_t>(edge.lo)];
        const Vector2 delta = chart.displacement(edge.lo, edge.hi);
        double sum = 0.0;
        for (size_t q = 0; q < 4; ++q) {
            const double s = 0.5 * (nodes[q] + 1.0);
            sum += 0.5 * weights[q] * form(start + s * delta).dot(delta);
        }
        out[e] = sum;
    }
    return out;
}

Vector constant_one_form(const SurfaceMesh& mesh, double a, double b)
{
    const auto& chart = require_chart(mesh);
    Vector out(mesh.num_edges());
    for (Index e = 0; e < mesh.num_edges(); ++e) {
        const auto& edge = mesh.edges()[static_cast<size_t>(e)];
        const Vector2 delta = chart.displacement(edge.lo, edge.hi);
        out[e] = a * delta.x() + b * delta.y();
    }
    return out;
}

Vector remove_mean(const OperatorSet& ops, Vector f)
{
    f.array() -= ops.mean0(f);
    return f;
}

Vector random_smooth_function(const SurfaceMesh& mesh, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    if (mesh.chart()) {
        const auto& chart = *mesh.chart();
        struct Mode {
            int kx, ky;
            double a, b;
        };
        std::vector<Mode> modes;
        for (int kx = -2; kx <= 2; ++kx) {
            for (int ky = 0; ky <= 2; ++ky) {
                if (ky == 0 && kx <= 0) continue;
                const double damp = 1.0 / (1.0 + kx * kx + ky * ky);
                const double a = damp * normal(rng);
                const double b = damp * normal(rng);
                modes.push_back({kx, ky, a, b});
            }
        }
        return sample_on_chart(mesh, [&](const Vector2& p) {
            double value = 0.0;
            for (const auto& m : modes) {
                const double phase = two_pi * (m.kx * p.x() / chart.Lx + m.ky * p.y() / chart.Ly);
                value += m.a * std::cos(phase) + m.b * std::sin(phase);
            }
            return value;
        });
    }
    Vector3 lo = mesh.positions().front(), hi = lo;
    for (const auto& p : mesh.positions()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double extent = (hi - lo).maxCoeff();
    struct Wave {
        Vector3 k;
        double phase, amplitude;
    };
    std::vector<Wave> waves;
    for (int i = 0; i < 8; ++i) {
        Vector3 dir(normal(rng), normal(rng), normal(rng));
        dir.normalize();
        const double magnitude = two_pi / extent * (0.5 + 1.5 * uniform(rng));
        waves.push_back({magnitude * dir, two_pi * uniform(rng), normal(rng)});
    }
    return sample_on_positions(mesh, [&](const Vector3& p) {
        double value = 0.0;
        for (const auto& w : waves) value += w.amplitude * std::cos(w.k.dot(p) + w.phase);
        return value;
    });
}

Vector random_smooth_one_form(const SurfaceMesh& mesh, const OperatorSet& ops, const HarmonicBasis* basis,
                              std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const Vector f1 = random_smooth_function(mesh, rng());
    const Vector f2 = random_smooth_function(mesh, rng());
    Vector out = ops.d0 * f1 + apply_star1(ops, ops.d0 * f2);
    if (basis != nullptr && basis->dimension() > 0) {
        std::normal_distribution<double> normal;
        Vector c(basis->dimension());
        for (Index i = 0; i < c.size(); ++i) c[i] = normal(rng);
        // Scale the harmonic part to the size of the rest.
        const double rest = std::sqrt(out.dot(ops.M1 * out));
        out += (rest > 0.0 ? rest / std::max(c.norm(), 1e-300) : 1.0) * basis->combine(c);
    }
    return out;
}

Cochain parse_field_spec(const std::string& spec_in, int degree, const FieldContext& ctx, bool zero_mean)
{
    if (degree != 0 && degree != 1) throw ContractError("field specs describe 0- or 1-cochains");
    std::string spec = spec_in;
    double scale = 1.0;
    if (auto star = spec.find('*'); star != std::string::npos) {
        try {
            size_t used = 0;
            scale = std::stod(spec.substr(0, star), &used);
            if (used != star) throw ContractError("bad scale");
        } catch (const std::exception&) {
            throw ContractError("bad scale in field spec '" + spec_in + "'");
        }
        spec = spec.substr(star + 1);
    }

    const SurfaceMesh& mesh = ctx.mesh;
    Vector values;
    if (spec.size() > 4 && spec.ends_with(".bin")) {
        Cochain loaded = load_cochain(spec);
        const Index expected = degree == 0 ? mesh.num_vertices() : mesh.num_edges();
        if (loaded.degree() != degree) throw ContractError("cochain file has degree " + std::to_string(loaded.degree()));
        if (loaded.size() != expected) throw ContractError("cochain file size does not match the mesh");
        values = loaded.values();
    } else if (spec == "zero") {
        values = Vector::Zero(degree == 0 ? mesh.num_vertices() : mesh.num_edges());
    } else if (spec == "random" || starts_with(spec, "random:")) {
        const std::uint64_t seed = parse_seed(spec, ctx.default_seed);
        values = degree == 0 ? random_smooth_function(mesh, seed) : random_smooth_one_form(mesh, ctx.ops, ctx.basis, seed);
    } else if (degree == 0) {
        if (spec == "cos_x") values = sample_xy(mesh, [](double x, double) { return std::cos(x); });
        else if (spec == "sin_x") values = sample_xy(mesh, [](double x, double) { return std::sin(x); });
        else if (spec == "cos_y") values = sample_xy(mesh, [](double, double y) { return std::cos(y); });
        else if (spec == "sin_y") values = sample_xy(mesh, [](double, double y) { return std::sin(y); });
        else if (spec == "cos_x_cos_y") values = sample_xy(mesh, [](double x, double y) { return std::cos(x) * std::cos(y); });
        else if (starts_with(spec, "handle:")) {
            // Gaussian bump on one handle of the two-torus generator layout (split at the centroid in x).
            const auto which = parse_seed(spec, 1);
            if (mesh.metric_mode() != MetricMode::embedded) throw ContractError("handle fields need an embedded mesh");
            Vector3 lo = mesh.positions().front(), hi = lo;
            for (const auto& p : mesh.positions()) {
                lo = lo.cwiseMin(p);
                hi = hi.cwiseMax(p);
            }
            const double quarter = 0.25 * (hi.x() - lo.x());
            const Vector3 centre(which == 2 ? hi.x() - quarter : lo.x() + quarter, hi.y(), 0.0);
            const double width = 0.25 * (hi.y() - lo.y());
            values = sample_on_positions(mesh, [&](const Vector3& p) {
                return std::exp(-(p - centre).squaredNorm() / (width * width));
            });
        } else {
            throw ContractError("unknown field spec '" + spec_in + "'");
        }
    } else {
        if (spec == "dx") values = constant_one_form(mesh, 1.0, 0.0);
        else if (spec == "dy") values = constant_one_form(mesh, 0.0, 1.0);
        else if (starts_with(spec, "harmonic:")) {
            if (ctx.basis == nullptr) throw ContractError("harmonic field needs a harmonic basis (genus >= 1)");
            const auto i = static_cast<Index>(parse_seed(spec, 0));
            if (i < 1 || i > ctx.basis->dimension()) throw ContractError("harmonic index out of range in '" + spec_in + "'");
            values = ctx.basis->forms.col(i - 1);
        } else {
            throw ContractError("unknown field spec '" + spec_in + "'");
        }
    }
    values *= scale;
    if (degree == 0 && zero_mean) values = remove_mean(ctx.ops, std::move(values));
    return {degree, std::move(values)};
}

} // namespace surflow
