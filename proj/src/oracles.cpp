#include "lndf/oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lndf/rng.hpp"

namespace lndf {

namespace {

double seg_distance(const Vec3& x, const Vec3& a, const Vec3& b, Vec3* grad) {
    Vec3 ab = b - a;
    double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    Vec3 p = a + t * ab;
    Vec3 d = x - p;
    double dist = d.norm();
    if (grad) *grad = dist > 0.0 ? Vec3(d / dist) : Vec3(1, 0, 0);
    return dist;
}

} // namespace

double AnalyticSdf::value(const Vec3& x_in) const {
    Vec3 x = x_in;
    if (dim == 2) x.z() = 0.0;
    switch (kind) {
    case Kind::Sphere:
        return (x - center).norm() - radius;
    case Kind::Box: {
        Vec3 q = (x - center).cwiseAbs() - half_extents;
        Vec3 qp = q.cwiseMax(0.0);
        if (dim == 2) qp.z() = 0.0;
        double inside = std::min(q.head(dim).maxCoeff(), 0.0);
        return qp.norm() + inside;
    }
    case Kind::Segment:
        return seg_distance(x, seg_a, seg_b, nullptr) - radius;
    case Kind::Torus: {
        Vec3 p = x - center;
        double ring = std::hypot(p.x(), p.y()) - torus_major;
        return std::hypot(ring, p.z()) - torus_minor;
    }
    case Kind::Polyline: {
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i + 1 < polyline.size(); ++i)
            best = std::min(best, seg_distance(x, polyline[i], polyline[i + 1], nullptr));
        return best;
    }
    }
    throw std::logic_error("unreachable");
}

Vec3 AnalyticSdf::gradient(const Vec3& x_in) const {
    Vec3 x = x_in;
    if (dim == 2) x.z() = 0.0;
    Vec3 g = Vec3::Zero();
    switch (kind) {
    case Kind::Sphere: {
        Vec3 d = x - center;
        double n = d.norm();
        g = n > 0.0 ? Vec3(d / n) : Vec3(1, 0, 0);
        break;
    }
    case Kind::Box: {
        Vec3 d = x - center;
        Vec3 q = d.cwiseAbs() - half_extents;
        Vec3 qp = q.cwiseMax(0.0);
        if (dim == 2) qp.z() = 0.0;
        double outside = qp.norm();
        if (outside > 0.0) {
            g = qp / outside;
            for (int i = 0; i < 3; ++i) g[i] = std::copysign(g[i], d[i]);
        } else {
            // inside: step along the axis of least penetration
            int axis = 0;
            for (int i = 1; i < dim; ++i)
                if (q[i] > q[axis]) axis = i;
            g[axis] = std::copysign(1.0, d[axis]);
        }
        break;
    }
    case Kind::Segment:
        seg_distance(x, seg_a, seg_b, &g);
        break;
    case Kind::Torus: {
        Vec3 p = x - center;
        double rho = std::hypot(p.x(), p.y());
        double ring = rho - torus_major;
        double n = std::hypot(ring, p.z());
        if (rho > 0.0 && n > 0.0) {
            g = Vec3(ring * p.x() / rho, ring * p.y() / rho, p.z()) / n;
        } else {
            g = Vec3(1, 0, 0);
        }
        break;
    }
    case Kind::Polyline: {
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i + 1 < polyline.size(); ++i) {
            Vec3 gi;
            double d = seg_distance(x, polyline[i], polyline[i + 1], &gi);
            if (d < best) {
                best = d;
                g = gi;
            }
        }
        break;
    }
    }
    if (dim == 2) g.z() = 0.0;
    return g;
}

AnalyticSdf make_sphere(const Vec3& center, double radius, int dim) {
    AnalyticSdf s;
    s.kind = AnalyticSdf::Kind::Sphere;
    s.dim = dim;
    s.center = center;
    s.radius = radius;
    return s;
}

AnalyticSdf make_box(const Vec3& center, const Vec3& half_extents, int dim) {
    AnalyticSdf s;
    s.kind = AnalyticSdf::Kind::Box;
    s.dim = dim;
    s.center = center;
    s.half_extents = half_extents;
    return s;
}

AnalyticSdf make_segment(const Vec3& a, const Vec3& b, double radius, int dim) {
    AnalyticSdf s;
    s.kind = AnalyticSdf::Kind::Segment;
    s.dim = dim;
    s.seg_a = a;
    s.seg_b = b;
    s.radius = radius;
    return s;
}

AnalyticSdf make_torus(const Vec3& center, double major, double minor) {
    AnalyticSdf s;
    s.kind = AnalyticSdf::Kind::Torus;
    s.dim = 3;
    s.center = center;
    s.torus_major = major;
    s.torus_minor = minor;
    return s;
}

AnalyticSdf make_polyline(std::vector<Vec3> points, int dim) {
    if (points.size() < 2) throw std::invalid_argument("polyline needs at least 2 points");
    AnalyticSdf s;
    s.kind = AnalyticSdf::Kind::Polyline;
    s.dim = dim;
    s.polyline = std::move(points);
    return s;
}

AnalyticSdf parse_oracle_spec(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("oracle spec must look like kind:params, got '" + spec + "'");
    std::string kind = spec.substr(0, colon);
    std::vector<double> v;
    {
        std::string rest = spec.substr(colon + 1);
        size_t pos = 0;
        while (pos < rest.size()) {
            size_t next = rest.find(',', pos);
            std::string tok = rest.substr(pos, next == std::string::npos ? next : next - pos);
            try {
                v.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad number '" + tok + "' in oracle spec");
            }
            if (next == std::string::npos) break;
            pos = next + 1;
        }
    }
    auto want = [&](size_t n) {
        if (v.size() != n)
            throw std::invalid_argument("oracle '" + kind + "' expects " + std::to_string(n) +
                                        " parameters, got " + std::to_string(v.size()));
    };
    if (kind == "sphere") {
        want(4);
        return make_sphere({v[0], v[1], v[2]}, v[3], 3);
    }
    if (kind == "circle") {
        want(3);
        return make_sphere({v[0], v[1], 0.0}, v[2], 2);
    }
    if (kind == "box") {
        want(6);
        return make_box({v[0], v[1], v[2]}, {v[3], v[4], v[5]}, 3);
    }
    if (kind == "torus") {
        want(5);
        return make_torus({v[0], v[1], v[2]}, v[3], v[4]);
    }
    if (kind == "segment") {
        if (v.size() != 6 && v.size() != 7)
            throw std::invalid_argument("segment expects 6 or 7 parameters");
        return make_segment({v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v.size() == 7 ? v[6] : 0.0, 3);
    }
    throw std::invalid_argument("unknown oracle kind '" + kind + "'");
}

LabeledDataset make_analytic_dataset(const AnalyticSdf& sdf, int n_per_class, uint64_t seed,
                                     bool with_s_true, double exclude_shell) {
    if (n_per_class < 1) throw std::invalid_argument("make_analytic_dataset: n_per_class < 1");
    Rng rng(seed);
    const int dim = sdf.dim;
    std::vector<std::pair<Vec3, double>> inside, outside;
    inside.reserve(n_per_class);
    outside.reserve(n_per_class);
    const int64_t budget = 1000ll * n_per_class;
    int64_t attempts = 0;
    while ((static_cast<int>(inside.size()) < n_per_class ||
            static_cast<int>(outside.size()) < n_per_class) &&
           attempts++ < budget) {
        Vec3 p = Vec3::Zero();
        for (int a = 0; a < dim; ++a) p[a] = rng.uniform(-1.0, 1.0);
        double s = sdf.value(p);
        if (std::abs(s) <= exclude_shell) continue;
        if (s < 0.0 && static_cast<int>(inside.size()) < n_per_class)
            inside.emplace_back(p, s);
        else if (s > 0.0 && static_cast<int>(outside.size()) < n_per_class)
            outside.emplace_back(p, s);
    }
    if (static_cast<int>(inside.size()) < n_per_class)
        throw std::runtime_error("make_analytic_dataset: shape interior too small to sample");

    LabeledDataset ds;
    ds.dim = dim;
    ds.mode = FieldMode::Signed;
    ds.points.resize(dim, 2 * n_per_class);
    ds.labels.resize(2 * n_per_class);
    if (with_s_true) ds.s_true.resize(2 * n_per_class);
    for (int i = 0; i < n_per_class; ++i) {
        ds.points.col(i) = inside[i].first.head(dim);
        ds.labels(i) = -1.0;
        ds.points.col(n_per_class + i) = outside[i].first.head(dim);
        ds.labels(n_per_class + i) = 1.0;
        if (with_s_true) {
            ds.s_true(i) = inside[i].second;
            ds.s_true(n_per_class + i) = outside[i].second;
        }
    }
    return ds;
}

} // namespace lndf
