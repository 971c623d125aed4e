#include "lndf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lndf/parallel.hpp"
#include "lndf/rng.hpp"

namespace lndf {

namespace {

constexpr double kOnSurfaceEps = 1e-12;
constexpr double kFourPi = 4.0 * M_PI;

[[noreturn]] void parse_fail(const std::string& path, size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

double to_double(const std::string& s, const std::string& path, size_t line) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        parse_fail(path, line, "expected a number, got '" + s + "'");
    }
}

std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

GeometryFormat infer_format(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == "obj") return GeometryFormat::Obj;
    if (ext == "ply") return GeometryFormat::Ply;
    if (ext == "xyz" || ext == "pts" || ext == "txt") return GeometryFormat::Xyz;
    throw std::invalid_argument("cannot infer geometry format from '" + path + "'");
}

namespace {

Geometry load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    TriangleSoup soup;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = split_ws(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        if (toks[0] == "v") {
            if (toks.size() < 4) parse_fail(path, lineno, "vertex needs 3 coordinates");
            soup.vertices.emplace_back(to_double(toks[1], path, lineno),
                                       to_double(toks[2], path, lineno),
                                       to_double(toks[3], path, lineno));
        } else if (toks[0] == "f") {
            if (toks.size() < 4) parse_fail(path, lineno, "face needs at least 3 vertices");
            std::vector<int> idx;
            for (size_t i = 1; i < toks.size(); ++i) {
                std::string v = toks[i].substr(0, toks[i].find('/'));
                long raw = 0;
                try {
                    raw = std::stol(v);
                } catch (const std::exception&) {
                    parse_fail(path, lineno, "bad face index '" + toks[i] + "'");
                }
                long n = static_cast<long>(soup.vertices.size());
                long resolved = raw > 0 ? raw - 1 : n + raw;
                if (resolved < 0 || resolved >= n)
                    parse_fail(path, lineno, "face index out of range: " + v);
                idx.push_back(static_cast<int>(resolved));
            }
            for (size_t i = 1; i + 1 < idx.size(); ++i)
                soup.triangles.push_back({idx[0], idx[i], idx[i + 1]});
        }
        // vn / vt / other directives ignored
    }
    return soup;
}

Geometry load_ply(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    size_t lineno = 0;

    auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) parse_fail(path, lineno, "unexpected end of file");
        ++lineno;
        return line;
    };

    if (split_ws(next_line()) != std::vector<std::string>{"ply"})
        parse_fail(path, lineno, "missing 'ply' magic");

    struct Element {
        std::string name;
        size_t count = 0;
        std::vector<std::string> props;
    };
    std::vector<Element> elements;
    bool ascii = false;
    while (true) {
        auto toks = split_ws(next_line());
        if (toks.empty()) continue;
        if (toks[0] == "comment") continue;
        if (toks[0] == "format") {
            ascii = toks.size() >= 2 && toks[1] == "ascii";
            if (!ascii) parse_fail(path, lineno, "only ascii PLY is supported");
        } else if (toks[0] == "element") {
            if (toks.size() < 3) parse_fail(path, lineno, "bad element line");
            elements.push_back({toks[1], std::stoul(toks[2]), {}});
        } else if (toks[0] == "property") {
            if (elements.empty()) parse_fail(path, lineno, "property before element");
            if (toks[1] == "list") {
                elements.back().props.push_back("<list>");
            } else {
                if (toks.size() < 3) parse_fail(path, lineno, "bad property line");
                elements.back().props.push_back(toks.back());
            }
        } else if (toks[0] == "end_header") {
            break;
        } else {
            parse_fail(path, lineno, "unknown header directive '" + toks[0] + "'");
        }
    }

    OrientedPointCloud cloud;
    for (const auto& el : elements) {
        if (el.name != "vertex") {
            for (size_t i = 0; i < el.count; ++i) next_line(); // skip payload
            continue;
        }
        std::array<int, 6> col{};
        const char* needed[6] = {"x", "y", "z", "nx", "ny", "nz"};
        for (int c = 0; c < 6; ++c) {
            auto it = std::find(el.props.begin(), el.props.end(), needed[c]);
            if (it == el.props.end())
                throw std::runtime_error(path + ": PLY vertex element is missing property '" +
                                         needed[c] + "'");
            col[c] = static_cast<int>(it - el.props.begin());
        }
        cloud.points.reserve(el.count);
        cloud.normals.reserve(el.count);
        for (size_t i = 0; i < el.count; ++i) {
            auto toks = split_ws(next_line());
            if (toks.size() < el.props.size())
                parse_fail(path, lineno, "vertex row has too few values");
            Vec3 p(to_double(toks[col[0]], path, lineno), to_double(toks[col[1]], path, lineno),
                   to_double(toks[col[2]], path, lineno));
            Vec3 n(to_double(toks[col[3]], path, lineno), to_double(toks[col[4]], path, lineno),
                   to_double(toks[col[5]], path, lineno));
            double nn = n.norm();
            if (!(nn > 0.0)) parse_fail(path, lineno, "zero-length normal");
            cloud.points.push_back(p);
            cloud.normals.push_back(n / nn);
        }
    }
    if (cloud.points.empty()) throw std::runtime_error(path + ": no vertex element");
    cloud.dim = 3;
    return cloud;
}

Geometry load_xyz(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    OrientedPointCloud cloud;
    std::string line;
    size_t lineno = 0;
    int cols = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = split_ws(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        if (cols == 0) {
            cols = static_cast<int>(toks.size());
            if (cols != 2 && cols != 3 && cols != 4 && cols != 6)
                parse_fail(path, lineno,
                           "rows must have 2/3 (point) or 4/6 (point+normal) values");
            cloud.dim = (cols == 2 || cols == 4) ? 2 : 3;
        }
        if (static_cast<int>(toks.size()) != cols)
            parse_fail(path, lineno, "inconsistent column count");
        std::vector<double> v(toks.size());
        for (size_t i = 0; i < toks.size(); ++i) v[i] = to_double(toks[i], path, lineno);
        int d = cloud.dim;
        Vec3 p = Vec3::Zero();
        for (int i = 0; i < d; ++i) p[i] = v[i];
        cloud.points.push_back(p);
        if (cols > d) {
            Vec3 n = Vec3::Zero();
            for (int i = 0; i < d; ++i) n[i] = v[d + i];
            double nn = n.norm();
            if (!(nn > 0.0)) parse_fail(path, lineno, "zero-length normal");
            cloud.normals.push_back(n / nn);
        }
    }
    if (cloud.points.empty()) throw std::runtime_error(path + ": no points");
    return cloud;
}

} // namespace

Geometry load_geometry(const std::string& path, GeometryFormat format) {
    switch (format) {
    case GeometryFormat::Obj: return load_obj(path);
    case GeometryFormat::Ply: return load_ply(path);
    case GeometryFormat::Xyz: return load_xyz(path);
    }
    throw std::logic_error("unreachable");
}

Geometry load_geometry(const std::string& path) { return load_geometry(path, infer_format(path)); }

void write_obj(const std::string& path, const TriangleSoup& soup) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& v : soup.vertices)
        out << "v " << fmt_g17(v.x()) << " " << fmt_g17(v.y()) << " " << fmt_g17(v.z()) << "\n";
    for (const auto& t : soup.triangles)
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

int geometry_dim(const Geometry& g) {
    if (std::holds_alternative<TriangleSoup>(g)) return 3;
    return std::get<OrientedPointCloud>(g).dim;
}

namespace {

void bbox_of(const std::vector<Vec3>& pts, int dim, Vec3& lo, Vec3& hi) {
    lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    hi = -lo;
    for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    if (dim == 2) lo.z() = hi.z() = 0.0;
}

} // namespace

NormalizeTransform normalize_geometry(Geometry& g) {
    const int dim = geometry_dim(g);
    std::vector<Vec3>* pts = nullptr;
    if (auto* soup = std::get_if<TriangleSoup>(&g)) {
        pts = &soup->vertices;
    } else {
        auto& cloud = std::get<OrientedPointCloud>(g);
        pts = &cloud.points;
        cloud.areas.clear(); // stale after rescaling
    }
    if (pts->empty()) throw std::invalid_argument("normalize: empty geometry");
    Vec3 lo, hi;
    bbox_of(*pts, dim, lo, hi);
    double extent = (hi - lo).head(dim).maxCoeff();
    if (!(extent > 0.0)) throw std::invalid_argument("normalize: degenerate bounding box");
    NormalizeTransform t;
    t.center = 0.5 * (lo + hi);
    t.scale = 1.0 / extent;
    for (auto& p : *pts) p = t.apply(p);
    return t;
}

WindingResult winding_triangles(const TriangleSoup& soup, const Vec3& x) {
    double sum = 0.0;
    bool near = false;
    for (const auto& tri : soup.triangles) {
        Vec3 a = soup.vertices[tri[0]] - x;
        Vec3 b = soup.vertices[tri[1]] - x;
        Vec3 c = soup.vertices[tri[2]] - x;
        double la = a.norm(), lb = b.norm(), lc = c.norm();
        if (la < kOnSurfaceEps || lb < kOnSurfaceEps || lc < kOnSurfaceEps) {
            near = true;
            continue;
        }
        Vec3 ntri = (b - a).cross(c - a);
        double nn = ntri.norm();
        if (nn == 0.0) continue; // degenerate triangle, zero solid angle
        double triple = a.dot(b.cross(c));
        if (std::abs(triple) <= kOnSurfaceEps * nn) {
            // x in the triangle's plane: on-surface if the foot lies inside
            Vec3 e1 = b - a, e2 = c - a, vp = -a;
            double d00 = e1.squaredNorm(), d01 = e1.dot(e2), d11 = e2.squaredNorm();
            double d20 = vp.dot(e1), d21 = vp.dot(e2);
            double den = d00 * d11 - d01 * d01;
            if (den > 0.0) {
                double v = (d11 * d20 - d01 * d21) / den;
                double w = (d00 * d21 - d01 * d20) / den;
                if (v >= -1e-9 && w >= -1e-9 && v + w <= 1.0 + 1e-9) {
                    near = true;
                    continue;
                }
            }
        }
        double denom = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
        sum += 2.0 * std::atan2(triple, denom);
    }
    return {sum / kFourPi, near};
}

WindingResult winding_points(const OrientedPointCloud& cloud, const Vec3& x) {
    if (cloud.areas.size() != cloud.points.size())
        throw std::logic_error("winding_points: area weights not computed");
    if (cloud.normals.size() != cloud.points.size())
        throw std::invalid_argument("winding_points: cloud has no normals");
    double sum = 0.0;
    bool near = false;
    const bool three_d = cloud.dim == 3;
    for (size_t i = 0; i < cloud.points.size(); ++i) {
        Vec3 d = cloud.points[i] - x;
        double r = d.norm();
        if (r < kOnSurfaceEps) {
            near = true;
            continue;
        }
        double dot = d.dot(cloud.normals[i]);
        sum += three_d ? cloud.areas[i] * dot / (kFourPi * r * r * r)
                       : cloud.areas[i] * dot / (2.0 * M_PI * r * r);
    }
    return {sum, near};
}

WindingResult winding_polyline2d(const std::vector<Vec3>& loop, const Vec3& x) {
    double sum = 0.0;
    bool near = false;
    const size_t n = loop.size();
    for (size_t i = 0; i < n; ++i) {
        Vec3 a = loop[i] - x;
        Vec3 b = loop[(i + 1) % n] - x;
        double cross = a.x() * b.y() - a.y() * b.x();
        double dot = a.x() * b.x() + a.y() * b.y();
        if (a.head<2>().norm() < kOnSurfaceEps) near = true;
        // distance to the segment
        Vec3 ab = b - a;
        double len2 = ab.head<2>().squaredNorm();
        double t = len2 > 0.0 ? std::clamp(-a.head<2>().dot(ab.head<2>()) / len2, 0.0, 1.0) : 0.0;
        if ((a + t * ab).head<2>().norm() < kOnSurfaceEps) near = true;
        sum += std::atan2(cross, dot);
    }
    return {sum / (2.0 * M_PI), near};
}

void estimate_areas(OrientedPointCloud& cloud, int k) {
    const size_t n = cloud.points.size();
    if (k < 1) throw std::invalid_argument("estimate_areas: k must be >= 1");
    if (n < static_cast<size_t>(k) + 1)
        throw std::invalid_argument("estimate_areas: need at least k+1 points");
    cloud.areas.assign(n, 0.0);
    parallel_for(n, [&](size_t i) {
        // max-heap of the k smallest squared distances
        std::priority_queue<double> heap;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double d2 = (cloud.points[j] - cloud.points[i]).squaredNorm();
            if (heap.size() < static_cast<size_t>(k)) {
                heap.push(d2);
            } else if (d2 < heap.top()) {
                heap.pop();
                heap.push(d2);
            }
        }
        double rk = std::sqrt(heap.top());
        cloud.areas[i] = cloud.dim == 3 ? M_PI * rk * rk / k : 2.0 * rk / k;
    });
}

double point_triangle_distance(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 ba = b - a, pa = x - a;
    Vec3 cb = c - b, pb = x - b;
    Vec3 ac = a - c, pc = x - c;
    Vec3 nor = ba.cross(ac);

    auto seg_d2 = [](const Vec3& e, const Vec3& p) {
        double t = e.squaredNorm() > 0.0 ? std::clamp(p.dot(e) / e.squaredNorm(), 0.0, 1.0) : 0.0;
        return (e * t - p).squaredNorm();
    };

    double n2 = nor.squaredNorm();
    if (n2 > 0.0) {
        double s1 = ba.cross(nor).dot(pa) < 0.0 ? -1.0 : 1.0;
        double s2 = cb.cross(nor).dot(pb) < 0.0 ? -1.0 : 1.0;
        double s3 = ac.cross(nor).dot(pc) < 0.0 ? -1.0 : 1.0;
        if (s1 + s2 + s3 >= 2.0) {
            double d = nor.dot(pa);
            return std::sqrt(d * d / n2);
        }
    }
    return std::sqrt(std::min({seg_d2(ba, pa), seg_d2(cb, pb), seg_d2(ac, pc)}));
}

double point_mesh_distance(const TriangleSoup& soup, const Vec3& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : soup.triangles)
        best = std::min(best, point_triangle_distance(x, soup.vertices[t[0]],
                                                      soup.vertices[t[1]], soup.vertices[t[2]]));
    return best;
}

namespace {

void check_normalized(const Geometry& g, int dim) {
    const std::vector<Vec3>* pts =
        std::holds_alternative<TriangleSoup>(g) ? &std::get<TriangleSoup>(g).vertices
                                                : &std::get<OrientedPointCloud>(g).points;
    Vec3 lo, hi;
    bbox_of(*pts, dim, lo, hi);
    if (lo.head(dim).minCoeff() < -0.5 - 1e-9 || hi.head(dim).maxCoeff() > 0.5 + 1e-9)
        throw std::invalid_argument("geometry is not normalized to [-1/2, 1/2]^n");
}

} // namespace

LabeledDataset build_signed_dataset(const Geometry& g, int n_per_class, double tau_in,
                                    double tau_out, uint64_t seed) {
    if (n_per_class < 1) throw std::invalid_argument("build_signed_dataset: n_per_class < 1");
    if (!(tau_out < tau_in))
        throw std::invalid_argument("build_signed_dataset: requires tau_out < tau_in");
    const int dim = geometry_dim(g);
    check_normalized(g, dim);

    // winding query over either representation
    const TriangleSoup* soup = std::get_if<TriangleSoup>(&g);
    OrientedPointCloud cloud;
    if (!soup) {
        cloud = std::get<OrientedPointCloud>(g);
        if (cloud.normals.size() != cloud.points.size())
            throw std::invalid_argument(
                "build_signed_dataset: signed mode on a point cloud requires normals");
        if (cloud.areas.size() != cloud.points.size()) estimate_areas(cloud);
    }
    auto query = [&](const Vec3& p) {
        return soup ? winding_triangles(*soup, p) : winding_points(cloud, p);
    };

    Rng rng(seed);
    const int64_t budget = 100ll * n_per_class;
    int64_t attempts = 0;
    std::vector<Vec3> inside, outside;
    inside.reserve(n_per_class);
    outside.reserve(n_per_class);

    std::vector<Vec3> cand;
    std::vector<WindingResult> res;
    while ((static_cast<int>(inside.size()) < n_per_class ||
            static_cast<int>(outside.size()) < n_per_class) &&
           attempts < budget) {
        int chunk = static_cast<int>(std::min<int64_t>(4096, budget - attempts));
        cand.resize(chunk);
        res.resize(chunk);
        for (auto& p : cand) {
            p = Vec3::Zero();
            for (int a = 0; a < dim; ++a) p[a] = rng.uniform(-1.0, 1.0);
        }
        parallel_for(static_cast<size_t>(chunk), [&](size_t i) { res[i] = query(cand[i]); });
        attempts += chunk;
        for (int i = 0; i < chunk; ++i) {
            if (res[i].near_surface) continue;
            if (res[i].w >= tau_in && static_cast<int>(inside.size()) < n_per_class)
                inside.push_back(cand[i]);
            else if (res[i].w <= tau_out && static_cast<int>(outside.size()) < n_per_class)
                outside.push_back(cand[i]);
        }
    }
    if (static_cast<int>(inside.size()) < n_per_class ||
        static_cast<int>(outside.size()) < n_per_class) {
        const char* cls = static_cast<int>(inside.size()) < n_per_class ? "inside" : "outside";
        std::ostringstream msg;
        msg << "build_signed_dataset: budget of " << budget << " samples exhausted before filling "
            << cls << " class (inside " << inside.size() << "/" << n_per_class << ", outside "
            << outside.size() << "/" << n_per_class << ", tau_in=" << tau_in
            << ", tau_out=" << tau_out << ")";
        throw std::runtime_error(msg.str());
    }

    LabeledDataset ds;
    ds.dim = dim;
    ds.mode = FieldMode::Signed;
    ds.points.resize(dim, 2 * n_per_class);
    ds.labels.resize(2 * n_per_class);
    for (int i = 0; i < n_per_class; ++i) {
        ds.points.col(i) = inside[i].head(dim);
        ds.labels(i) = -1.0;
        ds.points.col(n_per_class + i) = outside[i].head(dim);
        ds.labels(n_per_class + i) = 1.0;
    }
    return ds;
}

LabeledDataset build_unsigned_dataset(const Geometry& g, int n_per_class, uint64_t seed) {
    if (n_per_class < 1) throw std::invalid_argument("build_unsigned_dataset: n_per_class < 1");
    const int dim = geometry_dim(g);
    check_normalized(g, dim);
    Rng rng(seed);

    std::vector<Vec3> on_surface(n_per_class);
    if (const auto* soup = std::get_if<TriangleSoup>(&g)) {
        if (soup->triangles.empty())
            throw std::invalid_argument("build_unsigned_dataset: empty geometry");
        std::vector<double> cum(soup->triangles.size());
        double total = 0.0;
        for (size_t t = 0; t < soup->triangles.size(); ++t) {
            const auto& tr = soup->triangles[t];
            total += 0.5 * (soup->vertices[tr[1]] - soup->vertices[tr[0]])
                               .cross(soup->vertices[tr[2]] - soup->vertices[tr[0]])
                               .norm();
            cum[t] = total;
        }
        if (!(total > 0.0))
            throw std::invalid_argument("build_unsigned_dataset: zero total surface area");
        for (auto& p : on_surface) {
            double r = rng.uniform01() * total;
            size_t t = std::lower_bound(cum.begin(), cum.end(), r) - cum.begin();
            if (t >= soup->triangles.size()) t = soup->triangles.size() - 1;
            const auto& tr = soup->triangles[t];
            double u = rng.uniform01(), v = rng.uniform01();
            if (u + v > 1.0) {
                u = 1.0 - u;
                v = 1.0 - v;
            }
            p = soup->vertices[tr[0]] + u * (soup->vertices[tr[1]] - soup->vertices[tr[0]]) +
                v * (soup->vertices[tr[2]] - soup->vertices[tr[0]]);
        }
    } else {
        const auto& cloud = std::get<OrientedPointCloud>(g);
        if (cloud.points.empty())
            throw std::invalid_argument("build_unsigned_dataset: empty geometry");
        for (auto& p : on_surface) p = cloud.points[rng.index(cloud.points.size())];
    }

    LabeledDataset ds;
    ds.dim = dim;
    ds.mode = FieldMode::Unsigned;
    ds.points.resize(dim, 2 * n_per_class);
    ds.labels.resize(2 * n_per_class);
    for (int i = 0; i < n_per_class; ++i) {
        ds.points.col(i) = on_surface[i].head(dim);
        ds.labels(i) = -1.0;
    }
    for (int i = 0; i < n_per_class; ++i) {
        Vec3 p = Vec3::Zero();
        for (int a = 0; a < dim; ++a) p[a] = rng.uniform(-1.0, 1.0);
        ds.points.col(n_per_class + i) = p.head(dim);
        ds.labels(n_per_class + i) = 1.0;
    }
    return ds;
}

OrientedPointCloud corrupt(const OrientedPointCloud& cloud, const CorruptSpec& spec,
                           uint64_t seed) {
    Rng rng(seed);
    const size_t n = cloud.points.size();
    OrientedPointCloud out;
    out.dim = cloud.dim;

    switch (spec.kind) {
    case CorruptSpec::Kind::Noise: {
        if (spec.noise_sigma < 0.0) throw std::invalid_argument("corrupt: negative sigma");
        out = cloud;
        out.areas.clear();
        for (auto& p : out.points)
            for (int a = 0; a < cloud.dim; ++a) p[a] += spec.noise_sigma * rng.normal();
        return out;
    }
    case CorruptSpec::Kind::Holes: {
        if (spec.hole_count < 0 || spec.hole_k < 0)
            throw std::invalid_argument("corrupt: negative hole parameters");
        if (static_cast<size_t>(spec.hole_count) > n)
            throw std::invalid_argument("corrupt: more holes than points");
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), size_t{0});
        rng.shuffle(order);
        std::vector<char> removed(n, 0);
        for (int h = 0; h < spec.hole_count; ++h) {
            size_t seed_idx = order[h];
            removed[seed_idx] = 1;
            // k nearest neighbors of the seed in the original cloud
            std::priority_queue<std::pair<double, size_t>> heap;
            for (size_t j = 0; j < n; ++j) {
                if (j == seed_idx) continue;
                double d2 = (cloud.points[j] - cloud.points[seed_idx]).squaredNorm();
                if (heap.size() < static_cast<size_t>(spec.hole_k)) {
                    heap.emplace(d2, j);
                } else if (!heap.empty() && d2 < heap.top().first) {
                    heap.pop();
                    heap.emplace(d2, j);
                }
            }
            while (!heap.empty()) {
                removed[heap.top().second] = 1;
                heap.pop();
            }
        }
        for (size_t i = 0; i < n; ++i) {
            if (removed[i]) continue;
            out.points.push_back(cloud.points[i]);
            if (!cloud.normals.empty()) out.normals.push_back(cloud.normals[i]);
        }
        return out;
    }
    case CorruptSpec::Kind::Subsample: {
        if (spec.subsample_m < 0 || static_cast<size_t>(spec.subsample_m) > n)
            throw std::invalid_argument("corrupt: subsample size exceeds point count");
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), size_t{0});
        rng.shuffle(order);
        order.resize(spec.subsample_m);
        std::sort(order.begin(), order.end());
        for (size_t i : order) {
            out.points.push_back(cloud.points[i]);
            if (!cloud.normals.empty()) out.normals.push_back(cloud.normals[i]);
        }
        return out;
    }
    }
    throw std::logic_error("unreachable");
}

void save_dataset_csv(const std::string& path, const LabeledDataset& ds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "# lndf-dataset mode=" << (ds.mode == FieldMode::Signed ? "signed" : "unsigned")
        << " dim=" << ds.dim << "\n";
    out << (ds.dim == 2 ? "x,y,label" : "x,y,z,label");
    if (ds.has_s_true()) out << ",s_true";
    out << "\n";
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        for (int a = 0; a < ds.dim; ++a) out << fmt_g17(ds.points(a, i)) << ",";
        out << static_cast<int>(ds.labels(i));
        if (ds.has_s_true()) out << "," << fmt_g17(ds.s_true(i));
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

LabeledDataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    size_t lineno = 0;
    LabeledDataset ds;
    ds.mode = FieldMode::Signed;

    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    ++lineno;
    if (!line.empty() && line[0] == '#') {
        if (line.find("mode=unsigned") != std::string::npos) ds.mode = FieldMode::Unsigned;
        if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
        ++lineno;
    }
    bool has_s = line.find("s_true") != std::string::npos;
    ds.dim = line.rfind("x,y,z", 0) == 0 ? 3 : 2;

    std::vector<double> flat;
    std::vector<double> labels, strue;
    const int pt_cols = ds.dim;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream iss(line);
        std::string cell;
        while (std::getline(iss, cell, ',')) cells.push_back(cell);
        const size_t want = static_cast<size_t>(pt_cols) + 1 + (has_s ? 1 : 0);
        if (cells.size() != want) parse_fail(path, lineno, "wrong number of columns");
        for (int a = 0; a < pt_cols; ++a) flat.push_back(to_double(cells[a], path, lineno));
        double lab = to_double(cells[pt_cols], path, lineno);
        if (lab != 1.0 && lab != -1.0) parse_fail(path, lineno, "label must be -1 or 1");
        labels.push_back(lab);
        if (has_s) strue.push_back(to_double(cells[pt_cols + 1], path, lineno));
    }
    const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
    if (n == 0) throw std::runtime_error(path + ": no data rows");
    ds.points = Eigen::Map<MatrixXd>(flat.data(), pt_cols, n);
    ds.labels = Eigen::Map<VectorXd>(labels.data(), n);
    if (has_s) ds.s_true = Eigen::Map<VectorXd>(strue.data(), n);
    return ds;
}

void save_transform_json(const std::string& path, const NormalizeTransform& t, int dim) {
    nlohmann::json j;
    std::vector<double> center(t.center.data(), t.center.data() + dim);
    j["center"] = center;
    j["scale"] = t.scale;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

std::pair<NormalizeTransform, int> load_transform_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    auto center = j.at("center").get<std::vector<double>>();
    if (center.size() != 2 && center.size() != 3)
        throw std::runtime_error(path + ": center must have 2 or 3 components");
    NormalizeTransform t;
    for (size_t i = 0; i < center.size(); ++i) t.center[static_cast<int>(i)] = center[i];
    t.scale = j.at("scale").get<double>();
    if (!(t.scale > 0.0)) throw std::runtime_error(path + ": scale must be positive");
    return {t, static_cast<int>(center.size())};
}

} // namespace lndf
