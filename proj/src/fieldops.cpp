#include "lndf/fieldops.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lndf/parallel.hpp"
#include "lndf/rng.hpp"

namespace lndf {

namespace {

constexpr double kGradFloor = 1e-6;  // below this the projection stalls
constexpr double kMinStep = 1e-6;    // sphere-tracing step floor

} // namespace

ScalarFieldHandle make_field(const LipNet& net) {
    ScalarFieldHandle h;
    h.dim = net.input_dim;
    h.provenance = ScalarFieldHandle::Provenance::Net;
    const LipNet* p = &net;
    h.value = [p](const Vec3& x) { return p->value(x); };
    h.gradient = [p](const Vec3& x) { return p->gradient(x); };
    return h;
}

ScalarFieldHandle make_field(std::shared_ptr<const LipNet> net) {
    ScalarFieldHandle h;
    h.dim = net->input_dim;
    h.provenance = ScalarFieldHandle::Provenance::Net;
    h.value = [net](const Vec3& x) { return net->value(x); };
    h.gradient = [net](const Vec3& x) { return net->gradient(x); };
    return h;
}

ScalarFieldHandle make_field(const AnalyticSdf& sdf) {
    ScalarFieldHandle h;
    h.dim = sdf.dim;
    h.provenance = ScalarFieldHandle::Provenance::Analytic;
    h.value = [sdf](const Vec3& x) { return sdf.value(x); };
    h.gradient = [sdf](const Vec3& x) { return sdf.gradient(x); };
    return h;
}

namespace {

ScalarFieldHandle csg_combine(ScalarFieldHandle f1, ScalarFieldHandle f2, bool take_min,
                              bool negate_second) {
    if (f1.dim != f2.dim) throw std::invalid_argument("csg: operand dimensions differ");
    ScalarFieldHandle h;
    h.dim = f1.dim;
    h.provenance = ScalarFieldHandle::Provenance::Csg;
    auto v1 = f1.value, v2 = f2.value;
    auto g1 = f1.gradient, g2 = f2.gradient;
    const double s2 = negate_second ? -1.0 : 1.0;
    h.value = [=](const Vec3& x) {
        double a = v1(x), b = s2 * v2(x);
        return take_min ? std::min(a, b) : std::max(a, b);
    };
    h.gradient = [=](const Vec3& x) -> Vec3 {
        double a = v1(x), b = s2 * v2(x);
        bool first = take_min ? (a <= b) : (a >= b); // ties take operand 1
        return first ? g1(x) : Vec3(s2 * g2(x));
    };
    return h;
}

} // namespace

ScalarFieldHandle csg_union(ScalarFieldHandle f1, ScalarFieldHandle f2) {
    return csg_combine(std::move(f1), std::move(f2), true, false);
}

ScalarFieldHandle csg_intersect(ScalarFieldHandle f1, ScalarFieldHandle f2) {
    return csg_combine(std::move(f1), std::move(f2), false, false);
}

ScalarFieldHandle csg_difference(ScalarFieldHandle f1, ScalarFieldHandle f2) {
    return csg_combine(std::move(f1), std::move(f2), false, true);
}

ProjectResult project(const ScalarFieldHandle& field, const Vec3& x0, double iso, double tol,
                      int max_iter, bool raw_step) {
    if (!(tol > 0.0)) throw std::invalid_argument("project: tol must be > 0");
    ProjectResult r;
    r.point = x0;
    double fx = field.value(r.point);
    r.residual = std::abs(fx - iso);
    if (r.residual <= tol) return r;
    for (int it = 1; it <= max_iter; ++it) {
        Vec3 g = field.gradient(r.point);
        double gn = g.norm();
        if (gn < kGradFloor) {
            r.iterations = it - 1;
            r.status = ProjectResult::Status::Stalled;
            return r;
        }
        r.point -= raw_step ? Vec3((fx - iso) * g) : Vec3((fx - iso) / gn * g);
        fx = field.value(r.point);
        r.residual = std::abs(fx - iso);
        r.iterations = it;
        if (r.residual <= tol) return r;
    }
    r.status = ProjectResult::Status::MaxIter;
    return r;
}

HitRecord sphere_trace(const ScalarFieldHandle& field, const Ray& ray, double surface_tol,
                       int max_iter) {
    if (std::abs(ray.dir.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("sphere_trace: ray direction must be unit length");
    HitRecord rec;
    double f0 = field.value(ray.origin);
    if (f0 < 0.0) {
        rec.status = HitRecord::Status::Hit;
        rec.t = 0.0;
        rec.point = ray.origin;
        rec.residual = f0;
        rec.interior_start = true;
        return rec;
    }
    double t = 0.0, fv = f0;
    for (int it = 0; it < max_iter; ++it) {
        if (fv <= surface_tol) {
            rec.status = HitRecord::Status::Hit;
            rec.t = t;
            rec.point = ray.origin + t * ray.dir;
            rec.iterations = it;
            rec.residual = fv;
            return rec;
        }
        t += std::max(fv, kMinStep);
        if (t > ray.t_max) {
            rec.status = HitRecord::Status::Miss;
            rec.t = t;
            rec.iterations = it + 1;
            rec.residual = fv;
            return rec;
        }
        fv = field.value(ray.origin + t * ray.dir);
    }
    rec.status = HitRecord::Status::MaxIter;
    rec.t = t;
    rec.point = ray.origin + t * ray.dir;
    rec.iterations = max_iter;
    rec.residual = fv;
    return rec;
}

Image render(const ScalarFieldHandle& field, const Camera& cam, int width, int height,
             Shading shading, double t_max, double surface_tol, int max_iter) {
    if (width < 1 || height < 1) throw std::invalid_argument("render: empty image");
    Vec3 forward = (cam.look_at - cam.position).normalized();
    Vec3 right = forward.cross(cam.up).normalized();
    Vec3 up = right.cross(forward);
    const double tanv = std::tan(cam.vfov_deg * M_PI / 360.0);
    const double aspect = static_cast<double>(width) / height;

    Image img(width, height);
    const uint8_t bg[3] = {24, 26, 30};
    parallel_for(static_cast<size_t>(width) * height, [&](size_t pix) {
        int i = static_cast<int>(pix % width), j = static_cast<int>(pix / width);
        double sx = (2.0 * (i + 0.5) / width - 1.0) * tanv * aspect;
        double sy = (1.0 - 2.0 * (j + 0.5) / height) * tanv;
        Ray ray;
        ray.origin = cam.position;
        ray.dir = (forward + sx * right + sy * up).normalized();
        ray.t_max = t_max;
        HitRecord hit = sphere_trace(field, ray, surface_tol, max_iter);
        if (hit.status != HitRecord::Status::Hit) {
            img.set(i, j, bg[0], bg[1], bg[2]);
            return;
        }
        auto to_byte = [](double v) {
            return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        };
        switch (shading) {
        case Shading::Normal: {
            Vec3 g = field.gradient(hit.point);
            double n = g.norm();
            Vec3 nrm = n > 0.0 ? Vec3(g / n) : Vec3::UnitZ();
            img.set(i, j, to_byte(0.5 * (nrm.x() + 1.0)), to_byte(0.5 * (nrm.y() + 1.0)),
                    to_byte(0.5 * (nrm.z() + 1.0)));
            break;
        }
        case Shading::Depth: {
            double v = 1.0 - hit.t / t_max;
            img.set(i, j, to_byte(v), to_byte(v), to_byte(v));
            break;
        }
        case Shading::Lambert: {
            Vec3 g = field.gradient(hit.point);
            double n = g.norm();
            Vec3 nrm = n > 0.0 ? Vec3(g / n) : Vec3::UnitZ();
            double l = std::max(0.0, nrm.dot(-ray.dir)); // headlight
            double v = 0.08 + 0.9 * l;
            img.set(i, j, to_byte(v), to_byte(v * 0.95), to_byte(v * 0.85));
            break;
        }
        }
    });
    return img;
}

std::vector<Vec3> medial_axis_sample(const ScalarFieldHandle& field, int n_candidates,
                                     double gamma, uint64_t seed, double probe_h) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("medial_axis_sample: gamma must be in (0,1)");
    if (!(probe_h > 0.0)) throw std::invalid_argument("medial_axis_sample: probe_h must be > 0");
    Rng rng(seed);
    std::vector<Vec3> cand(n_candidates, Vec3::Zero());
    for (auto& p : cand)
        for (int a = 0; a < field.dim; ++a) p[a] = rng.uniform(-1.0, 1.0);

    std::vector<char> keep(n_candidates, 0);
    parallel_for(static_cast<size_t>(n_candidates), [&](size_t i) {
        const Vec3& p = cand[i];
        if (field.value(p) >= 0.0) return;
        double g2 = 0.0;
        for (int a = 0; a < field.dim; ++a) {
            Vec3 e = Vec3::Zero();
            e[a] = probe_h;
            double d = (field.value(p + e) - field.value(p - e)) / (2.0 * probe_h);
            g2 += d * d;
        }
        keep[i] = std::sqrt(g2) <= gamma;
    });
    std::vector<Vec3> out;
    for (int i = 0; i < n_candidates; ++i)
        if (keep[i]) out.push_back(cand[i]);
    return out;
}

double audit_lipschitz(const ScalarFieldHandle& field, int n_pairs, uint64_t seed) {
    Rng rng(seed);
    const int dim = field.dim;
    auto draw = [&]() {
        Vec3 p = Vec3::Zero();
        for (int a = 0; a < dim; ++a) p[a] = rng.uniform(-1.0, 1.0);
        return p;
    };
    std::vector<std::pair<Vec3, Vec3>> pairs;
    pairs.reserve(n_pairs);
    for (int i = 0; i < n_pairs; ++i) {
        Vec3 a = draw(), b;
        switch (i % 4) {
        case 0:
        case 1: // long-range pair
            b = draw();
            break;
        case 2: { // short-range pair
            b = a;
            for (int c = 0; c < dim; ++c) b[c] += rng.uniform(-1e-3, 1e-3);
            break;
        }
        default: { // concentrate near the zero set when one can be found
            for (int tries = 0; tries < 16 && std::abs(field.value(a)) > 0.05; ++tries) a = draw();
            b = a;
            for (int c = 0; c < dim; ++c) b[c] += rng.uniform(-1e-2, 1e-2);
            break;
        }
        }
        pairs.emplace_back(a, b);
    }
    std::vector<double> quot(pairs.size(), 0.0);
    parallel_for(pairs.size(), [&](size_t i) {
        const auto& [a, b] = pairs[i];
        double d = (a - b).norm();
        if (d < 1e-12) return;
        quot[i] = std::abs(field.value(a) - field.value(b)) / d;
    });
    double best = 0.0;
    for (double v : quot) best = std::max(best, v);
    return best;
}

UnderestimationAudit audit_underestimation(const ScalarFieldHandle& field,
                                           const TriangleSoup& mesh, int n_points, double radius,
                                           uint64_t seed) {
    if (mesh.triangles.empty()) throw std::invalid_argument("audit_underestimation: empty mesh");
    Rng rng(seed);
    std::vector<Vec3> pts;
    pts.reserve(n_points);
    while (static_cast<int>(pts.size()) < n_points) {
        Vec3 p(rng.uniform(-radius, radius), rng.uniform(-radius, radius),
               rng.uniform(-radius, radius));
        if (p.norm() <= radius) pts.push_back(p);
    }
    UnderestimationAudit a;
    a.s_mesh.resize(n_points);
    a.f.resize(n_points);
    parallel_for(static_cast<size_t>(n_points), [&](size_t i) {
        double d = point_mesh_distance(mesh, pts[i]);
        if (winding_triangles(mesh, pts[i]).w >= 0.5) d = -d;
        a.s_mesh[i] = d;
        a.f[i] = field.value(pts[i]);
    });
    a.max_diff = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_points; ++i) a.max_diff = std::max(a.max_diff, a.f[i] - a.s_mesh[i]);
    if (n_points == 0) a.max_diff = 0.0;
    return a;
}

void write_underestimation_csv(const std::string& path, const UnderestimationAudit& a) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "s_mesh,f,diff\n";
    char buf[128];
    for (size_t i = 0; i < a.f.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", a.s_mesh[i], a.f[i],
                      a.f[i] - a.s_mesh[i]);
        out << buf;
    }
}

} // namespace lndf
