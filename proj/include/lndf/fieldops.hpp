#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lndf/geometry.hpp"
#include "lndf/image.hpp"
#include "lndf/lipnet.hpp"
#include "lndf/oracles.hpp"

namespace lndf {

/// Uniform evaluation interface shared by trained nets, analytic oracles,
/// and CSG composites. Evaluation is in the normalized frame (the training
/// domain D); handles are read-only and safe to query concurrently.
struct ScalarFieldHandle {
    enum class Provenance { Net, Analytic, Csg };
    int dim = 3;
    Provenance provenance = Provenance::Analytic;
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> gradient;
};

/// Non-owning view; the net must outlive the handle.
ScalarFieldHandle make_field(const LipNet& net);
ScalarFieldHandle make_field(std::shared_ptr<const LipNet> net);
ScalarFieldHandle make_field(const AnalyticSdf& sdf);

/// Pointwise min/max composites; 1-Lipschitz operands give a 1-Lipschitz
/// composite. Gradient follows the active operand, ties take operand 1.
ScalarFieldHandle csg_union(ScalarFieldHandle f1, ScalarFieldHandle f2);
ScalarFieldHandle csg_intersect(ScalarFieldHandle f1, ScalarFieldHandle f2);
ScalarFieldHandle csg_difference(ScalarFieldHandle f1, ScalarFieldHandle f2);

struct ProjectResult {
    enum class Status { Converged, MaxIter, Stalled };
    Vec3 point = Vec3::Zero();
    int iterations = 0;
    double residual = 0.0;
    Status status = Status::Converged;
};

/// Iterates x <- x - (f - iso) grad/|grad| until |f - iso| <= tol. With
/// raw_step the update is the unnormalized x - (f - iso) grad, which for a
/// c-scaled SDF contracts by (1 - c^2) per step instead of (1 - c).
ProjectResult project(const ScalarFieldHandle& field, const Vec3& x0, double iso = 0.0,
                      double tol = 1e-6, int max_iter = 200, bool raw_step = false);

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 dir = Vec3::UnitX(); // unit length
    double t_max = 10.0;
};

struct HitRecord {
    enum class Status { Hit, Miss, MaxIter };
    Status status = Status::Miss;
    double t = 0.0;
    Vec3 point = Vec3::Zero();
    int iterations = 0;
    double residual = 0.0;
    bool interior_start = false;
};

/// Unit-scale sphere tracing: steps by the field value (floored at 1e-6).
/// Sound for 1-Lipschitz fields; never crosses the zero set of an
/// underestimating field before reporting a hit.
HitRecord sphere_trace(const ScalarFieldHandle& field, const Ray& ray,
                       double surface_tol = 1e-4, int max_iter = 200);

struct Camera {
    Vec3 position = Vec3(0, -2, 0);
    Vec3 look_at = Vec3::Zero();
    Vec3 up = Vec3::UnitZ();
    double vfov_deg = 45.0;
};

enum class Shading { Normal, Depth, Lambert };

/// One sphere-traced ray per pixel; gradient-derived normals; deterministic.
Image render(const ScalarFieldHandle& field, const Camera& cam, int width, int height,
             Shading shading, double t_max = 10.0, double surface_tol = 1e-4,
             int max_iter = 200);

/// Sample-and-reject skeleton sampling: keeps uniform candidates with f < 0
/// whose central-difference gradient norm (probe step probe_h) is <= gamma.
std::vector<Vec3> medial_axis_sample(const ScalarFieldHandle& field, int n_candidates,
                                     double gamma, uint64_t seed, double probe_h = 1e-2);

/// Max sampled difference quotient |f(a)-f(b)| / |a-b| over pairs in D,
/// including short-range and near-surface concentrated pairs.
double audit_lipschitz(const ScalarFieldHandle& field, int n_pairs, uint64_t seed);

struct UnderestimationAudit {
    std::vector<double> s_mesh; // exact mesh distance, winding-signed
    std::vector<double> f;      // field value
    double max_diff = 0.0;      // max of f - s_mesh
};

/// Samples n points uniformly in a ball of the given radius and compares
/// the field against the exact point-to-mesh distance of `mesh`.
UnderestimationAudit audit_underestimation(const ScalarFieldHandle& field,
                                           const TriangleSoup& mesh, int n_points, double radius,
                                           uint64_t seed);

void write_underestimation_csv(const std::string& path, const UnderestimationAudit& a);

} // namespace lndf
