#pragma once

#include <cstdint>
#include <vector>

#include "lndf/geometry.hpp"
#include "lndf/transform.hpp"

namespace lndf {

/// Closed-form signed (or unsigned) distance field with exact gradient.
/// Used as ground truth in tests, for supervised fitting, and in CSG demos.
/// 2D shapes ignore the z component.
struct AnalyticSdf {
    enum class Kind { Sphere, Box, Segment, Torus, Polyline };

    Kind kind = Kind::Sphere;
    int dim = 3;

    Vec3 center = Vec3::Zero();
    double radius = 1.0;            // sphere / segment inflation
    Vec3 half_extents = Vec3::Ones(); // box
    Vec3 seg_a = Vec3::Zero(), seg_b = Vec3::Zero();
    double torus_major = 0.5, torus_minor = 0.2; // tube around z axis
    std::vector<Vec3> polyline; // open chain, unsigned distance

    double value(const Vec3& x) const;
    /// Unit gradient away from the medial axis; an arbitrary unit
    /// subgradient on it (ties broken toward the first candidate).
    Vec3 gradient(const Vec3& x) const;
};

AnalyticSdf make_sphere(const Vec3& center, double radius, int dim = 3);
AnalyticSdf make_box(const Vec3& center, const Vec3& half_extents, int dim = 3);
AnalyticSdf make_segment(const Vec3& a, const Vec3& b, double radius = 0.0, int dim = 3);
AnalyticSdf make_torus(const Vec3& center, double major, double minor);
AnalyticSdf make_polyline(std::vector<Vec3> points, int dim = 2);

/// Parses "sphere:cx,cy,cz,r", "circle:cx,cy,r", "box:cx,cy,cz,hx,hy,hz",
/// "torus:cx,cy,cz,R,r", "segment:ax,ay,az,bx,by,bz[,r]".
AnalyticSdf parse_oracle_spec(const std::string& spec);

/// Uniform points in D = [-1,1]^n rejection-classified by the sign of the
/// exact SDF: n_per_class with s < 0 (label -1) and s > 0 (label +1), with
/// s_true attached when requested. Deterministic given seed.
/// exclude_shell > 0 additionally rejects samples with |s| <= that width,
/// where hinge constraints from both classes cannot hold at once.
LabeledDataset make_analytic_dataset(const AnalyticSdf& sdf, int n_per_class, uint64_t seed,
                                     bool with_s_true = true, double exclude_shell = 0.0);

} // namespace lndf
