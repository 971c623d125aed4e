#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lndf/transform.hpp"

namespace lndf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Raw triangle geometry; no manifoldness assumed, zero-area triangles
/// permitted (they contribute zero solid angle).
struct TriangleSoup {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
};

/// Points with optional unit normals and per-point area/length weights.
/// 2D data uses the xy components with z = 0.
struct OrientedPointCloud {
    int dim = 3;
    std::vector<Vec3> points;
    std::vector<Vec3> normals; // empty or one unit vector per point
    std::vector<double> areas; // empty until estimate_areas
};

using Geometry = std::variant<TriangleSoup, OrientedPointCloud>;

enum class GeometryFormat { Obj, Ply, Xyz };

GeometryFormat infer_format(const std::string& path);
/// OBJ -> TriangleSoup (v/f, polygons fan-triangulated); ASCII PLY with
/// x,y,z,nx,ny,nz -> OrientedPointCloud; XYZ rows with 2/3 floats (point)
/// or 4/6 floats (point + normal) -> OrientedPointCloud (2D or 3D by
/// column count). Parse errors carry the line number.
Geometry load_geometry(const std::string& path, GeometryFormat format);
Geometry load_geometry(const std::string& path);

void write_obj(const std::string& path, const TriangleSoup& soup);

int geometry_dim(const Geometry& g);

/// Scales and translates the geometry so its tight bounding box fits in
/// [-1/2, 1/2]^n centered at the origin (longest axis spans exactly 1).
/// Stale area weights are dropped.
NormalizeTransform normalize_geometry(Geometry& g);

struct WindingResult {
    double w = 0.0;
    bool near_surface = false; // query within 1e-12 of the geometry
};

/// Generalized winding number of a triangle soup via signed solid angles
/// (van Oosterom-Strackee). Exact integers +-1e-9 for watertight meshes.
WindingResult winding_triangles(const TriangleSoup& soup, const Vec3& x);

/// Dipole-sum winding for oriented point clouds; requires area weights.
WindingResult winding_points(const OrientedPointCloud& cloud, const Vec3& x);

/// Exact signed-angle winding of a closed 2D polygon.
WindingResult winding_polyline2d(const std::vector<Vec3>& loop, const Vec3& x);

/// k-NN disk area weights: a_i = pi r_k^2 / k in 3D, 2 r_k / k in 2D.
void estimate_areas(OrientedPointCloud& cloud, int k = 8);

double point_triangle_distance(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c);
double point_mesh_distance(const TriangleSoup& soup, const Vec3& x);

enum class FieldMode { Signed, Unsigned };

/// Training points in D = [-1,1]^n with labels in {-1,+1}; -1 marks inside
/// (signed mode) or on-surface (unsigned mode) samples. Signed datasets are
/// exactly label-balanced.
struct LabeledDataset {
    int dim = 3;
    FieldMode mode = FieldMode::Signed;
    MatrixXd points; // dim x N
    VectorXd labels;
    VectorXd s_true; // empty, or ground-truth distances for fitting

    Eigen::Index size() const { return labels.size(); }
    bool has_s_true() const { return s_true.size() == labels.size() && labels.size() > 0; }
};

/// Rejection-samples D until n_per_class points with w >= tau_in (inside,
/// label -1) and n_per_class with w <= tau_out (outside, +1) are collected.
/// Near-surface queries are discarded. Budget: 100 * n_per_class draws.
LabeledDataset build_signed_dataset(const Geometry& g, int n_per_class, double tau_in,
                                    double tau_out, uint64_t seed);

/// X_in on the geometry (area-weighted over triangles, or uniform with
/// replacement from cloud points), label -1; X_out uniform in D, label +1.
LabeledDataset build_unsigned_dataset(const Geometry& g, int n_per_class, uint64_t seed);

struct CorruptSpec {
    enum class Kind { Noise, Holes, Subsample } kind = Kind::Noise;
    double noise_sigma = 0.0;
    int hole_count = 0;
    int hole_k = 0; // neighbors removed together with each hole seed
    int subsample_m = 0;
};

OrientedPointCloud corrupt(const OrientedPointCloud& cloud, const CorruptSpec& spec,
                           uint64_t seed);

// dataset + transform files
void save_dataset_csv(const std::string& path, const LabeledDataset& ds);
LabeledDataset load_dataset_csv(const std::string& path);
void save_transform_json(const std::string& path, const NormalizeTransform& t, int dim);
std::pair<NormalizeTransform, int> load_transform_json(const std::string& path);

} // namespace lndf
