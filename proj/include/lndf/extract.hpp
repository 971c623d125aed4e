#pragma once

#include <array>
#include <string>
#include <vector>

#include "lndf/fieldops.hpp"
#include "lndf/geometry.hpp"

namespace lndf {

/// Regular lattice of field samples; x varies fastest, then y, then z.
/// 2D grids use dims[2] = 1 and z = 0.
struct GridField {
    int dim = 3;
    Vec3 origin = Vec3::Zero();
    Vec3 spacing = Vec3::Zero();
    std::array<int, 3> dims = {1, 1, 1};
    std::vector<double> values;

    size_t index(int i, int j, int k) const {
        return (static_cast<size_t>(k) * dims[1] + j) * dims[0] + i;
    }
    double at(int i, int j, int k) const { return values[index(i, j, k)]; }
    Vec3 pos(int i, int j, int k) const {
        return origin + Vec3(i * spacing.x(), j * spacing.y(), k * spacing.z());
    }
    /// Bi/tri-linear interpolation at a point inside the grid bounds.
    double interpolate(const Vec3& p) const;
};

/// Evaluates the field on a lattice over [lo, hi]; resolution >= 2 per axis.
GridField sample_grid(const ScalarFieldHandle& field, const Vec3& lo, const Vec3& hi,
                      const std::array<int, 3>& resolution);

struct Polyline {
    std::vector<Vec3> points;
    bool closed = false;
};

/// Marching squares with linear edge interpolation; saddle cells resolved
/// by the cell-center average; chained into polylines. Grid values exactly
/// equal to iso are perturbed by +1e-12.
std::vector<Polyline> marching_squares(const GridField& grid, double iso);

/// Classic 256-case marching cubes with shared, deduplicated edge vertices
/// (watertight when no grid value ties iso after perturbation). Triangles
/// are wound so normals point toward increasing field values.
TriangleSoup marching_cubes(const GridField& grid, double iso);

double polyline_length(const Polyline& p);

void write_polylines_obj(const std::string& path, const std::vector<Polyline>& lines);
void write_polylines_csv(const std::string& path, const std::vector<Polyline>& lines);

/// PPM heatmap (viridis) of a 2D grid plus a CSV of the raw values
/// (one row per y index, ascending; columns x ascending).
void emit_heatmap(const GridField& grid, const std::string& ppm_path,
                  const std::string& csv_path);

} // namespace lndf
