#pragma once

#include <Eigen/Dense>

namespace lndf {

using Vec3 = Eigen::Vector3d;

/// Uniform scale + translation mapping raw coordinates into the normalized
/// frame. 2D data lives in the xy components with z = 0.
struct NormalizeTransform {
    Vec3 center = Vec3::Zero();
    double scale = 1.0;

    Vec3 apply(const Vec3& x) const { return (x - center) * scale; }
    Vec3 invert(const Vec3& p) const { return p / scale + center; }

    bool is_identity() const { return scale == 1.0 && center == Vec3::Zero(); }
};

} // namespace lndf
