#pragma once

// Shared test fixtures: independent reference implementations used as
// oracles, mesh generators, and finite-difference helpers. Everything here
// is deliberately written scalar-by-scalar, independent of the library's
// Eigen-based evaluation paths.

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "lndf/geometry.hpp"
#include "lndf/lipnet.hpp"
#include "lndf/rng.hpp"

namespace lndf::testing {

// Plain-loop evaluation of x - 2 W T^-1 sigma(W^T x + b).
inline std::vector<double> sll_forward_reference(const SllLayer& layer,
                                                 const std::vector<double>& x) {
    const int k = static_cast<int>(layer.W.rows());
    std::vector<double> t(k, 0.0);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            double gij = 0.0;
            for (int l = 0; l < k; ++l) gij += layer.W(l, i) * layer.W(l, j);
            t[i] += std::abs(gij * std::exp(layer.q(j) - layer.q(i)));
        }
    }
    std::vector<double> z(k, 0.0);
    for (int j = 0; j < k; ++j) {
        double acc = layer.b(j);
        for (int i = 0; i < k; ++i) acc += layer.W(i, j) * x[i];
        z[j] = std::max(acc, 0.0);
    }
    std::vector<double> y(x);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (t[j] > 0.0) y[i] -= 2.0 * layer.W(i, j) * z[j] / t[j];
    return y;
}

inline SllLayer random_layer(int k, uint64_t seed, double scale = 0.5) {
    Rng rng(seed);
    SllLayer l;
    l.W.resize(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) l.W(i, j) = rng.uniform(-scale, scale);
    l.b.resize(k);
    l.q.resize(k);
    for (int i = 0; i < k; ++i) l.b(i) = rng.uniform(-scale, scale);
    for (int i = 0; i < k; ++i) l.q(i) = rng.uniform(-scale, scale);
    return l;
}

// Icosphere: subdivided icosahedron projected onto the unit sphere.
// 20 * 4^subdiv faces (subdiv 3 -> 1280).
inline TriangleSoup make_icosphere(int subdiv, double radius = 1.0,
                                   const Vec3& center = Vec3::Zero()) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& p : v) p.normalize();
    std::vector<std::array<int, 3>> f = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };
    for (int s = 0; s < subdiv; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 m = (v[a] + v[b]).normalized();
            v.push_back(m);
            int idx = static_cast<int>(v.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> nf;
        nf.reserve(f.size() * 4);
        for (const auto& t : f) {
            int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            nf.push_back({t[0], ab, ca});
            nf.push_back({t[1], bc, ab});
            nf.push_back({t[2], ca, bc});
            nf.push_back({ab, bc, ca});
        }
        f = std::move(nf);
    }
    TriangleSoup soup;
    soup.vertices.reserve(v.size());
    for (const auto& p : v) soup.vertices.push_back(center + radius * p);
    soup.triangles = std::move(f);
    return soup;
}

// Deterministic quadrature of the solid angle subtended by one triangle:
// Omega = integral over the triangle of (r_hat . n_hat) / r^2 dA, midpoint
// rule on an m^2 subdivision.
inline double solid_angle_quadrature(const Vec3& v0, const Vec3& v1, const Vec3& v2,
                                     const Vec3& x, int m = 400) {
    Vec3 e1 = v1 - v0, e2 = v2 - v0;
    Vec3 n = e1.cross(e2); // |n| = 2 * area, direction = orientation
    double omega = 0.0;
    const double patch_w = 1.0 / (m * m); // fraction of total area per patch
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m - i; ++j) {
            // lower and (optionally) upper sub-triangle centroids
            for (int up = 0; up < (j < m - i - 1 ? 2 : 1); ++up) {
                double u = (i + (up ? 2.0 : 1.0) / 3.0) / m;
                double w = (j + (up ? 2.0 : 1.0) / 3.0) / m;
                Vec3 p = v0 + u * e1 + w * e2;
                Vec3 r = p - x;
                double rn = r.norm();
                omega += patch_w * 0.5 * n.dot(r) / (rn * rn * rn);
            }
        }
    }
    return omega;
}

// Central finite difference of a scalar functional w.r.t. one coordinate.
template <typename F>
double central_diff(F&& f, double& slot, double h = 1e-6) {
    const double keep = slot;
    slot = keep + h;
    double up = f();
    slot = keep - h;
    double dn = f();
    slot = keep;
    return (up - dn) / (2.0 * h);
}

inline double rel_err(double got, double want) {
    double denom = std::max({std::abs(got), std::abs(want), 1e-8});
    return std::abs(got - want) / denom;
}

template <typename A, typename B>
bool bits_equal(const A& a, const B& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

} // namespace lndf::testing
