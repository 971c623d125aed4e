#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lndf/geometry.hpp"
#include "lndf/oracles.hpp"
#include "lndf/rng.hpp"
#include "support.hpp"

using namespace lndf;
using namespace lndf::testing;
namespace fs = std::filesystem;

namespace {

fs::path tmpdir() {
    auto d = fs::temp_directory_path() / "lndf_test_geom";
    fs::create_directories(d);
    return d;
}

std::string write_file(const std::string& name, const std::string& content) {
    auto p = (tmpdir() / name).string();
    std::ofstream(p) << content;
    return p;
}

} // namespace

TEST_CASE("OBJ loader: single triangle, fan triangulation, index forms") {
    auto p = write_file("tri.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    auto g = load_geometry(p);
    auto& soup = std::get<TriangleSoup>(g);
    CHECK(soup.vertices.size() == 3);
    CHECK(soup.triangles.size() == 1);

    auto q = write_file("quad.obj",
                        "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1 2/2 3//1 4/4/1\n");
    auto gq = load_geometry(q);
    CHECK(std::get<TriangleSoup>(gq).triangles.size() == 2); // fan

    auto neg = write_file("neg.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n");
    CHECK(std::get<TriangleSoup>(load_geometry(neg)).triangles[0] ==
          std::array<int, 3>{0, 1, 2});

    auto bad = write_file("bad.obj", "v 0 0 0\nf 1 2 3\n");
    CHECK_THROWS_WITH_AS(load_geometry(bad), doctest::Contains(":2:"), std::runtime_error);
}

TEST_CASE("XYZ loader: 6-column rows give a 3D cloud with normals") {
    auto p = write_file("two.xyz", "0 0 0 0 0 1\n1 1 1 1 0 0\n");
    auto g = load_geometry(p);
    auto& cloud = std::get<OrientedPointCloud>(g);
    CHECK(cloud.dim == 3);
    CHECK(cloud.points.size() == 2);
    CHECK(cloud.normals.size() == 2);
    CHECK(cloud.normals[0].z() == 1.0);

    auto p2 = write_file("two2d.xyz", "0 0 1 0\n1 0 0 1\n");
    auto g2 = load_geometry(p2);
    auto& c2 = std::get<OrientedPointCloud>(g2);
    CHECK(c2.dim == 2);
    CHECK(c2.normals.size() == 2);
}

TEST_CASE("PLY loader requires the normal properties by name") {
    auto ok = write_file("ok.ply",
                         "ply\nformat ascii 1.0\nelement vertex 2\n"
                         "property float x\nproperty float y\nproperty float z\n"
                         "property float nx\nproperty float ny\nproperty float nz\n"
                         "end_header\n0 0 0 0 0 1\n1 0 0 1 0 0\n");
    auto gok = load_geometry(ok);
    auto& cloud = std::get<OrientedPointCloud>(gok);
    CHECK(cloud.points.size() == 2);

    auto missing = write_file("missing.ply",
                              "ply\nformat ascii 1.0\nelement vertex 1\n"
                              "property float x\nproperty float y\nproperty float z\n"
                              "property float nx\nproperty float ny\n"
                              "end_header\n0 0 0 0 0\n");
    CHECK_THROWS_WITH_AS(load_geometry(missing), doctest::Contains("nz"), std::runtime_error);
}

TEST_CASE("normalize: unit cube and 2D example from first principles") {
    TriangleSoup cube;
    for (int i = 0; i < 8; ++i)
        cube.vertices.emplace_back(i & 1 ? 1.0 : 0.0, i & 2 ? 1.0 : 0.0, i & 4 ? 1.0 : 0.0);
    Geometry g = cube;
    NormalizeTransform t = normalize_geometry(g);
    CHECK(t.scale == doctest::Approx(1.0));
    Vec3 lo(1e9, 1e9, 1e9), hi = -lo;
    for (auto& v : std::get<TriangleSoup>(g).vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    CHECK(lo.x() == doctest::Approx(-0.5));
    CHECK(hi.z() == doctest::Approx(0.5));

    OrientedPointCloud pts;
    pts.dim = 2;
    pts.points = {Vec3(0, 0, 0), Vec3(4, 2, 0)};
    Geometry g2 = pts;
    NormalizeTransform t2 = normalize_geometry(g2);
    CHECK(t2.scale == doctest::Approx(0.25));
    CHECK(t2.center.x() == doctest::Approx(2.0));
    CHECK(t2.center.y() == doctest::Approx(1.0));

    // transform round trip
    Vec3 x(0.3, -1.7, 0.0);
    CHECK((t2.invert(t2.apply(x)) - x).norm() < 1e-12);

    OrientedPointCloud degenerate;
    degenerate.points = {Vec3(1, 1, 1), Vec3(1, 1, 1)};
    Geometry g3 = degenerate;
    CHECK_THROWS_AS(normalize_geometry(g3), std::invalid_argument);
}

TEST_CASE("winding_triangles: watertight icosphere gives exact 0/1") {
    TriangleSoup ico = make_icosphere(2); // 320 faces, radius 1
    CHECK(ico.triangles.size() == 320);

    auto c = winding_triangles(ico, Vec3::Zero());
    CHECK(c.w == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(!c.near_surface);

    auto o = winding_triangles(ico, Vec3(2.5, 0.1, -0.3));
    CHECK(o.w == doctest::Approx(0.0).scale(1).epsilon(1e-9));

    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        Vec3 p(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
        if (std::abs(p.norm() - 1.0) < 0.02) continue; // skip the chordal band
        double w = winding_triangles(ico, p).w;
        double expect = p.norm() < 1.0 ? 1.0 : 0.0;
        CHECK(std::abs(w - expect) < 1e-9);
    }
}

TEST_CASE("winding_triangles: single triangle matches solid-angle quadrature") {
    TriangleSoup one;
    one.vertices = {Vec3(0.4, -0.3, 1.0), Vec3(1.1, 0.2, 1.1), Vec3(0.5, 0.8, 0.9)};
    one.triangles = {{0, 1, 2}};
    for (const Vec3& x : {Vec3(0, 0, 0), Vec3(0.5, 0.2, -1.0), Vec3(2, 2, 2)}) {
        double quad = solid_angle_quadrature(one.vertices[0], one.vertices[1], one.vertices[2], x,
                                             600);
        double vos = winding_triangles(one, x).w * 4.0 * M_PI;
        CHECK(std::abs(vos - quad) < 1e-6);
    }
    // x below the plane (negative-normal side) sees a positive angle
    Vec3 below(0.6, 0.2, 0.0);
    Vec3 n = (one.vertices[1] - one.vertices[0]).cross(one.vertices[2] - one.vertices[0]);
    REQUIRE(n.dot(below - one.vertices[0]) < 0.0);
    CHECK(winding_triangles(one, below).w > 0.0);
}

TEST_CASE("winding_triangles: on-surface flag and degenerate triangles") {
    TriangleSoup one;
    one.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    one.triangles = {{0, 1, 2}};
    CHECK(winding_triangles(one, Vec3(0.25, 0.25, 0.0)).near_surface);
    CHECK(winding_triangles(one, Vec3(0.25, 0.25, 0.5)).near_surface == false);
    CHECK(!winding_triangles(one, Vec3(2.0, 2.0, 0.0)).near_surface); // in-plane, outside

    TriangleSoup degen;
    degen.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
    degen.triangles = {{0, 1, 2}};
    CHECK(winding_triangles(degen, Vec3(0.3, 0.7, 0.2)).w == 0.0);
}

TEST_CASE("winding additivity over triangle partitions") {
    TriangleSoup ico = make_icosphere(1);
    Vec3 x(0.2, -0.1, 0.4);
    double whole = winding_triangles(ico, x).w;
    TriangleSoup a = ico, b = ico;
    a.triangles.assign(ico.triangles.begin(), ico.triangles.begin() + 37);
    b.triangles.assign(ico.triangles.begin() + 37, ico.triangles.end());
    CHECK(winding_triangles(a, x).w + winding_triangles(b, x).w ==
          doctest::Approx(whole).epsilon(1e-12));
}

TEST_CASE("winding_points: dense circle cloud reproduces 2D winding") {
    const int n = 10000;
    OrientedPointCloud cloud;
    cloud.dim = 2;
    for (int i = 0; i < n; ++i) {
        double a = 2.0 * M_PI * i / n;
        cloud.points.emplace_back(std::cos(a), std::sin(a), 0.0);
        cloud.normals.emplace_back(std::cos(a), std::sin(a), 0.0);
        cloud.areas.push_back(2.0 * M_PI / n); // exact arc length
    }
    CHECK(std::abs(winding_points(cloud, Vec3::Zero()).w - 1.0) < 1e-2);
    CHECK(std::abs(winding_points(cloud, Vec3(2, 0, 0)).w) < 1e-2);

    // whole-cloud normal flip negates the winding
    OrientedPointCloud flipped = cloud;
    for (auto& nrm : flipped.normals) nrm = -nrm;
    Vec3 probe(0.3, -0.2, 0.0);
    CHECK(winding_points(flipped, probe).w ==
          doctest::Approx(-winding_points(cloud, probe).w).epsilon(1e-12));
}

TEST_CASE("winding_polyline2d: closed square") {
    std::vector<Vec3> sq = {Vec3(-1, -1, 0), Vec3(1, -1, 0), Vec3(1, 1, 0), Vec3(-1, 1, 0)};
    CHECK(winding_polyline2d(sq, Vec3(0, 0, 0)).w == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(winding_polyline2d(sq, Vec3(3, 0, 0)).w == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(winding_polyline2d(sq, Vec3(1, 0, 0)).near_surface);
}

TEST_CASE("estimate_areas: plane grid within 30%, circle total within 20%") {
    OrientedPointCloud grid;
    grid.dim = 3;
    const int m = 20;
    const double s = 0.05;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) grid.points.emplace_back(i * s, j * s, 0.0);
    estimate_areas(grid);
    for (int i = 5; i < 15; ++i)
        for (int j = 5; j < 15; ++j) {
            double a = grid.areas[i * m + j];
            CHECK(a > 0.7 * s * s);
            CHECK(a < 1.3 * s * s);
        }

    OrientedPointCloud circle;
    circle.dim = 2;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        double a = 2.0 * M_PI * i / n;
        circle.points.emplace_back(std::cos(a), std::sin(a), 0.0);
    }
    estimate_areas(circle);
    double total = 0.0;
    for (double a : circle.areas) total += a;
    CHECK(std::abs(total - 2.0 * M_PI) / (2.0 * M_PI) < 0.2);

    OrientedPointCloud small;
    small.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    CHECK_THROWS_AS(estimate_areas(small, 8), std::invalid_argument);
}

TEST_CASE("build_signed_dataset: icosphere labels agree with the analytic sphere") {
    TriangleSoup ico = make_icosphere(2);
    Geometry g = ico;
    normalize_geometry(g); // radius becomes 0.5
    LabeledDataset ds = build_signed_dataset(g, 1000, 0.6, 0.4, 7);
    REQUIRE(ds.size() == 2000);
    int neg = 0;
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        double r = ds.points.col(i).norm();
        if (ds.labels(i) == -1.0) {
            ++neg;
            CHECK(r < 0.5 + 1e-6);
        } else {
            CHECK(r > 0.5 - 0.01); // chordal band
        }
        CHECK(ds.points.col(i).cwiseAbs().maxCoeff() <= 1.0);
    }
    CHECK(neg == 1000);

    // determinism
    LabeledDataset ds2 = build_signed_dataset(g, 1000, 0.6, 0.4, 7);
    CHECK(bits_equal(ds.points, ds2.points));

    CHECK_THROWS_AS(build_signed_dataset(g, 10, 0.4, 0.6, 1), std::invalid_argument);
}

TEST_CASE("build_unsigned_dataset: on-surface samples and area weighting") {
    TriangleSoup one;
    one.vertices = {Vec3(-0.5, -0.5, 0), Vec3(0.5, -0.5, 0), Vec3(0, 0.5, 0)};
    one.triangles = {{0, 1, 2}};
    Geometry g = one;
    LabeledDataset ds = build_unsigned_dataset(g, 500, 3);
    for (int i = 0; i < 500; ++i) {
        CHECK(ds.labels(i) == -1.0);
        CHECK(std::abs(ds.points(2, i)) < 1e-12); // on the triangle plane
    }
    for (int i = 500; i < 1000; ++i) CHECK(ds.labels(i) == 1.0);

    // two triangles with area 1 : 3 -> 25/75 split (binomial, n = 10^4)
    TriangleSoup two;
    two.vertices = {Vec3(-0.5, -0.5, 0), Vec3(-0.1, -0.5, 0), Vec3(-0.5, -0.4, 0),
                    Vec3(0.5, 0.5, 0),  Vec3(0.1, 0.5, 0),   Vec3(0.5, 0.2, 0)};
    double a0 = 0.5 * (two.vertices[1] - two.vertices[0])
                          .cross(two.vertices[2] - two.vertices[0])
                          .norm();
    double a1 = 0.5 * (two.vertices[4] - two.vertices[3])
                          .cross(two.vertices[5] - two.vertices[3])
                          .norm();
    REQUIRE(a1 / a0 == doctest::Approx(3.0).epsilon(0.05));
    two.triangles = {{0, 1, 2}, {3, 4, 5}};
    Geometry g2 = two;
    LabeledDataset ds2 = build_unsigned_dataset(g2, 10000, 5);
    int on_small = 0;
    for (int i = 0; i < 10000; ++i)
        if (ds2.points(1, i) < -0.3) ++on_small;
    // expected 2500, sigma ~ 43; 5 sigma band
    CHECK(on_small > 2500 - 220);
    CHECK(on_small < 2500 + 220);

    LabeledDataset ds3 = build_unsigned_dataset(g2, 10000, 5);
    CHECK(bits_equal(ds2.points, ds3.points));
}

TEST_CASE("corrupt: holes bounds, zero noise identity, subsample count") {
    Rng rng(9);
    OrientedPointCloud cloud;
    cloud.dim = 3;
    for (int i = 0; i < 5000; ++i)
        cloud.points.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));

    auto holes = corrupt(cloud, {CorruptSpec::Kind::Holes, 0, 50, 40, 0}, 1);
    CHECK(holes.points.size() <= 5000 - 50);
    CHECK(holes.points.size() >= 5000 - 50 * 41);

    auto same = corrupt(cloud, {CorruptSpec::Kind::Noise, 0.0, 0, 0, 0}, 2);
    REQUIRE(same.points.size() == cloud.points.size());
    for (size_t i = 0; i < cloud.points.size(); ++i)
        CHECK((same.points[i] - cloud.points[i]).norm() == 0.0);

    auto sub = corrupt(cloud, {CorruptSpec::Kind::Subsample, 0, 0, 0, 500}, 3);
    CHECK(sub.points.size() == 500);
    CHECK_THROWS_AS(corrupt(cloud, {CorruptSpec::Kind::Subsample, 0, 0, 0, 6000}, 3),
                    std::invalid_argument);
}

TEST_CASE("dataset CSV round trip") {
    AnalyticSdf circle = make_sphere(Vec3::Zero(), 0.25, 2);
    LabeledDataset ds = make_analytic_dataset(circle, 50, 11, true);
    auto p = (tmpdir() / "ds.csv").string();
    save_dataset_csv(p, ds);
    LabeledDataset back = load_dataset_csv(p);
    CHECK(back.dim == 2);
    CHECK(back.mode == FieldMode::Signed);
    CHECK(bits_equal(back.points, ds.points));
    CHECK(bits_equal(back.labels, ds.labels));
    CHECK(bits_equal(back.s_true, ds.s_true));
}

TEST_CASE("point_triangle_distance: face, edge, vertex regions") {
    Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
    CHECK(point_triangle_distance(Vec3(0.2, 0.2, 0.5), a, b, c) == doctest::Approx(0.5));
    CHECK(point_triangle_distance(Vec3(-1, -1, 0), a, b, c) == doctest::Approx(std::sqrt(2.0)));
    CHECK(point_triangle_distance(Vec3(0.5, -2, 0), a, b, c) == doctest::Approx(2.0));
    CHECK(point_triangle_distance(Vec3(1, 1, 0), a, b, c) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}
