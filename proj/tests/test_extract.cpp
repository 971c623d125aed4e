#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "lndf/extract.hpp"
#include "lndf/oracles.hpp"
#include "support.hpp"

using namespace lndf;
using namespace lndf::testing;

namespace {

// V - E + F over unique undirected edges
int euler_characteristic(const TriangleSoup& mesh) {
    std::set<std::pair<int, int>> edges;
    for (const auto& t : mesh.triangles) {
        edges.insert(std::minmax(t[0], t[1]));
        edges.insert(std::minmax(t[1], t[2]));
        edges.insert(std::minmax(t[2], t[0]));
    }
    return static_cast<int>(mesh.vertices.size()) - static_cast<int>(edges.size()) +
           static_cast<int>(mesh.triangles.size());
}

bool watertight(const TriangleSoup& mesh) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : mesh.triangles) {
        count[std::minmax(t[0], t[1])]++;
        count[std::minmax(t[1], t[2])]++;
        count[std::minmax(t[2], t[0])]++;
    }
    for (const auto& [e, c] : count)
        if (c != 2) return false;
    return true;
}

double mesh_area(const TriangleSoup& mesh) {
    double a = 0.0;
    for (const auto& t : mesh.triangles)
        a += 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                       .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]])
                       .norm();
    return a;
}

double max_vertex_error(const TriangleSoup& mesh, const AnalyticSdf& oracle) {
    double worst = 0.0;
    for (const auto& v : mesh.vertices) worst = std::max(worst, std::abs(oracle.value(v)));
    return worst;
}

} // namespace

TEST_CASE("sample_grid: constant, linear exactness, sphere corners") {
    ScalarFieldHandle c;
    c.dim = 3;
    c.value = [](const Vec3&) { return 2.5; };
    GridField g = sample_grid(c, Vec3::Constant(-1), Vec3::Constant(1), {4, 4, 4});
    for (double v : g.values) CHECK(v == 2.5);

    ScalarFieldHandle lin;
    lin.dim = 3;
    lin.value = [](const Vec3& p) { return p.x(); };
    GridField gl = sample_grid(lin, Vec3::Constant(-1), Vec3::Constant(1), {5, 5, 5});
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        Vec3 p(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        CHECK(gl.interpolate(p) == doctest::Approx(p.x()).epsilon(1e-12));
    }

    ScalarFieldHandle sphere = make_field(make_sphere(Vec3::Zero(), 1.0));
    GridField gs = sample_grid(sphere, Vec3::Constant(-1), Vec3::Constant(1), {2, 2, 2});
    for (double v : gs.values) CHECK(v == doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-12));

    CHECK_THROWS_AS(sample_grid(c, Vec3::Constant(-1), Vec3::Constant(1), {1, 4, 4}),
                    std::invalid_argument);
}

TEST_CASE("marching_squares: circle radius 0.5 on a 256^2 grid") {
    AnalyticSdf circle = make_sphere(Vec3(0.01, -0.02, 0), 0.5, 2);
    ScalarFieldHandle f = make_field(circle);
    GridField g = sample_grid(f, Vec3(-1, -1, 0), Vec3(1, 1, 0), {256, 256, 1});
    auto lines = marching_squares(g, 0.0);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].closed);

    const double h = g.spacing.x();
    for (const auto& p : lines[0].points) CHECK(std::abs(circle.value(p)) < h);
    CHECK(polyline_length(lines[0]) == doctest::Approx(2.0 * M_PI * 0.5).epsilon(0.02));

    // every vertex sits on the interpolated iso level
    for (const auto& p : lines[0].points) CHECK(std::abs(g.interpolate(p)) < 1e-9);
}

TEST_CASE("marching_squares: empty output below the minimum; sign symmetry") {
    AnalyticSdf circle = make_sphere(Vec3::Zero(), 0.5, 2);
    ScalarFieldHandle f = make_field(circle);
    GridField g = sample_grid(f, Vec3(-1, -1, 0), Vec3(1, 1, 0), {64, 64, 1});
    CHECK(marching_squares(g, -1.0).empty()); // below min
    auto pos = marching_squares(g, 0.0);

    GridField neg = g;
    for (auto& v : neg.values) v = -v;
    auto flipped = marching_squares(neg, 0.0);
    std::set<std::pair<double, double>> va, vb;
    for (const auto& pl : pos)
        for (const auto& p : pl.points) va.insert({p.x(), p.y()});
    for (const auto& pl : flipped)
        for (const auto& p : pl.points) vb.insert({p.x(), p.y()});
    CHECK(va == vb); // identical vertex set, bitwise
}

TEST_CASE("marching_cubes: sphere fidelity, orientation, watertightness") {
    AnalyticSdf sphere = make_sphere(Vec3(0.013, 0.021, -0.017), 0.5);
    ScalarFieldHandle f = make_field(sphere);
    GridField g = sample_grid(f, Vec3::Constant(-1), Vec3::Constant(1), {64, 64, 64});
    TriangleSoup mesh = marching_cubes(g, 0.0);
    REQUIRE(!mesh.triangles.empty());

    CHECK(watertight(mesh));
    CHECK(euler_characteristic(mesh) == 2);
    const double h = g.spacing.x();
    CHECK(max_vertex_error(mesh, sphere) <= h);
    CHECK(mesh_area(mesh) == doctest::Approx(4.0 * M_PI * 0.25).epsilon(0.03));

    // orientation: face normals align with the field gradient
    int aligned = 0;
    for (const auto& t : mesh.triangles) {
        Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                     .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
        Vec3 centroid = (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
        if (n.dot(sphere.gradient(centroid)) > 0.0) ++aligned;
    }
    CHECK(aligned >= static_cast<int>(0.99 * mesh.triangles.size()));

    // iso above the global max -> empty
    CHECK(marching_cubes(g, 10.0).triangles.empty());
}

TEST_CASE("marching_cubes: torus has Euler characteristic 0") {
    AnalyticSdf torus = make_torus(Vec3(0.01, -0.015, 0.02), 0.5, 0.2);
    ScalarFieldHandle f = make_field(torus);
    GridField g = sample_grid(f, Vec3::Constant(-1), Vec3::Constant(1), {96, 96, 96});
    TriangleSoup mesh = marching_cubes(g, 0.0);
    CHECK(watertight(mesh));
    CHECK(euler_characteristic(mesh) == 0);
}

TEST_CASE("marching_cubes: doubling the resolution at least halves the max error") {
    AnalyticSdf sphere = make_sphere(Vec3(0.013, 0.021, -0.017), 0.5);
    ScalarFieldHandle f = make_field(sphere);
    GridField g1 = sample_grid(f, Vec3::Constant(-1), Vec3::Constant(1), {32, 32, 32});
    GridField g2 = sample_grid(f, Vec3::Constant(-1), Vec3::Constant(1), {64, 64, 64});
    double e1 = max_vertex_error(marching_cubes(g1, 0.0), sphere);
    double e2 = max_vertex_error(marching_cubes(g2, 0.0), sphere);
    CHECK(e2 <= 0.5 * e1);
}

TEST_CASE("marching_cubes: non-zero iso levels extract offset surfaces") {
    AnalyticSdf sphere = make_sphere(Vec3::Zero(), 0.3);
    ScalarFieldHandle f = make_field(sphere);
    GridField g = sample_grid(f, Vec3::Constant(-1), Vec3::Constant(1), {64, 64, 64});
    for (double iso : {-0.1, 0.1, 0.25}) {
        TriangleSoup mesh = marching_cubes(g, iso);
        REQUIRE(!mesh.vertices.empty());
        for (const auto& v : mesh.vertices)
            CHECK(std::abs(v.norm() - (0.3 + iso)) < g.spacing.x());
    }
}

TEST_CASE("emit_heatmap: constant grid gives a uniform image, CSV round-trips") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "lndf_test_extract";
    fs::create_directories(dir);

    GridField g;
    g.dim = 2;
    g.origin = Vec3(-1, -1, 0);
    g.spacing = Vec3(0.1, 0.1, 0);
    g.dims = {8, 8, 1};
    g.values.assign(64, 0.75);
    auto ppm = (dir / "h.ppm").string(), csv = (dir / "h.csv").string();
    emit_heatmap(g, ppm, csv);

    std::ifstream img(ppm, std::ios::binary);
    std::string magic;
    img >> magic;
    CHECK(magic == "P6");
    int w, hgt, maxv;
    img >> w >> hgt >> maxv;
    CHECK(w == 8);
    CHECK(hgt == 8);
    img.get();
    std::vector<unsigned char> px(64 * 3);
    img.read(reinterpret_cast<char*>(px.data()), 192);
    for (int i = 3; i < 192; ++i) CHECK(px[i] == px[i % 3]);

    std::ifstream c(csv);
    std::string line;
    int rows = 0;
    while (std::getline(c, line)) {
        ++rows;
        CHECK(line.rfind("0.75", 0) == 0);
    }
    CHECK(rows == 8);
}

TEST_CASE("polyline writers emit every vertex") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "lndf_test_extract";
    fs::create_directories(dir);
    std::vector<Polyline> lines(1);
    lines[0].closed = true;
    lines[0].points = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0)};
    auto obj = (dir / "pl.obj").string(), csv = (dir / "pl.csv").string();
    write_polylines_obj(obj, lines);
    write_polylines_csv(csv, lines);
    std::ifstream o(obj);
    std::string line;
    int v = 0, l = 0;
    while (std::getline(o, line)) {
        if (line.rfind("v ", 0) == 0) ++v;
        if (line.rfind("l ", 0) == 0) ++l;
    }
    CHECK(v == 3);
    CHECK(l == 1);
    std::ifstream c(csv);
    int rows = 0;
    while (std::getline(c, line)) ++rows;
    CHECK(rows == 4); // header + 3 points
}

TEST_CASE("3D slice at z=0 of the sphere field equals the 2D circle field") {
    ScalarFieldHandle s3 = make_field(make_sphere(Vec3::Zero(), 0.5, 3));
    ScalarFieldHandle s2 = make_field(make_sphere(Vec3::Zero(), 0.5, 2));
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
        Vec3 p(rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0);
        CHECK(s3.value(p) == s2.value(p));
    }
}
