#include "lndf/extract.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "lndf/image.hpp"
#include "lndf/mc_tables.hpp"
#include "lndf/parallel.hpp"

namespace lndf {

namespace {

constexpr double kTieNudge = 1e-12;

// Reads a grid value with the iso-tie perturbation applied.
inline double tval(const GridField& g, size_t idx, double iso) {
    double v = g.values[idx];
    return v == iso ? iso + kTieNudge : v;
}

} // namespace

double GridField::interpolate(const Vec3& p) const {
    auto locate = [&](int axis) {
        if (dims[axis] == 1) return std::pair<int, double>{0, 0.0};
        double u = (p[axis] - origin[axis]) / spacing[axis];
        int i = std::clamp(static_cast<int>(std::floor(u)), 0, dims[axis] - 2);
        return std::pair<int, double>{i, u - i};
    };
    auto [i, fx] = locate(0);
    auto [j, fy] = locate(1);
    auto [k, fz] = locate(2);
    double acc = 0.0;
    for (int dz = 0; dz < (dims[2] > 1 ? 2 : 1); ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) *
                           (dims[2] > 1 ? (dz ? fz : 1.0 - fz) : 1.0);
                acc += w * at(i + dx, j + dy, k + dz);
            }
    return acc;
}

GridField sample_grid(const ScalarFieldHandle& field, const Vec3& lo, const Vec3& hi,
                      const std::array<int, 3>& resolution) {
    GridField g;
    g.dim = field.dim;
    g.dims = resolution;
    if (g.dim == 2) g.dims[2] = 1;
    for (int a = 0; a < g.dim; ++a) {
        if (g.dims[a] < 2) throw std::invalid_argument("sample_grid: resolution must be >= 2");
        if (!(hi[a] > lo[a])) throw std::invalid_argument("sample_grid: empty bounds");
    }
    g.origin = lo;
    if (g.dim == 2) g.origin.z() = 0.0;
    g.spacing = Vec3::Zero();
    for (int a = 0; a < g.dim; ++a) g.spacing[a] = (hi[a] - lo[a]) / (g.dims[a] - 1);
    g.values.resize(static_cast<size_t>(g.dims[0]) * g.dims[1] * g.dims[2]);
    const size_t nx = g.dims[0], nxy = nx * g.dims[1];
    parallel_for(g.values.size(), [&](size_t idx) {
        int k = static_cast<int>(idx / nxy);
        int j = static_cast<int>((idx % nxy) / nx);
        int i = static_cast<int>(idx % nx);
        g.values[idx] = field.value(g.pos(i, j, k));
    });
    return g;
}

// ---------------------------------------------------------------------------
// marching squares

std::vector<Polyline> marching_squares(const GridField& grid, double iso) {
    if (grid.dim != 2 || grid.dims[2] != 1)
        throw std::invalid_argument("marching_squares: 2D grid required");
    const int nx = grid.dims[0], ny = grid.dims[1];

    // global edge ids: horizontal edge h(i,j) from (i,j) to (i+1,j);
    // vertical edge v(i,j) from (i,j) to (i,j+1)
    auto h_id = [&](int i, int j) { return static_cast<int64_t>(j) * nx + i; };
    auto v_id = [&](int i, int j) {
        return static_cast<int64_t>(nx) * ny + static_cast<int64_t>(j) * nx + i;
    };

    std::unordered_map<int64_t, int> vert_of_edge;
    std::vector<Vec3> verts;
    std::vector<std::pair<int, int>> segs;

    auto vertex_on = [&](int64_t id, int i0, int j0, int i1, int j1) {
        auto it = vert_of_edge.find(id);
        if (it != vert_of_edge.end()) return it->second;
        double va = tval(grid, grid.index(i0, j0, 0), iso);
        double vb = tval(grid, grid.index(i1, j1, 0), iso);
        double t = (iso - va) / (vb - va);
        Vec3 p = grid.pos(i0, j0, 0) + t * (grid.pos(i1, j1, 0) - grid.pos(i0, j0, 0));
        int idx = static_cast<int>(verts.size());
        verts.push_back(p);
        vert_of_edge.emplace(id, idx);
        return idx;
    };

    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            // corners counterclockwise from lower-left
            double c0 = tval(grid, grid.index(i, j, 0), iso);
            double c1 = tval(grid, grid.index(i + 1, j, 0), iso);
            double c2 = tval(grid, grid.index(i + 1, j + 1, 0), iso);
            double c3 = tval(grid, grid.index(i, j + 1, 0), iso);
            int mask = (c0 < iso ? 1 : 0) | (c1 < iso ? 2 : 0) | (c2 < iso ? 4 : 0) |
                       (c3 < iso ? 8 : 0);
            if (mask == 0 || mask == 15) continue;

            // edge vertices: bottom, right, top, left
            auto eb = [&] { return vertex_on(h_id(i, j), i, j, i + 1, j); };
            auto er = [&] { return vertex_on(v_id(i + 1, j), i + 1, j, i + 1, j + 1); };
            auto et = [&] { return vertex_on(h_id(i, j + 1), i, j + 1, i + 1, j + 1); };
            auto el = [&] { return vertex_on(v_id(i, j), i, j, i, j + 1); };

            switch (mask) {
            case 1: case 14: segs.emplace_back(el(), eb()); break;
            case 2: case 13: segs.emplace_back(eb(), er()); break;
            case 3: case 12: segs.emplace_back(el(), er()); break;
            case 4: case 11: segs.emplace_back(er(), et()); break;
            case 6: case 9:  segs.emplace_back(eb(), et()); break;
            case 7: case 8:  segs.emplace_back(et(), el()); break;
            case 5: case 10: {
                // saddle: resolve by the cell-center average
                bool center_inside = 0.25 * (c0 + c1 + c2 + c3) < iso;
                bool join_03 = (mask == 5) == center_inside;
                if (join_03) {
                    segs.emplace_back(el(), et());
                    segs.emplace_back(eb(), er());
                } else {
                    segs.emplace_back(el(), eb());
                    segs.emplace_back(er(), et());
                }
                break;
            }
            default: break;
            }
        }
    }

    // chain segments into polylines
    std::vector<std::vector<int>> adj(verts.size());
    for (auto& [a, b] : segs) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<char> used(verts.size(), 0);
    std::vector<Polyline> out;

    auto walk = [&](int start) {
        std::vector<int> chain{start};
        used[start] = 1;
        int cur = start, prev = -1;
        while (true) {
            int next = -1;
            for (int nb : adj[cur])
                if (nb != prev && !used[nb]) {
                    next = nb;
                    break;
                }
            if (next < 0) {
                // may close a loop back to start
                for (int nb : adj[cur])
                    if (nb == start && chain.size() > 2) {
                        Polyline p;
                        p.closed = true;
                        for (int v : chain) p.points.push_back(verts[v]);
                        out.push_back(std::move(p));
                        return;
                    }
                Polyline p;
                p.closed = false;
                for (int v : chain) p.points.push_back(verts[v]);
                out.push_back(std::move(p));
                return;
            }
            used[next] = 1;
            chain.push_back(next);
            prev = cur;
            cur = next;
        }
    };

    // open chains first so their endpoints seed the walk
    for (size_t v = 0; v < verts.size(); ++v)
        if (!used[v] && adj[v].size() == 1) walk(static_cast<int>(v));
    for (size_t v = 0; v < verts.size(); ++v)
        if (!used[v] && !adj[v].empty()) walk(static_cast<int>(v));
    return out;
}

// ---------------------------------------------------------------------------
// marching cubes

namespace {

// local corner offsets in the Bourke numbering
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
// local edge -> corner pair
constexpr int kEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                              {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

} // namespace

TriangleSoup marching_cubes(const GridField& grid, double iso) {
    if (grid.dim != 3 || grid.dims[2] < 2)
        throw std::invalid_argument("marching_cubes: 3D grid required");
    const int nx = grid.dims[0], ny = grid.dims[1], nz = grid.dims[2];

    // global edge key: axis (0=x,1=y,2=z) + base lattice point
    auto edge_key = [&](int axis, int i, int j, int k) {
        return ((static_cast<uint64_t>(axis) * nz + k) * ny + j) * nx + i;
    };

    TriangleSoup mesh;
    std::unordered_map<uint64_t, int> vert_of_edge;

    auto vertex_on = [&](int axis, int i, int j, int k) {
        uint64_t key = edge_key(axis, i, j, k);
        auto it = vert_of_edge.find(key);
        if (it != vert_of_edge.end()) return it->second;
        int i1 = i + (axis == 0), j1 = j + (axis == 1), k1 = k + (axis == 2);
        double va = tval(grid, grid.index(i, j, k), iso);
        double vb = tval(grid, grid.index(i1, j1, k1), iso);
        double t = (iso - va) / (vb - va);
        Vec3 p = grid.pos(i, j, k) + t * (grid.pos(i1, j1, k1) - grid.pos(i, j, k));
        int idx = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(p);
        vert_of_edge.emplace(key, idx);
        return idx;
    };

    for (int k = 0; k + 1 < nz; ++k) {
        for (int j = 0; j + 1 < ny; ++j) {
            for (int i = 0; i + 1 < nx; ++i) {
                double cv[8];
                int mask = 0;
                for (int c = 0; c < 8; ++c) {
                    cv[c] = tval(grid,
                                 grid.index(i + kCorner[c][0], j + kCorner[c][1],
                                            k + kCorner[c][2]),
                                 iso);
                    if (cv[c] < iso) mask |= 1 << c;
                }
                if (kMcEdgeTable[mask] == 0) continue;

                int everts[12];
                for (int e = 0; e < 12; ++e) {
                    if (!(kMcEdgeTable[mask] & (1 << e))) continue;
                    int ca = kEdge[e][0], cb = kEdge[e][1];
                    // interpolate along the edge's axis from the lower corner
                    int axis = kCorner[ca][0] != kCorner[cb][0]   ? 0
                               : kCorner[ca][1] != kCorner[cb][1] ? 1
                                                                  : 2;
                    int lo = kCorner[ca][axis] <= kCorner[cb][axis] ? ca : cb;
                    everts[e] = vertex_on(axis, i + kCorner[lo][0], j + kCorner[lo][1],
                                          k + kCorner[lo][2]);
                }
                for (int t = 0; kMcTriTable[mask][t] != -1; t += 3) {
                    // table order gives inward normals for v<iso inside;
                    // swap so normals point toward increasing field values
                    mesh.triangles.push_back({everts[kMcTriTable[mask][t]],
                                              everts[kMcTriTable[mask][t + 2]],
                                              everts[kMcTriTable[mask][t + 1]]});
                }
            }
        }
    }
    return mesh;
}

double polyline_length(const Polyline& p) {
    double len = 0.0;
    for (size_t i = 0; i + 1 < p.points.size(); ++i) len += (p.points[i + 1] - p.points[i]).norm();
    if (p.closed && p.points.size() > 2) len += (p.points.front() - p.points.back()).norm();
    return len;
}

void write_polylines_obj(const std::string& path, const std::vector<Polyline>& lines) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    char buf[96];
    for (const auto& pl : lines)
        for (const auto& p : pl.points) {
            std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
            out << buf;
        }
    int base = 1;
    for (const auto& pl : lines) {
        out << "l";
        for (size_t i = 0; i < pl.points.size(); ++i) out << " " << base + static_cast<int>(i);
        if (pl.closed) out << " " << base;
        out << "\n";
        base += static_cast<int>(pl.points.size());
    }
}

void write_polylines_csv(const std::string& path, const std::vector<Polyline>& lines) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "polyline,closed,x,y\n";
    char buf[96];
    for (size_t n = 0; n < lines.size(); ++n)
        for (const auto& p : lines[n].points) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g\n", n, lines[n].closed ? 1 : 0,
                          p.x(), p.y());
            out << buf;
        }
}

void emit_heatmap(const GridField& grid, const std::string& ppm_path,
                  const std::string& csv_path) {
    if (grid.dim != 2) throw std::invalid_argument("emit_heatmap: 2D grid required");
    const int nx = grid.dims[0], ny = grid.dims[1];
    double lo = grid.values[0], hi = grid.values[0];
    for (double v : grid.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;

    Image img(nx, ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            auto c = colormap_viridis((grid.at(i, j, 0) - lo) / span);
            img.set(i, ny - 1 - j, c[0], c[1], c[2]); // image top = max y
        }
    write_ppm(ppm_path, img);

    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open for writing: " + csv_path);
    char buf[40];
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", grid.at(i, j, 0));
            csv << buf << (i + 1 < nx ? "," : "\n");
        }
    }
}

} // namespace lndf
