// lndf: file-based pipeline for 1-Lipschitz neural distance fields.
// Stages: label -> train -> extract / render / audit / query / csg.
// Exit codes: 0 success (and audit pass), 1 audit fail, 2 usage/input error.

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lndf/extract.hpp"
#include "lndf/fieldops.hpp"
#include "lndf/geometry.hpp"
#include "lndf/lipnet.hpp"
#include "lndf/oracles.hpp"
#include "lndf/parallel.hpp"
#include "lndf/trainer.hpp"

using namespace lndf;

namespace {

constexpr double kLipschitzBound = 1.0 + 1e-9;

struct LoadedField {
    ScalarFieldHandle field;
    std::shared_ptr<const LipNet> net; // null for oracles
    ModelMeta meta;
};

LoadedField resolve_field(const std::string& operand) {
    LoadedField out;
    if (operand.size() > 5 && operand.substr(operand.size() - 5) == ".lndf") {
        auto [net, meta] = load_lndf(operand);
        out.net = std::make_shared<const LipNet>(std::move(net));
        out.meta = meta;
        out.field = make_field(out.net);
    } else {
        out.field = make_field(parse_oracle_spec(operand));
    }
    return out;
}

Vec3 parse_vec3(const std::vector<double>& v, const char* what) {
    if (v.size() != 3) throw CLI::ValidationError(std::string(what) + " needs 3 values");
    return {v[0], v[1], v[2]};
}

std::string with_suffix(const std::string& path, const std::string& tag) {
    auto dot = path.rfind('.');
    if (dot == std::string::npos) return path + tag;
    return path.substr(0, dot) + tag + path.substr(dot);
}

int cmd_label(const std::string& input, const std::string& format_flag, const std::string& mode,
              int n, double tau_in, double tau_out, uint64_t seed, const std::string& out,
              double noise_sigma, const std::vector<int>& holes, int subsample,
              uint64_t corrupt_seed) {
    Geometry g = format_flag.empty()
                     ? load_geometry(input)
                     : load_geometry(input, format_flag == "obj"   ? GeometryFormat::Obj
                                            : format_flag == "ply" ? GeometryFormat::Ply
                                                                   : GeometryFormat::Xyz);
    if (auto* cloud = std::get_if<OrientedPointCloud>(&g)) {
        if (subsample > 0)
            *cloud = corrupt(*cloud, {CorruptSpec::Kind::Subsample, 0, 0, 0, subsample},
                             corrupt_seed);
        if (!holes.empty()) {
            if (holes.size() != 2) throw CLI::ValidationError("--holes needs COUNT K");
            *cloud = corrupt(*cloud, {CorruptSpec::Kind::Holes, 0, holes[0], holes[1], 0},
                             corrupt_seed + 1);
        }
        if (noise_sigma > 0.0)
            *cloud = corrupt(*cloud, {CorruptSpec::Kind::Noise, noise_sigma, 0, 0, 0},
                             corrupt_seed + 2);
    } else if (noise_sigma > 0.0 || !holes.empty() || subsample > 0) {
        throw CLI::ValidationError("corruption options apply to point clouds only");
    }

    NormalizeTransform t = normalize_geometry(g);
    LabeledDataset ds = mode == "signed" ? build_signed_dataset(g, n, tau_in, tau_out, seed)
                                         : build_unsigned_dataset(g, n, seed);
    save_dataset_csv(out, ds);
    save_transform_json(out + ".transform.json", t, ds.dim);
    std::printf("wrote %s (%lld rows, %dD, %s) and %s\n", out.c_str(),
                static_cast<long long>(ds.size()), ds.dim, mode.c_str(),
                (out + ".transform.json").c_str());
    return 0;
}

int cmd_train(const std::string& dataset_path, const TrainConfig& cfg,
              const std::string& transform_path, const std::string& out,
              const std::string& log_path) {
    LabeledDataset ds = load_dataset_csv(dataset_path);
    NormalizeTransform norm;
    std::string tpath = transform_path;
    if (tpath.empty() && std::filesystem::exists(dataset_path + ".transform.json"))
        tpath = dataset_path + ".transform.json";
    if (!tpath.empty()) {
        auto [t, tdim] = load_transform_json(tpath);
        if (tdim != ds.dim) throw std::runtime_error("transform dimension does not match dataset");
        norm = t;
    }
    auto [net, log] = train(ds, norm, cfg);
    ModelMeta meta{ds.mode == FieldMode::Signed ? "signed" : "unsigned", cfg.margin, cfg.lambda};
    save_lndf(out, net, meta);
    if (!log_path.empty()) write_train_log_csv(log_path, log);
    if (!log.epochs.empty()) {
        const auto& last = log.epochs.back();
        std::printf("trained %d epochs: total=%.6g hinge=%.6g misclass=%.4f%%\n",
                    static_cast<int>(log.epochs.size()), last.total, last.hinge,
                    100.0 * last.misclass);
    }
    std::printf("wrote %s (depth=%d k=%d m=%g lambda=%g mode=%s)\n", out.c_str(), cfg.depth,
                cfg.width, cfg.margin, cfg.lambda, meta.mode.c_str());
    return 0;
}

int cmd_extract(const std::string& operand, std::vector<double> isos, int res, double lo,
                double hi, const std::string& out, bool raw_coords) {
    LoadedField lf = resolve_field(operand);
    if (isos.empty()) isos.push_back(0.0);
    GridField grid = sample_grid(lf.field, Vec3::Constant(lo), Vec3::Constant(hi),
                                 {res, res, res});
    for (size_t i = 0; i < isos.size(); ++i) {
        std::string path = isos.size() == 1 ? out : with_suffix(out, "_iso" + std::to_string(i));
        if (lf.field.dim == 3) {
            TriangleSoup mesh = marching_cubes(grid, isos[i]);
            if (raw_coords && lf.net)
                for (auto& v : mesh.vertices) v = lf.net->norm.invert(v);
            write_obj(path, mesh);
            std::printf("iso %g: %zu vertices, %zu triangles -> %s\n", isos[i],
                        mesh.vertices.size(), mesh.triangles.size(), path.c_str());
        } else {
            auto lines = marching_squares(grid, isos[i]);
            if (raw_coords && lf.net)
                for (auto& pl : lines)
                    for (auto& p : pl.points) p = lf.net->norm.invert(p);
            write_polylines_obj(path, lines);
            std::printf("iso %g: %zu polylines -> %s\n", isos[i], lines.size(), path.c_str());
        }
    }
    return 0;
}

int cmd_render(const std::string& operand, const Camera& cam, int width, int height,
               const std::string& shading, double t_max, const std::string& out) {
    LoadedField lf = resolve_field(operand);
    if (lf.field.dim != 3) throw std::runtime_error("render requires a 3D field");
    Shading sh = shading == "normal" ? Shading::Normal
                 : shading == "depth" ? Shading::Depth
                                      : Shading::Lambert;
    Image img = render(lf.field, cam, width, height, sh, t_max);
    write_ppm(out, img);
    std::printf("rendered %dx%d -> %s\n", width, height, out.c_str());
    return 0;
}

int cmd_audit(const std::string& operand, const std::string& check, int pairs, int points,
              double radius, int res, double slice_z, uint64_t seed, const std::string& out) {
    LoadedField lf = resolve_field(operand);
    bool pass = true;
    if (check == "lipschitz") {
        double q = audit_lipschitz(lf.field, pairs, seed);
        pass = q <= kLipschitzBound;
        std::printf("lipschitz: max sampled quotient %.12f over %d pairs (bound %.12f) -> %s\n", q,
                    pairs, kLipschitzBound, pass ? "PASS" : "FAIL");
    } else if (check == "gradnorm") {
        ScalarFieldHandle gn;
        gn.dim = 2;
        ScalarFieldHandle base = lf.field;
        const double z = slice_z;
        gn.value = [base, z](const Vec3& p) {
            return base.gradient(Vec3(p.x(), p.y(), base.dim == 3 ? z : 0.0)).norm();
        };
        GridField grid = sample_grid(gn, Vec3(-1, -1, 0), Vec3(1, 1, 0), {res, res, 1});
        std::string base_out = out.empty() ? "gradnorm" : out;
        emit_heatmap(grid, base_out + ".ppm", base_out + ".csv");
        double mx = *std::max_element(grid.values.begin(), grid.values.end());
        pass = mx <= kLipschitzBound;
        std::printf("gradnorm: max |grad f| = %.12f on %dx%d slice (bound %.12f) -> %s\n", mx, res,
                    res, kLipschitzBound, pass ? "PASS" : "FAIL");
    } else if (check == "underestimate") {
        if (!lf.net) throw std::runtime_error("underestimate audit requires a trained model");
        if (lf.field.dim != 3) throw std::runtime_error("underestimate audit requires a 3D model");
        GridField grid =
            sample_grid(lf.field, Vec3::Constant(-1.0), Vec3::Constant(1.0), {res, res, res});
        TriangleSoup mesh = marching_cubes(grid, 0.0);
        if (mesh.triangles.empty()) throw std::runtime_error("zero level set is empty");
        UnderestimationAudit a = audit_underestimation(lf.field, mesh, points, radius, seed);
        if (!out.empty()) write_underestimation_csv(out, a);
        double bound = 2.0 * lf.meta.margin + grid.spacing.norm();
        pass = a.max_diff <= bound;
        std::printf("underestimate: max f - S_mesh = %.6g over %d points in ball r=%g "
                    "(bound 2m + cell diagonal = %.6g) -> %s\n",
                    a.max_diff, points, radius, bound, pass ? "PASS" : "FAIL");
    } else {
        throw CLI::ValidationError("--check must be lipschitz, gradnorm, or underestimate");
    }
    return pass ? 0 : 1;
}

int cmd_query(const std::string& operand, const std::vector<double>& project_pt, double iso,
              bool raw_step, int skeleton_n, double skeleton_gamma, double probe_h, uint64_t seed,
              const std::string& out) {
    LoadedField lf = resolve_field(operand);
    if (!project_pt.empty()) {
        Vec3 x0 = Vec3::Zero();
        if (project_pt.size() != static_cast<size_t>(lf.field.dim))
            throw CLI::ValidationError("--project needs one coordinate per field dimension");
        for (size_t i = 0; i < project_pt.size(); ++i) x0[static_cast<int>(i)] = project_pt[i];
        ProjectResult r = project(lf.field, x0, iso, 1e-6, 200, raw_step);
        const char* status = r.status == ProjectResult::Status::Converged ? "converged"
                             : r.status == ProjectResult::Status::Stalled ? "stalled"
                                                                          : "max-iter";
        std::printf("project: (%.9g, %.9g, %.9g) iterations=%d residual=%.3g status=%s\n",
                    r.point.x(), r.point.y(), r.point.z(), r.iterations, r.residual, status);
        return 0;
    }
    if (skeleton_n > 0) {
        auto pts = medial_axis_sample(lf.field, skeleton_n, skeleton_gamma, seed, probe_h);
        std::string path = out.empty() ? "skeleton.csv" : out;
        std::ofstream f(path);
        f << "x,y,z\n";
        char buf[96];
        for (const auto& p : pts) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x(), p.y(), p.z());
            f << buf;
        }
        std::printf("skeleton: kept %zu of %d candidates (gamma=%g) -> %s\n", pts.size(),
                    skeleton_n, skeleton_gamma, path.c_str());
        return 0;
    }
    throw CLI::ValidationError("query needs --project or --skeleton");
}

int cmd_csg(const std::string& a, const std::string& b, const std::string& op, double iso,
            int res, double lo, double hi, const std::string& out,
            const std::string& render_out, const Camera& cam, int width, int height) {
    LoadedField fa = resolve_field(a), fb = resolve_field(b);
    ScalarFieldHandle f = op == "union"       ? csg_union(fa.field, fb.field)
                          : op == "intersect" ? csg_intersect(fa.field, fb.field)
                                              : csg_difference(fa.field, fb.field);
    if (!out.empty()) {
        GridField grid =
            sample_grid(f, Vec3::Constant(lo), Vec3::Constant(hi), {res, res, res});
        if (f.dim == 3) {
            TriangleSoup mesh = marching_cubes(grid, iso);
            write_obj(out, mesh);
            std::printf("csg %s: %zu vertices, %zu triangles -> %s\n", op.c_str(),
                        mesh.vertices.size(), mesh.triangles.size(), out.c_str());
        } else {
            write_polylines_obj(out, marching_squares(grid, iso));
            std::printf("csg %s -> %s\n", op.c_str(), out.c_str());
        }
    }
    if (!render_out.empty()) {
        Image img = render(f, cam, width, height, Shading::Lambert, 10.0);
        write_ppm(render_out, img);
        std::printf("csg render -> %s\n", render_out.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lndf: 1-Lipschitz neural distance fields — label, train, query"};
    app.require_subcommand(1);
    int workers = 0;
    app.add_option("--workers", workers, "worker threads (0 = all cores; wall time only)");

    // ---- label
    auto* label = app.add_subcommand("label", "build a labeled dataset from geometry");
    std::string l_in, l_format, l_mode = "signed", l_out = "dataset.csv";
    int l_n = 10000, l_subsample = 0;
    double l_tau_in = 0.6, l_tau_out = 0.4, l_noise = 0.0;
    std::vector<int> l_holes;
    uint64_t l_seed = 0, l_cseed = 0;
    label->add_option("input", l_in, "geometry file (.obj/.ply/.xyz)")->required();
    label->add_option("--format", l_format, "obj|ply|xyz (default: by extension)");
    label->add_option("--mode", l_mode, "signed|unsigned")
        ->check(CLI::IsMember({"signed", "unsigned"}))
        ->capture_default_str();
    label->add_option("--n", l_n, "points per class")->capture_default_str();
    label->add_option("--tau-in", l_tau_in, "inside threshold: w >= tau_in")->capture_default_str();
    label->add_option("--tau-out", l_tau_out, "outside threshold: w <= tau_out")
        ->capture_default_str();
    label->add_option("--seed", l_seed, "sampling seed")->capture_default_str();
    label->add_option("--out", l_out, "output CSV (transform JSON written alongside)")
        ->capture_default_str();
    label->add_option("--noise-sigma", l_noise, "gaussian position noise (clouds)")
        ->capture_default_str();
    label->add_option("--holes", l_holes, "COUNT K: punch COUNT holes of K+1 points (clouds)")
        ->expected(2);
    label->add_option("--subsample", l_subsample, "keep this many points (clouds)")
        ->capture_default_str();
    label->add_option("--corrupt-seed", l_cseed, "seed for corruption ops")->capture_default_str();

    // ---- train
    auto* tr = app.add_subcommand("train", "train a Lipschitz net on a labeled dataset");
    std::string t_data, t_config, t_transform, t_out = "model.lndf", t_log, t_loss = "hkr";
    TrainConfig tcfg;
    tr->add_option("dataset", t_data, "dataset CSV from `label`")->required();
    tr->add_option("--config", t_config, "JSON config mirroring the training options");
    tr->add_option("--loss", t_loss, "hkr|fit")->check(CLI::IsMember({"hkr", "fit"}));
    auto* o_margin = tr->add_option("--margin", tcfg.margin, "hinge margin m")->capture_default_str();
    auto* o_lambda = tr->add_option("--lambda", tcfg.lambda, "hinge weight")->capture_default_str();
    auto* o_depth = tr->add_option("--depth", tcfg.depth, "SLL layer count")->capture_default_str();
    auto* o_k = tr->add_option("--k", tcfg.width, "layer width")->capture_default_str();
    auto* o_epochs = tr->add_option("--epochs", tcfg.epochs, "training epochs")->capture_default_str();
    auto* o_batch = tr->add_option("--batch", tcfg.batch_per_class, "batch size per class")
                        ->capture_default_str();
    auto* o_lr = tr->add_option("--lr", tcfg.lr, "Adam learning rate")->capture_default_str();
    auto* o_seed = tr->add_option("--seed", tcfg.seed, "init/shuffle seed")->capture_default_str();
    auto* o_ckpt = tr->add_option("--checkpoint-every", tcfg.checkpoint_every,
                                  "epochs between checkpoints (0 = off)")
                       ->capture_default_str();
    tr->add_option("--checkpoint-prefix", tcfg.checkpoint_prefix, "checkpoint file prefix");
    tr->add_option("--transform", t_transform,
                   "transform JSON (default: <dataset>.transform.json if present)");
    tr->add_option("--out", t_out, "output model file")->capture_default_str();
    tr->add_option("--log", t_log, "per-epoch training log CSV");

    // ---- extract
    auto* ex = app.add_subcommand("extract", "marching cubes/squares level sets");
    std::string e_in, e_out = "mesh.obj";
    std::vector<double> e_isos;
    int e_res = 128;
    double e_lo = -1.0, e_hi = 1.0;
    bool e_raw = false;
    ex->add_option("field", e_in, "model.lndf or oracle spec (e.g. sphere:0,0,0,0.5)")->required();
    ex->add_option("--iso", e_isos, "iso values (repeatable; default 0)");
    ex->add_option("--res", e_res, "grid resolution per axis")->capture_default_str();
    ex->add_option("--lo", e_lo, "grid lower bound")->capture_default_str();
    ex->add_option("--hi", e_hi, "grid upper bound")->capture_default_str();
    ex->add_flag("--raw-coords", e_raw, "map output back to raw coordinates");
    ex->add_option("--out", e_out, "output OBJ")->capture_default_str();

    // ---- render
    auto* rd = app.add_subcommand("render", "sphere-traced image of a field");
    std::string r_in, r_out = "render.ppm", r_shading = "lambert";
    std::vector<double> r_pos{0, -2, 0.5}, r_look{0, 0, 0}, r_up{0, 0, 1};
    double r_fov = 45.0, r_tmax = 10.0;
    int r_w = 512, r_h = 512;
    rd->add_option("field", r_in, "model.lndf or oracle spec")->required();
    rd->add_option("--cam-pos", r_pos, "camera position")->expected(3);
    rd->add_option("--look-at", r_look, "camera target")->expected(3);
    rd->add_option("--up", r_up, "camera up vector")->expected(3);
    rd->add_option("--fov", r_fov, "vertical field of view (degrees)")->capture_default_str();
    rd->add_option("--width", r_w, "")->capture_default_str();
    rd->add_option("--height", r_h, "")->capture_default_str();
    rd->add_option("--tmax", r_tmax, "ray length limit")->capture_default_str();
    rd->add_option("--shading", r_shading, "normal|depth|lambert")
        ->check(CLI::IsMember({"normal", "depth", "lambert"}))
        ->capture_default_str();
    rd->add_option("--out", r_out, "output PPM")->capture_default_str();

    // ---- audit
    auto* au = app.add_subcommand("audit", "verify Lipschitz/underestimation bounds");
    std::string a_in, a_check = "lipschitz", a_out;
    int a_pairs = 100000, a_points = 10000, a_res = 96;
    double a_radius = 3.0, a_slice = 0.0;
    uint64_t a_seed = 0;
    au->add_option("field", a_in, "model.lndf or oracle spec")->required();
    au->add_option("--check", a_check, "lipschitz|underestimate|gradnorm")
        ->check(CLI::IsMember({"lipschitz", "underestimate", "gradnorm"}))
        ->capture_default_str();
    au->add_option("--pairs", a_pairs, "sample pairs for the Lipschitz audit")
        ->capture_default_str();
    au->add_option("--points", a_points, "sample points for underestimation")
        ->capture_default_str();
    au->add_option("--radius", a_radius, "sampling ball radius")->capture_default_str();
    au->add_option("--res", a_res, "grid resolution (gradnorm slice / extraction)")
        ->capture_default_str();
    au->add_option("--slice-z", a_slice, "z of the gradnorm slice for 3D fields")
        ->capture_default_str();
    au->add_option("--seed", a_seed, "sampling seed")->capture_default_str();
    au->add_option("--out", a_out, "output CSV / heatmap basename");

    // ---- query
    auto* qu = app.add_subcommand("query", "closest-point projection / skeleton sampling");
    std::string q_in, q_out;
    std::vector<double> q_project;
    double q_iso = 0.0, q_gamma = 0.3, q_probe = 1e-2;
    int q_skeleton = 0;
    bool q_raw_step = false;
    uint64_t q_seed = 0;
    qu->add_option("field", q_in, "model.lndf or oracle spec")->required();
    qu->add_option("--project", q_project, "point to project, comma separated")->delimiter(',');
    qu->add_option("--iso", q_iso, "target level")->capture_default_str();
    qu->add_flag("--raw-step", q_raw_step, "paper-style unnormalized step x - f grad");
    qu->add_option("--skeleton", q_skeleton, "medial-axis candidate count");
    qu->add_option("--gamma", q_gamma, "gradient-norm threshold")->capture_default_str();
    qu->add_option("--probe-h", q_probe, "central-difference probe step")->capture_default_str();
    qu->add_option("--seed", q_seed, "candidate seed")->capture_default_str();
    qu->add_option("--out", q_out, "skeleton CSV path");

    // ---- csg
    auto* cs = app.add_subcommand("csg", "boolean composition of two fields");
    std::string c_a, c_b, c_op = "union", c_out, c_render;
    double c_iso = 0.0, c_lo = -1.0, c_hi = 1.0;
    int c_res = 128, c_w = 512, c_h = 512;
    std::vector<double> c_pos{0, -2, 0.5}, c_look{0, 0, 0};
    cs->add_option("a", c_a, "first model.lndf or oracle spec")->required();
    cs->add_option("b", c_b, "second model.lndf or oracle spec")->required();
    cs->add_option("--op", c_op, "union|intersect|difference")
        ->check(CLI::IsMember({"union", "intersect", "difference"}))
        ->capture_default_str();
    cs->add_option("--iso", c_iso, "")->capture_default_str();
    cs->add_option("--res", c_res, "")->capture_default_str();
    cs->add_option("--lo", c_lo, "")->capture_default_str();
    cs->add_option("--hi", c_hi, "")->capture_default_str();
    cs->add_option("--out", c_out, "extract composite to OBJ");
    cs->add_option("--render", c_render, "render composite to PPM");
    cs->add_option("--cam-pos", c_pos, "")->expected(3);
    cs->add_option("--look-at", c_look, "")->expected(3);
    cs->add_option("--width", c_w, "")->capture_default_str();
    cs->add_option("--height", c_h, "")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    worker_count() = workers;
    try {
        if (*label)
            return cmd_label(l_in, l_format, l_mode, l_n, l_tau_in, l_tau_out, l_seed, l_out,
                             l_noise, l_holes, l_subsample, l_cseed);
        if (*tr) {
            if (!t_config.empty()) {
                TrainConfig file_cfg = load_train_config_json(t_config);
                // explicit flags override the config file
                if (!*o_margin) tcfg.margin = file_cfg.margin;
                if (!*o_lambda) tcfg.lambda = file_cfg.lambda;
                if (!*o_depth) tcfg.depth = file_cfg.depth;
                if (!*o_k) tcfg.width = file_cfg.width;
                if (!*o_epochs) tcfg.epochs = file_cfg.epochs;
                if (!*o_batch) tcfg.batch_per_class = file_cfg.batch_per_class;
                if (!*o_lr) tcfg.lr = file_cfg.lr;
                if (!*o_seed) tcfg.seed = file_cfg.seed;
                if (!*o_ckpt) tcfg.checkpoint_every = file_cfg.checkpoint_every;
                if (tcfg.checkpoint_prefix.empty())
                    tcfg.checkpoint_prefix = file_cfg.checkpoint_prefix;
                if (!tr->count("--loss")) tcfg.loss = file_cfg.loss;
            }
            if (tr->count("--loss"))
                tcfg.loss = t_loss == "fit" ? TrainConfig::Loss::Fit : TrainConfig::Loss::Hkr;
            return cmd_train(t_data, tcfg, t_transform, t_out, t_log);
        }
        if (*ex) return cmd_extract(e_in, e_isos, e_res, e_lo, e_hi, e_out, e_raw);
        if (*rd) {
            Camera cam{parse_vec3(r_pos, "--cam-pos"), parse_vec3(r_look, "--look-at"),
                       parse_vec3(r_up, "--up"), r_fov};
            return cmd_render(r_in, cam, r_w, r_h, r_shading, r_tmax, r_out);
        }
        if (*au)
            return cmd_audit(a_in, a_check, a_pairs, a_points, a_radius, a_res, a_slice, a_seed,
                             a_out);
        if (*qu)
            return cmd_query(q_in, q_project, q_iso, q_raw_step, q_skeleton, q_gamma, q_probe,
                             q_seed, q_out);
        if (*cs) {
            Camera cam{parse_vec3(c_pos, "--cam-pos"), parse_vec3(c_look, "--look-at"),
                       Vec3::UnitZ(), 45.0};
            return cmd_csg(c_a, c_b, c_op, c_iso, c_res, c_lo, c_hi, c_out, c_render, cam, c_w,
                           c_h);
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
