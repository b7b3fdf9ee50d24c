// Command line front end. Talks to the engine exclusively through the
// public C interface.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fgt/fgt.h"

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// exit codes: 0 ok, 1 verification failed, 2 bad usage/arguments, 3 IO
int fail_status() {
    std::fprintf(stderr, "error: %s\n", fgt_last_error());
    return fgt_last_status() == FGT_ERR_IO ? 3 : 2;
}

double urand(std::mt19937_64& g) {  // uniform [0, 1), reproducible everywhere
    return (g() >> 11) * 0x1.0p-53;
}

struct CommonOpts {
    double delta = 1e-3;
    double eps = 1e-9;
    std::string bc = "free";
    int threads = 0;
    std::string path = "auto";
    std::string output;
    std::string format = "fgto";
    bool verify = false;
};

void add_common(CLI::App* cmd, CommonOpts* o) {
    cmd->add_option("--delta", o->delta, "kernel width parameter");
    cmd->add_option("--eps", o->eps, "accuracy target");
    cmd->add_option("--bc", o->bc, "boundary condition")
        ->check(CLI::IsMember({"free", "periodic"}));
    cmd->add_option("--threads", o->threads, "worker threads (0 = all)");
    cmd->add_option("--path", o->path, "far-field path")
        ->check(CLI::IsMember({"auto", "hermite", "pw"}));
    cmd->add_option("--output", o->output, "output file");
    cmd->add_option("--format", o->format, "output format")
        ->check(CLI::IsMember({"fgto", "csv"}));
    cmd->add_flag("--verify", o->verify,
                  "compare against the reference evaluator");
}

fgt_params make_params(const CommonOpts& o, int want_grid) {
    fgt_params p;
    fgt_params_init(&p);
    p.delta = o.delta;
    p.eps = o.eps;
    p.periodic = o.bc == "periodic";
    p.threads = o.threads;
    p.force_path = o.path == "hermite" ? 1 : o.path == "pw" ? 2 : 0;
    p.want_grid = want_grid;
    return p;
}

int write_values(const CommonOpts& o, const std::vector<double>& xy,
                 const std::vector<double>& vals) {
    if (o.output.empty()) return 0;
    fgt_status s;
    if (o.format == "csv")
        s = fgt_write_csv(o.output.c_str(), xy.data(), vals.data(),
                          (long)vals.size());
    else
        s = fgt_write_fgto(o.output.c_str(), vals.data(), (long)vals.size());
    if (s != FGT_OK) return fail_status();
    std::printf("wrote %zu values to %s\n", vals.size(), o.output.c_str());
    return 0;
}

// max |a - b|, and the largest |b|, over the common length
void max_err(const std::vector<double>& a, const std::vector<double>& b,
             double* err, double* scale) {
    *err = 0;
    *scale = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        *err = std::max(*err, std::abs(a[i] - b[i]));
        *scale = std::max(*scale, std::abs(b[i]));
    }
}

int report_verify(double err, double allowed) {
    bool ok = err <= allowed;
    std::printf("verify: max error %.3e (allowed %.3e) -> %s\n", err, allowed,
                ok ? "ok" : "FAILED");
    return ok ? 0 : 1;
}

// ---- volume -------------------------------------------------------------

struct SinprodCtx {
    int k;
};

void sinprod_cb(const double* xy, int n, double* out, void* ctx) {
    int k = static_cast<SinprodCtx*>(ctx)->k;
    for (int i = 0; i < n; ++i)
        out[i] = std::sin(2 * kPi * k * xy[2 * i]) *
                 std::cos(2 * kPi * k * xy[2 * i + 1]);
}

int run_volume(const CommonOpts& o, const std::string& source, int source_k,
               const std::string& input, int order, int levels, double tol) {
    fgt_tree* t = nullptr;
    if (!input.empty()) {
        char* text = nullptr;
        if (fgt_read_text(input.c_str(), &text) != FGT_OK) return fail_status();
        t = fgt_tree_from_json(text);
        fgt_free(text);
    } else if (source == "sinprod") {
        SinprodCtx ctx{source_k};
        if (tol <= 0) tol = std::max(o.eps / 10, 1e-13);
        t = fgt_tree_adaptive(0.5, 0.5, 1.0, order, sinprod_cb, &ctx, tol,
                              levels);
    }
    if (!t) return fail_status();

    fgt_params p = make_params(o, 1);
    fgt_result* r = nullptr;
    if (fgt_transform(t, &p, nullptr, 0, &r) != FGT_OK) {
        fgt_tree_free(t);
        return fail_status();
    }
    long gs = fgt_result_grid_size(r);
    std::vector<double> vals(fgt_result_grid(r), fgt_result_grid(r) + gs);
    fgt_stats st = fgt_result_stats(r);
    std::printf(
        "volume: %ld leaves, order %d, %s, l_cut %d, %s far path, %.3fs\n",
        fgt_tree_leaf_count(t), fgt_tree_order(t),
        p.periodic ? "periodic" : "free", st.l_cut,
        st.used_pw ? "plane-wave" : "hermite", st.seconds_total);
    fgt_result_free(r);

    std::vector<double> xy(2 * gs);
    fgt_tree_grid_points(t, xy.data());
    int rc = write_values(o, xy, vals);

    if (rc == 0 && o.verify) {
        long m = std::min<long>(200, gs);
        long stride = gs / m;
        std::vector<double> sub_xy(2 * m), got(m), want(m);
        for (long i = 0; i < m; ++i) {
            sub_xy[2 * i] = xy[2 * i * stride];
            sub_xy[2 * i + 1] = xy[2 * i * stride + 1];
            got[i] = vals[i * stride];
        }
        if (fgt_oracle_volume(t, sub_xy.data(), m, o.delta, p.periodic,
                              want.data()) != FGT_OK) {
            fgt_tree_free(t);
            return fail_status();
        }
        double err, scale;
        max_err(got, want, &err, &scale);
        rc = report_verify(err, 10 * o.eps * std::max(scale, 1e-30));
    }
    fgt_tree_free(t);
    return rc;
}

// ---- discrete -----------------------------------------------------------

int run_discrete(const CommonOpts& o, long n_random, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> xy(2 * n_random), q(n_random);
    double qsum = 0;
    for (long i = 0; i < n_random; ++i) {
        xy[2 * i] = urand(rng);
        xy[2 * i + 1] = urand(rng);
        q[i] = 2 * urand(rng) - 1;
        qsum += std::abs(q[i]);
    }
    fgt_tree* t = fgt_tree_from_points(0.5, 0.5, 1.0, 8, xy.data(), q.data(),
                                       n_random, 48, 12);
    if (!t) return fail_status();

    fgt_params p = make_params(o, 0);
    fgt_result* r = nullptr;
    if (fgt_transform(t, &p, xy.data(), n_random, &r) != FGT_OK) {
        fgt_tree_free(t);
        return fail_status();
    }
    std::vector<double> vals(fgt_result_points(r),
                             fgt_result_points(r) + n_random);
    fgt_stats st = fgt_result_stats(r);
    std::printf("discrete: %ld points, l_cut %d, %.3fs\n", n_random, st.l_cut,
                st.seconds_total);
    fgt_result_free(r);

    int rc = write_values(o, xy, vals);

    if (rc == 0 && o.verify) {
        long m = std::min<long>(100, n_random);
        long stride = n_random / m;
        std::vector<double> sub_xy(2 * m), got(m), want(m);
        for (long i = 0; i < m; ++i) {
            sub_xy[2 * i] = xy[2 * i * stride];
            sub_xy[2 * i + 1] = xy[2 * i * stride + 1];
            got[i] = vals[i * stride];
        }
        if (fgt_direct_dgt(xy.data(), q.data(), n_random, nullptr, nullptr,
                           nullptr, 0, sub_xy.data(), m, o.delta, p.periodic,
                           1.0, want.data()) != FGT_OK) {
            fgt_tree_free(t);
            return fail_status();
        }
        double err, scale;
        max_err(got, want, &err, &scale);
        rc = report_verify(err, 10 * o.eps * qsum);
    }
    fgt_tree_free(t);
    return rc;
}

// ---- boundary -----------------------------------------------------------

int run_boundary(const CommonOpts& o, bool ellipse, int segments, int order,
                 const std::string& layer, const std::string& input) {
    fgt_boundary* b = nullptr;
    if (!input.empty()) {
        char* text = nullptr;
        if (fgt_read_text(input.c_str(), &text) != FGT_OK) return fail_status();
        b = fgt_boundary_from_json(text);
        fgt_free(text);
    } else if (ellipse) {
        b = fgt_boundary_ellipse(segments, order, layer == "double");
    } else {
        std::fprintf(stderr, "error: need --ellipse or --input\n");
        return 2;
    }
    if (!b) return fail_status();

    // targets on two rings around the curve, outside and inside
    int m = 200;
    std::vector<double> xy(2 * m);
    for (int i = 0; i < m; ++i) {
        double th = 2 * kPi * i / m;
        double f = i % 2 ? 1.15 : 0.8;
        xy[2 * i] = 0.45 * f * std::cos(th);
        xy[2 * i + 1] = 0.25 * f * std::sin(th);
    }

    fgt_params p = make_params(o, 0);
    fgt_result* r = nullptr;
    if (fgt_boundary_transform(b, &p, xy.data(), m, &r) != FGT_OK) {
        fgt_boundary_free(b);
        return fail_status();
    }
    std::vector<double> vals(fgt_result_points(r), fgt_result_points(r) + m);
    fgt_stats st = fgt_result_stats(r);
    std::printf("boundary: %ld segments, %s layer, %ld corrections, %.3fs\n",
                fgt_boundary_segment_count(b), layer.c_str(),
                st.boundary_corrections, st.seconds_total);
    fgt_result_free(r);

    int rc = write_values(o, xy, vals);

    if (rc == 0 && o.verify) {
        int sub = 40;
        std::vector<double> sub_xy(2 * sub), got(sub), want(sub);
        for (int i = 0; i < sub; ++i) {
            sub_xy[2 * i] = xy[2 * i * (m / sub)];
            sub_xy[2 * i + 1] = xy[2 * i * (m / sub) + 1];
            got[i] = vals[i * (m / sub)];
        }
        if (fgt_oracle_boundary(b, sub_xy.data(), sub, o.delta,
                                want.data()) != FGT_OK) {
            fgt_boundary_free(b);
            return fail_status();
        }
        double err, scale;
        max_err(got, want, &err, &scale);
        // allowance: eps times density-sup times curve length (about 4
        // for the elliptical fixture)
        rc = report_verify(err, 10 * o.eps * 4);
    }
    fgt_boundary_free(b);
    return rc;
}

// ---- heat demo ----------------------------------------------------------

int run_heat(const std::vector<double>& times, uint64_t seed, int levels,
             double eps, int threads, const std::string& output) {
    fgt_tree* t = fgt_tree_uniform(0, 0, 1.0, 8, levels);
    if (!t) return fail_status();
    long nl = fgt_tree_leaf_count(t);
    long gs = fgt_tree_grid_size(t);
    int kk = (int)(gs / nl);

    // initial temperature: one random constant per leaf cell
    std::mt19937_64 rng(seed);
    std::vector<double> f0(gs);
    for (long i = 0; i < nl; ++i) {
        double c = urand(rng);
        for (int j = 0; j < kk; ++j) f0[i * kk + j] = c;
    }
    if (fgt_tree_set_samples(t, f0.data(), gs) != FGT_OK) {
        fgt_tree_free(t);
        return fail_status();
    }
    double mean0 = 0;
    fgt_grid_mean(t, f0.data(), gs, &mean0);
    std::printf("heat: %ld cells, initial mean %.12f\n", nl, mean0);

    int rc = 0;
    for (size_t ti = 0; ti < times.size(); ++ti) {
        double time = times[ti];
        if (time <= 0) {
            std::fprintf(stderr, "error: times must be positive\n");
            rc = 2;
            break;
        }
        fgt_params p;
        fgt_params_init(&p);
        p.delta = 4 * time;
        p.eps = eps;
        p.periodic = 1;
        p.kernel_prefactor = 1 / (4 * kPi * time);
        p.threads = threads;
        fgt_result* r = nullptr;
        if (fgt_transform(t, &p, nullptr, 0, &r) != FGT_OK) {
            rc = fail_status();
            break;
        }
        std::vector<double> u(fgt_result_grid(r), fgt_result_grid(r) + gs);
        fgt_result_free(r);
        double mean_t = 0;
        fgt_grid_mean(t, u.data(), gs, &mean_t);
        double drift = std::abs(mean_t - mean0);
        bool ok = drift <= 1e-8;
        std::printf("t=%.3e  mean %.12f  drift %.3e -> %s\n", time, mean_t,
                    drift, ok ? "ok" : "FAILED");
        if (!ok) rc = 1;
        if (!output.empty()) {
            std::string path = output + "_" + std::to_string(ti) + ".fgto";
            if (fgt_write_fgto(path.c_str(), u.data(), gs) != FGT_OK) {
                rc = fail_status();
                break;
            }
            std::printf("wrote %ld values to %s\n", gs, path.c_str());
        }
    }
    fgt_tree_free(t);
    return rc;
}

// ---- bench --------------------------------------------------------------

int run_bench(const CommonOpts& o, int levels, int reps, uint64_t seed) {
    fgt_tree* t = fgt_tree_uniform(0.5, 0.5, 1.0, 8, levels);
    if (!t) return fail_status();
    long gs = fgt_tree_grid_size(t);
    std::mt19937_64 rng(seed);
    std::vector<double> f(gs);
    for (double& v : f) v = 2 * urand(rng) - 1;
    fgt_tree_set_samples(t, f.data(), gs);

    std::printf("bench: %ld leaves, delta %.3e, eps %.1e, %s\n",
                fgt_tree_leaf_count(t), o.delta, o.eps, o.bc.c_str());
    int rc = 0;
    for (int rep = 0; rep < reps; ++rep) {
        fgt_params p = make_params(o, 1);
        fgt_result* r = nullptr;
        if (fgt_transform(t, &p, nullptr, 0, &r) != FGT_OK) {
            rc = fail_status();
            break;
        }
        fgt_stats st = fgt_result_stats(r);
        double solve = st.seconds_total - st.seconds_build;
        std::printf(
            "  run %d: build %.3fs up %.3fs down %.3fs near %.3fs "
            "| %.2e values/s\n",
            rep, st.seconds_build, st.seconds_upward, st.seconds_downward,
            st.seconds_near, gs / std::max(solve, 1e-12));
        fgt_result_free(r);
    }
    fgt_tree_free(t);
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive Gauss transform"};
    app.require_subcommand(1);

    CommonOpts vo, dg, bo, be;

    auto* vol = app.add_subcommand("volume", "transform a continuous source");
    std::string v_source = "sinprod", v_input;
    int v_source_k = 1, v_order = 8, v_levels = 8;
    double v_tol = 0;
    vol->add_option("--source", v_source, "built-in source field")
        ->check(CLI::IsMember({"sinprod"}));
    vol->add_option("--source-k", v_source_k, "source wavenumber");
    vol->add_option("--input", v_input, "tree JSON file to transform");
    vol->add_option("--order", v_order, "leaf grid order");
    vol->add_option("--levels", v_levels, "max refinement depth");
    vol->add_option("--tol", v_tol, "refinement tolerance (0 = eps/10)");
    add_common(vol, &vo);

    auto* dis = app.add_subcommand("discrete", "transform point charges");
    long d_random = 1000;
    uint64_t d_seed = 1;
    dis->add_option("--random", d_random, "number of random charges");
    dis->add_option("--seed", d_seed, "random seed");
    add_common(dis, &dg);

    auto* bnd = app.add_subcommand("boundary", "single/double layer potential");
    bool b_ellipse = false;
    int b_segments = 64, b_order = 8;
    std::string b_layer = "single", b_input;
    bnd->add_flag("--ellipse", b_ellipse, "use the elliptical test curve");
    bnd->add_option("--segments", b_segments, "number of curve pieces");
    bnd->add_option("--order", b_order, "segment geometry order");
    bnd->add_option("--layer", b_layer, "layer kind")
        ->check(CLI::IsMember({"single", "double"}));
    bnd->add_option("--input", b_input, "boundary JSON file");
    add_common(bnd, &bo);

    auto* heat = app.add_subcommand("heat-demo",
                                    "periodic heat flow on a random field");
    std::vector<double> h_times{1e-4, 1e-3, 1e-2};
    uint64_t h_seed = 1;
    int h_levels = 5, h_threads = 0;
    double h_eps = 1e-9;
    std::string h_output;
    heat->add_option("--times", h_times, "diffusion times")->delimiter(',');
    heat->add_option("--seed", h_seed, "random seed");
    heat->add_option("--levels", h_levels, "uniform tree depth");
    heat->add_option("--eps", h_eps, "accuracy target");
    heat->add_option("--threads", h_threads, "worker threads (0 = all)");
    heat->add_option("--output", h_output, "output file prefix");

    auto* ben = app.add_subcommand("bench", "timing on a uniform random field");
    int n_levels = 4, n_reps = 3;
    uint64_t n_seed = 1;
    ben->add_option("--levels", n_levels, "uniform tree depth");
    ben->add_option("--reps", n_reps, "repetitions");
    ben->add_option("--seed", n_seed, "random seed");
    add_common(ben, &be);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (app.got_subcommand(vol))
        return run_volume(vo, v_source, v_source_k, v_input, v_order, v_levels,
                          v_tol);
    if (app.got_subcommand(dis)) return run_discrete(dg, d_random, d_seed);
    if (app.got_subcommand(bnd))
        return run_boundary(bo, b_ellipse, b_segments, b_order, b_layer,
                            b_input);
    if (app.got_subcommand(heat))
        return run_heat(h_times, h_seed, h_levels, h_eps, h_threads, h_output);
    if (app.got_subcommand(ben)) return run_bench(be, n_levels, n_reps, n_seed);
    return 2;
}
