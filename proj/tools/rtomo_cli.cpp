#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "rtomo/scenario.hpp"

using namespace rtomo;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    int threads = 0;
    int np = 0;
};

ExperimentConfig resolve_config(const CommonOpts& opts) {
    ExperimentConfig cfg =
        opts.config_path.empty() ? ExperimentConfig{} : load_config(opts.config_path);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.np != 0) cfg.n_p = opts.np;
#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif
    return cfg;
}

int emit_artifacts(const CommonOpts& opts, std::vector<std::string> artifacts) {
    ExperimentConfig cfg = resolve_config(opts);
    cfg.artifacts = std::move(artifacts);
    for (const std::string& path : run_scenario(cfg)) std::printf("%s\n", path.c_str());
    return 0;
}

int emit_convergence(const CommonOpts& opts) {
    const ExperimentConfig cfg = resolve_config(opts);
    const ConvergenceResult res = convergence_study(cfg);

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + cfg.out_dir);

    const std::string table_path = cfg.out_dir + "/convergence.csv";
    std::FILE* f = std::fopen(table_path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open file for writing: " + table_path);
    std::fprintf(f, "n_p,eps,angle,rms_orig,rms_new,sup_orig,sup_new\n");
    for (const ConvergenceRow& r : res.rows)
        std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.n_p, r.eps, r.angle_pi,
                     r.metrics.rms_orig, r.metrics.rms_new, r.metrics.sup_orig, r.metrics.sup_new);
    std::fclose(f);

    const std::string slopes_path = cfg.out_dir + "/slopes.csv";
    f = std::fopen(slopes_path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open file for writing: " + slopes_path);
    std::fprintf(f, "angle,slope_orig,resid_orig,slope_new,resid_new\n");
    for (const ConvergenceFit& fit : res.fits)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", fit.angle_pi, fit.slope_orig,
                     fit.resid_orig, fit.slope_new, fit.resid_new);
    std::fclose(f);

    std::printf("%s\n%s\n", table_path.c_str(), slopes_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tomographic resolution lab: simulate, reconstruct, and compare DTB models"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "experiment config file (defaults when omitted)");
    app.add_option("--out", opts.out_dir, "override the output directory");
    app.add_option("--threads", opts.threads, "worker threads, 0 = runtime default")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--np", opts.np, "override the detector count N_p");

    struct Sub {
        const char* name;
        const char* desc;
        std::vector<std::string> artifacts;
    };
    const std::vector<Sub> subs = {
        {"simulate", "simulate the scan and write the sinogram", {"sinogram"}},
        {"reconstruct", "reconstruct the full field of view", {"image"}},
        {"dtb", "evaluate both DTB models along the configured profiles", {"dtb_models"}},
        {"profile", "extract reconstruction/DTB profiles", {"profiles"}},
        {"metrics", "summarize profile agreement metrics", {"metrics"}},
        {"render", "render edge ROI and full-frame images", {"roi_images", "image"}},
    };
    for (const Sub& s : subs) app.add_subcommand(s.name, s.desc);
    app.add_subcommand("convergence", "metrics across the configured N_p ladder with fitted slopes");

    CLI11_PARSE(app, argc, argv);

    try {
        const CLI::App* picked = app.get_subcommands().front();
        if (picked->get_name() == "convergence") return emit_convergence(opts);
        for (const Sub& s : subs)
            if (picked->get_name() == s.name) return emit_artifacts(opts, s.artifacts);
        return 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
