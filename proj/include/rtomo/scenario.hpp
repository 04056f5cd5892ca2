#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtomo/dtb.hpp"
#include "rtomo/phantom.hpp"

namespace rtomo {

// Raw experiment description as read from a config file. Values stay in the
// file's own terms (base angles in units of pi, factory defaults unresolved);
// derived quantities appear only when a pipeline is built from the config.
struct PerturbationConfig {
    std::string kind = "zero"; // zero | constant | sinusoid | wsine | schwarz
    std::optional<double> h;
    std::optional<double> amplitude;
    std::optional<double> frequency;
    std::optional<double> gamma;
    std::optional<double> ratio;
};

struct ExperimentConfig {
    int n_p = 501;
    Vec2 center{0.1, 0.2};
    double radius = 0.3;
    double f_in = 1.0;
    double f_out = 0.0;
    std::string mode = "full"; // full | shell
    PerturbationConfig perturbation;
    std::vector<double> angles_pi{0.32}; // base angles a, units of pi; boundary point at polar angle a*pi + pi
    double profile_lo = -25.0;
    double profile_hi = 25.0;
    double profile_step = 0.25;
    double window_lo = -15.0;
    double window_hi = 15.0;
    std::vector<int> convergence_np;
    std::string out_dir = "out";
    std::vector<std::string> artifacts{"sinogram", "profiles", "metrics", "roi_images"};
};

// Carries every problem found with a config, one issue per line in what().
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

  private:
    std::vector<std::string> issues_;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Collects all invariant violations and throws ConfigError if any.
void validate_config(const ExperimentConfig& cfg);

// Pipeline inputs resolved from a validated config.
PhantomSpec build_phantom(const ExperimentConfig& cfg, double eps);

struct Metrics {
    double rms_orig = 0.0;
    double rms_new = 0.0;
    double sup_orig = 0.0;
    double sup_new = 0.0;
};

Metrics compute_metrics(const ProfileSeries& profile, double window_lo, double window_hi);

// Runs the pipeline and emits the requested artifacts into cfg.out_dir.
// Returns the paths of every file written, in emission order.
std::vector<std::string> run_scenario(const ExperimentConfig& cfg);

struct ConvergenceRow {
    int n_p = 0;
    double eps = 0.0;
    double angle_pi = 0.0;
    Metrics metrics;
};

struct ConvergenceFit {
    double angle_pi = 0.0;
    double slope_orig = 0.0;
    double resid_orig = 0.0;
    double slope_new = 0.0;
    double resid_new = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    std::vector<ConvergenceFit> fits;
};

// Per-eps metrics over cfg.convergence_np (at least 3 values) at the
// configured base angles, plus unweighted least-squares slopes of
// log(rms) against log(eps).
ConvergenceResult convergence_study(const ExperimentConfig& cfg);

} // namespace rtomo
