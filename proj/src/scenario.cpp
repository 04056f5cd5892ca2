#include "rtomo/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "rtomo/boundary.hpp"
#include "rtomo/forward.hpp"
#include "rtomo/recon.hpp"

namespace rtomo {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

const std::set<std::string> kArtifactNames = {"sinogram",   "profiles", "metrics",
                                              "roi_images", "image",    "dtb_models"};

std::string join_issues(const std::vector<std::string>& issues) {
    std::string out = "invalid config:";
    for (const std::string& s : issues) {
        out += "\n  - ";
        out += s;
    }
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool to_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

bool to_int(const std::string& s, int& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    long v = std::strtol(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) return false;
    if (v < INT_MIN || v > INT_MAX) return false;
    out = int(v);
    return true;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) parts.push_back(trim(cur));
    if (!s.empty() && s.back() == ',') parts.push_back("");
    return parts;
}

// Shortest decimal that parses back to the same double.
std::string fmt_num(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt_num(v[i]);
    }
    return out;
}

struct Parser {
    ExperimentConfig cfg;
    std::vector<std::string> issues;
    std::set<std::string> seen;
    std::string section;
    int line_no = 0;

    void issue(const std::string& msg) {
        issues.push_back("line " + std::to_string(line_no) + ": " + msg);
    }

    bool once(const std::string& key) {
        if (!seen.insert(section + "." + key).second) {
            issue("duplicate key '" + key + "' in [" + section + "]");
            return false;
        }
        return true;
    }

    void number(const std::string& key, const std::string& value, double& dst) {
        if (!once(key)) return;
        double v;
        if (!to_double(value, v)) {
            issue("'" + key + "' expects a number, got '" + value + "'");
            return;
        }
        dst = v;
    }

    void number_opt(const std::string& key, const std::string& value, std::optional<double>& dst) {
        if (!once(key)) return;
        double v;
        if (!to_double(value, v)) {
            issue("'" + key + "' expects a number, got '" + value + "'");
            return;
        }
        dst = v;
    }

    void pair(const std::string& key, const std::string& value, double& lo, double& hi) {
        if (!once(key)) return;
        std::vector<std::string> parts = split_list(value);
        double a, b;
        if (parts.size() != 2 || !to_double(parts[0], a) || !to_double(parts[1], b)) {
            issue("'" + key + "' expects two numbers, got '" + value + "'");
            return;
        }
        lo = a;
        hi = b;
    }

    void handle(const std::string& key, const std::string& value) {
        if (section == "geometry") {
            if (key == "n_p") {
                if (!once(key)) return;
                if (!to_int(value, cfg.n_p)) issue("'n_p' expects an integer, got '" + value + "'");
            } else {
                issue("unknown key '" + key + "' in [geometry]");
            }
        } else if (section == "phantom") {
            if (key == "center") {
                pair(key, value, cfg.center.x, cfg.center.y);
            } else if (key == "radius") {
                number(key, value, cfg.radius);
            } else if (key == "f_in") {
                number(key, value, cfg.f_in);
            } else if (key == "f_out") {
                number(key, value, cfg.f_out);
            } else if (key == "mode") {
                if (once(key)) cfg.mode = value;
            } else {
                issue("unknown key '" + key + "' in [phantom]");
            }
        } else if (section == "perturbation") {
            if (key == "kind") {
                if (once(key)) cfg.perturbation.kind = value;
            } else if (key == "h") {
                number_opt(key, value, cfg.perturbation.h);
            } else if (key == "amplitude") {
                number_opt(key, value, cfg.perturbation.amplitude);
            } else if (key == "frequency") {
                number_opt(key, value, cfg.perturbation.frequency);
            } else if (key == "gamma") {
                number_opt(key, value, cfg.perturbation.gamma);
            } else if (key == "ratio") {
                number_opt(key, value, cfg.perturbation.ratio);
            } else {
                issue("unknown key '" + key + "' in [perturbation]");
            }
        } else if (section == "profiles") {
            if (key == "angles_pi") {
                if (!once(key)) return;
                cfg.angles_pi.clear();
                for (const std::string& part : split_list(value)) {
                    double v;
                    if (!to_double(part, v)) {
                        issue("'angles_pi' expects numbers, got '" + part + "'");
                        return;
                    }
                    cfg.angles_pi.push_back(v);
                }
            } else if (key == "range") {
                pair(key, value, cfg.profile_lo, cfg.profile_hi);
            } else if (key == "step") {
                number(key, value, cfg.profile_step);
            } else if (key == "window") {
                pair(key, value, cfg.window_lo, cfg.window_hi);
            } else {
                issue("unknown key '" + key + "' in [profiles]");
            }
        } else if (section == "convergence") {
            if (key == "n_p") {
                if (!once(key)) return;
                cfg.convergence_np.clear();
                for (const std::string& part : split_list(value)) {
                    int v;
                    if (!to_int(part, v)) {
                        issue("'n_p' expects integers, got '" + part + "'");
                        return;
                    }
                    cfg.convergence_np.push_back(v);
                }
            } else {
                issue("unknown key '" + key + "' in [convergence]");
            }
        } else if (section == "output") {
            if (key == "dir") {
                if (once(key)) cfg.out_dir = value;
            } else if (key == "artifacts") {
                if (!once(key)) return;
                cfg.artifacts.clear();
                for (const std::string& part : split_list(value)) cfg.artifacts.push_back(part);
            } else {
                issue("unknown key '" + key + "' in [output]");
            }
        } else {
            issue("key '" + key + "' outside any known section");
        }
    }
};

PerturbationSpec build_perturbation(const PerturbationConfig& p) {
    if (p.kind == "zero") return PerturbationSpec::zero();
    if (p.kind == "constant") return PerturbationSpec::constant(p.h.value_or(0.0));
    if (p.kind == "sinusoid")
        return PerturbationSpec::sinusoid(p.amplitude.value_or(2.0), p.frequency.value_or(0.71));
    if (p.kind == "wsine")
        return PerturbationSpec::weierstrass_sine(p.gamma.value_or(0.5), p.amplitude.value_or(5.0),
                                                  p.ratio.value_or(0.0));
    if (p.kind == "schwarz") return PerturbationSpec::schwarz(p.gamma.value_or(0.5));
    throw std::invalid_argument("unknown perturbation kind '" + p.kind + "'");
}

void check_kind_keys(const ExperimentConfig& cfg, std::vector<std::string>& issues) {
    const PerturbationConfig& p = cfg.perturbation;
    auto reject = [&](bool set, const char* key) {
        if (set)
            issues.push_back(std::string("perturbation key '") + key + "' does not apply to kind '" +
                             p.kind + "'");
    };
    if (p.kind == "zero") {
        reject(p.h.has_value(), "h");
        reject(p.amplitude.has_value(), "amplitude");
        reject(p.frequency.has_value(), "frequency");
        reject(p.gamma.has_value(), "gamma");
        reject(p.ratio.has_value(), "ratio");
    } else if (p.kind == "constant") {
        if (!p.h.has_value()) issues.push_back("perturbation kind 'constant' requires 'h'");
        reject(p.amplitude.has_value(), "amplitude");
        reject(p.frequency.has_value(), "frequency");
        reject(p.gamma.has_value(), "gamma");
        reject(p.ratio.has_value(), "ratio");
    } else if (p.kind == "sinusoid") {
        reject(p.h.has_value(), "h");
        reject(p.gamma.has_value(), "gamma");
        reject(p.ratio.has_value(), "ratio");
    } else if (p.kind == "wsine") {
        reject(p.h.has_value(), "h");
        reject(p.frequency.has_value(), "frequency");
    } else if (p.kind == "schwarz") {
        reject(p.h.has_value(), "h");
        reject(p.amplitude.has_value(), "amplitude");
        reject(p.frequency.has_value(), "frequency");
        reject(p.ratio.has_value(), "ratio");
    } else {
        issues.push_back("unknown perturbation kind '" + p.kind + "'");
    }
}

bool valid_np(int n_p) { return n_p >= 5 && n_p % 2 == 1; }

std::string angle_tag(double a_pi) { return "a" + fmt_num(a_pi) + "pi"; }

bool wants(const ExperimentConfig& cfg, const char* name) {
    return std::find(cfg.artifacts.begin(), cfg.artifacts.end(), name) != cfg.artifacts.end();
}

void write_metrics_csv(const std::string& path, double eps, const std::vector<double>& angles,
                       const std::vector<Metrics>& rows) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open file for writing: " + path);
    std::fprintf(f, "eps,angle,rms_orig,rms_new,sup_orig,sup_new\n");
    for (size_t i = 0; i < rows.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", eps, angles[i], rows[i].rms_orig,
                     rows[i].rms_new, rows[i].sup_orig, rows[i].sup_new);
    std::fclose(f);
}

void write_models_csv(const std::string& path, const ProfileSeries& s) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open file for writing: " + path);
    std::fprintf(f, "s_hat,dtb_original,dtb_new,ideal\n");
    for (size_t i = 0; i < s.s_hat.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", s.s_hat[i], s.dtb_original[i], s.dtb_new[i],
                     s.ideal[i]);
    std::fclose(f);
}

Region square_region(Vec2 c, double half) {
    return Region{c.x - half, c.x + half, c.y - half, c.y + half};
}

void fit_loglog(const std::vector<double>& eps, const std::vector<double>& rms, double& slope,
                double& resid) {
    slope = std::numeric_limits<double>::quiet_NaN();
    resid = std::numeric_limits<double>::quiet_NaN();
    const size_t n = eps.size();
    std::vector<double> lx(n), ly(n);
    for (size_t i = 0; i < n; ++i) {
        if (!(eps[i] > 0.0) || !(rms[i] > 0.0)) return;
        lx[i] = std::log(eps[i]);
        ly[i] = std::log(rms[i]);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double det = double(n) * sxx - sx * sx;
    if (det == 0.0) return;
    slope = (double(n) * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / double(n);
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (slope * lx[i] + intercept);
        acc += r * r;
    }
    resid = std::sqrt(acc / double(n));
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ExperimentConfig parse_config(const std::string& text) {
    Parser p;
    std::stringstream ss(text);
    std::string raw;
    while (std::getline(ss, raw)) {
        ++p.line_no;
        std::string line = raw;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                p.issue("malformed section header '" + line + "'");
                continue;
            }
            p.section = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> kSections = {"geometry",    "phantom", "perturbation",
                                                            "profiles",    "convergence", "output"};
            if (!kSections.count(p.section)) {
                p.issue("unknown section [" + p.section + "]");
                p.section.clear();
            }
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            p.issue("expected 'key = value', got '" + line + "'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            p.issue("missing key before '='");
            continue;
        }
        p.handle(key, value);
    }
    if (!p.issues.empty()) throw ConfigError(std::move(p.issues));
    return p.cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::string out;
    out += "[geometry]\nn_p = " + std::to_string(cfg.n_p) + "\n\n";
    out += "[phantom]\n";
    out += "center = " + fmt_num(cfg.center.x) + ", " + fmt_num(cfg.center.y) + "\n";
    out += "radius = " + fmt_num(cfg.radius) + "\n";
    out += "f_in = " + fmt_num(cfg.f_in) + "\n";
    out += "f_out = " + fmt_num(cfg.f_out) + "\n";
    out += "mode = " + cfg.mode + "\n\n";
    out += "[perturbation]\nkind = " + cfg.perturbation.kind + "\n";
    if (cfg.perturbation.h) out += "h = " + fmt_num(*cfg.perturbation.h) + "\n";
    if (cfg.perturbation.amplitude)
        out += "amplitude = " + fmt_num(*cfg.perturbation.amplitude) + "\n";
    if (cfg.perturbation.frequency)
        out += "frequency = " + fmt_num(*cfg.perturbation.frequency) + "\n";
    if (cfg.perturbation.gamma) out += "gamma = " + fmt_num(*cfg.perturbation.gamma) + "\n";
    if (cfg.perturbation.ratio) out += "ratio = " + fmt_num(*cfg.perturbation.ratio) + "\n";
    out += "\n[profiles]\n";
    out += "angles_pi = " + fmt_list(cfg.angles_pi) + "\n";
    out += "range = " + fmt_num(cfg.profile_lo) + ", " + fmt_num(cfg.profile_hi) + "\n";
    out += "step = " + fmt_num(cfg.profile_step) + "\n";
    out += "window = " + fmt_num(cfg.window_lo) + ", " + fmt_num(cfg.window_hi) + "\n";
    if (!cfg.convergence_np.empty()) {
        out += "\n[convergence]\nn_p = ";
        for (size_t i = 0; i < cfg.convergence_np.size(); ++i) {
            if (i) out += ", ";
            out += std::to_string(cfg.convergence_np[i]);
        }
        out += "\n";
    }
    out += "\n[output]\n";
    out += "dir = " + cfg.out_dir + "\n";
    out += "artifacts = ";
    for (size_t i = 0; i < cfg.artifacts.size(); ++i) {
        if (i) out += ", ";
        out += cfg.artifacts[i];
    }
    out += "\n";
    return out;
}

void validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> issues;
    if (!valid_np(cfg.n_p))
        issues.push_back("n_p must be an odd integer >= 5, got " + std::to_string(cfg.n_p));
    if (cfg.mode != "full" && cfg.mode != "shell")
        issues.push_back("mode must be 'full' or 'shell', got '" + cfg.mode + "'");
    check_kind_keys(cfg, issues);
    if (cfg.angles_pi.empty()) issues.push_back("angles_pi must list at least one base angle");
    for (double a : cfg.angles_pi)
        if (!std::isfinite(a)) issues.push_back("angles_pi entries must be finite");
    {
        std::set<std::string> tags;
        for (double a : cfg.angles_pi)
            if (!tags.insert(angle_tag(a)).second)
                issues.push_back("duplicate profile angle " + fmt_num(a));
    }
    if (!(cfg.profile_step > 0.0))
        issues.push_back("profile step must be positive, got " + fmt_num(cfg.profile_step));
    if (!(cfg.profile_lo < cfg.profile_hi))
        issues.push_back("profile range must satisfy lo < hi");
    if (!(cfg.window_lo < cfg.window_hi))
        issues.push_back("metric window must satisfy lo < hi");
    else if (cfg.window_lo < cfg.profile_lo || cfg.window_hi > cfg.profile_hi)
        issues.push_back("metric window must lie inside the profile range");
    if (cfg.out_dir.empty()) issues.push_back("output dir must not be empty");
    if (cfg.artifacts.empty()) issues.push_back("artifacts must list at least one output");
    {
        std::set<std::string> seen;
        for (const std::string& a : cfg.artifacts) {
            if (!kArtifactNames.count(a))
                issues.push_back("unknown artifact '" + a + "'");
            else if (!seen.insert(a).second)
                issues.push_back("duplicate artifact '" + a + "'");
        }
    }
    for (size_t i = 0; i < cfg.convergence_np.size(); ++i) {
        const int np = cfg.convergence_np[i];
        if (!valid_np(np))
            issues.push_back("convergence n_p must be odd integers >= 5, got " + std::to_string(np));
        if (i > 0 && cfg.convergence_np[i] <= cfg.convergence_np[i - 1])
            issues.push_back("convergence n_p list must be strictly increasing");
    }
    if (valid_np(cfg.n_p) && issues.empty()) {
        try {
            (void)build_phantom(cfg, 1.2 / double(cfg.n_p - 1));
        } catch (const std::invalid_argument& e) {
            issues.push_back(e.what());
        }
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

PhantomSpec build_phantom(const ExperimentConfig& cfg, double eps) {
    PhantomSpec spec;
    spec.center = cfg.center;
    spec.radius = cfg.radius;
    spec.f_in = cfg.f_in;
    spec.f_out = cfg.f_out;
    spec.eps = eps;
    spec.mode = cfg.mode == "shell" ? PhantomMode::ShellOnly : PhantomMode::Full;
    spec.perturbation = build_perturbation(cfg.perturbation);
    validate_phantom(spec);
    return spec;
}

Metrics compute_metrics(const ProfileSeries& profile, double window_lo, double window_hi) {
    if (!(window_lo < window_hi))
        throw std::invalid_argument("compute_metrics: window must satisfy lo < hi");
    const size_t n = profile.s_hat.size();
    if (profile.recon.size() != n || profile.dtb_original.size() != n ||
        profile.dtb_new.size() != n)
        throw std::invalid_argument("compute_metrics: ragged profile series");
    Metrics m;
    size_t used = 0;
    double acc_orig = 0.0, acc_new = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double sh = profile.s_hat[i];
        if (sh < window_lo || sh > window_hi) continue;
        const double d_orig = profile.recon[i] - profile.dtb_original[i];
        const double d_new = profile.recon[i] - profile.dtb_new[i];
        acc_orig += d_orig * d_orig;
        acc_new += d_new * d_new;
        m.sup_orig = std::max(m.sup_orig, std::fabs(d_orig));
        m.sup_new = std::max(m.sup_new, std::fabs(d_new));
        ++used;
    }
    if (used == 0)
        throw std::invalid_argument("compute_metrics: window contains no profile samples");
    m.rms_orig = std::sqrt(acc_orig / double(used));
    m.rms_new = std::sqrt(acc_new / double(used));
    return m;
}

std::vector<std::string> run_scenario(const ExperimentConfig& cfg) {
    validate_config(cfg);
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + cfg.out_dir);

    const ScanGeometry geom = ScanGeometry::make(cfg.n_p);
    const PhantomSpec phantom = build_phantom(cfg, geom.eps);
    const Sinogram sino = simulate_sinogram(phantom, geom);

    const std::string np_tag = "np" + std::to_string(cfg.n_p);
    std::vector<std::string> manifest;
    auto emit = [&](const std::string& name) {
        manifest.push_back(cfg.out_dir + "/" + name);
        return manifest.back();
    };

    if (wants(cfg, "sinogram")) write_sinogram(sino, emit("sinogram_" + np_tag + ".csv"));

    const bool needs_profiles =
        wants(cfg, "profiles") || wants(cfg, "metrics") || wants(cfg, "dtb_models");
    const bool needs_roi = wants(cfg, "roi_images");
    std::vector<Metrics> metric_rows;

    for (double a_pi : cfg.angles_pi) {
        if (!needs_profiles && !needs_roi) break;
        const LocalFrame frame = local_frame(a_pi * kPi + kPi, phantom);
        const std::string tag = np_tag + "_" + angle_tag(a_pi);

        double half = (std::max(std::fabs(cfg.profile_lo), std::fabs(cfg.profile_hi)) + 2.0) *
                      geom.eps;
        if (needs_roi) half = std::max(half, 52.0 * geom.eps);
        const FilteredProjections fp = filter_projections(sino, square_region(frame.x0, half));

        if (needs_profiles) {
            ProfileSpec pspec;
            pspec.frame = frame;
            pspec.s_hat_lo = cfg.profile_lo;
            pspec.s_hat_hi = cfg.profile_hi;
            pspec.step = cfg.profile_step;
            const ProfileSeries series = extract_profiles(pspec, phantom, fp);
            if (wants(cfg, "profiles")) write_profile_csv(series, emit("profile_" + tag + ".csv"));
            if (wants(cfg, "dtb_models")) write_models_csv(emit("dtb_" + tag + ".csv"), series);
            if (wants(cfg, "metrics"))
                metric_rows.push_back(compute_metrics(series, cfg.window_lo, cfg.window_hi));
        }
        if (needs_roi) {
            const Vec2 origin{frame.x0.x - 50.0 * geom.eps, frame.x0.y - 50.0 * geom.eps};
            const ImageGrid roi = reconstruct_grid(origin, geom.eps, 101, 101, fp);
            write_image_pgm(roi, emit("roi_" + tag + ".pgm"));
            write_image_csv(roi, emit("roi_" + tag + ".csv"));
        }
    }

    if (wants(cfg, "metrics"))
        write_metrics_csv(emit("metrics_" + np_tag + ".csv"), geom.eps, cfg.angles_pi, metric_rows);

    if (wants(cfg, "image")) {
        const double span = 0.6;
        const FilteredProjections fp =
            filter_projections(sino, Region{-span, span, -span, span});
        const ImageGrid img =
            reconstruct_grid(Vec2{-span, -span}, geom.eps, cfg.n_p, cfg.n_p, fp);
        write_image_pgm(img, emit("image_" + np_tag + ".pgm"));
        write_image_csv(img, emit("image_" + np_tag + ".csv"));
    }
    return manifest;
}

ConvergenceResult convergence_study(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.convergence_np.size() < 3)
        throw std::invalid_argument("convergence study needs at least 3 detector counts");

    ConvergenceResult result;
    std::map<double, std::pair<std::vector<double>, std::vector<Metrics>>> per_angle;
    for (int np : cfg.convergence_np) {
        const ScanGeometry geom = ScanGeometry::make(np);
        const PhantomSpec phantom = build_phantom(cfg, geom.eps);
        const Sinogram sino = simulate_sinogram(phantom, geom);
        for (double a_pi : cfg.angles_pi) {
            const LocalFrame frame = local_frame(a_pi * kPi + kPi, phantom);
            const double half =
                (std::max(std::fabs(cfg.profile_lo), std::fabs(cfg.profile_hi)) + 2.0) * geom.eps;
            const FilteredProjections fp =
                filter_projections(sino, square_region(frame.x0, half));
            ProfileSpec pspec;
            pspec.frame = frame;
            pspec.s_hat_lo = cfg.profile_lo;
            pspec.s_hat_hi = cfg.profile_hi;
            pspec.step = cfg.profile_step;
            const ProfileSeries series = extract_profiles(pspec, phantom, fp);
            const Metrics m = compute_metrics(series, cfg.window_lo, cfg.window_hi);
            result.rows.push_back(ConvergenceRow{np, geom.eps, a_pi, m});
            per_angle[a_pi].first.push_back(geom.eps);
            per_angle[a_pi].second.push_back(m);
        }
    }
    for (double a_pi : cfg.angles_pi) {
        const auto& [eps_list, metrics] = per_angle[a_pi];
        std::vector<double> rms_orig, rms_new;
        for (const Metrics& m : metrics) {
            rms_orig.push_back(m.rms_orig);
            rms_new.push_back(m.rms_new);
        }
        ConvergenceFit fit;
        fit.angle_pi = a_pi;
        fit_loglog(eps_list, rms_orig, fit.slope_orig, fit.resid_orig);
        fit_loglog(eps_list, rms_new, fit.slope_new, fit.resid_new);
        result.fits.push_back(fit);
    }
    return result;
}

} // namespace rtomo
