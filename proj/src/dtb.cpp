#include "rtomo/dtb.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include "rtomo/kernels.hpp"

namespace rtomo {

namespace {

// Midpoint-rule weights K(|z|)/divisor^2 on the (a,b) offset grid
// z = ((a+0.5)/divisor - 3, (b+0.5)/divisor - 3), cached per divisor.
// The eps-free grid makes the table reusable across phantoms.
const std::vector<double>& dtb_weights(int divisor) {
    static std::map<int, std::vector<double>> cache;
    static std::mutex guard;
    std::lock_guard<std::mutex> lock(guard);
    auto it = cache.find(divisor);
    if (it != cache.end()) return it->second;

    const KernelSet& ks = KernelSet::instance();
    const int n = 6 * divisor;
    std::vector<double> w(size_t(n) * n);
    for (int a = 0; a < n; ++a) {
        const double zx = (double(a) + 0.5) / double(divisor) - 3.0;
        for (int b = 0; b < n; ++b) {
            const double zy = (double(b) + 0.5) / double(divisor) - 3.0;
            w[size_t(a) * n + b] = ks.k_radial(std::hypot(zx, zy)) / double(divisor * divisor);
        }
    }
    return cache.emplace(divisor, std::move(w)).first->second;
}

} // namespace

double dtb_original(double s_hat, const LocalFrame& frame, const PhantomSpec& phantom) {
    const KernelSet& ks = KernelSet::instance();
    const double df = phantom.f_in - phantom.f_out;
    if (phantom.mode == PhantomMode::ShellOnly)
        return df * ks.band_response(s_hat, frame.h0_local);
    return phantom.f_out + df * (1.0 - ks.edge_response(s_hat - frame.h0_local));
}

double dtb_new(Vec2 x, const PhantomSpec& phantom, int divisor) {
    if (divisor < 1) throw std::invalid_argument("dtb_new: divisor must be positive");
    const std::vector<double>& w = dtb_weights(divisor);
    const int n = 6 * divisor;
    double acc = 0.0;
    size_t idx = 0;
    for (int a = 0; a < n; ++a) {
        const double zx = (double(a) + 0.5) / double(divisor) - 3.0;
        for (int b = 0; b < n; ++b, ++idx) {
            const double wq = w[idx];
            if (wq == 0.0) continue;
            const double zy = (double(b) + 0.5) / double(divisor) - 3.0;
            acc += wq * eval_f({x.x + phantom.eps * zx, x.y + phantom.eps * zy}, phantom);
        }
    }
    return acc;
}

ProfileSeries extract_profiles(const ProfileSpec& spec, const PhantomSpec& phantom,
                               const FilteredProjections& fp) {
    if (!(spec.step > 0.0) || !(spec.s_hat_lo < spec.s_hat_hi))
        throw std::invalid_argument("extract_profiles: bad profile range");

    const int n = int(std::ceil((spec.s_hat_hi - spec.s_hat_lo) / spec.step)) + 1;
    ProfileSeries out;
    out.s_hat.resize(size_t(n));
    out.recon.resize(size_t(n));
    out.dtb_original.resize(size_t(n));
    out.dtb_new.resize(size_t(n));
    out.ideal.resize(size_t(n));

    (void)dtb_weights(64); // warm the shared cache outside the parallel region

    std::atomic<bool> out_of_region{false};
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        const double sh = spec.s_hat_lo + double(i) * spec.step;
        const Vec2 x = spec.frame.x0 + (phantom.eps * sh) * spec.frame.outward_unit;
        out.s_hat[size_t(i)] = sh;
        try {
            out.recon[size_t(i)] = reconstruct_point(x, fp);
        } catch (const std::out_of_range&) {
            out_of_region = true;
        }
        out.dtb_original[size_t(i)] = dtb_original(sh, spec.frame, phantom);
        out.dtb_new[size_t(i)] = dtb_new(x, phantom);
        out.ideal[size_t(i)] = eval_f(x, phantom);
    }
    if (out_of_region)
        throw std::out_of_range("extract_profiles: profile leaves the filtered region");
    return out;
}

void write_profile_csv(const ProfileSeries& series, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(f, "s_hat,recon,dtb_original,dtb_new,ideal\n");
    for (size_t i = 0; i < series.s_hat.size(); ++i) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", series.s_hat[i], series.recon[i],
                     series.dtb_original[i], series.dtb_new[i], series.ideal[i]);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);
}

ProfileSeries read_profile_csv(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    char line[256];
    if (!std::fgets(line, sizeof line, f) ||
        std::string(line) != "s_hat,recon,dtb_original,dtb_new,ideal\n") {
        std::fclose(f);
        throw std::runtime_error("not a profile file: " + path);
    }
    ProfileSeries out;
    double v[5];
    int got;
    while ((got = std::fscanf(f, " %lg,%lg,%lg,%lg,%lg", &v[0], &v[1], &v[2], &v[3], &v[4])) == 5) {
        out.s_hat.push_back(v[0]);
        out.recon.push_back(v[1]);
        out.dtb_original.push_back(v[2]);
        out.dtb_new.push_back(v[3]);
        out.ideal.push_back(v[4]);
    }
    std::fclose(f);
    if (got != EOF || out.s_hat.empty())
        throw std::runtime_error("malformed profile data: " + path);
    return out;
}

} // namespace rtomo
