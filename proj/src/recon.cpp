#include "rtomo/recon.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rtomo/kernels.hpp"

namespace rtomo {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kFov = 0.6;
} // namespace

double FilteredProjections::sample(int k, double q) const {
    const std::vector<double>& r = rows_[size_t(k - geometry_.k_min())];
    const double pos = q / q_step - starts_[size_t(k - geometry_.k_min())];
    const double fl = std::floor(pos);
    const long i = long(fl);
    if (i < 1 || i + 2 >= long(r.size()))
        throw std::out_of_range("FilteredProjections: q outside the covered grid");
    const double u = pos - fl;
    return r[i - 1] * keys_eval(u + 1.0) + r[i] * keys_eval(u) + r[i + 1] * keys_eval(u - 1.0) +
           r[i + 2] * keys_eval(u - 2.0);
}

FilteredProjections filter_projections(const Sinogram& sino, const Region& region) {
    if (!(region.x_lo <= region.x_hi) || !(region.y_lo <= region.y_hi))
        throw std::invalid_argument("filter_projections: empty region");
    const double pad = 1e-9;
    if (region.x_lo < -kFov - pad || region.x_hi > kFov + pad || region.y_lo < -kFov - pad ||
        region.y_hi > kFov + pad)
        throw std::invalid_argument("filter_projections: region outside the field of view");

    const ScanGeometry& g = sino.geometry;
    const int rows_n = g.n_theta;
    std::vector<int> starts(rows_n);
    std::vector<int> stops(rows_n);
    const double corners[4][2] = {{region.x_lo, region.y_lo},
                                  {region.x_hi, region.y_lo},
                                  {region.x_lo, region.y_hi},
                                  {region.x_hi, region.y_hi}};
    int d_min = 0, d_max = 0;
    for (int r = 0; r < rows_n; ++r) {
        const int k = g.k_min() + r;
        const double ca = std::cos(g.alpha(k)), sa = std::sin(g.alpha(k));
        double qlo = 0.0, qhi = 0.0;
        for (int c = 0; c < 4; ++c) {
            const double q = (ca * corners[c][0] + sa * corners[c][1]) / g.eps;
            if (c == 0 || q < qlo) qlo = q;
            if (c == 0 || q > qhi) qhi = q;
        }
        starts[r] = int(std::floor(qlo * 16.0)) - 4;
        stops[r] = int(std::ceil(qhi * 16.0)) + 4;
        d_min = std::min(d_min, starts[r] - 16 * g.j_max());
        d_max = std::max(d_max, stops[r] - 16 * g.j_min());
    }

    // one global filter table: every needed lambda argument sits on the same
    // 1/16 lattice as the q grids
    std::vector<double> lut(size_t(d_max - d_min + 1));
    for (size_t i = 0; i < lut.size(); ++i)
        lut[i] = lambda_kernel(double(d_min + long(i)) / 16.0);

    std::vector<std::vector<double>> out(rows_n);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows_n; ++r) {
        const int k = g.k_min() + r;
        std::vector<double>& row = out[r];
        row.assign(size_t(stops[r] - starts[r] + 1), 0.0);
        for (size_t i = 0; i < row.size(); ++i) {
            const int m = starts[r] + int(i);
            double acc = 0.0;
            for (int j = g.j_min(); j <= g.j_max(); ++j) {
                const double v = sino.at(k, j);
                if (v == 0.0) continue;
                acc += lut[size_t(m - 16 * j - d_min)] * v;
            }
            row[i] = acc;
        }
    }
    return FilteredProjections(g, std::move(starts), std::move(out));
}

double reconstruct_point(Vec2 x, const FilteredProjections& fp) {
    const ScanGeometry& g = fp.geometry();
    double acc = 0.0;
    for (int k = g.k_min(); k <= g.k_max(); ++k) {
        const double a = g.alpha(k);
        acc += fp.sample(k, (std::cos(a) * x.x + std::sin(a) * x.y) / g.eps);
    }
    return g.delta_alpha / (2.0 * kPi * g.eps) * acc;
}

ImageGrid reconstruct_grid(Vec2 origin, double spacing, int nx, int ny,
                           const FilteredProjections& fp) {
    if (!(spacing > 0.0) || nx < 1 || ny < 1)
        throw std::invalid_argument("reconstruct_grid: bad grid spec");
    ImageGrid img;
    img.origin = origin;
    img.spacing = spacing;
    img.nx = nx;
    img.ny = ny;
    img.values.assign(size_t(nx) * ny, 0.0);
    std::atomic<bool> out_of_region{false};
#pragma omp parallel for schedule(dynamic)
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            try {
                img.at(ix, iy) =
                    reconstruct_point({origin.x + ix * spacing, origin.y + iy * spacing}, fp);
            } catch (const std::out_of_range&) {
                out_of_region = true;
            }
        }
    }
    if (out_of_region)
        throw std::out_of_range("reconstruct_grid: pixel outside the filtered region");
    return img;
}

ImageGrid reconstruct_grid_serial(Vec2 origin, double spacing, int nx, int ny,
                                  const FilteredProjections& fp) {
    if (!(spacing > 0.0) || nx < 1 || ny < 1)
        throw std::invalid_argument("reconstruct_grid: bad grid spec");
    ImageGrid img;
    img.origin = origin;
    img.spacing = spacing;
    img.nx = nx;
    img.ny = ny;
    img.values.assign(size_t(nx) * ny, 0.0);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            img.at(ix, iy) = reconstruct_point({origin.x + ix * spacing, origin.y + iy * spacing}, fp);
    return img;
}

void write_image_pgm(const ImageGrid& img, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(f, "P5\n%d %d\n255\n", img.nx, img.ny);
    for (int iy = img.ny - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < img.nx; ++ix) {
            const double v = std::clamp((img.at(ix, iy) + 1.0) / 2.0, 0.0, 1.0);
            std::fputc(int(std::lround(255.0 * v)), f);
        }
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);
}

void write_image_csv(const ImageGrid& img, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(f, "# image v1\n");
    std::fprintf(f, "# nx=%d ny=%d spacing=%.17g origin=%.17g,%.17g\n", img.nx, img.ny,
                 img.spacing, img.origin.x, img.origin.y);
    for (int iy = 0; iy < img.ny; ++iy) {
        for (int ix = 0; ix < img.nx; ++ix)
            std::fprintf(f, ix == 0 ? "%.17g" : ",%.17g", img.at(ix, iy));
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);
}

ImageGrid read_image_csv(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    char line[128];
    if (!std::fgets(line, sizeof line, f) || std::string(line) != "# image v1\n") {
        std::fclose(f);
        throw std::runtime_error("not an image file: " + path);
    }
    ImageGrid img;
    if (!std::fgets(line, sizeof line, f) ||
        std::sscanf(line, "# nx=%d ny=%d spacing=%lg origin=%lg,%lg", &img.nx, &img.ny,
                    &img.spacing, &img.origin.x, &img.origin.y) != 5 ||
        img.nx < 1 || img.ny < 1 || !(img.spacing > 0.0)) {
        std::fclose(f);
        throw std::runtime_error("bad image header: " + path);
    }
    img.values.assign(size_t(img.nx) * img.ny, 0.0);
    for (size_t i = 0; i < img.values.size(); ++i) {
        if (std::fscanf(f, i % size_t(img.nx) == 0 ? " %lg" : " ,%lg", &img.values[i]) != 1) {
            std::fclose(f);
            throw std::runtime_error("truncated image data: " + path);
        }
    }
    std::fclose(f);
    return img;
}

} // namespace rtomo
