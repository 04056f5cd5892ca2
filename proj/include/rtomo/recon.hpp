#pragma once

#include <string>
#include <vector>

#include "rtomo/forward.hpp"

namespace rtomo {

// Axis-aligned reconstruction region, must lie inside the scanned field of
// view [-0.6, 0.6]^2.
struct Region {
    double x_lo = 0.0, x_hi = 0.0;
    double y_lo = 0.0, y_hi = 0.0;
};

// Hilbert-filtered data Q_k(q) = sum_j lambda(q - j) fhat(alpha_k, p_j),
// sampled per angle on a 1/16 lattice of the dimensionless detector
// coordinate q = s/eps. The full j-sum is kept: lambda decays only as t^-2,
// so truncating it would trade exactness for nothing at these sizes.
class FilteredProjections {
  public:
    static constexpr double q_step = 1.0 / 16.0;

    FilteredProjections(ScanGeometry geom, std::vector<int> starts,
                        std::vector<std::vector<double>> rows)
        : geometry_(geom), starts_(std::move(starts)), rows_(std::move(rows)) {}

    const ScanGeometry& geometry() const { return geometry_; }
    int row_start(int k) const { return starts_[size_t(k - geometry_.k_min())]; }
    const std::vector<double>& row(int k) const { return rows_[size_t(k - geometry_.k_min())]; }

    // Cubic-convolution read of Q_k at arbitrary q; throws std::out_of_range
    // when q is not covered by row k.
    double sample(int k, double q) const;

  private:
    ScanGeometry geometry_;
    std::vector<int> starts_; // per k: first lattice index, in q_step units
    std::vector<std::vector<double>> rows_;
};

FilteredProjections filter_projections(const Sinogram& sino, const Region& region);

// f_rec(x) = (delta_alpha / (2 pi eps)) * sum_k Q_k(alpha_k . x / eps).
double reconstruct_point(Vec2 x, const FilteredProjections& fp);

struct ImageGrid {
    Vec2 origin;          // center of pixel (0, 0)
    double spacing = 0.0; // pixel pitch, both axes
    int nx = 0, ny = 0;
    std::vector<double> values; // row-major, iy * nx + ix

    double& at(int ix, int iy) { return values[size_t(iy) * nx + ix]; }
    double at(int ix, int iy) const { return values[size_t(iy) * nx + ix]; }
};

ImageGrid reconstruct_grid(Vec2 origin, double spacing, int nx, int ny,
                           const FilteredProjections& fp);
ImageGrid reconstruct_grid_serial(Vec2 origin, double spacing, int nx, int ny,
                                  const FilteredProjections& fp);

// 8-bit PGM, v -> round(255 * clamp((v+1)/2, 0, 1)), top row = largest y.
void write_image_pgm(const ImageGrid& img, const std::string& path);
// Lossless CSV with a two-line header; round-trips through read_image_csv.
void write_image_csv(const ImageGrid& img, const std::string& path);
ImageGrid read_image_csv(const std::string& path);

} // namespace rtomo
