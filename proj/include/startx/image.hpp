#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "startx/star_geometry.hpp"

namespace startx {

/// n x n samples over the square [-L, L]^2.
///
/// Pixel (ix, iy) sits at (-L + (ix + 0.5) * 2L/n, -L + (iy + 0.5) * 2L/n);
/// storage is row-major with iy = 0 the bottom row (y increasing upward).
class ImageGrid {
public:
    ImageGrid(int n, double half_width);
    ImageGrid(int n, double half_width, std::vector<double> values);

    int size() const noexcept { return n_; }
    double half_width() const noexcept { return half_width_; }
    double pitch() const noexcept { return 2.0 * half_width_ / n_; }
    double center(int i) const noexcept { return -half_width_ + (i + 0.5) * pitch(); }
    Vec2 center(int ix, int iy) const noexcept { return {center(ix), center(iy)}; }

    double& operator()(int ix, int iy) { return values_[static_cast<std::size_t>(iy) * n_ + ix]; }
    double operator()(int ix, int iy) const { return values_[static_cast<std::size_t>(iy) * n_ + ix]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool same_shape(const ImageGrid& o) const noexcept {
        return n_ == o.n_ && half_width_ == o.half_width_;
    }
    double max_abs() const;

    /// Bilinear interpolation. Inside the square the edge pixels are extended
    /// (clamp to edge); outside the square the image is zero.
    double sample(double x, double y) const noexcept {
        if (x < -half_width_ || x > half_width_ || y < -half_width_ || y > half_width_) return 0.0;
        const double inv = n_ / (2.0 * half_width_);
        double fx = (x + half_width_) * inv - 0.5;
        double fy = (y + half_width_) * inv - 0.5;
        fx = std::clamp(fx, 0.0, static_cast<double>(n_ - 1));
        fy = std::clamp(fy, 0.0, static_cast<double>(n_ - 1));
        int ix = static_cast<int>(fx);
        int iy = static_cast<int>(fy);
        if (ix > n_ - 2) ix = n_ - 2;
        if (iy > n_ - 2) iy = n_ - 2;
        const double tx = fx - ix;
        const double ty = fy - iy;
        const double* row0 = values_.data() + static_cast<std::size_t>(iy) * n_ + ix;
        const double* row1 = row0 + n_;
        const double bottom = row0[0] + tx * (row0[1] - row0[0]);
        const double top = row1[0] + tx * (row1[1] - row1[0]);
        return bottom + ty * (top - bottom);
    }
    double sample(Vec2 p) const noexcept { return sample(p.x, p.y); }

private:
    int n_;
    double half_width_;
    std::vector<double> values_;
};

/// One additive ellipse: value rho inside
/// ((dx cos t + dy sin t)/A)^2 + ((-dx sin t + dy cos t)/B)^2 <= 1.
struct Ellipse {
    Vec2 center;
    double semi_a = 1.0;
    double semi_b = 1.0;
    double rotation = 0.0;  ///< radians, counter-clockwise
    double amplitude = 1.0;

    bool contains(Vec2 p) const;
};

struct PhantomSpec {
    std::vector<Ellipse> ellipses;

    void validate() const;
};

enum class SheppLoganVariant { original, modified };

/// Ten-ellipse Shepp-Logan head phantom.
PhantomSpec shepp_logan(SheppLoganVariant variant = SheppLoganVariant::modified);

/// Point-sampled: each pixel receives the summed amplitude of the ellipses
/// containing its centre.
ImageGrid rasterize(const PhantomSpec& spec, int n, double half_width);

/// exp(-|x - c|^2 / (2 sigma^2)), set to zero beyond 6 sigma.
ImageGrid gaussian_bump(Vec2 center, double sigma, int n, double half_width);

/// Root-mean-square difference over pixels with |x| < mask_radius.
double rmse(const ImageGrid& a, const ImageGrid& b, double mask_radius);

/// ||a - b|| / ||b|| over pixels with |x| < mask_radius.
double relative_l2(const ImageGrid& estimate, const ImageGrid& truth, double mask_radius);

}  // namespace startx
