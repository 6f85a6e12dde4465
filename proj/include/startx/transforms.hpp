#pragma once

#include <optional>
#include <span>
#include <vector>

#include "startx/image.hpp"
#include "startx/star_geometry.hpp"

namespace startx {

/// Radon-domain samples. angles are line normals psi_k in [0, pi);
/// offsets are uniformly spaced on [-t_max, t_max]; values are K x T row-major.
struct Sinogram {
    std::vector<double> angles;
    std::vector<double> offsets;
    std::vector<double> values;

    /// K angles k*pi/K and T offsets spanning [-t_max, t_max], zero values.
    static Sinogram uniform(int num_angles, int num_offsets, double t_max);

    std::size_t num_angles() const noexcept { return angles.size(); }
    std::size_t num_offsets() const noexcept { return offsets.size(); }
    double dt() const { return offsets.size() > 1 ? offsets[1] - offsets[0] : 0.0; }
    double& at(std::size_t k, std::size_t l) { return values[k * offsets.size() + l]; }
    double at(std::size_t k, std::size_t l) const { return values[k * offsets.size() + l]; }
    std::span<double> row(std::size_t k) { return {values.data() + k * offsets.size(), offsets.size()}; }
    std::span<const double> row(std::size_t k) const {
        return {values.data() + k * offsets.size(), offsets.size()};
    }
    double max_abs() const;
    void validate() const;
};

/// Full line integrals p(u) = int f(u*perp(gamma) + s*gamma) ds of the
/// source along one ray direction, sampled uniformly in u. Beyond the support
/// disc the divergent beam field equals p(<x, perp(gamma)>) behind the support
/// and zero ahead of it.
class StripProfile {
public:
    StripProfile() = default;
    StripProfile(Vec2 direction, double u_min, double du, std::vector<double> samples);

    Vec2 direction() const noexcept { return dir_; }
    double u_min() const noexcept { return u_min_; }
    double u_max() const noexcept { return u_min_ + du_ * static_cast<double>(p_.size() - 1); }
    std::span<const double> samples() const noexcept { return p_; }

    double value(double u) const;
    /// Exact integral of the piecewise-linear profile from u_min to u.
    double cumulative(double u) const;

private:
    Vec2 dir_;
    double u_min_ = 0.0;
    double du_ = 1.0;
    std::vector<double> p_;
    std::vector<double> cum_;
};

/// Star transform samples on an enlarged grid, plus what is needed to
/// continue the field beyond that grid.
struct StarField {
    ImageGrid grid;
    double ext_factor = 1.0;
    /// Half-width of the region carrying supp f.
    double inner_half_width = 1.0;
    /// Source config (weights included); required for tail continuation.
    std::optional<StarConfig> config;
    /// One entry per ray of config; empty disables tail continuation.
    std::vector<StripProfile> profiles;
};

/// Axis-aligned box that contains every nonzero pixel of an image, padded by one pixel.
struct SupportBox {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    bool empty = true;

    static SupportBox of(const ImageGrid& f);
    /// Radius of the smallest origin-centred disc holding the box.
    double radius() const;
};

/// Parameter interval [t0, t1] on which p + t*d lies in the box; nullopt if it misses.
std::optional<std::pair<double, double>> clip_line(Vec2 p, Vec2 d, double xmin, double xmax,
                                                   double ymin, double ymax);

/// int_0^inf f(x + t gamma) dt for the bilinear interpolant of f, integrated
/// exactly cell by cell and truncated to the support box of f.
double divergent_beam(const ImageGrid& f, Vec2 gamma, Vec2 x);
double divergent_beam(const ImageGrid& f, const SupportBox& box, Vec2 gamma, Vec2 x);

/// Divergent beam transform evaluated at every pixel centre of an n x n grid of half-width L.
ImageGrid divergent_beam_field(const ImageGrid& f, Vec2 gamma, int n, double half_width);

/// Size of the enlarged grid: ceil(ext * n), bumped so the inner grid's pixel centres
/// stay aligned with the outer grid's.
int extended_size(int n, double ext_factor);

/// Sf = sum c_i X_{gamma_i} f at every pixel of the enlarged grid (same pitch,
/// extended_size(n, ext) pixels per side). Also records per-ray strip profiles.
StarField star_transform(const ImageGrid& f, const StarConfig& cfg, double ext_factor = 3.0);

/// Strip profiles computed from the source image directly.
std::vector<StripProfile> strip_profiles_from_source(const ImageGrid& f, const StarConfig& cfg);

/// Strip profiles read off the field near the far edge of the grid, for fields
/// that arrive without their source (measured data). Assumes the strips of
/// distinct rays no longer overlap at the grid edge.
std::vector<StripProfile> strip_profiles_from_field(const ImageGrid& field, const StarConfig& cfg,
                                                    double inner_half_width);

struct RadonOptions {
    /// Continue a StarField beyond its grid using its strip profiles.
    bool continue_strips = true;
};

/// Line integrals of the bilinear interpolant along l(psi, t) = {x : <x, psi> = t};
/// t_max = sqrt(2) * L.
Sinogram radon(const ImageGrid& g, int num_angles, int num_offsets);
/// Offsets span the inner square only: t_max = sqrt(2) * inner_half_width. With
/// strip continuation the grid is integrated inside the inner square (plus one
/// pixel) and the strip profiles supply the rest of each line.
Sinogram radon(const StarField& field, int num_angles, int num_offsets, const RadonOptions& opts = {});

/// Line integral of g along one line.
double line_integral(const ImageGrid& g, Vec2 psi, double t);

/// F_psi(t): sum of f * pitch^2 over pixels with <x, psi> <= t.
double half_plane(const ImageGrid& f, Vec2 psi, double t);

}  // namespace startx
