#include "startx/image.hpp"

#include <string>

#include "startx/error.hpp"

namespace startx {

ImageGrid::ImageGrid(int n, double half_width)
    : ImageGrid(n, half_width, std::vector<double>(static_cast<std::size_t>(n > 0 ? n : 0) * (n > 0 ? n : 0), 0.0)) {}

ImageGrid::ImageGrid(int n, double half_width, std::vector<double> values)
    : n_(n), half_width_(half_width), values_(std::move(values)) {
    if (n < 8) throw Error("image grid: n must be >= 8 (got " + std::to_string(n) + ")");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw Error("image grid: half-width must be positive");
    }
    if (values_.size() != static_cast<std::size_t>(n) * n) {
        throw Error("image grid: expected " + std::to_string(n * n) + " values, got " +
                    std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error("image grid: non-finite value");
    }
}

double ImageGrid::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool Ellipse::contains(Vec2 p) const {
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    const double c = std::cos(rotation), s = std::sin(rotation);
    const double u = (dx * c + dy * s) / semi_a;
    const double v = (-dx * s + dy * c) / semi_b;
    return u * u + v * v <= 1.0;
}

void PhantomSpec::validate() const {
    for (const auto& e : ellipses) {
        if (!(e.semi_a > 0.0) || !(e.semi_b > 0.0)) {
            throw Error("phantom: ellipse semi-axes must be positive");
        }
    }
}

PhantomSpec shepp_logan(SheppLoganVariant variant) {
    // Geometry from Toft's table. Original amplitudes are Shepp and Logan's
    // 1974 values; the modified set is the high-contrast variant (outer skull
    // 1.0, brain 0.2 after the -0.8 overlay).
    constexpr double deg = kPi / 180.0;
    const bool orig = variant == SheppLoganVariant::original;
    const double a0 = orig ? 2.0 : 1.0, a1 = orig ? -0.98 : -0.8;
    const double a2 = orig ? -0.02 : -0.2, a3 = orig ? 0.01 : 0.1;
    return PhantomSpec{{
        {{0.0, 0.0}, 0.69, 0.92, 0.0, a0},
        {{0.0, -0.0184}, 0.6624, 0.874, 0.0, a1},
        {{0.22, 0.0}, 0.11, 0.31, -18.0 * deg, a2},
        {{-0.22, 0.0}, 0.16, 0.41, 18.0 * deg, a2},
        {{0.0, 0.35}, 0.21, 0.25, 0.0, a3},
        {{0.0, 0.1}, 0.046, 0.046, 0.0, a3},
        {{0.0, -0.1}, 0.046, 0.046, 0.0, a3},
        {{-0.08, -0.605}, 0.046, 0.023, 0.0, a3},
        {{0.0, -0.605}, 0.023, 0.023, 0.0, a3},
        {{0.06, -0.605}, 0.023, 0.046, 0.0, a3},
    }};
}

ImageGrid rasterize(const PhantomSpec& spec, int n, double half_width) {
    spec.validate();
    ImageGrid img(n, half_width);
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const Vec2 p = img.center(ix, iy);
            double v = 0.0;
            for (const auto& e : spec.ellipses) {
                if (e.contains(p)) v += e.amplitude;
            }
            img(ix, iy) = v;
        }
    }
    return img;
}

ImageGrid gaussian_bump(Vec2 center, double sigma, int n, double half_width) {
    if (!(sigma > 0.0)) throw Error("gaussian_bump: sigma must be positive");
    ImageGrid img(n, half_width);
    const double cutoff2 = 36.0 * sigma * sigma;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const Vec2 d = img.center(ix, iy) - center;
            const double r2 = dot(d, d);
            img(ix, iy) = r2 > cutoff2 ? 0.0 : std::exp(-r2 / (2.0 * sigma * sigma));
        }
    }
    return img;
}

namespace {

void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* who) {
    if (!a.same_shape(b)) {
        throw Error(std::string(who) + ": grid shapes differ (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
    }
}

}  // namespace

double rmse(const ImageGrid& a, const ImageGrid& b, double mask_radius) {
    require_same_shape(a, b, "rmse");
    const int n = a.size();
    double sum = 0.0;
    std::size_t count = 0;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            if (norm(a.center(ix, iy)) >= mask_radius) continue;
            const double d = a(ix, iy) - b(ix, iy);
            sum += d * d;
            ++count;
        }
    }
    return count == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(count));
}

double relative_l2(const ImageGrid& estimate, const ImageGrid& truth, double mask_radius) {
    require_same_shape(estimate, truth, "relative_l2");
    const int n = truth.size();
    double num = 0.0, den = 0.0;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            if (norm(truth.center(ix, iy)) >= mask_radius) continue;
            const double d = estimate(ix, iy) - truth(ix, iy);
            num += d * d;
            den += truth(ix, iy) * truth(ix, iy);
        }
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

}  // namespace startx
