#include "startx/transforms.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <string>

#include "startx/error.hpp"

namespace startx {

Sinogram Sinogram::uniform(int num_angles, int num_offsets, double t_max) {
    if (num_angles < 2 || num_offsets < 2) throw Error("sinogram: need at least 2 angles and 2 offsets");
    if (!(t_max > 0.0)) throw Error("sinogram: t_max must be positive");
    Sinogram s;
    s.angles.resize(num_angles);
    s.offsets.resize(num_offsets);
    for (int k = 0; k < num_angles; ++k) s.angles[k] = kPi * k / num_angles;
    for (int l = 0; l < num_offsets; ++l) s.offsets[l] = -t_max + 2.0 * t_max * l / (num_offsets - 1);
    s.values.assign(static_cast<std::size_t>(num_angles) * num_offsets, 0.0);
    return s;
}

double Sinogram::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

void Sinogram::validate() const {
    if (angles.size() < 2 || offsets.size() < 2) throw Error("sinogram: need K >= 2 and T >= 2");
    if (values.size() != angles.size() * offsets.size()) throw Error("sinogram: value count mismatch");
    const double dt = offsets[1] - offsets[0];
    if (!(dt > 0.0)) throw Error("sinogram: offsets must increase");
    for (std::size_t l = 1; l < offsets.size(); ++l) {
        if (std::abs((offsets[l] - offsets[l - 1]) - dt) > 1e-6 * dt) {
            throw Error("sinogram: offsets must be uniformly spaced");
        }
    }
}

StripProfile::StripProfile(Vec2 direction, double u_min, double du, std::vector<double> samples)
    : dir_(direction), u_min_(u_min), du_(du), p_(std::move(samples)) {
    if (p_.size() < 2 || !(du_ > 0.0)) throw Error("strip profile: need >= 2 samples and du > 0");
    cum_.resize(p_.size());
    cum_[0] = 0.0;
    for (std::size_t k = 1; k < p_.size(); ++k) cum_[k] = cum_[k - 1] + 0.5 * du_ * (p_[k - 1] + p_[k]);
}

double StripProfile::value(double u) const {
    if (p_.empty()) return 0.0;
    const double f = (u - u_min_) / du_;
    if (f <= 0.0 || f >= static_cast<double>(p_.size() - 1)) {
        if (f == 0.0) return p_.front();
        if (f == static_cast<double>(p_.size() - 1)) return p_.back();
        return 0.0;
    }
    const auto k = static_cast<std::size_t>(f);
    const double w = f - static_cast<double>(k);
    return p_[k] + w * (p_[k + 1] - p_[k]);
}

double StripProfile::cumulative(double u) const {
    if (p_.empty()) return 0.0;
    const double f = (u - u_min_) / du_;
    if (f <= 0.0) return 0.0;
    if (f >= static_cast<double>(p_.size() - 1)) return cum_.back();
    const auto k = static_cast<std::size_t>(f);
    const double delta = (f - static_cast<double>(k)) * du_;
    const double slope = (p_[k + 1] - p_[k]) / du_;
    return cum_[k] + delta * (p_[k] + 0.5 * slope * delta);
}

SupportBox SupportBox::of(const ImageGrid& f) {
    SupportBox box;
    const int n = f.size();
    int ix0 = n, ix1 = -1, iy0 = n, iy1 = -1;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            if (f(ix, iy) != 0.0) {
                ix0 = std::min(ix0, ix);
                ix1 = std::max(ix1, ix);
                iy0 = std::min(iy0, iy);
                iy1 = std::max(iy1, iy);
            }
        }
    }
    if (ix1 < 0) return box;
    const double p = f.pitch();
    const double L = f.half_width();
    box.empty = false;
    box.xmin = std::max(-L, f.center(ix0) - p);
    box.xmax = std::min(L, f.center(ix1) + p);
    box.ymin = std::max(-L, f.center(iy0) - p);
    box.ymax = std::min(L, f.center(iy1) + p);
    return box;
}

double SupportBox::radius() const {
    if (empty) return 0.0;
    const double x = std::max(std::abs(xmin), std::abs(xmax));
    const double y = std::max(std::abs(ymin), std::abs(ymax));
    return std::hypot(x, y);
}

std::optional<std::pair<double, double>> clip_line(Vec2 p, Vec2 d, double xmin, double xmax,
                                                   double ymin, double ymax) {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    auto slab = [&](double origin, double dir, double lo, double hi) {
        if (dir == 0.0) return origin >= lo && origin <= hi;
        double a = (lo - origin) / dir;
        double b = (hi - origin) / dir;
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
        return t0 <= t1;
    };
    if (!slab(p.x, d.x, xmin, xmax) || !slab(p.y, d.y, ymin, ymax)) return std::nullopt;
    return std::make_pair(t0, t1);
}

namespace {

// Parameters in (t0, t1) where p + t d crosses a line through a row or
// column of pixel centres, in increasing order. Between consecutive ones the
// interpolant of g is a quadratic in t.
void cell_crossings(const ImageGrid& g, double p, double d, double t0, double t1, std::vector<double>& out) {
    out.clear();
    if (d == 0.0) return;
    const double h = g.pitch();
    const double c0 = g.center(0);
    const double a = p + t0 * d, b = p + t1 * d;
    const int n = g.size();
    const int lo = std::max(0, static_cast<int>(std::floor((std::min(a, b) - c0) / h)) + 1);
    const int hi = std::min(n - 1, static_cast<int>(std::ceil((std::max(a, b) - c0) / h)) - 1);
    for (int k = lo; k <= hi; ++k) out.push_back((c0 + k * h - p) / d);
    if (d < 0.0) std::reverse(out.begin(), out.end());
}

// Exact integral of the bilinear interpolant of g along p + t d over
// [t0, t1]: Simpson's rule on every piece between cell crossings.
double march(const ImageGrid& g, Vec2 p, Vec2 d, double t0, double t1) {
    if (!(t1 > t0)) return 0.0;
    thread_local std::vector<double> xs, ys;
    cell_crossings(g, p.x, d.x, t0, t1, xs);
    cell_crossings(g, p.y, d.y, t0, t1, ys);
    double sum = 0.0;
    double a = t0;
    double fa = g.sample(p + a * d);
    std::size_t i = 0, j = 0;
    for (;;) {
        double b = t1;
        if (i < xs.size() && xs[i] < b) b = xs[i];
        if (j < ys.size() && ys[j] < b) b = ys[j];
        if (i < xs.size() && xs[i] <= b) ++i;
        if (j < ys.size() && ys[j] <= b) ++j;
        if (b > a) {
            const double fb = g.sample(p + b * d);
            sum += (b - a) * (fa + 4.0 * g.sample(p + (0.5 * (a + b)) * d) + fb);
            a = b;
            fa = fb;
        }
        if (b >= t1) break;
    }
    return sum / 6.0;
}

// Integral of g along l(psi, t) restricted to the centred square of half-width L.
double square_march(const ImageGrid& g, double L, Vec2 psi, double t,
                    std::optional<std::pair<double, double>>* clip) {
    const Vec2 p = t * psi;
    const Vec2 d = perp(psi);
    auto c = clip_line(p, d, -L, L, -L, L);
    if (clip != nullptr) *clip = c;
    if (!c) return 0.0;
    return march(g, p, d, c->first, c->second);
}

// Integral of the strip continuation of one ray over the part of the line
// lying outside the clip square.
double strip_tail(const StripProfile& prof, Vec2 psi, double t,
                  const std::optional<std::pair<double, double>>& clip, double cap) {
    const Vec2 g = prof.direction();
    const Vec2 gp = perp(g);
    const Vec2 d = perp(psi);
    const Vec2 p0 = t * psi;
    const double u0 = dot(p0, gp), su = dot(d, gp);
    const double v0 = dot(p0, g), sv = dot(d, g);
    const double umin = prof.u_min(), umax = prof.u_max();

    std::pair<double, double> pieces[2];
    int count = 0;
    if (clip) {
        pieces[count++] = {-cap, clip->first};
        pieces[count++] = {clip->second, cap};
    } else {
        pieces[count++] = {-cap, cap};
    }

    constexpr double kParallel = 1e-15;
    double total = 0.0;
    for (int i = 0; i < count; ++i) {
        double lo = pieces[i].first, hi = pieces[i].second;
        // Behind the support: <x, gamma> < 0.
        if (std::abs(sv) < kParallel) {
            if (v0 >= 0.0) continue;
        } else {
            const double root = -v0 / sv;
            if (sv > 0.0) hi = std::min(hi, root);
            else lo = std::max(lo, root);
        }
        if (!(hi > lo)) continue;
        if (std::abs(su) < kParallel) {
            total += prof.value(u0) * (hi - lo);
            continue;
        }
        double a = (umin - u0) / su, b = (umax - u0) / su;
        if (a > b) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
        if (!(hi > lo)) continue;
        total += (prof.cumulative(u0 + su * hi) - prof.cumulative(u0 + su * lo)) / su;
    }
    return total;
}

Sinogram radon_impl(const ImageGrid& g, int num_angles, int num_offsets, double t_max, double core_half_width,
                    const StarConfig* cfg, const std::vector<StripProfile>* profiles) {
    Sinogram s = Sinogram::uniform(num_angles, num_offsets, t_max);
    const bool tails = cfg != nullptr && profiles != nullptr && !profiles->empty();
    const double core = tails ? core_half_width : g.half_width();
    // Parallel lines would carry an infinite tail; cap their length.
    const double cap = 1e3 * g.half_width();
#pragma omp parallel for schedule(dynamic, 4)
    for (int k = 0; k < num_angles; ++k) {
        const Vec2 psi = unit(s.angles[k]);
        for (int l = 0; l < num_offsets; ++l) {
            std::optional<std::pair<double, double>> clip;
            double v = square_march(g, core, psi, s.offsets[l], &clip);
            if (tails) {
                for (std::size_t i = 0; i < profiles->size(); ++i) {
                    v += cfg->weight(i) * strip_tail((*profiles)[i], psi, s.offsets[l], clip, cap);
                }
            }
            s.at(k, l) = v;
        }
    }
    return s;
}

}  // namespace

double divergent_beam(const ImageGrid& f, const SupportBox& box, Vec2 gamma, Vec2 x) {
    if (box.empty) return 0.0;
    auto c = clip_line(x, gamma, box.xmin, box.xmax, box.ymin, box.ymax);
    if (!c) return 0.0;
    const double t0 = std::max(0.0, c->first);
    if (!(c->second > t0)) return 0.0;
    return march(f, x, gamma, t0, c->second);
}

double divergent_beam(const ImageGrid& f, Vec2 gamma, Vec2 x) {
    return divergent_beam(f, SupportBox::of(f), gamma, x);
}

ImageGrid divergent_beam_field(const ImageGrid& f, Vec2 gamma, int n, double half_width) {
    const SupportBox box = SupportBox::of(f);
    ImageGrid out(n, half_width);
#pragma omp parallel for schedule(dynamic, 8)
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) out(ix, iy) = divergent_beam(f, box, gamma, out.center(ix, iy));
    }
    return out;
}

int extended_size(int n, double ext_factor) {
    if (!(ext_factor >= 1.0)) throw Error("ext_factor must be >= 1");
    int ne = static_cast<int>(std::ceil(ext_factor * n - 1e-9));
    if ((ne - n) % 2 != 0) ++ne;
    return ne;
}

std::vector<StripProfile> strip_profiles_from_source(const ImageGrid& f, const StarConfig& cfg) {
    const SupportBox box = SupportBox::of(f);
    const double p = f.pitch();
    // Sampling depends on the grid only, so profiles are linear in f.
    const double R = std::sqrt(2.0) * f.half_width() + p;
    const double du = 0.5 * p;
    const int count = static_cast<int>(std::ceil(2.0 * R / du)) + 1;
    std::vector<StripProfile> out;
    out.reserve(cfg.size());
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const Vec2 g = cfg.ray(i);
        const Vec2 gp = perp(g);
        std::vector<double> samples(count);
        for (int k = 0; k < count; ++k) {
            const double u = -R + du * k;
            samples[k] = divergent_beam(f, box, g, -(R + p) * g + u * gp);
        }
        out.emplace_back(g, -R, du, std::move(samples));
    }
    return out;
}

std::vector<StripProfile> strip_profiles_from_field(const ImageGrid& field, const StarConfig& cfg,
                                                    double inner_half_width) {
    const double p = field.pitch();
    const double L = field.half_width() - p;
    const double R = std::sqrt(2.0) * inner_half_width;
    const double du = 0.5 * p;
    const int count = static_cast<int>(std::ceil(2.0 * R / du)) + 1;
    std::vector<StripProfile> out;
    out.reserve(cfg.size());
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const Vec2 g = cfg.ray(i);
        const Vec2 gp = perp(g);
        std::vector<double> samples(count, 0.0);
        for (int k = 0; k < count; ++k) {
            const Vec2 base = (-R + du * k) * gp;
            auto c = clip_line(base, -g, -L, L, -L, L);
            if (!c || c->second <= 0.0) continue;
            samples[k] = field.sample(base - c->second * g) / cfg.weight(i);
        }
        out.emplace_back(g, -R, du, std::move(samples));
    }
    return out;
}

StarField star_transform(const ImageGrid& f, const StarConfig& cfg, double ext_factor) {
    const int ne = extended_size(f.size(), ext_factor);
    const double le = 0.5 * ne * f.pitch();
    const SupportBox box = SupportBox::of(f);
    ImageGrid grid(ne, le);
    std::vector<Vec2> rays(cfg.size());
    for (std::size_t i = 0; i < cfg.size(); ++i) rays[i] = cfg.ray(i);
#pragma omp parallel for schedule(dynamic, 8)
    for (int iy = 0; iy < ne; ++iy) {
        for (int ix = 0; ix < ne; ++ix) {
            const Vec2 x = grid.center(ix, iy);
            double v = 0.0;
            for (std::size_t i = 0; i < rays.size(); ++i) v += cfg.weight(i) * divergent_beam(f, box, rays[i], x);
            grid(ix, iy) = v;
        }
    }
    StarField field{std::move(grid), ext_factor, f.half_width(), cfg, {}};
    field.profiles = strip_profiles_from_source(f, cfg);
    return field;
}

Sinogram radon(const ImageGrid& g, int num_angles, int num_offsets) {
    return radon_impl(g, num_angles, num_offsets, std::sqrt(2.0) * g.half_width(), g.half_width(), nullptr, nullptr);
}

Sinogram radon(const StarField& field, int num_angles, int num_offsets, const RadonOptions& opts) {
    // Only lines meeting supp f carry information about f.
    const double t_max = std::sqrt(2.0) * field.inner_half_width;
    if (opts.continue_strips && field.config && !field.profiles.empty()) {
        if (field.profiles.size() != field.config->size()) {
            throw Error("radon: star field has " + std::to_string(field.profiles.size()) +
                        " strip profiles for " + std::to_string(field.config->size()) + " rays");
        }
        // Outside a convex set holding supp f the field is exactly its strip
        // continuation; integrating that analytically avoids the aliasing of
        // oblique strips sampled on the grid.
        const double core = std::min(field.grid.half_width(), field.inner_half_width + field.grid.pitch());
        return radon_impl(field.grid, num_angles, num_offsets, t_max, core, &*field.config, &field.profiles);
    }
    return radon_impl(field.grid, num_angles, num_offsets, t_max, field.grid.half_width(), nullptr, nullptr);
}

double line_integral(const ImageGrid& g, Vec2 psi, double t) {
    return square_march(g, g.half_width(), psi, t, nullptr);
}

double half_plane(const ImageGrid& f, Vec2 psi, double t) {
    const int n = f.size();
    const double area = f.pitch() * f.pitch();
    double sum = 0.0;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            if (dot(f.center(ix, iy), psi) <= t) sum += f(ix, iy);
        }
    }
    return sum * area;
}

}  // namespace startx
