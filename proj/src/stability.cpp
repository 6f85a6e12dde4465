#include "startx/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "startx/error.hpp"

namespace startx {

void ScanSettings::validate() const {
    if (n_samples < 16) throw Error("scan settings: n_samples must be >= 16");
    if (!(refine_tol > 0.0) || !(zero_floor > 0.0)) {
        throw Error("scan settings: tolerances must be positive");
    }
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::non_invertible: return "non-invertible";
    }
    return "unknown";
}

Stability SingularityReport::classification() const {
    if (!invertible) return Stability::non_invertible;
    return type2_angles.empty() ? Stability::stable : Stability::unstable;
}

double elem_sym_poly(std::span<const double> y) {
    const std::size_t m = y.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double prod = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j != i) prod *= y[j];
        }
        sum += prod;
    }
    return sum;
}

double p2_eval(const StarConfig& cfg, Vec2 psi) {
    const std::size_t m = cfg.size();
    // Small fixed buffer covers every practical star; fall back to the heap otherwise.
    double buf[32];
    std::vector<double> heap;
    double* proj = buf;
    if (m > 32) {
        heap.resize(m);
        proj = heap.data();
    }
    for (std::size_t i = 0; i < m; ++i) proj[i] = dot(psi, cfg.ray(i));
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double prod = cfg.weight(j);
        for (std::size_t i = 0; i < m; ++i) {
            if (i != j) prod *= proj[i];
        }
        sum += prod;
    }
    return sum;
}

double p2_eval(const StarConfig& cfg, double alpha) { return p2_eval(cfg, unit(alpha)); }

double p2_eval_scaled(const StarConfig& cfg, Vec2 psi) {
    std::vector<double> y(cfg.size());
    for (std::size_t i = 0; i < cfg.size(); ++i) y[i] = dot(psi, cfg.ray(i)) / cfg.weight(i);
    return cfg.weight_product() * elem_sym_poly(y);
}

namespace {

double abs_weight_sum(const StarConfig& cfg) {
    double s = 0.0;
    for (double c : cfg.weights()) s += std::abs(c);
    return s;
}

void check_type1(const StarConfig& cfg, Vec2 psi, double zero_floor) {
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        if (std::abs(dot(psi, cfg.ray(i))) < zero_floor) {
            std::ostringstream os;
            os << "direction " << polar_angle(psi) << " rad is orthogonal to ray " << i
               << " (Type 1 singular direction)";
            throw SingularValueError(SingularSet::type1, polar_angle(psi), os.str());
        }
    }
}

}  // namespace

double w_eval(const StarConfig& cfg, Vec2 psi, double zero_floor) {
    check_type1(cfg, psi, zero_floor);
    double w = 0.0;
    for (std::size_t i = 0; i < cfg.size(); ++i) w += cfg.weight(i) / dot(psi, cfg.ray(i));
    return w;
}

double q_eval(const StarConfig& cfg, Vec2 psi, double zero_floor) {
    check_type1(cfg, psi, zero_floor);
    const double p2 = p2_eval(cfg, psi);
    if (std::abs(p2) < zero_floor * abs_weight_sum(cfg)) {
        std::ostringstream os;
        os << "direction " << polar_angle(psi) << " rad is a zero of P2 (Type 2 singular direction)";
        throw SingularValueError(SingularSet::type2, polar_angle(psi), os.str());
    }
    double prod = 1.0;
    for (std::size_t i = 0; i < cfg.size(); ++i) prod *= dot(psi, cfg.ray(i));
    return -prod / p2;
}

namespace {

double bisect_root(const StarConfig& cfg, double lo, double hi, double flo, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = p2_eval(cfg, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Golden-section minimisation of |P2| on [lo, hi].
double refine_minimum(const StarConfig& cfg, double lo, double hi, double tol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = std::abs(p2_eval(cfg, x1)), f2 = std::abs(p2_eval(cfg, x2));
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = std::abs(p2_eval(cfg, x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = std::abs(p2_eval(cfg, x2));
        }
    }
    return 0.5 * (a + b);
}

struct Root {
    double angle;
    bool tangential;
};

}  // namespace

SingularityReport find_singular_directions(const StarConfig& cfg, const ScanSettings& settings) {
    settings.validate();
    SingularityReport rep;
    const std::size_t m = cfg.size();

    for (std::size_t j = 0; j < m; ++j) {
        rep.type1_angles.push_back(wrap_two_pi(cfg.angle(j) + 0.5 * kPi));
        rep.type1_angles.push_back(wrap_two_pi(cfg.angle(j) - 0.5 * kPi));
    }
    std::sort(rep.type1_angles.begin(), rep.type1_angles.end());
    // Antiparallel rays share their orthogonal directions.
    std::vector<double> t1;
    for (double a : rep.type1_angles) {
        if (t1.empty() || angular_distance(a, t1.back()) > kDirectionTol) t1.push_back(a);
    }
    if (t1.size() > 1 && angular_distance(t1.front(), t1.back()) <= kDirectionTol) t1.pop_back();
    rep.type1_angles = std::move(t1);

    const int n = settings.n_samples;
    const double step = kTwoPi / n;
    std::vector<double> f(n);
    double fmin = std::numeric_limits<double>::infinity();
    double fmax = -fmin;
    double amin = fmin;
    double amax = 0.0;
    for (int k = 0; k < n; ++k) {
        f[k] = p2_eval(cfg, step * k);
        fmin = std::min(fmin, f[k]);
        fmax = std::max(fmax, f[k]);
        amin = std::min(amin, std::abs(f[k]));
        amax = std::max(amax, std::abs(f[k]));
    }
    rep.p2_min_abs = amin;
    rep.p2_max_abs = amax;
    rep.p2_is_constant = (fmax - fmin) < 1e-12 * amax || amax == 0.0;
    rep.p2_identically_zero = amax < 1e-12 * abs_weight_sum(cfg);
    rep.invertible = is_invertible(cfg) && !rep.p2_identically_zero;
    if (rep.p2_identically_zero) {
        rep.p2_is_constant = true;
        return rep;
    }

    std::vector<Root> roots;
    std::vector<bool> sign_change(n, false);  // interval [k, k+1]
    for (int k = 0; k < n; ++k) {
        const int k1 = (k + 1) % n;
        if (f[k] == 0.0) {
            roots.push_back({step * k, false});
            sign_change[k] = true;
            sign_change[(k + n - 1) % n] = true;
        } else if (f[k] * f[k1] < 0.0) {
            roots.push_back({bisect_root(cfg, step * k, step * (k + 1), f[k], settings.refine_tol), false});
            sign_change[k] = true;
        }
    }
    const double floor = settings.zero_floor * amax;
    for (int k = 0; k < n; ++k) {
        const int km = (k + n - 1) % n;
        const int kp = (k + 1) % n;
        const double a = std::abs(f[k]);
        if (a >= floor || a > std::abs(f[km]) || a > std::abs(f[kp])) continue;
        if (sign_change[km] || sign_change[k]) continue;
        const double at = refine_minimum(cfg, step * (k - 1), step * (k + 1), settings.refine_tol);
        if (std::abs(p2_eval(cfg, at)) < floor) roots.push_back({at, true});
    }

    for (auto& r : roots) r.angle = wrap_two_pi(r.angle);
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.angle < b.angle; });
    std::vector<Root> merged;
    for (const auto& r : roots) {
        if (!merged.empty() && angular_distance(r.angle, merged.back().angle) < step) continue;
        merged.push_back(r);
    }
    if (merged.size() > 1 && angular_distance(merged.front().angle, merged.back().angle) < step) {
        merged.pop_back();
    }
    for (const auto& r : merged) {
        rep.type2_angles.push_back(r.angle);
        rep.type2_tangential.push_back(r.tangential);
    }
    return rep;
}

StarConfig halfplane_demo_config(int m) {
    if (m < 3 || m % 2 == 0) throw Error("halfplane_demo_config: m must be odd and >= 3");
    constexpr double kFan = 150.0 * kPi / 180.0;
    std::vector<double> angles(m);
    for (int i = 0; i < m; ++i) angles[i] = 0.5 * kPi - 0.5 * kFan + kFan * i / (m - 1);
    return StarConfig::uniform(std::move(angles));
}

ConjectureScan aperture_scan(const ApertureVectors& ap, int n_samples) {
    if (n_samples < 1) throw Error("aperture_scan: n_samples must be positive");
    if (ap.a.size() != ap.b.size() || ap.a.empty()) throw Error("aperture_scan: bad aperture vectors");
    const std::size_t m = ap.a.size();
    std::vector<double> y(m);
    ConjectureScan out;
    out.min_abs = std::numeric_limits<double>::infinity();
    double vmin = out.min_abs, vmax = -out.min_abs;
    for (int k = 0; k < n_samples; ++k) {
        const double r = std::cos(kTwoPi * k / n_samples);
        const double s = std::sin(kTwoPi * k / n_samples);
        for (std::size_t i = 0; i < m; ++i) y[i] = r * ap.a[i] + s * ap.b[i];
        const double v = elem_sym_poly(y);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
        out.min_abs = std::min(out.min_abs, std::abs(v));
        out.max_abs = std::max(out.max_abs, std::abs(v));
    }
    out.is_constant = (vmax - vmin) < 1e-12 * out.max_abs;
    return out;
}

ConjectureScan conjecture_scan(int m, int n_samples) {
    return aperture_scan(regular_star(m).aperture(), n_samples);
}

bool e2_cone_check(const std::array<double, 3>& y) {
    const double e2 = y[0] * y[1] + y[0] * y[2] + y[1] * y[2];
    const double n2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    return std::abs(e2) < 1e-10 * n2;
}

}  // namespace startx
