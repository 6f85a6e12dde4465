#include "startx/star_geometry.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "startx/error.hpp"
#include "startx/stability.hpp"

namespace startx {

double wrap_pi(double a) {
    double r = std::remainder(a, kTwoPi);  // [-pi, pi]
    if (r <= -kPi) r += kTwoPi;
    return r;
}

double wrap_two_pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

double angular_distance(double a, double b) {
    return std::abs(std::remainder(a - b, kTwoPi));
}

StarConfig::StarConfig(std::vector<double> angles_rad, std::vector<double> weights)
    : angles_(std::move(angles_rad)), weights_(std::move(weights)) {
    if (angles_.empty()) throw Error("star configuration needs at least one ray");
    if (angles_.size() != weights_.size()) {
        throw Error("star configuration: " + std::to_string(angles_.size()) + " rays but " +
                    std::to_string(weights_.size()) + " weights");
    }
    for (std::size_t i = 0; i < angles_.size(); ++i) {
        if (!std::isfinite(angles_[i]) || !std::isfinite(weights_[i])) {
            throw Error("star configuration: non-finite angle or weight");
        }
        if (weights_[i] == 0.0) {
            throw Error("star configuration: weight " + std::to_string(i) + " is zero");
        }
        angles_[i] = wrap_pi(angles_[i]);
    }
    for (std::size_t i = 0; i < angles_.size(); ++i) {
        for (std::size_t j = i + 1; j < angles_.size(); ++j) {
            if (angular_distance(angles_[i], angles_[j]) <= kDirectionTol) {
                std::ostringstream os;
                os << "star configuration: rays " << i << " and " << j << " share a direction";
                throw Error(os.str());
            }
        }
    }
}

StarConfig StarConfig::uniform(std::vector<double> angles_rad) {
    std::vector<double> w(angles_rad.size(), 1.0);
    return StarConfig(std::move(angles_rad), std::move(w));
}

StarConfig StarConfig::from_degrees(std::span<const double> angles_deg,
                                    std::span<const double> weights) {
    std::vector<double> rad(angles_deg.size());
    std::transform(angles_deg.begin(), angles_deg.end(), rad.begin(),
                   [](double d) { return d * kPi / 180.0; });
    return StarConfig(std::move(rad), std::vector<double>(weights.begin(), weights.end()));
}

std::vector<double> StarConfig::angles_deg() const {
    std::vector<double> d(angles_.size());
    std::transform(angles_.begin(), angles_.end(), d.begin(),
                   [](double a) { return a * 180.0 / kPi; });
    return d;
}

ApertureVectors StarConfig::aperture() const {
    ApertureVectors ap;
    ap.a.reserve(size());
    ap.b.reserve(size());
    for (double a : angles_) {
        ap.a.push_back(std::cos(a));
        ap.b.push_back(std::sin(a));
    }
    return ap;
}

double StarConfig::weight_product() const {
    return std::accumulate(weights_.begin(), weights_.end(), 1.0, std::multiplies<>());
}

StarConfig regular_star(int m) {
    if (m < 3 || m % 2 == 0) {
        throw Error("regular_star: m must be odd and >= 3 (got " + std::to_string(m) +
                    "); regular stars with even m are symmetric");
    }
    const int k = (m - 1) / 2;
    std::vector<double> angles;
    angles.reserve(m);
    angles.push_back(0.0);
    for (int j = 1; j <= k; ++j) {
        const double a = kTwoPi * j / m;
        angles.push_back(a);
        angles.push_back(-a);
    }
    return StarConfig::uniform(std::move(angles));
}

bool is_symmetric(const StarConfig& cfg) {
    const std::size_t m = cfg.size();
    if (m % 2 != 0) return false;

    // Greedy antipodal matching; pairwise-distinct rays make each partner unique.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return cfg.angle(i) < cfg.angle(j); });

    std::vector<bool> used(m, false);
    for (std::size_t oi = 0; oi < m; ++oi) {
        const std::size_t i = order[oi];
        if (used[i]) continue;
        bool matched = false;
        for (std::size_t oj = oi + 1; oj < m; ++oj) {
            const std::size_t j = order[oj];
            if (used[j]) continue;
            if (std::abs(angular_distance(cfg.angle(i), cfg.angle(j)) - kPi) <= kDirectionTol) {
                if (std::abs(cfg.weight(i) - cfg.weight(j)) > kWeightTol) return false;
                used[i] = used[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

bool is_invertible(const StarConfig& cfg) { return !is_symmetric(cfg); }

StarConfig sign_normalize(const StarConfig& cfg) {
    std::vector<double> angles(cfg.angles().begin(), cfg.angles().end());
    std::vector<double> weights(cfg.weights().begin(), cfg.weights().end());
    for (std::size_t i = 0; i < angles.size(); ++i) {
        if (weights[i] < 0.0) {
            angles[i] = wrap_pi(angles[i] - kPi);
            weights[i] = -weights[i];
        }
    }
    try {
        return StarConfig(std::move(angles), std::move(weights));
    } catch (const Error& e) {
        throw Error(std::string("sign_normalize: normalized star is degenerate: ") + e.what());
    }
}

bool admissible_normal(const std::array<double, 3>& n) {
    const double a = std::abs(n[0]), b = std::abs(n[1]), c = std::abs(n[2]);
    return a + b >= c && b + c >= a && a + c >= b;
}

namespace {

// Rays gamma_1..3 with n1*g1 + n2*g2 + n3*g3 = 0, g1 along the x-axis.
std::array<double, 3> close_triangle(const std::array<double, 3>& n) {
    // Interior angle at the vertex joining sides n1 and n2 lies opposite n3.
    const double cos_opposite3 = (n[0] * n[0] + n[1] * n[1] - n[2] * n[2]) / (2.0 * n[0] * n[1]);
    const double theta3 = std::acos(std::clamp(cos_opposite3, -1.0, 1.0));
    const Vec2 g1{1.0, 0.0};
    const Vec2 g2 = unit(kPi - theta3);
    const Vec2 closing = -(1.0 / n[2]) * (n[0] * g1 + n[1] * g2);
    return {0.0, kPi - theta3, polar_angle(closing)};
}

}  // namespace

StarConfig stable_config_for_weights(double c1, double c2, double c3) {
    const std::array<double, 3> c{c1, c2, c3};
    for (double ci : c) {
        if (ci == 0.0 || !std::isfinite(ci)) {
            throw Error("stable_config_for_weights: weights must be finite and nonzero");
        }
    }

    // Canonicalize |c|: scale so the median is one, then sort ascending.
    std::array<double, 3> mag{std::abs(c1), std::abs(c2), std::abs(c3)};
    std::array<std::size_t, 3> perm{0, 1, 2};
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t i, std::size_t j) { return mag[i] < mag[j]; });
    const double median = mag[perm[1]];
    std::array<double, 3> d{};
    for (std::size_t k = 0; k < 3; ++k) d[k] = mag[perm[k]] / median;

    // Normal (1, 1, 1/d3) is admissible; W n = (d1, 1, 1) keeps the scaled
    // aperture plane away from the zero cone of e2.
    const std::array<double, 3> n{1.0, 1.0, 1.0 / d[2]};
    for (int k = 0; k < 3; ++k) {
        const double slack = n[(k + 1) % 3] + n[(k + 2) % 3] - n[k];
        if (std::abs(slack) < 1e-9) {
            std::ostringstream os;
            os << "stable_config_for_weights: degenerate triangle for weights (" << c1 << ", "
               << c2 << ", " << c3 << "); side lengths (" << n[0] << ", " << n[1] << ", " << n[2]
               << "), slack " << slack << " below 1e-9; weight ratio |c|max/|c|med = " << d[2];
            throw Error(os.str());
        }
    }
    const auto sorted_angles = close_triangle(n);

    std::vector<double> angles(3), weights(c.begin(), c.end());
    for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t idx = perm[k];
        double a = sorted_angles[k];
        if (c[idx] < 0.0) a -= kPi;
        angles[idx] = a;
    }
    StarConfig cfg(std::move(angles), std::move(weights));

    // Numerical postcondition: P2 keeps one sign on 4096 samples.
    constexpr int kSamples = 4096;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int s = 0; s < kSamples; ++s) {
        const double v = p2_eval(cfg, kTwoPi * s / kSamples);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(lo > 0.0 || hi < 0.0)) {
        throw Error("stable_config_for_weights: postcondition failed, P2 changes sign");
    }
    return cfg;
}

}  // namespace startx
