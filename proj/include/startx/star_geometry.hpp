#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace startx {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Direction-equality / antipodality tolerance, radians.
inline constexpr double kDirectionTol = 1e-9;
/// Weight-equality tolerance used by symmetry detection.
inline constexpr double kWeightTol = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
/// Counter-clockwise rotation by pi/2.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double polar_angle(Vec2 a) { return std::atan2(a.y, a.x); }

/// Wraps to (-pi, pi].
double wrap_pi(double a);
/// Wraps to [0, 2pi).
double wrap_two_pi(double a);
/// Distance between two angles on the circle, in [0, pi].
double angular_distance(double a, double b);

/// x- and y-components of the ray directions, one entry per ray.
struct ApertureVectors {
    std::vector<double> a;
    std::vector<double> b;
};

/// m ray directions (stored as polar angles) with nonzero weights.
///
/// Angles are kept in (-pi, pi]; unit length of every ray is structural.
/// Construction rejects empty configurations, zero weights and rays whose
/// directions coincide within kDirectionTol.
class StarConfig {
public:
    StarConfig(std::vector<double> angles_rad, std::vector<double> weights);

    /// All weights equal to one.
    static StarConfig uniform(std::vector<double> angles_rad);
    static StarConfig from_degrees(std::span<const double> angles_deg,
                                   std::span<const double> weights);

    std::size_t size() const noexcept { return angles_.size(); }
    std::span<const double> angles() const noexcept { return angles_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double angle(std::size_t i) const { return angles_.at(i); }
    double weight(std::size_t i) const { return weights_.at(i); }
    Vec2 ray(std::size_t i) const { return unit(angles_.at(i)); }
    std::vector<double> angles_deg() const;

    ApertureVectors aperture() const;
    double weight_product() const;

private:
    std::vector<double> angles_;
    std::vector<double> weights_;
};

/// Regular star with m (odd, >= 3) rays and unit weights; rays ordered
/// 0, +2pi/m, -2pi/m, +4pi/m, -4pi/m, ...
StarConfig regular_star(int m);

/// Even m whose rays split into antipodal pairs carrying equal weights.
bool is_symmetric(const StarConfig& cfg);

/// The star transform is injective exactly when the star is not symmetric.
bool is_invertible(const StarConfig& cfg);

/// Flips (gamma_i, c_i) -> (-gamma_i, -c_i) for every negative weight.
/// Each flip negates P2 (gamma_i / c_i is unchanged, prod c changes sign), so the
/// Type-2 set and q are preserved. Throws if the flip makes two rays coincide.
StarConfig sign_normalize(const StarConfig& cfg);

/// A three-ray configuration carrying the given weights whose P2 polynomial
/// has no zero on the unit circle. Throws on a near-degenerate triangle.
StarConfig stable_config_for_weights(double c1, double c2, double c3);

/// True iff |n1|, |n2|, |n3| satisfy the (non-strict) triangle inequalities,
/// i.e. n is normal to a plane spanned by the aperture vectors of some 3-ray star.
bool admissible_normal(const std::array<double, 3>& n);

}  // namespace startx
