#pragma once

#include <array>
#include <span>
#include <vector>

#include "startx/star_geometry.hpp"

namespace startx {

/// Controls for the Type-2 scan over the unit circle.
struct ScanSettings {
    int n_samples = 4096;      ///< uniform alpha-grid on [0, 2pi)
    double refine_tol = 1e-12; ///< bisection tolerance, radians
    double zero_floor = 1e-10; ///< relative threshold for tangential zeros

    void validate() const;
};

enum class Stability { stable, unstable, non_invertible };

const char* to_string(Stability s);

struct SingularityReport {
    /// Angles in [0, 2pi) orthogonal to some ray; sorted.
    std::vector<double> type1_angles;
    /// Angles in [0, 2pi) where P2 vanishes; sorted.
    std::vector<double> type2_angles;
    /// Parallel to type2_angles: zero found as a touching minimum, not a sign change.
    std::vector<bool> type2_tangential;
    bool invertible = true;
    double p2_min_abs = 0.0;
    double p2_max_abs = 0.0;
    bool p2_is_constant = false;
    bool p2_identically_zero = false;

    Stability classification() const;
};

/// e_{m-1}(y) = sum_i prod_{j != i} y_j, computed without division. e_0 of one variable is 1.
double elem_sym_poly(std::span<const double> y);

/// P2(psi) = sum_j c_j prod_{i != j} <psi, gamma_i>. psi need not be unit length.
double p2_eval(const StarConfig& cfg, Vec2 psi);
double p2_eval(const StarConfig& cfg, double alpha);

/// The same polynomial written as (prod c) * e_{m-1}(<psi, gamma_i / c_i>).
double p2_eval_scaled(const StarConfig& cfg, Vec2 psi);

/// w(psi) = sum_i c_i / <psi, gamma_i>. Throws SingularValueError near Type 1.
double w_eval(const StarConfig& cfg, Vec2 psi, double zero_floor = 1e-10);

/// q(psi) = -1 / w(psi) = -prod <psi, gamma_i> / P2(psi).
/// Throws SingularValueError near Type 1 or Type 2 directions.
double q_eval(const StarConfig& cfg, Vec2 psi, double zero_floor = 1e-10);

/// Type 1 analytically, Type 2 by scan + bisection (with a |F| minimum rule
/// for zeros that touch without a sign change).
SingularityReport find_singular_directions(const StarConfig& cfg, const ScanSettings& settings = {});

/// Uniform-weight star with m rays spread evenly over a 150 degree fan
/// centred on the +y axis. All rays lie in an open half-plane, so Z2 is nonempty.
StarConfig halfplane_demo_config(int m);

struct ConjectureScan {
    double min_abs = 0.0;
    double max_abs = 0.0;
    bool is_constant = false;
};

/// Samples e_{m-1}(r a + s b) on the unit circle for arbitrary aperture vectors.
ConjectureScan aperture_scan(const ApertureVectors& ap, int n_samples);

/// aperture_scan on the regular m-star (m odd >= 3).
ConjectureScan conjecture_scan(int m, int n_samples);

/// True iff y lies (numerically) on the zero cone of e2(y1, y2, y3).
bool e2_cone_check(const std::array<double, 3>& y);

}  // namespace startx
