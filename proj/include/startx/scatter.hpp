#pragma once

#include <map>
#include <utility>
#include <vector>

#include "startx/image.hpp"
#include "startx/inversion.hpp"
#include "startx/star_geometry.hpp"

namespace startx {

/// Square matrix stored row-major.
struct Matrix {
    int size = 0;
    std::vector<double> data;

    static Matrix filled(int m, double v) { return {m, std::vector<double>(static_cast<std::size_t>(m) * m, v)}; }
    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * size + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * size + j]; }
};

/// Single-scattering measurements phi_ij(x) = X_i f(x) + k_ij X_j f(x) + eta(x)
/// for every ordered pair i != j, sampled on an enlarged measurement grid.
struct ScatterData {
    std::vector<double> angles;  ///< ray directions, radians
    Matrix k;                    ///< k_ij > 0 (diagonal unused)
    std::map<std::pair<int, int>, ImageGrid> phi;  ///< 0-based (i, j)
    int inner_n = 0;             ///< grid carrying f and eta
    double inner_half_width = 1.0;
    double ext_factor = 3.0;

    const ImageGrid& at(int i, int j) const;
    int num_rays() const { return static_cast<int>(angles.size()); }
    void validate() const;
};

/// Symmetric, zero-diagonal weights with zero total; row sums give the star weights.
struct OmegaMatrix {
    Matrix w;

    std::vector<double> row_sums() const;
    void validate() const;
};

/// One term coef * phi_ij of an eta-eliminating combination.
struct PairTerm {
    int i = 0;
    int j = 0;
    double coef = 0.0;
};

/// Simulates phi_ij on an (ext_factor-enlarged) grid around f's grid.
ScatterData simulate_scatter(const ImageGrid& f, const ImageGrid& eta, const std::vector<double>& angles,
                             const Matrix& k, double ext_factor = 3.0);

/// Minimum-Frobenius-norm omega with row sums c. Requires sum(c) = 0 and m >= 3.
OmegaMatrix omega_for_weights(const std::vector<double>& c);

/// Unordered-pair combination sum_{i<j} omega_ij phi_ij (valid for unit k).
std::vector<PairTerm> combination_from_omega(const OmegaMatrix& omega);

/// Star weights produced by a combination: the term coef * phi_ij adds coef to
/// c_i and coef * k_ij to c_j.
std::vector<double> combination_weights(const std::vector<PairTerm>& terms, const Matrix& k, int m);

/// Sum of coefficients, which multiplies eta in the combined data.
double combination_eta_coefficient(const std::vector<PairTerm>& terms);

/// sum coef * phi_ij on the measurement grid.
ImageGrid combine(const ScatterData& data, const std::vector<PairTerm>& terms);

/// Weights c_1..k = -1/k, c_{k+1}..2k+1 = 1/(k+1) for m = 2k+1.
std::vector<double> zero_sum_weight_preset(int m);

struct ScatterRecovery {
    ImageGrid f;
    ImageGrid eta;
    std::vector<double> weights;
    StarReconstruction reconstruction;
};

struct ScatterRecoverySettings {
    InversionSettings inversion;
    int num_angles = 360;
    int num_offsets = 0;  ///< 0 picks 2 * inner_n
};

/// Recovers f via the star transform built from an eta-free combination, then
/// eta as the average over all pairs of phi_ij - X_i f - k_ij X_j f.
ScatterRecovery recover_f_eta(const ScatterData& data, const std::vector<PairTerm>& terms,
                              const ScatterRecoverySettings& settings = {});

/// recover_f_eta with the combination derived from weights c (requires unit k).
ScatterRecovery recover_f_eta(const ScatterData& data, const std::vector<double>& c,
                              const ScatterRecoverySettings& settings = {});

}  // namespace startx
