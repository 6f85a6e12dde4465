#pragma once

#include <optional>
#include <string>
#include <vector>

#include "startx/image.hpp"
#include "startx/stability.hpp"
#include "startx/transforms.hpp"

namespace startx {

enum class RampFilter { ram_lak, hamming };
enum class FillStrategy { interpolate, zero };

RampFilter parse_filter(const std::string& s);
FillStrategy parse_fill(const std::string& s);
const char* to_string(RampFilter f);
const char* to_string(FillStrategy f);

struct InversionSettings {
    RampFilter filter = RampFilter::hamming;
    /// Angular radius around each singular direction whose rows are not used.
    /// nullopt means two angular steps, 2*pi/K.
    std::optional<double> singular_margin;
    FillStrategy fill = FillStrategy::interpolate;
    /// Longest run of masked rows bridged by interpolation; nullopt means the
    /// longest run one isolated margin can produce, ceil(2 * margin / step).
    std::optional<int> max_interp_run;
    ScanSettings scan;
};

/// Radon data of f recovered from Radon data of Sf.
struct RecoveredRadon {
    Sinogram sinogram;
    /// valid[k] is false where row k fell inside a singular margin.
    std::vector<bool> valid;
    std::vector<int> interpolated_rows;
    std::vector<int> zero_filled_rows;
    std::vector<std::string> warnings;
    SingularityReport report;

    std::vector<int> masked_rows() const;
};

/// Central difference along t (one-sided at both ends), one row at a time.
Sinogram differentiate_offsets(const Sinogram& s);

/// Rf(psi_k, .) = q(psi_k) d/dt R(Sf)(psi_k, .) on rows away from singular
/// directions; masked rows are interpolated in angle or zero-filled.
RecoveredRadon recover_radon(const Sinogram& star_sino, const StarConfig& cfg,
                             const InversionSettings& settings = {});

/// Filtered backprojection onto an n x n grid of half-width L.
ImageGrid fbp(const Sinogram& sino, int n, double half_width, RampFilter filter = RampFilter::ram_lak);

struct StarReconstruction {
    ImageGrid image;
    RecoveredRadon radon;
};

/// radon(field) -> recover_radon -> fbp.
StarReconstruction invert_star(const StarField& field, const StarConfig& cfg, int num_angles,
                               int num_offsets, const InversionSettings& settings, int n,
                               double half_width, const RadonOptions& radon_opts = {});

}  // namespace startx
