#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "startx/image.hpp"
#include "startx/inversion.hpp"
#include "startx/scatter.hpp"
#include "startx/stability.hpp"
#include "startx/star_geometry.hpp"
#include "startx/transforms.hpp"

namespace startx::io {

using nlohmann::json;
namespace fs = std::filesystem;

/// Writes to a sibling temporary file, then renames it over path.
void atomic_write(const fs::path& path, const std::string& bytes);
std::string read_file(const fs::path& path);

/// 64-bit FNV-1a, 16 lowercase hex digits.
std::string fnv1a64(const std::string& bytes);

/// Rounds to the given number of significant digits (for stable JSON text).
double round_sig(double v, int digits);

// PFM: "Pf\n<n> <n>\n-1.0\n" then little-endian float32, bottom row first.
std::string encode_pfm(const ImageGrid& g);
ImageGrid decode_pfm(const std::string& bytes, double half_width);
void write_pfm(const fs::path& path, const ImageGrid& g);
ImageGrid read_pfm(const fs::path& path, double half_width);

/// 16-bit binary PGM (top row first), linearly scaled from [min, max] to
/// [0, 65535]; the scale goes to path + ".json".
void write_pgm16(const fs::path& path, const ImageGrid& g);

std::string encode_sinogram_csv(const Sinogram& s);
Sinogram decode_sinogram_csv(const std::string& text);

/// {"rays_deg": [...], "weights": [...]}; missing weights mean all ones.
json config_to_json(const StarConfig& cfg);
StarConfig config_from_json(const json& j);
StarConfig read_config(const fs::path& path);

json report_to_json(const SingularityReport& r);

/// Masked row indices as a JSON array.
json mask_to_json(const std::vector<bool>& valid);

struct RunManifest {
    std::string command;
    std::vector<std::string> config_paths;
    json settings = json::object();
    std::map<std::string, std::string> versions;
    double wall_time_s = 0.0;
    std::map<std::string, std::string> output_hashes;  ///< file name -> fnv1a64

    json to_json() const;
    static RunManifest from_json(const json& j);
    bool operator==(const RunManifest&) const = default;
};

/// config.json (angles, k, grid sizes, optional omega and c) plus phi_i_j.pfm
/// per ordered pair, 1-based in the file names.
void write_scatter_dir(const fs::path& dir, const ScatterData& data,
                       const std::optional<OmegaMatrix>& omega = std::nullopt,
                       const std::optional<std::vector<double>>& weights = std::nullopt);
ScatterData read_scatter_dir(const fs::path& dir);

}  // namespace startx::io
