#include "startx/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <unistd.h>

#include "startx/error.hpp"

namespace startx::io {

void atomic_write(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw Error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double round_sig(double v, int digits) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return std::strtod(buf, nullptr);
}

namespace {

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

std::uint32_t from_le(std::uint32_t v) { return to_le(v); }

std::string format_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace

std::string encode_pfm(const ImageGrid& g) {
    const int n = g.size();
    std::string out = "Pf\n" + std::to_string(n) + " " + std::to_string(n) + "\n-1.0\n";
    const std::size_t header = out.size();
    out.resize(header + 4 * static_cast<std::size_t>(n) * n);
    char* p = out.data() + header;
    for (double v : g.values()) {
        const auto f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        bits = to_le(bits);
        std::memcpy(p, &bits, 4);
        p += 4;
    }
    return out;
}

ImageGrid decode_pfm(const std::string& bytes, double half_width) {
    std::istringstream in(bytes);
    std::string magic;
    int w = 0, h = 0;
    double scale = 0.0;
    in >> magic >> w >> h >> scale;
    if (!in || magic != "Pf") throw Error("not a greyscale PFM file");
    if (w != h || w < 8) throw Error("PFM image must be square with side >= 8");
    in.get();  // single whitespace before the raster
    const auto offset = static_cast<std::size_t>(in.tellg());
    const std::size_t count = static_cast<std::size_t>(w) * h;
    if (bytes.size() < offset + 4 * count) throw Error("PFM raster truncated");
    const bool little = scale < 0.0;
    std::vector<double> values(count);
    const char* p = bytes.data() + offset;
    for (std::size_t i = 0; i < count; ++i, p += 4) {
        std::uint32_t bits;
        std::memcpy(&bits, p, 4);
        if (little) {
            bits = from_le(bits);
        } else if constexpr (std::endian::native == std::endian::little) {
            bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) | (bits >> 24);
        }
        float f;
        std::memcpy(&f, &bits, 4);
        values[i] = f;
    }
    return ImageGrid(w, half_width, std::move(values));
}

void write_pfm(const fs::path& path, const ImageGrid& g) { atomic_write(path, encode_pfm(g)); }

ImageGrid read_pfm(const fs::path& path, double half_width) { return decode_pfm(read_file(path), half_width); }

void write_pgm16(const fs::path& path, const ImageGrid& g) {
    const int n = g.size();
    const auto [lo_it, hi_it] = std::minmax_element(g.values().begin(), g.values().end());
    const double lo = *lo_it, hi = *hi_it;
    const double span = hi > lo ? hi - lo : 1.0;
    std::string out = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n65535\n";
    for (int iy = n - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < n; ++ix) {
            const double t = std::clamp((g(ix, iy) - lo) / span, 0.0, 1.0);
            const auto v = static_cast<std::uint16_t>(std::lround(t * 65535.0));
            out.push_back(static_cast<char>(v >> 8));
            out.push_back(static_cast<char>(v & 0xff));
        }
    }
    json side = {{"min", lo}, {"max", hi}, {"levels", 65535}};
    fs::path sidecar = path;
    sidecar += ".json";
    atomic_write(path, out);
    atomic_write(sidecar, side.dump(2) + "\n");
}

std::string encode_sinogram_csv(const Sinogram& s) {
    s.validate();
    std::string out = "# angles_deg:";
    for (std::size_t k = 0; k < s.num_angles(); ++k) {
        out += (k ? "," : " ") + format_sig(s.angles[k] * 180.0 / kPi, 12);
    }
    out += "\n# offsets:";
    for (std::size_t l = 0; l < s.num_offsets(); ++l) out += (l ? "," : " ") + format_sig(s.offsets[l], 12);
    out += "\n";
    for (std::size_t k = 0; k < s.num_angles(); ++k) {
        auto row = s.row(k);
        for (std::size_t l = 0; l < row.size(); ++l) {
            if (l) out += ",";
            out += format_sig(row[l], 9);
        }
        out += "\n";
    }
    return out;
}

namespace {

std::vector<double> parse_numbers(const std::string& text, std::size_t line_no) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        const std::string cell = text.substr(pos, end - pos);
        char* stop = nullptr;
        const double v = std::strtod(cell.c_str(), &stop);
        if (stop == cell.c_str()) throw Error("sinogram CSV line " + std::to_string(line_no) + ": bad number");
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

std::string header_payload(const std::string& line, const std::string& key) {
    const std::string prefix = "# " + key + ":";
    if (line.rfind(prefix, 0) != 0) throw Error("sinogram CSV: expected '" + prefix + "' header");
    return line.substr(prefix.size());
}

}  // namespace

Sinogram decode_sinogram_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Sinogram s;
    if (!std::getline(in, line)) throw Error("sinogram CSV: empty input");
    for (double d : parse_numbers(header_payload(line, "angles_deg"), 1)) s.angles.push_back(d * kPi / 180.0);
    if (!std::getline(in, line)) throw Error("sinogram CSV: missing offsets header");
    s.offsets = parse_numbers(header_payload(line, "offsets"), 2);
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto row = parse_numbers(line, line_no);
        if (row.size() != s.offsets.size()) {
            throw Error("sinogram CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(s.offsets.size()) + " values");
        }
        s.values.insert(s.values.end(), row.begin(), row.end());
    }
    if (s.values.size() != s.angles.size() * s.offsets.size()) throw Error("sinogram CSV: row count mismatch");
    s.validate();
    return s;
}

json config_to_json(const StarConfig& cfg) {
    json rays = json::array(), weights = json::array();
    for (double a : cfg.angles_deg()) rays.push_back(round_sig(a, 15));
    for (double c : cfg.weights()) weights.push_back(c);
    return {{"rays_deg", rays}, {"weights", weights}};
}

StarConfig config_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rays_deg") || !j["rays_deg"].is_array()) {
        throw Error("config JSON must be an object with a 'rays_deg' array");
    }
    std::vector<double> deg;
    for (const auto& v : j["rays_deg"]) {
        if (!v.is_number()) throw Error("config JSON: 'rays_deg' entries must be numbers");
        deg.push_back(v.get<double>());
    }
    std::vector<double> weights(deg.size(), 1.0);
    if (j.contains("weights")) {
        if (!j["weights"].is_array()) throw Error("config JSON: 'weights' must be an array");
        weights.clear();
        for (const auto& v : j["weights"]) {
            if (!v.is_number()) throw Error("config JSON: 'weights' entries must be numbers");
            weights.push_back(v.get<double>());
        }
    }
    return StarConfig::from_degrees(deg, weights);
}

StarConfig read_config(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error("malformed JSON in " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json report_to_json(const SingularityReport& r) {
    auto deg = [](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(round_sig(x * 180.0 / kPi, 12));
        return a;
    };
    json tangential = json::array();
    for (bool b : r.type2_tangential) tangential.push_back(b);
    return {{"classification", to_string(r.classification())},
            {"invertible", r.invertible},
            {"type1_deg", deg(r.type1_angles)},
            {"type2_deg", deg(r.type2_angles)},
            {"type2_tangential", tangential},
            {"p2_min_abs", round_sig(r.p2_min_abs, 12)},
            {"p2_max_abs", round_sig(r.p2_max_abs, 12)},
            {"p2_is_constant", r.p2_is_constant},
            {"p2_identically_zero", r.p2_identically_zero}};
}

json mask_to_json(const std::vector<bool>& valid) {
    json a = json::array();
    for (std::size_t k = 0; k < valid.size(); ++k) {
        if (!valid[k]) a.push_back(k);
    }
    return a;
}

json RunManifest::to_json() const {
    return {{"v", 1},
            {"command", command},
            {"config_paths", config_paths},
            {"settings", settings},
            {"versions", versions},
            {"wall_time_s", wall_time_s},
            {"output_hashes", output_hashes}};
}

RunManifest RunManifest::from_json(const json& j) {
    if (!j.is_object() || j.value("v", 0) != 1) throw Error("manifest: unsupported schema version");
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config_paths = j.at("config_paths").get<std::vector<std::string>>();
    m.settings = j.at("settings");
    m.versions = j.at("versions").get<std::map<std::string, std::string>>();
    m.wall_time_s = j.at("wall_time_s").get<double>();
    m.output_hashes = j.at("output_hashes").get<std::map<std::string, std::string>>();
    return m;
}

void write_scatter_dir(const fs::path& dir, const ScatterData& data, const std::optional<OmegaMatrix>& omega,
                       const std::optional<std::vector<double>>& weights) {
    data.validate();
    const ImageGrid& any = data.phi.begin()->second;
    json k = json::array();
    for (int i = 0; i < data.k.size; ++i) {
        json row = json::array();
        for (int j = 0; j < data.k.size; ++j) row.push_back(data.k(i, j));
        k.push_back(row);
    }
    json rays = json::array();
    for (double a : data.angles) rays.push_back(a * 180.0 / kPi);
    json cfg = {{"rays_deg", rays},
                {"k", k},
                {"inner_n", data.inner_n},
                {"inner_half_width", data.inner_half_width},
                {"ext_factor", data.ext_factor},
                {"grid_n", any.size()},
                {"grid_half_width", any.half_width()}};
    if (omega) {
        json w = json::array();
        for (int i = 0; i < omega->w.size; ++i) {
            json row = json::array();
            for (int j = 0; j < omega->w.size; ++j) row.push_back(omega->w(i, j));
            w.push_back(row);
        }
        cfg["omega"] = w;
    }
    if (weights) cfg["weights"] = *weights;
    fs::create_directories(dir);
    for (const auto& [key, g] : data.phi) {
        write_pfm(dir / ("phi_" + std::to_string(key.first + 1) + "_" + std::to_string(key.second + 1) + ".pfm"), g);
    }
    atomic_write(dir / "config.json", cfg.dump(2) + "\n");
}

ScatterData read_scatter_dir(const fs::path& dir) {
    json cfg;
    try {
        cfg = json::parse(read_file(dir / "config.json"));
    } catch (const json::parse_error& e) {
        throw Error("malformed JSON in " + (dir / "config.json").string() + ": " + e.what());
    }
    ScatterData data;
    try {
        for (double d : cfg.at("rays_deg").get<std::vector<double>>()) data.angles.push_back(d * kPi / 180.0);
        const int m = data.num_rays();
        const auto k = cfg.at("k").get<std::vector<std::vector<double>>>();
        data.k = Matrix::filled(m, 0.0);
        if (static_cast<int>(k.size()) != m) throw Error("scatter config: k must be m x m");
        for (int i = 0; i < m; ++i) {
            if (static_cast<int>(k[i].size()) != m) throw Error("scatter config: k must be m x m");
            for (int j = 0; j < m; ++j) data.k(i, j) = k[i][j];
        }
        data.inner_n = cfg.at("inner_n").get<int>();
        data.inner_half_width = cfg.at("inner_half_width").get<double>();
        data.ext_factor = cfg.at("ext_factor").get<double>();
        const double hw = cfg.at("grid_half_width").get<double>();
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (i == j) continue;
                const fs::path p = dir / ("phi_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + ".pfm");
                if (fs::exists(p)) data.phi.emplace(std::make_pair(i, j), read_pfm(p, hw));
            }
        }
    } catch (const json::exception& e) {
        throw Error(std::string("scatter config: ") + e.what());
    }
    data.validate();
    return data;
}

}  // namespace startx::io
