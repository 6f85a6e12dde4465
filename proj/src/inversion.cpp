#include "startx/inversion.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include "startx/error.hpp"

namespace startx {

RampFilter parse_filter(const std::string& s) {
    if (s == "ram-lak") return RampFilter::ram_lak;
    if (s == "hamming") return RampFilter::hamming;
    throw Error("unknown filter '" + s + "' (expected ram-lak or hamming)");
}

FillStrategy parse_fill(const std::string& s) {
    if (s == "interpolate") return FillStrategy::interpolate;
    if (s == "zero") return FillStrategy::zero;
    throw Error("unknown fill strategy '" + s + "' (expected interpolate or zero)");
}

const char* to_string(RampFilter f) { return f == RampFilter::ram_lak ? "ram-lak" : "hamming"; }
const char* to_string(FillStrategy f) { return f == FillStrategy::interpolate ? "interpolate" : "zero"; }

std::vector<int> RecoveredRadon::masked_rows() const {
    std::vector<int> out;
    for (std::size_t k = 0; k < valid.size(); ++k) {
        if (!valid[k]) out.push_back(static_cast<int>(k));
    }
    return out;
}

Sinogram differentiate_offsets(const Sinogram& s) {
    s.validate();
    Sinogram d = s;
    const std::size_t T = s.num_offsets();
    const double dt = s.dt();
    for (std::size_t k = 0; k < s.num_angles(); ++k) {
        auto in = s.row(k);
        auto out = d.row(k);
        out[0] = (in[1] - in[0]) / dt;
        out[T - 1] = (in[T - 1] - in[T - 2]) / dt;
        for (std::size_t l = 1; l + 1 < T; ++l) out[l] = (in[l + 1] - in[l - 1]) / (2.0 * dt);
    }
    return d;
}

namespace {

bool offsets_symmetric(const Sinogram& s) {
    const std::size_t T = s.num_offsets();
    const double tol = 1e-9 * std::abs(s.offsets.back());
    for (std::size_t l = 0; l < T; ++l) {
        if (std::abs(s.offsets[l] + s.offsets[T - 1 - l]) > tol) return false;
    }
    return true;
}

}  // namespace

RecoveredRadon recover_radon(const Sinogram& star_sino, const StarConfig& cfg,
                             const InversionSettings& settings) {
    star_sino.validate();
    if (!is_invertible(cfg)) {
        throw Error("symmetric configuration: the star transform is not invertible");
    }
    RecoveredRadon out;
    out.report = find_singular_directions(cfg, settings.scan);
    if (out.report.p2_identically_zero) {
        throw Error("symmetric configuration: P2 vanishes identically");
    }

    const int K = static_cast<int>(star_sino.num_angles());
    const std::size_t T = star_sino.num_offsets();
    const double step = kPi / K;
    const double margin = settings.singular_margin.value_or(2.0 * step);
    if (margin < 0.0) throw Error("singular margin must be non-negative");
    const int max_run = settings.max_interp_run.value_or(static_cast<int>(std::ceil(2.0 * margin / step - 1e-9)));

    std::vector<double> singular = out.report.type1_angles;
    singular.insert(singular.end(), out.report.type2_angles.begin(), out.report.type2_angles.end());

    out.valid.assign(K, true);
    std::vector<double> q(K, 0.0);
    for (int k = 0; k < K; ++k) {
        const double psi = star_sino.angles[k];
        for (double s : singular) {
            // Rows exactly `margin` away stay valid despite rounding in psi_k.
            if (std::abs(std::remainder(psi - s, kPi)) < margin - 1e-9 * step) {
                out.valid[k] = false;
                break;
            }
        }
        if (!out.valid[k]) continue;
        try {
            q[k] = q_eval(cfg, unit(psi), settings.scan.zero_floor);
        } catch (const SingularValueError&) {
            out.valid[k] = false;
        }
    }
    const auto masked = static_cast<int>(std::count(out.valid.begin(), out.valid.end(), false));
    if (4 * masked > K) {
        std::ostringstream os;
        os << "configuration too singular for K=" << K << " angles: " << masked
           << " rows fall inside singular margins (limit 25%)";
        throw Error(os.str());
    }

    const Sinogram deriv = differentiate_offsets(star_sino);
    out.sinogram = star_sino;
    for (int k = 0; k < K; ++k) {
        auto dst = out.sinogram.row(k);
        if (!out.valid[k]) {
            std::fill(dst.begin(), dst.end(), 0.0);
            continue;
        }
        auto src = deriv.row(k);
        for (std::size_t l = 0; l < T; ++l) dst[l] = q[k] * src[l];
    }
    if (masked == 0) return out;

    // Rows outside [0, K) are reached through Rf(psi + pi, t) = Rf(psi, -t).
    const bool can_wrap = offsets_symmetric(star_sino);
    auto fetch = [&](int idx, std::vector<double>& buf) -> bool {
        int k = ((idx % K) + K) % K;
        const bool flipped = ((idx - k) / K) % 2 != 0;
        if (flipped && !can_wrap) return false;
        auto r = out.sinogram.row(k);
        buf.assign(r.begin(), r.end());
        if (flipped) std::reverse(buf.begin(), buf.end());
        return true;
    };

    int start = 0;
    while (!out.valid[start]) ++start;  // a valid row exists: masked <= 25%
    std::vector<double> before, after;
    for (int i = 1; i <= K; ++i) {
        const int idx = start + i;
        if (out.valid[idx % K]) continue;
        int len = 0;
        while (!out.valid[(idx + len) % K]) ++len;
        const bool ok = settings.fill == FillStrategy::interpolate && len <= max_run &&
                        fetch(idx - 1, before) && fetch(idx + len, after);
        for (int j = 0; j < len; ++j) {
            const int k = (idx + j) % K;
            auto dst = out.sinogram.row(k);
            if (ok) {
                const double w = static_cast<double>(j + 1) / (len + 1);
                for (std::size_t l = 0; l < T; ++l) dst[l] = (1.0 - w) * before[l] + w * after[l];
                // Past pi the interpolant describes psi_k + pi.
                if (((idx + j) / K) % 2 != 0) std::reverse(dst.begin(), dst.end());
                out.interpolated_rows.push_back(k);
            } else {
                std::fill(dst.begin(), dst.end(), 0.0);
                out.zero_filled_rows.push_back(k);
            }
        }
        if (!ok && settings.fill == FillStrategy::interpolate) {
            std::ostringstream os;
            os << "zero-filled " << len << " consecutive masked rows starting at row " << idx % K
               << " (longer than " << max_run << ")";
            out.warnings.push_back(os.str());
        }
        i += len;
    }
    std::sort(out.interpolated_rows.begin(), out.interpolated_rows.end());
    std::sort(out.zero_filled_rows.begin(), out.zero_filled_rows.end());
    return out;
}

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t next_pow2(std::size_t v) {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

// Filters every row with the band-limited ramp kernel (optionally Hamming windowed).
Sinogram ramp_filter(const Sinogram& sino, RampFilter filter) {
    const std::size_t T = sino.num_offsets();
    const std::size_t N = next_pow2(2 * T);
    const std::size_t H = N / 2 + 1;
    const double dt = sino.dt();

    double* real = fftw_alloc_real(N);
    fftw_complex* spec = fftw_alloc_complex(H);
    fftw_plan fwd, inv;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(N), real, spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(N), spec, real, FFTW_ESTIMATE);
    }

    // Spatial kernel: h(0) = 1/(4 dt^2), h(odd n) = -1/(n pi dt)^2, wrapped.
    std::fill(real, real + N, 0.0);
    real[0] = 1.0 / (4.0 * dt * dt);
    for (std::size_t n = 1; n < T; n += 2) {
        const double v = -1.0 / (kPi * kPi * static_cast<double>(n * n) * dt * dt);
        real[n] = v;
        real[N - n] = v;
    }
    fftw_execute(fwd);
    std::vector<double> response(H);
    for (std::size_t k = 0; k < H; ++k) {
        double r = spec[k][0];
        if (filter == RampFilter::hamming) r *= 0.54 + 0.46 * std::cos(kPi * static_cast<double>(k) / (N / 2));
        response[k] = r * dt / static_cast<double>(N);
    }

    Sinogram out = sino;
    for (std::size_t k = 0; k < sino.num_angles(); ++k) {
        auto row = sino.row(k);
        std::copy(row.begin(), row.end(), real);
        std::fill(real + T, real + N, 0.0);
        fftw_execute(fwd);
        for (std::size_t j = 0; j < H; ++j) {
            spec[j][0] *= response[j];
            spec[j][1] *= response[j];
        }
        fftw_execute(inv);
        auto dst = out.row(k);
        std::copy(real, real + T, dst.begin());
    }

    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    fftw_free(real);
    fftw_free(spec);
    return out;
}

}  // namespace

ImageGrid fbp(const Sinogram& sino, int n, double half_width, RampFilter filter) {
    sino.validate();
    const Sinogram q = ramp_filter(sino, filter);
    const std::size_t K = sino.num_angles();
    const std::size_t T = sino.num_offsets();
    const double t0 = sino.offsets.front();
    const double inv_dt = 1.0 / sino.dt();
    std::vector<double> cs(K), sn(K);
    for (std::size_t k = 0; k < K; ++k) {
        cs[k] = std::cos(sino.angles[k]);
        sn[k] = std::sin(sino.angles[k]);
    }
    const double scale = kPi / static_cast<double>(K);

    ImageGrid img(n, half_width);
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < n; ++iy) {
        const double y = img.center(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = img.center(ix);
            double sum = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double f = (x * cs[k] + y * sn[k] - t0) * inv_dt;
                if (f < 0.0 || f > static_cast<double>(T - 1)) continue;
                auto l = static_cast<std::size_t>(f);
                if (l >= T - 1) l = T - 2;
                const double w = f - static_cast<double>(l);
                const double* row = q.values.data() + k * T;
                sum += row[l] + w * (row[l + 1] - row[l]);
            }
            img(ix, iy) = sum * scale;
        }
    }
    return img;
}

StarReconstruction invert_star(const StarField& field, const StarConfig& cfg, int num_angles,
                               int num_offsets, const InversionSettings& settings, int n,
                               double half_width, const RadonOptions& radon_opts) {
    const Sinogram star_sino = radon(field, num_angles, num_offsets, radon_opts);
    RecoveredRadon rec = recover_radon(star_sino, cfg, settings);
    ImageGrid img = fbp(rec.sinogram, n, half_width, settings.filter);
    return {std::move(img), std::move(rec)};
}

}  // namespace startx
