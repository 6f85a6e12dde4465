#include "startx/scatter.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <sstream>

#include "startx/error.hpp"
#include "startx/transforms.hpp"

namespace startx {

const ImageGrid& ScatterData::at(int i, int j) const {
    auto it = phi.find({i, j});
    if (it == phi.end()) {
        throw Error("scatter data: no measurement for pair (" + std::to_string(i + 1) + ", " +
                    std::to_string(j + 1) + ")");
    }
    return it->second;
}

void ScatterData::validate() const {
    const int m = num_rays();
    if (m < 2) throw Error("scatter data: need at least two directions");
    if (k.size != m) throw Error("scatter data: k must be m x m");
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i != j && !(k(i, j) > 0.0)) throw Error("scatter data: k_ij must be positive");
        }
    }
    const ImageGrid* first = nullptr;
    for (const auto& [key, g] : phi) {
        if (key.first == key.second || key.first < 0 || key.second < 0 || key.first >= m || key.second >= m) {
            throw Error("scatter data: bad pair index");
        }
        if (first == nullptr) first = &g;
        else if (!g.same_shape(*first)) throw Error("scatter data: measurement grids differ in shape");
    }
    if (first == nullptr) throw Error("scatter data: no measurements");
    if (inner_n < 8 || inner_n > first->size() || (first->size() - inner_n) % 2 != 0) {
        throw Error("scatter data: inner grid does not nest in the measurement grid");
    }
}

namespace {

Matrix checked_k(const Matrix& k, int m) {
    if (k.size == 0) return Matrix::filled(m, 1.0);
    if (k.size != m) throw Error("simulate_scatter: k must be m x m");
    return k;
}

// Value of the enlarged grid pixel matching an inner-grid pixel.
int inner_offset(int outer_n, int inner_n) { return (outer_n - inner_n) / 2; }

}  // namespace

ScatterData simulate_scatter(const ImageGrid& f, const ImageGrid& eta, const std::vector<double>& angles,
                             const Matrix& k, double ext_factor) {
    if (!f.same_shape(eta)) throw Error("simulate_scatter: f and eta must share a grid");
    const StarConfig dirs = StarConfig::uniform(angles);  // validates distinct directions
    const int m = static_cast<int>(dirs.size());

    ScatterData data;
    data.angles.assign(dirs.angles().begin(), dirs.angles().end());
    data.k = checked_k(k, m);
    data.inner_n = f.size();
    data.inner_half_width = f.half_width();
    data.ext_factor = ext_factor;

    const int ne = extended_size(f.size(), ext_factor);
    const double le = 0.5 * ne * f.pitch();
    const int off = inner_offset(ne, f.size());

    std::vector<ImageGrid> beams;
    beams.reserve(m);
    for (int i = 0; i < m; ++i) beams.push_back(divergent_beam_field(f, dirs.ray(i), ne, le));

    ImageGrid eta_ext(ne, le);
    for (int iy = 0; iy < eta.size(); ++iy) {
        for (int ix = 0; ix < eta.size(); ++ix) eta_ext(ix + off, iy + off) = eta(ix, iy);
    }

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            ImageGrid g(ne, le);
            auto out = g.values();
            auto xi = beams[i].values();
            auto xj = beams[j].values();
            auto e = eta_ext.values();
            const double kij = data.k(i, j);
            for (std::size_t p = 0; p < out.size(); ++p) out[p] = xi[p] + kij * xj[p] + e[p];
            data.phi.emplace(std::make_pair(i, j), std::move(g));
        }
    }
    data.validate();
    return data;
}

std::vector<double> OmegaMatrix::row_sums() const {
    std::vector<double> s(w.size, 0.0);
    for (int i = 0; i < w.size; ++i) {
        for (int j = 0; j < w.size; ++j) s[i] += w(i, j);
    }
    return s;
}

void OmegaMatrix::validate() const {
    double total = 0.0, scale = 0.0;
    for (int i = 0; i < w.size; ++i) {
        if (w(i, i) != 0.0) throw Error("omega: diagonal must be zero");
        for (int j = 0; j < w.size; ++j) {
            if (std::abs(w(i, j) - w(j, i)) > 1e-12 * (1.0 + std::abs(w(i, j)))) {
                throw Error("omega: matrix must be symmetric");
            }
            total += w(i, j);
            scale = std::max(scale, std::abs(w(i, j)));
        }
    }
    if (std::abs(total) > 1e-12 * std::max(1.0, scale)) throw Error("omega: entries must sum to zero");
}

OmegaMatrix omega_for_weights(const std::vector<double>& c) {
    const int m = static_cast<int>(c.size());
    if (m < 3) throw Error("omega_for_weights: need m >= 3 weights");
    double sum = 0.0, scale = 0.0;
    for (double v : c) {
        sum += v;
        scale = std::max(scale, std::abs(v));
    }
    if (std::abs(sum) > 1e-10 * scale) {
        std::ostringstream os;
        os << "omega_for_weights: weights must sum to zero to cancel eta (sum = " << sum << ")";
        throw Error(os.str());
    }

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        A(pairs[p].first, static_cast<Eigen::Index>(p)) = 1.0;
        A(pairs[p].second, static_cast<Eigen::Index>(p)) = 1.0;
    }
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(c.data(), m);
    const Eigen::VectorXd x = A.completeOrthogonalDecomposition().solve(rhs);
    if ((A * x - rhs).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale)) {
        throw Error("omega_for_weights: no symmetric zero-diagonal matrix has these row sums");
    }

    OmegaMatrix out{Matrix::filled(m, 0.0)};
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        out.w(pairs[p].first, pairs[p].second) = x(static_cast<Eigen::Index>(p));
        out.w(pairs[p].second, pairs[p].first) = x(static_cast<Eigen::Index>(p));
    }
    return out;
}

std::vector<PairTerm> combination_from_omega(const OmegaMatrix& omega) {
    omega.validate();
    std::vector<PairTerm> terms;
    for (int i = 0; i < omega.w.size; ++i) {
        for (int j = i + 1; j < omega.w.size; ++j) {
            if (omega.w(i, j) != 0.0) terms.push_back({i, j, omega.w(i, j)});
        }
    }
    return terms;
}

std::vector<double> combination_weights(const std::vector<PairTerm>& terms, const Matrix& k, int m) {
    std::vector<double> c(m, 0.0);
    for (const auto& t : terms) {
        if (t.i < 0 || t.j < 0 || t.i >= m || t.j >= m || t.i == t.j) {
            throw Error("combination: bad pair index");
        }
        c[t.i] += t.coef;
        c[t.j] += t.coef * k(t.i, t.j);
    }
    return c;
}

double combination_eta_coefficient(const std::vector<PairTerm>& terms) {
    double s = 0.0;
    for (const auto& t : terms) s += t.coef;
    return s;
}

ImageGrid combine(const ScatterData& data, const std::vector<PairTerm>& terms) {
    if (terms.empty()) throw Error("combination: no terms");
    const ImageGrid& first = data.at(terms.front().i, terms.front().j);
    ImageGrid out(first.size(), first.half_width());
    auto dst = out.values();
    for (const auto& t : terms) {
        auto src = data.at(t.i, t.j).values();
        for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += t.coef * src[p];
    }
    return out;
}

std::vector<double> zero_sum_weight_preset(int m) {
    if (m < 3 || m % 2 == 0) throw Error("zero_sum_weight_preset: m must be odd and >= 3");
    const int k = (m - 1) / 2;
    std::vector<double> c(m);
    for (int i = 0; i < m; ++i) c[i] = i < k ? -1.0 / k : 1.0 / (k + 1);
    return c;
}

ScatterRecovery recover_f_eta(const ScatterData& data, const std::vector<PairTerm>& terms,
                              const ScatterRecoverySettings& settings) {
    data.validate();
    const int m = data.num_rays();
    double abs_sum = 0.0;
    for (const auto& t : terms) abs_sum += std::abs(t.coef);
    if (std::abs(combination_eta_coefficient(terms)) > 1e-10 * abs_sum) {
        throw Error("scatter recovery: combination coefficients must sum to zero to eliminate eta");
    }

    const std::vector<double> c = combination_weights(terms, data.k, m);
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    std::vector<double> used_angles, used_weights;
    for (int i = 0; i < m; ++i) {
        if (std::abs(c[i]) > 1e-12 * cmax) {
            used_angles.push_back(data.angles[i]);
            used_weights.push_back(c[i]);
        }
    }
    if (used_weights.empty()) throw Error("scatter recovery: combination cancels every ray");
    const StarConfig cfg(used_angles, used_weights);
    if (!is_invertible(cfg)) throw Error("scatter recovery: combination yields a symmetric star");

    ImageGrid combined = combine(data, terms);
    StarField field{combined, data.ext_factor, data.inner_half_width, cfg, {}};
    field.profiles = strip_profiles_from_field(field.grid, cfg, data.inner_half_width);

    const int ne = field.grid.size();
    const int T = settings.num_offsets > 0 ? settings.num_offsets : 2 * data.inner_n;
    StarReconstruction rec = invert_star(field, cfg, settings.num_angles, T, settings.inversion,
                                         data.inner_n, data.inner_half_width);

    // supp f lies in the disc of radius L; drop reconstruction noise outside it.
    ImageGrid fhat = rec.image;
    for (int iy = 0; iy < fhat.size(); ++iy) {
        for (int ix = 0; ix < fhat.size(); ++ix) {
            if (norm(fhat.center(ix, iy)) >= data.inner_half_width) fhat(ix, iy) = 0.0;
        }
    }

    const int n = data.inner_n;
    const double L = data.inner_half_width;
    std::vector<ImageGrid> beams;
    beams.reserve(m);
    for (int i = 0; i < m; ++i) beams.push_back(divergent_beam_field(fhat, unit(data.angles[i]), n, L));

    const int off = inner_offset(ne, n);
    ImageGrid eta(n, L);
    int pairs = 0;
    for (const auto& [key, g] : data.phi) {
        const auto [i, j] = key;
        const double kij = data.k(i, j);
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                eta(ix, iy) += g(ix + off, iy + off) - beams[i](ix, iy) - kij * beams[j](ix, iy);
            }
        }
        ++pairs;
    }
    for (double& v : eta.values()) v /= pairs;

    return {std::move(fhat), std::move(eta), c, std::move(rec)};
}

ScatterRecovery recover_f_eta(const ScatterData& data, const std::vector<double>& c,
                              const ScatterRecoverySettings& settings) {
    for (int i = 0; i < data.num_rays(); ++i) {
        for (int j = 0; j < data.num_rays(); ++j) {
            if (i != j && std::abs(data.k(i, j) - 1.0) > 1e-12) {
                throw Error("scatter recovery from weights needs k_ij = 1; pass an explicit combination otherwise");
            }
        }
    }
    if (static_cast<int>(c.size()) != data.num_rays()) throw Error("scatter recovery: one weight per direction");
    return recover_f_eta(data, combination_from_omega(omega_for_weights(c)), settings);
}

}  // namespace startx
