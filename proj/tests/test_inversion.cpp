#include <doctest.h>

#include <cmath>

#include "startx/error.hpp"
#include "startx/image.hpp"
#include "startx/inversion.hpp"
#include "startx/transforms.hpp"

using namespace startx;

namespace {

constexpr int kN = 128;
constexpr int kK = 180;
constexpr int kT = 300;

const ImageGrid& bump() {
    static const ImageGrid f = gaussian_bump({0.2, 0.1}, 0.12, kN, 1.0);
    return f;
}

const Sinogram& bump_radon() {
    static const Sinogram s = radon(bump(), kK, kT);
    return s;
}

double row_error(const Sinogram& a, const Sinogram& b, std::size_t k) {
    double e = 0.0;
    for (std::size_t l = 0; l < a.num_offsets(); ++l) e = std::max(e, std::abs(a.at(k, l) - b.at(k, l)));
    return e;
}

InversionSettings plain() {
    InversionSettings s;
    s.filter = RampFilter::ram_lak;
    return s;
}

}  // namespace

TEST_CASE("parse helpers") {
    CHECK(parse_filter("ram-lak") == RampFilter::ram_lak);
    CHECK(parse_filter("hamming") == RampFilter::hamming);
    CHECK(parse_fill("zero") == FillStrategy::zero);
    CHECK_THROWS_AS(parse_filter("shepp"), Error);
    CHECK_THROWS_AS(parse_fill("nearest"), Error);
}

TEST_CASE("differentiate_offsets on a quadratic") {
    Sinogram s = Sinogram::uniform(2, 11, 1.0);
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t l = 0; l < 11; ++l) s.at(k, l) = s.offsets[l] * s.offsets[l];
    }
    const Sinogram d = differentiate_offsets(s);
    for (std::size_t l = 1; l < 10; ++l) CHECK(d.at(1, l) == doctest::Approx(2 * s.offsets[l]));
    CHECK(d.at(0, 0) == doctest::Approx((s.at(0, 1) - s.at(0, 0)) / s.dt()));
}

TEST_CASE("divergent-beam (m = 1) inversion recovers Rf") {
    const StarConfig one = StarConfig::uniform({0.3});
    const RecoveredRadon rec = recover_radon(radon(star_transform(bump(), one), kK, kT), one, plain());
    const double mx = bump_radon().max_abs();
    for (std::size_t k = 0; k < kK; ++k) CHECK(row_error(rec.sinogram, bump_radon(), k) < 0.03 * mx);
}

TEST_CASE("regular 3-star recovers Rf on every row") {
    const StarConfig cfg = regular_star(3);
    const RecoveredRadon rec = recover_radon(radon(star_transform(bump(), cfg), kK, kT), cfg, plain());
    CHECK(rec.report.type2_angles.empty());
    CHECK(rec.zero_filled_rows.empty());
    CHECK(rec.warnings.empty());
    const double mx = bump_radon().max_abs();
    for (std::size_t k = 0; k < kK; ++k) CHECK(row_error(rec.sinogram, bump_radon(), k) < 0.03 * mx);
}

TEST_CASE("masking policy") {
    const Sinogram zero = Sinogram::uniform(kK, 64, 1.5);
    CHECK_THROWS_WITH_AS(recover_radon(zero, StarConfig::uniform({0.0, kPi}), plain()),
                         doctest::Contains("symmetric"), Error);

    InversionSettings wide = plain();
    wide.singular_margin = 20.0 * kPi / 180.0;
    CHECK_THROWS_WITH_AS(recover_radon(zero, regular_star(3), wide), doctest::Contains("too singular"), Error);

    // Type-1 directions of the regular 3-star sit on rows 30, 90 and 150 at K = 180;
    // a two-step margin masks each of them and its two neighbours.
    const std::vector<int> expect{29, 30, 31, 89, 90, 91, 149, 150, 151};
    const RecoveredRadon r = recover_radon(zero, regular_star(3), plain());
    CHECK(r.masked_rows() == expect);
    CHECK(r.interpolated_rows == expect);

    InversionSettings z = plain();
    z.fill = FillStrategy::zero;
    const RecoveredRadon rz = recover_radon(zero, regular_star(3), z);
    CHECK(rz.zero_filled_rows == expect);

    InversionSettings short_run = plain();
    short_run.max_interp_run = 0;
    const RecoveredRadon rs = recover_radon(zero, regular_star(3), short_run);
    CHECK(rs.zero_filled_rows == expect);
    CHECK(rs.warnings.size() == 3);
}

TEST_CASE("interpolation wraps through the Radon symmetry") {
    // Row 0 (psi = 0) is Type-1 for a ray along the y-axis.
    const StarConfig cfg = StarConfig::uniform({kPi / 2, kPi / 2 + 2 * kPi / 3, kPi / 2 - 2 * kPi / 3});
    const RecoveredRadon rec = recover_radon(radon(star_transform(bump(), cfg), kK, kT), cfg, plain());
    REQUIRE_FALSE(rec.valid[0]);
    const double mx = bump_radon().max_abs();
    CHECK(row_error(rec.sinogram, bump_radon(), 0) < 0.03 * mx);
    CHECK(rec.zero_filled_rows.empty());
}

TEST_CASE("zero data reconstructs to zero") {
    const Sinogram zero = Sinogram::uniform(kK, 64, 1.5);
    const RecoveredRadon r = recover_radon(zero, regular_star(5), plain());
    for (double v : r.sinogram.values) CHECK(v == 0.0);
    const ImageGrid img = fbp(zero, 32, 1.0);
    for (double v : img.values()) CHECK(v == 0.0);
}

TEST_CASE("q * dR(Sf)/dt stays bounded next to Type-2 directions") {
    const StarConfig cfg = StarConfig::uniform({0.0, kPi / 2, 3 * kPi / 4});
    const RecoveredRadon rec = recover_radon(radon(star_transform(bump(), cfg), kK, kT), cfg, plain());
    REQUIRE(rec.report.type2_angles.size() == 4);
    const double mx = bump_radon().max_abs();
    int checked = 0;
    for (int k = 0; k < kK; ++k) {
        if (!rec.valid[k]) continue;
        const bool edge = !rec.valid[(k + 1) % kK] || !rec.valid[(k + kK - 1) % kK];
        bool near_type2 = false;
        for (double a : rec.report.type2_angles) {
            near_type2 = near_type2 || std::abs(std::remainder(rec.sinogram.angles[k] - a, kPi)) < 3.0 * kPi / kK;
        }
        if (!edge || !near_type2) continue;
        ++checked;
        CHECK(rec.sinogram.max_abs() > 0.0);
        double row = 0.0;
        for (double v : rec.sinogram.row(k)) row = std::max(row, std::abs(v));
        CHECK(row <= 1.5 * mx);
    }
    CHECK(checked >= 4);
}

TEST_CASE("fbp reproduces a Gaussian") {
    const ImageGrid f = gaussian_bump({0.2, 0.1}, 0.12, 256, 1.0);
    const ImageGrid rec = fbp(radon(f, 360, 600), 256, 1.0, RampFilter::ram_lak);
    CHECK(rmse(rec, f, 1.0) / f.max_abs() < 0.03);
}

TEST_CASE("fbp is linear") {
    Sinogram a = bump_radon();
    const Sinogram b = radon(gaussian_bump({-0.3, 0.0}, 0.1, kN, 1.0), kK, kT);
    Sinogram c = a;
    for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] = 2.0 * a.values[i] - 0.5 * b.values[i];
    const ImageGrid fa = fbp(a, 64, 1.0);
    const ImageGrid fb = fbp(b, 64, 1.0);
    const ImageGrid fc = fbp(c, 64, 1.0);
    const double scale = fa.max_abs();
    for (std::size_t p = 0; p < fc.values().size(); ++p) {
        CHECK(std::abs(fc.values()[p] - (2.0 * fa.values()[p] - 0.5 * fb.values()[p])) < 1e-10 * scale);
    }
}

TEST_CASE("invert_star is linear end to end") {
    const ImageGrid f = gaussian_bump({0.2, 0.1}, 0.12, 64, 1.0);
    const ImageGrid g = gaussian_bump({-0.3, -0.2}, 0.08, 64, 1.0);
    ImageGrid h = f;
    for (std::size_t p = 0; p < h.values().size(); ++p) h.values()[p] = 1.5 * f.values()[p] - 2.0 * g.values()[p];
    const StarConfig cfg = StarConfig({0.1, 1.7, 3.9}, {1.0, 2.0, -0.5});
    InversionSettings s;
    auto run = [&](const ImageGrid& x) { return invert_star(star_transform(x, cfg, 2.0), cfg, 90, 128, s, 64, 1.0).image; };
    const ImageGrid rf = run(f), rg = run(g), rh = run(h);
    const double scale = std::max(rf.max_abs(), rg.max_abs());
    for (std::size_t p = 0; p < rh.values().size(); ++p) {
        CHECK(std::abs(rh.values()[p] - (1.5 * rf.values()[p] - 2.0 * rg.values()[p])) < 1e-8 * scale);
    }
}

TEST_CASE("invert_star round trip on a smooth phantom") {
    const ImageGrid f = gaussian_bump({0.2, 0.1}, 0.12, kN, 1.0);
    const StarConfig cfg = regular_star(3);
    InversionSettings s;
    s.filter = RampFilter::ram_lak;
    const auto rec = invert_star(star_transform(f, cfg), cfg, kK, kT, s, kN, 1.0);
    CHECK(rmse(rec.image, f, 1.0) / f.max_abs() < 0.05);
}

TEST_CASE("V-line inversion with Type-2 rows masked") {
    const ImageGrid f = gaussian_bump({0.2, 0.1}, 0.12, kN, 1.0);
    const StarConfig v = StarConfig::uniform({0.0, 2 * kPi / 3});
    InversionSettings s;
    s.filter = RampFilter::ram_lak;
    const auto rec = invert_star(star_transform(f, v), v, kK, kT, s, kN, 1.0);
    CHECK(rec.radon.report.type2_angles.size() == 2);
    CHECK(rmse(rec.image, f, 1.0) / f.max_abs() < 0.05);
}
