#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "generators.hpp"
#include "startx/error.hpp"
#include "startx/stability.hpp"
#include "startx/star_geometry.hpp"

using namespace startx;
namespace tg = startx::testgen;

namespace {

std::vector<double> degrees(std::initializer_list<double> d) {
    std::vector<double> r;
    for (double v : d) r.push_back(v * kPi / 180.0);
    return r;
}

bool same_p2(const StarConfig& a, const StarConfig& b, int samples, double tol, double sign = 1.0) {
    for (int s = 0; s < samples; ++s) {
        const double alpha = kTwoPi * s / samples;
        if (std::abs(p2_eval(a, alpha) - sign * p2_eval(b, alpha)) > tol) return false;
    }
    return true;
}

double flip_sign(const StarConfig& cfg) {
    double s = 1.0;
    for (double w : cfg.weights()) s *= w < 0.0 ? -1.0 : 1.0;
    return s;
}

bool same_q(const StarConfig& a, const StarConfig& b, int samples) {
    for (int s = 0; s < samples; ++s) {
        const Vec2 psi = unit(kTwoPi * (s + 0.37) / samples);
        double qa = 0.0, qb = 0.0;
        try {
            qa = q_eval(a, psi, 1e-6);
            qb = q_eval(b, psi, 1e-6);
        } catch (const SingularValueError&) {
            continue;
        }
        if (std::abs(qa - qb) > 1e-9 * (1.0 + std::abs(qa))) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("StarConfig rejects bad input") {
    CHECK_THROWS_AS(StarConfig({}, {}), Error);
    CHECK_THROWS_AS(StarConfig({0.0, 1.0}, {1.0}), Error);
    CHECK_THROWS_AS(StarConfig({0.0}, {0.0}), Error);
    CHECK_THROWS_AS(StarConfig::uniform({0.3, 0.3 + kTwoPi}), Error);
    CHECK_NOTHROW(StarConfig::uniform({0.3, 0.3 + 1e-6}));
}

TEST_CASE("aperture vectors have unit columns") {
    for (int rep = 0; rep < 50; ++rep) {
        const auto ap = tg::random_config(tg::uniform_int(1, 9), false).aperture();
        for (std::size_t i = 0; i < ap.a.size(); ++i) CHECK(std::abs(std::hypot(ap.a[i], ap.b[i]) - 1.0) < 1e-12);
    }
}

TEST_CASE("regular_star angles and aperture") {
    const StarConfig r3 = regular_star(3);
    REQUIRE(r3.size() == 3);
    CHECK(r3.angle(0) == doctest::Approx(0.0));
    CHECK(r3.angle(1) == doctest::Approx(kTwoPi / 3));
    CHECK(r3.angle(2) == doctest::Approx(-kTwoPi / 3));
    const auto ap = r3.aperture();
    CHECK(ap.a[0] == doctest::Approx(1.0));
    CHECK(ap.a[1] == doctest::Approx(-0.5));
    CHECK(ap.a[2] == doctest::Approx(-0.5));
    CHECK(ap.b[0] == doctest::Approx(0.0));
    CHECK(ap.b[1] == doctest::Approx(std::sqrt(3.0) / 2));
    CHECK(ap.b[2] == doctest::Approx(-std::sqrt(3.0) / 2));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i != j) CHECK(dot(r3.ray(i), r3.ray(j)) == doctest::Approx(-0.5));
        }
    }

    const StarConfig r5 = regular_star(5);
    const double expect[] = {0.0, 2 * kPi / 5, -2 * kPi / 5, 4 * kPi / 5, -4 * kPi / 5};
    for (int i = 0; i < 5; ++i) CHECK(r5.angle(i) == doctest::Approx(expect[i]));

    for (int m : {3, 5, 7, 9}) {
        const StarConfig r = regular_star(m);
        CHECK_FALSE(is_symmetric(r));
        CHECK(is_invertible(r));
        for (double w : r.weights()) CHECK(w == 1.0);
        const auto a = r.aperture();
        for (int j = 1; j + 1 < m; j += 2) {
            CHECK(a.a[j] == doctest::Approx(a.a[j + 1]));
            CHECK(a.b[j] == doctest::Approx(-a.b[j + 1]));
        }
    }
    for (int m : {-1, 0, 1, 2, 4, 6}) CHECK_THROWS_AS(regular_star(m), Error);
}

TEST_CASE("symmetry and invertibility examples") {
    CHECK(is_symmetric(StarConfig::uniform({0.0, kPi})));
    CHECK_FALSE(is_invertible(StarConfig::uniform({0.0, kPi})));
    CHECK(is_symmetric(StarConfig::uniform(degrees({10, 100, 190, 280}))));
    CHECK_FALSE(is_symmetric(StarConfig(degrees({10, 100, 190, 280}), {1, 1, 2, 1})));
    CHECK_FALSE(is_symmetric(regular_star(3)));
    CHECK(is_invertible(StarConfig::uniform(degrees({0, 90, 135, 200}))));
    CHECK_FALSE(is_symmetric(StarConfig::uniform(degrees({0, 180 + 1e-6}))));
    for (int rep = 0; rep < 100; ++rep) {
        const int m = 2 * tg::uniform_int(0, 4) + 1;
        CHECK(is_invertible(tg::random_config(m, false)));
    }
}

TEST_CASE("symmetric configurations built at random are detected") {
    for (int rep = 0; rep < 200; ++rep) {
        const int k = tg::uniform_int(1, 4);
        std::vector<double> base = tg::distinct_angles(k, 0.01);
        // Keep the k base rays and their antipodes pairwise distinct.
        bool ok = true;
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) ok = ok && std::abs(angular_distance(base[i], base[j]) - kPi) > 0.01;
        }
        if (!ok) continue;
        std::vector<double> a, w;
        for (int i = 0; i < k; ++i) {
            const double c = tg::log_uniform_weight(0.5, 2.0);
            a.push_back(base[i]);
            w.push_back(c);
            a.push_back(base[i] + kPi);
            w.push_back(c);
        }
        const StarConfig cfg(a, w);
        CHECK(is_symmetric(cfg));
        CHECK(find_singular_directions(cfg).p2_identically_zero);
        CHECK(find_singular_directions(cfg).classification() == Stability::non_invertible);
    }
}

TEST_CASE("permuting rays and weights changes nothing") {
    for (int rep = 0; rep < 100; ++rep) {
        const int m = tg::uniform_int(1, 8);
        const StarConfig cfg = tg::random_config(m, rep % 2 == 0);
        std::vector<int> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), tg::rng());
        std::vector<double> a, w;
        for (int p : perm) {
            a.push_back(cfg.angle(p));
            w.push_back(cfg.weight(p));
        }
        const StarConfig shuffled(a, w);
        CHECK(is_symmetric(shuffled) == is_symmetric(cfg));
        CHECK(is_invertible(shuffled) == is_invertible(cfg));
        CHECK(same_p2(cfg, shuffled, 64, 1e-12 * (1 + std::abs(cfg.weight_product()))));
    }
}

TEST_CASE("sign_normalize") {
    const StarConfig cfg(std::vector<double>{0.0, kTwoPi / 3, -kTwoPi / 3}, {1, -1, 1});
    const StarConfig n = sign_normalize(cfg);
    for (double w : n.weights()) CHECK(w == 1.0);
    CHECK(n.angle(1) == doctest::Approx(kTwoPi / 3 - kPi));
    CHECK(n.angle(0) == cfg.angle(0));
    // One flip: P2 changes sign, its zeros and q do not.
    CHECK(same_p2(cfg, n, 64, 1e-12, -1.0));
    CHECK(same_q(cfg, n, 64));

    const StarConfig pos = regular_star(5);
    const StarConfig same = sign_normalize(pos);
    for (std::size_t i = 0; i < pos.size(); ++i) CHECK(same.angle(i) == pos.angle(i));

    for (int rep = 0; rep < 200; ++rep) {
        const StarConfig c = tg::random_config(tg::uniform_int(1, 7), false);
        StarConfig once = c;
        try {
            once = sign_normalize(c);
        } catch (const Error&) {
            continue;  // flip landed on another ray
        }
        for (double w : once.weights()) CHECK(w > 0.0);
        double scale = 0.0;
        for (double w : c.weights()) scale += std::abs(w);
        CHECK(same_p2(c, once, 64, 1e-12 * scale, flip_sign(c)));
        CHECK(same_q(c, once, 64));
        const StarConfig twice = sign_normalize(once);
        for (std::size_t i = 0; i < c.size(); ++i) {
            CHECK(twice.angle(i) == once.angle(i));
            CHECK(twice.weight(i) == once.weight(i));
        }
    }

    CHECK_THROWS_AS(sign_normalize(StarConfig({0.0, kPi}, {1.0, -1.0})), Error);
}

TEST_CASE("stable_config_for_weights examples") {
    const StarConfig a = stable_config_for_weights(1, 1, 1);
    CHECK(find_singular_directions(a).type2_angles.empty());

    const StarConfig b = stable_config_for_weights(1, 1, 2);
    CHECK(b.weight(0) == 1.0);
    CHECK(b.weight(1) == 1.0);
    CHECK(b.weight(2) == 2.0);
    const auto rb = find_singular_directions(b);
    CHECK(rb.type2_angles.empty());
    CHECK(rb.p2_min_abs > 1e-6);

    // The (1, -1, 1) output is the (1, 1, 1) output with ray 2 flipped.
    const StarConfig c = stable_config_for_weights(1, -1, 1);
    CHECK(c.weight(1) == -1.0);
    const StarConfig cn = sign_normalize(c);
    for (int i = 0; i < 3; ++i) {
        CHECK(angular_distance(cn.angle(i), a.angle(i)) < 1e-12);
        CHECK(cn.weight(i) == a.weight(i));
    }

    CHECK_THROWS_AS(stable_config_for_weights(0, 1, 1), Error);
}

TEST_CASE("stable_config_for_weights on random triples") {
    for (int rep = 0; rep < 100; ++rep) {
        const double c1 = tg::log_uniform_weight(0.5, 2.0);
        const double c2 = tg::log_uniform_weight(0.5, 2.0);
        const double c3 = tg::log_uniform_weight(0.5, 2.0);
        const StarConfig cfg = stable_config_for_weights(c1, c2, c3);
        CHECK(cfg.weight(0) == c1);
        CHECK(cfg.weight(1) == c2);
        CHECK(cfg.weight(2) == c3);
        const auto rep_ = find_singular_directions(cfg);
        CHECK(rep_.type2_angles.empty());
        CHECK(rep_.p2_min_abs > 0.0);
    }
}

TEST_CASE("admissible_normal") {
    CHECK(admissible_normal({1, 1, 1}));
    CHECK(admissible_normal({0, 1, 1}));
    CHECK(admissible_normal({1, 0, 1}));
    CHECK(admissible_normal({1, 1, 0}));
    CHECK(admissible_normal({-1, 1, 1}));
    CHECK_FALSE(admissible_normal({3, 1, 1}));
    CHECK_FALSE(admissible_normal({1, 3, 1}));
    CHECK(admissible_normal({1, 1, 0.5}));
}
