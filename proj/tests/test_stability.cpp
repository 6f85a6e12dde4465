#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "startx/error.hpp"
#include "startx/stability.hpp"

using namespace startx;
namespace tg = startx::testgen;

namespace {

// Coefficients of P2(r, s) = sum_j c_j prod_{i != j} (a_i r + b_i s), indexed by
// the power of r (the power of s is m - 1 minus it).
std::vector<double> expand_p2(const StarConfig& cfg) {
    const auto ap = cfg.aperture();
    const std::size_t m = cfg.size();
    std::vector<double> total(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> poly{cfg.weight(j)};
        for (std::size_t i = 0; i < m; ++i) {
            if (i == j) continue;
            std::vector<double> next(poly.size() + 1, 0.0);
            for (std::size_t p = 0; p < poly.size(); ++p) {
                next[p + 1] += poly[p] * ap.a[i];
                next[p] += poly[p] * ap.b[i];
            }
            poly = std::move(next);
        }
        for (std::size_t p = 0; p < m; ++p) total[p] += poly[p];
    }
    return total;
}

// Zeros of P2 on the circle from the expanded polynomial: real roots x of
// P2(x, 1) give psi ~ (x, 1), and a vanishing r^{m-1} coefficient adds psi = (1, 0).
std::vector<double> oracle_zeros(const StarConfig& cfg) {
    std::vector<double> coef = expand_p2(cfg);
    double scale = 0.0;
    for (double c : coef) scale = std::max(scale, std::abs(c));
    std::vector<double> out;
    int deg = static_cast<int>(coef.size()) - 1;
    if (std::abs(coef[deg]) < 1e-13 * scale) {
        out.push_back(0.0);
        out.push_back(kPi);
    }
    while (deg > 0 && std::abs(coef[deg]) < 1e-13 * scale) --deg;
    if (deg >= 1) {
        Eigen::VectorXd c(deg + 1);
        for (int p = 0; p <= deg; ++p) c(p) = coef[p];
        Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(c);
        for (const auto& z : solver.roots()) {
            if (std::abs(z.imag()) > 1e-9 * (1.0 + std::abs(z.real()))) continue;
            const double a = std::atan2(1.0, z.real());
            out.push_back(wrap_two_pi(a));
            out.push_back(wrap_two_pi(a + kPi));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool matches(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (double x : a) {
        bool hit = false;
        for (double y : b) hit = hit || angular_distance(x, y) < tol;
        if (!hit) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("elem_sym_poly") {
    const std::vector<double> y{1.0, -0.5, -0.5};
    CHECK(std::abs(elem_sym_poly(y) + 0.75) < 1e-15);
    CHECK(elem_sym_poly(std::vector<double>{7.0}) == 1.0);
    for (int m = 2; m <= 6; ++m) CHECK(elem_sym_poly(std::vector<double>(m, 0.0)) == 0.0);
    for (int rep = 0; rep < 100; ++rep) {
        const int m = tg::uniform_int(1, 8);
        std::vector<double> v(m), w(m);
        for (int i = 0; i < m; ++i) {
            v[i] = tg::uniform(-2, 2);
            w[i] = 2 * v[i];
        }
        const double e = elem_sym_poly(v);
        CHECK(std::abs(elem_sym_poly(w) - std::pow(2.0, m - 1) * e) < 1e-12 * std::pow(2.0, m - 1) * (1 + std::abs(e)) * 16);
    }
}

TEST_CASE("p2 forms agree") {
    for (int rep = 0; rep < 500; ++rep) {
        const StarConfig cfg = tg::random_config(tg::uniform_int(1, 9), false);
        const Vec2 psi = tg::random_direction();
        const double a = p2_eval(cfg, psi);
        const double b = p2_eval_scaled(cfg, psi);
        double scale = 0.0;
        for (std::size_t j = 0; j < cfg.size(); ++j) scale += std::abs(cfg.weight(j));
        CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), scale));
        // Homogeneous of degree m - 1 in psi.
        const double lam = tg::uniform(0.5, 2.0);
        CHECK(std::abs(p2_eval(cfg, lam * psi) - std::pow(lam, cfg.size() - 1) * a) <=
              1e-10 * std::max(1.0, std::pow(lam, cfg.size() - 1)) * scale);
    }
}

TEST_CASE("p2 examples") {
    for (int k = 0; k < 32; ++k) CHECK(std::abs(p2_eval(regular_star(3), kTwoPi * k / 32) + 0.75) < 1e-12);
    const StarConfig v = StarConfig::uniform({0.0, kTwoPi / 3});
    CHECK(std::abs(p2_eval(v, -kPi / 6)) < 1e-15);
    CHECK(std::abs(p2_eval(v, 5 * kPi / 6)) < 1e-15);
}

TEST_CASE("p2 parity and period") {
    for (int rep = 0; rep < 200; ++rep) {
        const int m = tg::uniform_int(1, 8);
        const StarConfig cfg = tg::random_config(m, true);
        const double sign = m % 2 == 0 ? -1.0 : 1.0;
        for (int s = 0; s < 16; ++s) {
            const double a = tg::uniform(0, kTwoPi);
            CHECK(std::abs(p2_eval(cfg, a + kPi) - sign * p2_eval(cfg, a)) < 1e-10 * m);
        }
    }
    for (int m : {3, 5, 7, 9}) {
        const StarConfig r = regular_star(m);
        for (int s = 0; s < 64; ++s) {
            const double a = kTwoPi * s / 64;
            CHECK(std::abs(p2_eval(r, a + kTwoPi / m) - p2_eval(r, a)) < 1e-10);
        }
    }
}

TEST_CASE("regular star P2 is a polynomial in cos(alpha)") {
    for (int m : {3, 5, 7, 9}) {
        const StarConfig r = regular_star(m);
        constexpr int N = 256;
        Eigen::MatrixXd A(N, m);
        Eigen::VectorXd y(N);
        for (int s = 0; s < N; ++s) {
            const double a = kTwoPi * (s + 0.5) / N;
            for (int p = 0; p < m; ++p) A(s, p) = std::pow(std::cos(a), p);
            y(s) = p2_eval(r, a);
        }
        const Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
        CHECK((A * x - y).norm() / std::sqrt(double(N)) < 1e-8);
    }
}

TEST_CASE("find_singular_directions examples") {
    const auto r3 = find_singular_directions(regular_star(3));
    CHECK(r3.type2_angles.empty());
    CHECK(r3.p2_is_constant);
    CHECK(r3.invertible);
    CHECK(r3.classification() == Stability::stable);
    CHECK(r3.type1_angles.size() == 6);
    CHECK(std::abs(r3.p2_min_abs - 0.75) < 1e-12);

    for (int m : {5, 7}) {
        const auto r = find_singular_directions(regular_star(m));
        CHECK(r.type2_angles.empty());
        CHECK(r.p2_is_constant);
    }

    const auto v = find_singular_directions(StarConfig::uniform({0.0, kTwoPi / 3}));
    REQUIRE(v.type2_angles.size() == 2);
    CHECK(angular_distance(v.type2_angles[0], 5 * kPi / 6) < 1e-9);
    CHECK(angular_distance(v.type2_angles[1], -kPi / 6) < 1e-9);
    CHECK(v.classification() == Stability::unstable);

    const auto sym = find_singular_directions(StarConfig::uniform({0.0, kPi}));
    CHECK(sym.p2_identically_zero);
    CHECK_FALSE(sym.invertible);
    CHECK(sym.classification() == Stability::non_invertible);

    for (int m : {3, 5, 7}) CHECK_FALSE(find_singular_directions(halfplane_demo_config(m)).type2_angles.empty());

    // Antipodal pair inside a larger star: the normal to the pair is a Type-2 zero.
    // Here P2 = -cos^2, a double zero, located only to about sqrt(machine eps).
    const StarConfig pair = StarConfig::uniform({0.0, kPi, 1.0});
    const auto rp = find_singular_directions(pair);
    bool hit = false;
    for (double a : rp.type2_angles) hit = hit || angular_distance(a, kPi / 2) < 1e-7;
    CHECK(hit);

    ScanSettings bad;
    bad.n_samples = 8;
    CHECK_THROWS_AS(find_singular_directions(regular_star(3), bad), Error);
}

TEST_CASE("type-1 angles and odd-m antipodal pairing") {
    for (int rep = 0; rep < 100; ++rep) {
        const int m = tg::uniform_int(1, 7);
        std::vector<double> a = tg::distinct_angles(m, 0.05);
        bool parallel = false;
        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) parallel = parallel || std::abs(angular_distance(a[i], a[j]) - kPi) < 0.05;
        }
        if (parallel) continue;
        const StarConfig cfg = StarConfig::uniform(a);
        const auto r = find_singular_directions(cfg);
        CHECK(r.type1_angles.size() == static_cast<std::size_t>(2 * m));
        CHECK(std::is_sorted(r.type2_angles.begin(), r.type2_angles.end()));
        if (m % 2 == 1) {
            for (double t : r.type2_angles) {
                bool partner = false;
                for (double u : r.type2_angles) partner = partner || angular_distance(t + kPi, u) < 1e-8;
                CHECK(partner);
            }
        }
    }
}

TEST_CASE("even m non-symmetric configurations always have Type-2 zeros") {
    int checked = 0;
    while (checked < 1000) {
        const int m = 2 * tg::uniform_int(1, 4);
        const StarConfig cfg = tg::random_config(m, checked % 2 == 0);
        if (is_symmetric(cfg)) continue;
        ++checked;
        CHECK_FALSE(find_singular_directions(cfg).type2_angles.empty());
    }
}

TEST_CASE("scan agrees with the expanded-polynomial oracle for m <= 4") {
    int checked = 0;
    for (int rep = 0; rep < 300; ++rep) {
        const int m = tg::uniform_int(2, 4);
        const StarConfig cfg = tg::random_config(m, rep % 3 == 0);
        const auto oracle = oracle_zeros(cfg);
        const auto r = find_singular_directions(cfg);
        // Skip near-double roots, where neither method is well conditioned.
        bool close_pair = false;
        for (std::size_t i = 0; i + 1 < oracle.size(); ++i) close_pair = close_pair || oracle[i + 1] - oracle[i] < 1e-3;
        if (close_pair) continue;
        ++checked;
        CHECK(matches(r.type2_angles, oracle, 1e-8));
    }
    CHECK(checked > 200);
}

TEST_CASE("w and q") {
    for (int rep = 0; rep < 300; ++rep) {
        const StarConfig cfg = tg::random_config(tg::uniform_int(1, 7), false);
        const Vec2 psi = tg::random_direction();
        double prod = 1.0;
        bool near = false;
        for (std::size_t i = 0; i < cfg.size(); ++i) {
            prod *= dot(psi, cfg.ray(i));
            near = near || std::abs(dot(psi, cfg.ray(i))) < 1e-3;
        }
        const double p2 = p2_eval(cfg, psi);
        if (near || std::abs(p2) < 1e-3) continue;
        const double q = q_eval(cfg, psi);
        CHECK(std::abs(q - (-prod / p2)) <= 1e-10 * std::abs(q));
        CHECK(std::abs(q + 1.0 / w_eval(cfg, psi)) <= 1e-10 * std::abs(q));
    }

    const StarConfig one = StarConfig::uniform({0.4});
    const StarConfig two({0.4, 2.0}, {1.5, -0.7});
    for (int rep = 0; rep < 50; ++rep) {
        const Vec2 psi = tg::random_direction();
        const double d1 = dot(psi, one.ray(0));
        if (std::abs(d1) > 1e-3) CHECK(q_eval(one, psi) == doctest::Approx(-d1));
        const double g1 = dot(psi, two.ray(0));
        const double g2 = dot(psi, two.ray(1));
        const double den = two.weight(1) * g1 + two.weight(0) * g2;
        if (std::abs(g1) > 1e-3 && std::abs(g2) > 1e-3 && std::abs(den) > 1e-3) {
            CHECK(q_eval(two, psi) == doctest::Approx(-g1 * g2 / den).epsilon(1e-10));
        }
    }

    const StarConfig sym = StarConfig::uniform({0.0, kPi});
    try {
        q_eval(sym, unit(0.3));
        FAIL("q of a symmetric star must throw");
    } catch (const SingularValueError& e) {
        CHECK(e.set() == SingularSet::type2);
    }
    CHECK(std::abs(w_eval(sym, unit(0.3))) < 1e-15);
    try {
        q_eval(regular_star(3), unit(kPi / 2));
        FAIL("q at a Type-1 direction must throw");
    } catch (const SingularValueError& e) {
        CHECK(e.set() == SingularSet::type1);
        CHECK(e.angle() == doctest::Approx(kPi / 2));
    }
}

TEST_CASE("conjecture scan") {
    const auto s3 = conjecture_scan(3, 10000);
    CHECK(std::abs(s3.min_abs - 0.75) < 1e-10);
    CHECK(s3.is_constant);
    for (int m : {5, 7, 9}) {
        const auto s = conjecture_scan(m, 10000);
        CHECK(s.min_abs > 0.0);
        CHECK(s.is_constant);
    }
    CHECK_FALSE(aperture_scan(halfplane_demo_config(3).aperture(), 4096).is_constant);
}

TEST_CASE("e2 cone") {
    const std::array<double, 3> on{1.0, 1.0, -0.5};
    CHECK(e2_cone_check(on));
    CHECK_FALSE(e2_cone_check({1.0, 1.0, 1.0}));
    for (double lam : {-3.0, 0.1, 1.0, 7.0}) CHECK_FALSE(e2_cone_check({lam, -lam / 2, -lam / 2}));
    // On the cone, cos^2 of the angle to (1, 1, 1) is 1/3.
    for (int rep = 0; rep < 200; ++rep) {
        // Solve e2(u, v, t) = 0 for t: t = -uv / (u + v).
        const double u = tg::uniform(-2, 2);
        const double v = tg::uniform(-2, 2);
        if (std::abs(u + v) < 0.1) continue;
        const std::array<double, 3> y{u, v, -u * v / (u + v)};
        CHECK(e2_cone_check(y));
        const double s = y[0] + y[1] + y[2];
        const double n2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        CHECK(std::abs(s * s / (3.0 * n2) - 1.0 / 3.0) < 1e-9);
    }
}
