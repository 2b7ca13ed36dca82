#include <doctest.h>

#include "fockopt/metrics.hpp"
#include "fockopt/operators.hpp"
#include "fockopt/targets.hpp"

#include <cmath>
#include <numbers>

using namespace fockopt;

TEST_CASE("fidelity") {
    Truncation t(10);
    auto z = basis_state(t, 0), o = basis_state(t, 1);
    CHECK(metrics::fidelity(z, z) == doctest::Approx(1.0));
    CHECK(metrics::fidelity(z, o) == 0.0);
    Mat m = Mat::Identity(10, 10) / 10.0;
    DensityOperator mix(t, m);
    CHECK(metrics::fidelity(mix, mix) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(metrics::fidelity(mix, z) == doctest::Approx(0.1));
    CHECK(metrics::fidelity(to_density(z), to_density(z)) == doctest::Approx(1.0).epsilon(1e-10));
    auto c = targets::coherent(0.5, t);
    auto cn = normalize(c).first;
    CHECK(metrics::fidelity(to_density(cn), to_density(z)) == doctest::Approx(metrics::fidelity(cn, z)).epsilon(1e-8));
    PureState un(t, 2.0 * z.amp);
    CHECK_THROWS_AS(metrics::fidelity(un, z), ValidationError);
    CHECK_THROWS_AS(metrics::fidelity(z, basis_state(Truncation(8), 0)), ValidationError);
}

TEST_CASE("Wigner function") {
    Truncation t(12);
    const std::vector<double> o{0.0};
    CHECK(metrics::wigner(basis_state(t, 0), o, o).w[0] == doctest::Approx(1.0 / (2 * std::numbers::pi)));
    CHECK(metrics::wigner(basis_state(t, 1), o, o).w[0] == doctest::Approx(-1.0 / (2 * std::numbers::pi)));
    // axes are eigenvalues of x = a + a^dag and p = i(a - a^dag): |alpha> peaks at (2 Re alpha, -2 Im alpha)
    const cplx a(0.8, -0.6);
    auto c = normalize(targets::coherent(a, Truncation(30))).first;
    const std::vector<double> xs{1.6}, ps{1.2};
    CHECK(metrics::wigner(c, xs, ps).w[0] == doctest::Approx(1.0 / (2 * std::numbers::pi)).epsilon(1e-10));
    // normalization on a grid
    auto grid = metrics::linspace(-8.0, 8.0, 0.1);
    auto w = metrics::wigner(targets::ideal_cat({1.5, 0.0, targets::Parity::Odd}, Truncation(30)), grid, grid, 2);
    double s = 0.0;
    for (double v : w.w) s += v * 0.01;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    // threaded and serial runs are identical
    auto w1 = metrics::wigner(c, grid, grid, 1);
    auto w3 = metrics::wigner(c, grid, grid, 3);
    CHECK(w1.w == w3.w);
}

TEST_CASE("even cat fringes alternate along p") {
    auto e = targets::ideal_cat({4.9, 0.0, targets::Parity::Even}, Truncation(120));
    const std::vector<double> x0{0.0};
    // interference term goes as cos(2 alpha p)
    const double per = std::numbers::pi / 4.9;
    const std::vector<double> ps{0.0, per / 2, per};
    auto w = metrics::wigner(e, x0, ps);
    CHECK(w.w[0] > 0.0);
    CHECK(w.w[1] < 0.0);
    CHECK(w.w[2] > 0.0);
}

TEST_CASE("parity") {
    CHECK(metrics::parity(targets::squeezed_vacuum(0.5, Truncation(40))) == doctest::Approx(1.0));
    CHECK(metrics::parity(basis_state(Truncation(4), 1)) == -1.0);
    CHECK(metrics::parity(to_density(basis_state(Truncation(4), 1))) == -1.0);
}

TEST_CASE("stabilizers and effective squeezing") {
    Truncation t(40);
    auto v = basis_state(t, 0);
    const cplx sx = metrics::stabilizer_expectation(v, metrics::Stabilizer::Sx);
    CHECK(std::abs(sx) == doctest::Approx(std::exp(-std::numbers::pi / 2)).epsilon(1e-12));
    auto sq = metrics::effective_squeezing(v);
    CHECK(std::abs(sq.db_x) < 1e-10);
    CHECK(std::abs(sq.db_p) < 1e-10);
    CHECK(std::abs(sq.delta2_x - 1.0) < 1e-10);
    auto sqd = metrics::effective_squeezing(to_density(v));
    CHECK(std::abs(sqd.db_x) < 1e-10);
    auto zero = metrics::squeezing_from_stabilizers(0.0, 1.0);
    CHECK(std::isinf(zero.delta2_x));
    CHECK(zero.db_x == -INFINITY);
    CHECK(zero.symmetric_db == -INFINITY);
    // density and pure routes agree on a non-trivial state
    auto c = targets::ideal_cat({1.7, 0.2, targets::Parity::Even}, t);
    CHECK(std::abs(metrics::stabilizer_expectation(c, metrics::Stabilizer::Sp) -
                   metrics::stabilizer_expectation(to_density(c), metrics::Stabilizer::Sp)) < 1e-10);
}

TEST_CASE("squeezing correction") {
    Truncation t(80);
    CHECK(std::abs(metrics::squeezing_correction(basis_state(t, 0))) < 1e-14);
    CHECK(std::abs(metrics::squeezing_correction(basis_state(t, 3))) < 1e-14);
    CHECK(metrics::squeezing_correction(targets::squeezed_vacuum(0.35, t)) == doctest::Approx(-0.35).epsilon(1e-8));
    auto m = metrics::quadrature_moments(targets::coherent(cplx(0.5, 0.25), t));
    CHECK(m.mean_x == doctest::Approx(1.0));
    CHECK(m.var_x == doctest::Approx(1.0));
    CHECK(m.var_p == doctest::Approx(1.0));
}

TEST_CASE("linspace") {
    auto g = metrics::linspace(-1.0, 1.0, 0.5);
    CHECK(g.size() == 5);
    CHECK_THROWS_AS(metrics::linspace(0.0, 1.0, 0.0), ValidationError);
}
