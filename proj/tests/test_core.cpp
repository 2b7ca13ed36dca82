#include <doctest.h>

#include "fockopt/core.hpp"
#include "fockopt/operators.hpp"
#include "fockopt/targets.hpp"

#include <cmath>

using namespace fockopt;

TEST_CASE("tensor index convention") {
    Truncation t(4);
    auto v = tensor(basis_state(t, 0), basis_state(t, 0));
    CHECK(v.amp(0) == cplx(1.0));
    CHECK(v.amp.squaredNorm() == doctest::Approx(1.0));

    PureState plus(t, Vec::Zero(4));
    plus.amp(0) = plus.amp(1) = 1.0 / std::sqrt(2.0);
    auto w = tensor(plus, basis_state(t, 1));
    CHECK(std::abs(w.amp(1) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(w.amp(4 + 1) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(w.amp.squaredNorm() == doctest::Approx(1.0));
}

TEST_CASE("tensor trace is multiplicative") {
    Truncation t(3);
    DensityOperator r(t, Mat::Identity(3, 3) * (0.5 / 3));
    DensityOperator s(t, Mat::Identity(3, 3) * (0.5 / 3));
    CHECK(tensor(r, s).trace() == doctest::Approx(0.25));
}

TEST_CASE("partial trace") {
    Truncation t(5);
    auto vac = to_density(tensor(basis_state(t, 0), basis_state(t, 0)));
    auto r = partial_trace(vac, 0);
    CHECK(std::abs(r.rho(0, 0) - 1.0) < 1e-15);
    CHECK(r.trace() == doctest::Approx(1.0));

    Mat a = Mat::Random(5, 5);
    a = a * a.adjoint();
    Mat b = Mat::Random(5, 5);
    b = b * b.adjoint();
    DensityOperator ra(t, a), rb(t, b);
    auto pt = partial_trace(tensor(ra, rb), 0);
    CHECK((pt.rho - b.trace() * a).norm() < 1e-12);
}

TEST_CASE("reduced two-mode squeezed vacuum is thermal") {
    const int d = 25;
    const double kappa = 0.4;
    Truncation t(d);
    auto u = ops::build_unitary(ops::TwoModeSqueeze{kappa}, t);
    Vec v = u.m.col(0);
    PureState tm(t, t, v);
    auto r = partial_trace(to_density(tm), 0);
    const double lam = std::tanh(kappa / 2);
    for (int n = 0; n < 10; ++n)
        CHECK(std::abs(r.rho(n, n).real() - std::pow(lam, 2 * n) * (1 - lam * lam)) < 1e-10);
}

TEST_CASE("normalize") {
    Truncation t(3);
    Mat m = Mat::Zero(3, 3);
    m(0, 0) = 0.3;
    auto [s, p] = normalize(DensityOperator(t, m));
    CHECK(p == doctest::Approx(0.3));
    CHECK(std::abs(s.rho(0, 0) - 1.0) < 1e-15);

    auto [s2, p2] = normalize(to_density(basis_state(t, 1)));
    CHECK(p2 == doctest::Approx(1.0));
    CHECK((s2.rho - to_density(basis_state(t, 1)).rho).norm() < 1e-15);

    CHECK_THROWS_AS(normalize(DensityOperator(t, Mat::Zero(3, 3))), ZeroProbabilityError);
    try {
        normalize(DensityOperator(t, Mat::Zero(3, 3)));
    } catch (const ZeroProbabilityError& e) {
        CHECK(std::string(e.what()).find("zero-probability herald") != std::string::npos);
    }
}

TEST_CASE("truncation health") {
    CHECK(truncation_health(basis_state(Truncation(50), 0)).healthy);
    CHECK(truncation_health(basis_state(Truncation(50), 0)).guard_population == 0.0);
    CHECK_FALSE(truncation_health(targets::coherent(std::sqrt(40.0), Truncation(60))).healthy);
    CHECK(truncation_health(targets::coherent(1.0, Truncation(40))).healthy);
}

TEST_CASE("hermitize and density checks") {
    Truncation t(3);
    Mat m = Mat::Identity(3, 3);
    m(0, 1) = cplx(0, 1e-14);
    hermitize(m);
    CHECK((m - m.adjoint()).norm() == 0.0);
    Mat bad = Mat::Identity(3, 3);
    bad(0, 1) = 0.5;
    CHECK_THROWS(hermitize(bad));
    Mat neg = Mat::Identity(3, 3);
    neg(2, 2) = -0.1;
    CHECK_THROWS(check_density(neg));
}

TEST_CASE("trace distance") {
    Truncation t(3);
    auto a = to_density(basis_state(t, 0)).rho;
    auto b = to_density(basis_state(t, 1)).rho;
    CHECK(trace_distance(a, b) == doctest::Approx(1.0));
    CHECK(trace_distance(a, a) < 1e-15);
}
