#include <doctest.h>

#include "fockopt/core.hpp"
#include "fockopt/measurement.hpp"
#include "fockopt/metrics.hpp"
#include "fockopt/operators.hpp"
#include "fockopt/targets.hpp"

#include <cmath>

using namespace fockopt;

TEST_CASE("ladder") {
    RMat a = ops::ladder(6);
    RVec one = RVec::Zero(6);
    one(1) = 1.0;
    RVec r = a * one;
    CHECK(r(0) == doctest::Approx(1.0));
    CHECK(r.tail(5).norm() == 0.0);
    CHECK((a * RVec::Unit(6, 0)).norm() == 0.0);
    RMat n = a.transpose() * a;
    CHECK(n(5, 5) == doctest::Approx(5.0));
}

TEST_CASE("expm_skew") {
    CHECK((ops::expm_skew(Mat::Zero(4, 4)) - Mat::Identity(4, 4)).norm() < 1e-14);
    const double th = 0.37;
    Mat g = Mat::Zero(5, 5);
    for (int n = 0; n < 5; ++n) g(n, n) = cplx(0, th * n);
    Mat u = ops::expm_skew(g);
    for (int n = 0; n < 5; ++n) CHECK(std::abs(u(n, n) - std::polar(1.0, th * n)) < 1e-13);
    Mat h = Mat::Identity(3, 3);
    CHECK_THROWS_AS(ops::expm_skew(h), ValidationError);
    // beamsplitter at tau = 1 is the identity
    auto bs = ops::build_unitary(ops::Beamsplitter{1.0}, Truncation(6));
    CHECK((bs.m - Mat::Identity(36, 36)).norm() < 1e-14);
}

TEST_CASE("squeeze") {
    Truncation t(60);
    CHECK((ops::build_unitary(ops::Squeeze{0.0}, t).m - Mat::Identity(60, 60)).norm() == 0.0);
    PureState s(t, ops::squeeze(basis_state(t, 0).amp, 0.3));
    auto m = metrics::quadrature_moments(s);
    CHECK(m.var_x == doctest::Approx(std::exp(-0.6)).epsilon(1e-9));
    CHECK(m.var_p == doctest::Approx(std::exp(0.6)).epsilon(1e-9));
    CHECK(-10 * std::log10(m.var_x) == doctest::Approx(2.606).epsilon(1e-3));
    // matrix route and vector route agree
    Mat u = ops::squeeze_matrix(0.3, 60);
    CHECK((u.col(0) - s.amp).norm() < 1e-12);
    // closed form
    CHECK((s.amp - targets::squeezed_vacuum(0.3, t).amp).norm() < 1e-12);
}

TEST_CASE("displacement routes agree") {
    Truncation t(40);
    const cplx alpha(0.7, -0.4);
    Vec v = ops::displace(basis_state(t, 0).amp, alpha);
    CHECK((v - targets::coherent(alpha, t).amp).norm() < 1e-10);
    Mat d = ops::displacement_matrix(alpha, 40);
    CHECK((d.col(0) - v).norm() < 1e-10);
    // D(a) D(-a) = I on a low subspace
    Vec w = ops::displace(ops::displace(basis_state(t, 3).amp, alpha), -alpha);
    CHECK((w - basis_state(t, 3).amp).norm() < 1e-10);
}

TEST_CASE("two-mode squeezer herald probability") {
    Truncation t(20);
    auto u = ops::build_unitary(ops::TwoModeSqueeze{0.3023}, t);
    PureState out(t, t, u.m.col(0));
    auto h = meas::herald_pnrd(out, 1, 1);
    const double lam = std::tanh(0.15115);
    CHECK(h.probability == doctest::Approx(lam * lam * (1 - lam * lam)).epsilon(1e-10));
    CHECK(h.probability == doctest::Approx(0.0220).epsilon(2e-3));
}

TEST_CASE("cubic phase unitarity") {
    Truncation t(80);
    auto u = ops::build_unitary(ops::CubicPhase{0.1}, t);
    const int k = 80 - t.guard_levels();
    Mat e = (u.m.adjoint() * u.m - Mat::Identity(80, 80)).topLeftCorner(k, k);
    CHECK(e.norm() <= 1e-8);
}

TEST_CASE("heralded Kraus operators") {
    Truncation t(12);
    const double kappa = 0.5;
    Mat m0 = ops::heralded_opa_kraus(kappa, 0, t);
    const double sech = 1.0 / std::cosh(kappa / 2);
    CHECK(std::abs(m0(0, 0) - sech) < 1e-15);
    CHECK(std::norm(m0(0, 0)) == doctest::Approx(sech * sech));
    CHECK((ops::heralded_opa_kraus(0.0, 0, t) - Mat::Identity(12, 12)).norm() == 0.0);
    CHECK(ops::heralded_opa_kraus(0.0, 2, t).norm() == 0.0);
    Mat m2 = ops::heralded_opa_kraus(kappa, 2, t);
    Vec e3 = basis_state(t, 3).amp;
    Vec o = m2 * e3;
    for (int i = 0; i < 12; ++i)
        if (i != 5) CHECK(o(i) == cplx(0.0));
    CHECK(std::abs(o(5)) > 0.0);
}

TEST_CASE("Kraus closed form matches the two-mode exponential") {
    const int d = 30;
    const double kappa = 0.6190;
    Truncation t(d);
    auto u = ops::build_unitary(ops::TwoModeSqueeze{kappa}, t);
    const PureState seed = targets::squeezed_vacuum(0.3, Truncation(d));
    Vec in = Vec::Zero(d * d);
    for (int j = 0; j < d; ++j) in(j * d) = seed.amp(j);
    PureState out(t, t, u.m * in);
    for (int n = 0; n <= 4; ++n) {
        auto h = meas::herald_pnrd(out, 1, n);
        Vec kv = ops::heralded_opa_kraus(kappa, n, t) * seed.amp;
        Mat a = h.unnormalized.amp * h.unnormalized.amp.adjoint();
        Mat b = kv * kv.adjoint();
        CHECK(trace_distance(a, b) <= 1e-8);
    }
}

TEST_CASE("beamsplitter blocks match the dense exponential") {
    const int d = 8;
    const double tau = 0.3;
    const double th = std::acos(std::sqrt(tau));
    RMat a = ops::ladder(d);
    RMat id = RMat::Identity(d, d);
    RMat a1(d * d, d * d), a2(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            a1.block(i * d, k * d, d, d) = a(i, k) * id;
            a2.block(i * d, k * d, d, d) = id(i, k) * a;
        }
    RMat g = th * (a1.transpose() * a2 - a1 * a2.transpose());
    Mat ue = ops::expm_skew(g.cast<cplx>());
    Mat ub = ops::build_unitary(ops::Beamsplitter{tau}, Truncation(d)).m;
    // sectors with total photon number below d are untouched by the truncation
    double err = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    if (i + j < d && k + l < d) err = std::max(err, std::abs(ue(i * d + j, k * d + l) - ub(i * d + j, k * d + l)));
    CHECK(err < 1e-10);
    // <j+n, 0|U|j, n> = c^j s^n sqrt C(j+n, n)
    ops::BeamsplitterBlocks bs(tau, d);
    const double c = std::sqrt(tau), s = std::sqrt(1 - tau);
    for (int j = 0; j < 4; ++j)
        for (int n = 0; n < 4; ++n)
            CHECK(bs.element(j + n, j, j + n) ==
                  doctest::Approx(std::pow(c, j) * std::pow(s, n) * std::exp(0.5 * ops::log_binomial(j + n, n))));
}

TEST_CASE("dB conversions") {
    CHECK(metrics::squeezing_db(0.3) == doctest::Approx(2.606).epsilon(2e-4));
    CHECK(metrics::squeezing_db(0.268) == doctest::Approx(2.328).epsilon(2e-4));
    CHECK(metrics::squeezing_db(0.306) == doctest::Approx(2.658).epsilon(2e-4));
    CHECK(metrics::squeezing_db(0.142) == doctest::Approx(1.233).epsilon(2e-4));
    CHECK(metrics::squeezing_db(0.0) == 0.0);
    CHECK(metrics::db_to_r(metrics::squeezing_db(0.142)) == doctest::Approx(0.142));
}
