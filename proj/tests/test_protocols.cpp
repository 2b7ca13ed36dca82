#include <doctest.h>

#include "fockopt/metrics.hpp"
#include "fockopt/operators.hpp"
#include "fockopt/protocols.hpp"
#include "fockopt/targets.hpp"

#include <cmath>

using namespace fockopt;

namespace {

double lam2(double kappa) {
    const double l = std::tanh(kappa / 2);
    return l * l;
}

}  // namespace

TEST_CASE("Fock preparation") {
    Truncation t(20);
    for (int n = 0; n < 6; ++n)
        for (double k : {0.3023, 0.6190, 1.0}) {
            auto h = proto::fock_prep(n, k, t);
            CHECK(std::abs(h.probability - std::pow(lam2(k), n) * (1 - lam2(k))) <= 1e-10);
            CHECK(std::abs(std::abs(h.normalized.amp(n)) - 1.0) < 1e-15);
        }
    CHECK(proto::fock_prep(1, 0.3023, t).probability == doctest::Approx(0.02199).epsilon(1e-4));
    CHECK(proto::fock_prep(0, 0.0, t).probability == 1.0);
    CHECK_THROWS_AS(proto::fock_prep(1, 0.0, t), ZeroProbabilityError);
    CHECK_THROWS_AS(proto::fock_prep(-1, 0.3, t), ValidationError);
}

TEST_CASE("OPA photon addition") {
    Truncation t(80);
    for (int n = 1; n <= 4; ++n) {
        auto rep = proto::photon_add_opa(0.3, 0.6190, n, t);
        const double f = metrics::fidelity(rep.state, State(targets::ideal_photon_added_squeezed(0.2717, n, t)));
        CHECK(1.0 - f <= 1e-6);
        CHECK(metrics::parity(std::get<PureState>(rep.state)) == doctest::Approx(n % 2 ? -1.0 : 1.0));
        CHECK(rep.healthy);
    }
    // the output is exactly a photon-added squeezed state with tanh r' = sech^2(kappa/2) tanh r
    const double rp = std::atanh(std::tanh(0.3) / std::pow(std::cosh(0.6190 / 2), 2));
    auto rep = proto::photon_add_opa(0.3, 0.6190, 2, t);
    CHECK(metrics::fidelity(rep.state, State(targets::ideal_photon_added_squeezed(rp, 2, t))) >= 1 - 1e-12);
    auto r0 = proto::photon_add_opa(0.3, 0.6190, 0, t);
    CHECK(metrics::parity(std::get<PureState>(r0.state)) == doctest::Approx(1.0));
    CHECK(metrics::fidelity(r0.state, State(targets::squeezed_vacuum(rp, t))) >= 1 - 1e-12);
}

TEST_CASE("Fock-scheme photon addition") {
    Truncation t(40);
    auto id = proto::photon_add_fock(0.3, 0, 0.0, 1.0, t);
    CHECK(id.total_probability == doctest::Approx(1.0));
    CHECK(metrics::fidelity(id.state, State(targets::squeezed_vacuum(0.3, t))) == doctest::Approx(1.0));
    // closed form of the vacuum herald on S(r)|0> (x) |n>
    const double tau = 0.5;
    for (int n = 1; n <= 3; ++n) {
        auto rep = proto::photon_add_fock(0.592, n, 0.6190, tau, t);
        auto s = targets::squeezed_vacuum(0.592, t);
        double p = 0.0;
        for (int j = 0; j + n < 40; ++j)
            p += std::norm(s.amp(j)) * std::pow(tau, j) * std::pow(1 - tau, n) * std::exp(ops::log_binomial(j + n, n));
        CHECK(rep.round_probabilities[1] == doctest::Approx(p).epsilon(1e-10));
        CHECK(rep.round_probabilities[0] == doctest::Approx(std::pow(lam2(0.6190), n) * (1 - lam2(0.6190))).epsilon(1e-12));
    }
    auto one = proto::photon_add_fock(0.592, 1, 0.6190, 0.5, t);
    CHECK(metrics::fidelity(one.state, State(targets::ideal_photon_added_squeezed(0.272, 1, t))) > 0.99);
}

TEST_CASE("noisy detectors in the addition schemes") {
    Truncation t(60);
    chan::DetectorModel ideal{1.0, 0.0, 1e-9};
    auto a = proto::photon_add_opa(0.3, 0.6190, 2, t);
    auto b = proto::photon_add_opa(0.3, 0.6190, 2, t, ideal);
    CHECK(a.total_probability == doctest::Approx(b.total_probability).epsilon(1e-12));
    CHECK(metrics::fidelity(a.state, b.state) == doctest::Approx(1.0).epsilon(1e-10));
    auto c = proto::photon_add_fock(0.592, 2, 0.6190, 0.5, t);
    auto d = proto::photon_add_fock(0.592, 2, 0.6190, 0.5, t, ideal);
    CHECK(c.total_probability == doctest::Approx(d.total_probability).epsilon(1e-10));
    CHECK(metrics::fidelity(c.state, d.state) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cubic-state sources") {
    Truncation t(100);
    auto v = proto::cubic_opa(0.0, 0.3023, 0, t);
    CHECK(std::abs(std::abs(std::get<PureState>(v.state).amp(0)) - 1.0) < 1e-12);
    auto f0 = proto::cubic_fock(0.0, 0, 0.3023, t);
    CHECK(std::abs(std::abs(std::get<PureState>(f0.state).amp(0)) - 1.0) < 1e-12);
    CHECK(f0.round_probabilities[1] == doctest::Approx(1.0));
    // herald probability of |alpha>|1> on a balanced splitter, second port empty
    const double a2 = 2.1 * 2.1;
    auto f1 = proto::cubic_fock(cplx(0, -2.1), 1, 0.3023, t);
    CHECK(f1.round_probabilities[1] == doctest::Approx(0.5 * std::exp(-a2 / 2) * (1 + a2 / 2)).epsilon(1e-10));
    CHECK(f1.round_probabilities[1] == doctest::Approx(0.17664).epsilon(1e-4));
    CHECK(f1.total_probability == doctest::Approx(3.885e-3).epsilon(1e-3));
    auto p3 = proto::cubic_opa(cplx(0, -1.35), 0.3023, 3, t);
    CHECK(p3.total_probability == doctest::Approx(1.29e-4).epsilon(0.05));
    auto p3b = proto::cubic_opa(cplx(0, -1.1), 0.3023, 3, t);
    CHECK(p3b.total_probability == doctest::Approx(7.50e-5).epsilon(0.05));
}

TEST_CASE("Gaussian corrections") {
    Truncation t(60);
    auto s = targets::ideal_cat({1.2, 0.1, targets::Parity::Odd}, t);
    CHECK((proto::gaussian_correct(s, 0.0, 0.0).amp - s.amp).norm() == 0.0);
    auto c = proto::gaussian_correct(s, 0.3, cplx(0, 0.8));
    // invert: D(-b) S(-r)
    Vec back = ops::displace(ops::squeeze(c.amp, -0.3), cplx(0, -0.8));
    CHECK(std::norm(back.dot(s.amp)) == doctest::Approx(1.0).epsilon(1e-10));
    auto cd = proto::gaussian_correct(to_density(s), 0.3, cplx(0, 0.8));
    CHECK((cd.rho - to_density(c).rho).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("parity law of iterated breeding") {
    Truncation t(100);
    for (int n = 1; n <= 5; ++n)
        for (int k = 1; k <= 5; ++k) {
            auto rep = proto::cat_breed(-0.5, 0.5322, n, k, t);
            CHECK(metrics::parity(std::get<PureState>(rep.state)) == doctest::Approx((n * k) % 2 ? -1.0 : 1.0).epsilon(1e-12));
            CHECK(rep.round_probabilities.size() == static_cast<size_t>(k));
        }
    auto lossy = proto::cat_breed(-0.5, 0.5322, 2, 3, t, proto::CatOptions{0.95});
    CHECK(std::holds_alternative<DensityOperator>(lossy.state));
    auto b35 = proto::cat_breed(-1.0, 0.5322, 3, 5, Truncation(150));
    CHECK(std::abs(metrics::parity(std::get<PureState>(b35.state)) + 1.0) < 1e-9);
}

TEST_CASE("switch loss path") {
    Truncation t(80);
    auto pure = proto::cat_breed(-0.5, 0.5322, 2, 3, t);
    auto dens = proto::cat_breed(-0.5, 0.5322, 2, 3, t, proto::CatOptions{1.0, false, chan::DetectorModel{}});
    CHECK(metrics::fidelity(pure.state, dens.state) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pure.total_probability == doctest::Approx(dens.total_probability).epsilon(1e-10));
    // a single round never passes the switch
    auto k1 = proto::cat_breed(-0.5, 0.5322, 3, 1, t);
    auto k1l = proto::cat_breed(-0.5, 0.5322, 3, 1, t, proto::CatOptions{0.9});
    CHECK(metrics::fidelity(k1.state, k1l.state) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("GKP breeding basics") {
    Truncation t(40);
    auto rep = proto::gkp_breed(State(basis_state(t, 0)), t);
    CHECK(std::abs(rep.r_corr) < 1e-12);
    CHECK(std::abs(std::abs(std::get<PureState>(rep.state).amp(0)) - 1.0) < 1e-12);
    auto repd = proto::gkp_breed(State(to_density(basis_state(t, 0))), t);
    CHECK(std::abs(repd.r_corr) < 1e-12);
    CHECK(*repd.homodyne_density == doctest::Approx(*rep.homodyne_density));
}

TEST_CASE("generation rate and threshold edge cases") {
    CHECK(proto::generation_rate(1.56e-4, 5e4) == doctest::Approx(7.8));
    CHECK(proto::generation_rate(1.44e-5, 1e7) == doctest::Approx(144.0));
    CHECK(proto::generation_rate(0.0, 1e7) == 0.0);
    proto::GkpPipeline cfg;
    cfg.n = 7;
    cfg.k = 1;
    CHECK(proto::find_loss_threshold(cfg).status == proto::Threshold::Status::NotApplicable);
}

TEST_CASE("threshold searches against a floor below the lossless value") {
    proto::GkpPipeline cfg;
    cfg.r_seed = metrics::db_to_r(1.59);
    cfg.n = 2;
    cfg.k = 2;
    cfg.trunc = Truncation(80);
    const double lossless = proto::run_gkp_pipeline(cfg).squeezing->symmetric_db;
    const double floor = lossless - 0.3;

    auto th = proto::find_loss_threshold(cfg, floor, 1e-4);
    REQUIRE(th.status == proto::Threshold::Status::Found);
    CHECK(th.value > 0.0);
    auto at_loss = [&](double loss) {
        proto::GkpPipeline c = cfg;
        c.cat.switch_tau = 1.0 - loss;
        return proto::run_gkp_pipeline(c).squeezing->symmetric_db;
    };
    CHECK(at_loss(th.value - 2e-4) >= floor);
    CHECK(at_loss(th.value + 2e-4) < floor);

    CHECK(proto::find_loss_threshold(cfg, lossless + 1.0).status == proto::Threshold::Status::NeverAbove);

    auto at_eta = [&](double eta) {
        proto::GkpPipeline c = cfg;
        c.cat.detector = chan::DetectorModel{eta, 20.0, 1e-9};
        return proto::run_gkp_pipeline(c).squeezing->symmetric_db;
    };
    const double lo = at_eta(0.5), hi = at_eta(1.0 - 1e-6);
    REQUIRE(hi > lo);
    const double mid = 0.5 * (lo + hi);
    auto te = proto::find_efficiency_threshold(cfg, 20.0, 1e-9, mid, 1e-3);
    REQUIRE(te.status == proto::Threshold::Status::Found);
    CHECK(at_eta(te.value + 2e-3) >= mid);
    CHECK(at_eta(te.value - 2e-3) < mid);
    CHECK(proto::find_efficiency_threshold(cfg, 20.0, 1e-9, lo - 1.0).value == 0.5);
}
