#include "fockopt/protocols.hpp"

#include "fockopt/measurement.hpp"
#include "fockopt/operators.hpp"
#include "fockopt/optimize.hpp"

#include <cmath>
#include <numbers>

namespace fockopt::proto {

namespace {

void check_n(int n, const Truncation& t) {
    if (n < 0) throw ValidationError("photon number must be >= 0");
    if (n >= t.dim) throw ValidationError("photon number exceeds truncation");
}

// M_n applied to a vector, without forming the matrix
Vec opa_herald(const Vec& v, double kappa, int n) {
    const Eigen::Index d = v.size();
    Vec out = Vec::Zero(d);
    for (Eigen::Index j = 0; j + n < d; ++j) out(j + n) = ops::opa_kraus_coeff(kappa, n, static_cast<int>(j)) * v(j);
    return out;
}

// M_n rho M_n^dag
Mat opa_herald(const Mat& r, double kappa, int n) {
    const Eigen::Index d = r.rows();
    RVec c = RVec::Zero(d);
    for (Eigen::Index j = 0; j + n < d; ++j) c(j) = ops::opa_kraus_coeff(kappa, n, static_cast<int>(j));
    Mat out = Mat::Zero(d, d);
    for (Eigen::Index j = 0; j + n < d; ++j)
        for (Eigen::Index l = 0; l + n < d; ++l) out(j + n, l + n) = c(j) * c(l) * r(j, l);
    return out;
}

// sum_m T(n|m) M_m rho M_m^dag for a lossy, noisy idler detector
Mat opa_herald_noisy(const Mat& r, double kappa, int n, const chan::DetectorModel& det) {
    const Eigen::Index d = r.rows();
    const RVec w = chan::detector_response(n, chan::detector_params(det), static_cast<int>(d));
    Mat out = Mat::Zero(d, d);
    for (Eigen::Index m = 0; m < d; ++m) {
        if (w(m) < 1e-300) continue;
        out += w(m) * opa_herald(r, kappa, static_cast<int>(m));
    }
    hermitize(out);
    return out;
}

void attach_health(Report& rep) {
    const HealthReport h = truncation_health(rep.state);
    rep.healthy = h.healthy;
    rep.guard_population = h.guard_population;
    if (!h.healthy) rep.warnings.push_back("guard-band population " + std::to_string(h.guard_population) + " exceeds tail tolerance");
}

}  // namespace

Heralded<PureState> fock_prep(int n, double kappa, const Truncation& t) {
    check_n(n, t);
    if (!(kappa >= 0.0)) throw ValidationError("kappa must be >= 0");
    const double c = ops::opa_kraus_coeff(kappa, n, 0);
    const double p = c * c;
    if (!(p > 0.0)) throw ZeroProbabilityError("zero-probability herald: " + std::to_string(n) + " photons at kappa = 0");
    Heralded<PureState> h;
    h.unnormalized = basis_state(t, n);
    h.unnormalized.amp(n) = c;
    h.probability = p;
    h.normalized = basis_state(t, n);
    return h;
}

Report photon_add_opa(double r_seed, double kappa, int n, const Truncation& t, const std::optional<chan::DetectorModel>& det) {
    check_n(n, t);
    const PureState seed = targets::squeezed_vacuum(r_seed, t);
    Report rep;
    if (!det) {
        PureState un(t, opa_herald(seed.amp, kappa, n));
        auto [s, p] = normalize(un);
        rep.state = s;
        rep.total_probability = p;
    } else {
        DensityOperator un(t, opa_herald_noisy(seed.amp * seed.amp.adjoint(), kappa, n, *det));
        auto [s, p] = normalize(un);
        rep.state = s;
        rep.total_probability = p;
    }
    rep.round_probabilities = {rep.total_probability};
    attach_health(rep);
    return rep;
}

Report photon_add_fock(double r_seed, int n, double kappa_fock, double tau, const Truncation& t,
                       const std::optional<chan::DetectorModel>& det) {
    check_n(n, t);
    if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("tau must be in [0,1]");
    const PureState seed = targets::squeezed_vacuum(r_seed, t);
    Report rep;
    if (!det) {
        const auto fock = fock_prep(n, kappa_fock, t);
        const PureState joint = ops::apply_beamsplitter(tensor(seed, fock.normalized), tau);
        const auto h = meas::herald_pnrd(joint, 1, 0);
        rep.state = h.normalized;
        rep.round_probabilities = {fock.probability, h.probability};
    } else {
        // the Fock source herald is noisy too: a mixture of |m> with weights T(n|m) P_m
        const auto tp = chan::detector_params(*det);
        const RVec wsrc = chan::detector_response(n, tp, t.dim);
        const RVec w0 = chan::detector_response(0, tp, t.dim);
        double p_fock = 0.0;
        std::vector<double> mix(t.dim);
        for (int m = 0; m < t.dim; ++m) {
            const double c = ops::opa_kraus_coeff(kappa_fock, m, 0);
            mix[m] = wsrc(m) * c * c;
            p_fock += mix[m];
        }
        if (!(p_fock > 0.0)) throw ZeroProbabilityError("zero-probability Fock-source herald");
        Mat out = Mat::Zero(t.dim, t.dim);
        const double cut = 1e-16 * p_fock;
        for (int m = 0; m < t.dim; ++m) {
            if (mix[m] < cut) continue;
            const PureState joint = ops::apply_beamsplitter(tensor(seed, basis_state(t, m)), tau);
            for (int mp = 0; mp < t.dim; ++mp) {
                if (w0(mp) < 1e-300) continue;
                Vec v(t.dim);
                for (int i = 0; i < t.dim; ++i) v(i) = joint.at(i, mp);
                out += (mix[m] / p_fock) * w0(mp) * (v * v.adjoint());
            }
        }
        hermitize(out);
        auto [s, p] = normalize(DensityOperator(t, std::move(out)));
        rep.state = s;
        rep.round_probabilities = {p_fock, p};
    }
    rep.total_probability = rep.round_probabilities[0] * rep.round_probabilities[1];
    attach_health(rep);
    return rep;
}

Report cubic_opa(cplx alpha, double kappa, int n, const Truncation& t) {
    check_n(n, t);
    const PureState seed = targets::coherent(alpha, t);
    auto [s, p] = normalize(PureState(t, opa_herald(seed.amp, kappa, n)));
    Report rep;
    rep.state = s;
    rep.total_probability = p;
    rep.round_probabilities = {p};
    attach_health(rep);
    return rep;
}

Report cubic_fock(cplx alpha, int n, double kappa_fock, const Truncation& t) {
    check_n(n, t);
    const auto fock = fock_prep(n, kappa_fock, t);
    const PureState joint = ops::apply_beamsplitter(tensor(targets::coherent(alpha, t), fock.normalized), 0.5);
    const auto h = meas::herald_pnrd(joint, 1, 0);
    Report rep;
    rep.state = h.normalized;
    rep.round_probabilities = {fock.probability, h.probability};
    rep.total_probability = fock.probability * h.probability;
    attach_health(rep);
    return rep;
}

PureState gaussian_correct(const PureState& s, double r_c, cplx beta_c) {
    Vec v = ops::squeeze(ops::displace(s.amp, beta_c), r_c);
    return PureState(s.t1, std::move(v));
}

DensityOperator gaussian_correct(const DensityOperator& s, double r_c, cplx beta_c) {
    Mat u = ops::squeeze_matrix(r_c, s.dim()) * ops::displacement_matrix(beta_c, s.dim());
    Mat r = u * s.rho * u.adjoint();
    hermitize(r);
    return DensityOperator(s.t1, std::move(r));
}

Report cat_breed(double r_seed, double kappa, int n, int k, const Truncation& t, const CatOptions& opt) {
    check_n(n, t);
    if (k < 1) throw ValidationError("cat breeding needs k >= 1 rounds");
    if (!(opt.switch_tau >= 0.0 && opt.switch_tau <= 1.0)) throw ValidationError("switch transmissivity must be in [0,1]");
    const bool lossy = opt.switch_tau < 1.0;
    Report rep;
    const PureState seed = targets::squeezed_vacuum(r_seed, t);
    if (!lossy && !opt.detector) {
        Vec v = seed.amp;
        for (int j = 0; j < k; ++j) {
            v = opa_herald(v, kappa, n);
            const double p = v.squaredNorm();
            if (!(p > 0.0)) throw ZeroProbabilityError("zero-probability herald in round " + std::to_string(j + 1));
            v /= std::sqrt(p);
            rep.round_probabilities.push_back(p);
        }
        rep.state = PureState(t, std::move(v));
    } else {
        Mat r = seed.amp * seed.amp.adjoint();
        for (int j = 0; j < k; ++j) {
            r = opt.detector ? opa_herald_noisy(r, kappa, n, *opt.detector) : opa_herald(r, kappa, n);
            const double p = r.trace().real();
            if (!(p > 0.0)) throw ZeroProbabilityError("zero-probability herald in round " + std::to_string(j + 1));
            r /= p;
            rep.round_probabilities.push_back(p);
            const bool apply_loss = lossy && (opt.loss_every_round || j + 1 < k);
            if (apply_loss) r = chan::pure_loss(DensityOperator(t, r), opt.switch_tau).rho;
        }
        hermitize(r);
        rep.state = DensityOperator(t, std::move(r));
    }
    rep.total_probability = 1.0;
    for (double p : rep.round_probabilities) rep.total_probability *= p;
    attach_health(rep);
    return rep;
}

Report gkp_breed(const State& cat, const Truncation& t) {
    Report rep;
    if (const auto* ps = std::get_if<PureState>(&cat)) {
        if (ps->modes != 1 || ps->dim() != t.dim) throw ValidationError("gkp_breed: cat does not match truncation");
        const auto h = meas::breed_homodyne_x(*ps, *ps, 0.0);
        rep.homodyne_density = h.probability;
        const double rc = metrics::squeezing_correction(h.normalized);
        PureState g = normalize(PureState(t, ops::squeeze(h.normalized.amp, rc))).first;
        rep.r_corr = rc;
        rep.squeezing = metrics::effective_squeezing(g);
        rep.state = std::move(g);
    } else {
        const auto& ds = std::get<DensityOperator>(cat);
        if (ds.modes != 1 || ds.dim() != t.dim) throw ValidationError("gkp_breed: cat does not match truncation");
        const auto h = meas::breed_homodyne_x(ds, ds, 0.0);
        rep.homodyne_density = h.probability;
        const double rc = metrics::squeezing_correction(h.normalized);
        DensityOperator g = normalize(gaussian_correct(h.normalized, rc, 0.0)).first;
        rep.r_corr = rc;
        rep.squeezing = metrics::effective_squeezing(g);
        rep.state = std::move(g);
    }
    rep.total_probability = 1.0;
    attach_health(rep);
    return rep;
}

double generation_rate(double p_total, double clock_rate) { return p_total * clock_rate; }

Report run_gkp_pipeline(const GkpPipeline& cfg) {
    const Report cat = cat_breed(cfg.r_seed, cfg.kappa, cfg.n, cfg.k, cfg.trunc, cfg.cat);
    Report rep = gkp_breed(cat.state, cfg.trunc);
    rep.round_probabilities = cat.round_probabilities;
    rep.total_probability = cat.total_probability;
    if (!cat.healthy) {
        rep.healthy = false;
        rep.guard_population = std::max(rep.guard_population, cat.guard_population);
        rep.warnings.push_back("cat stage: guard-band population " + std::to_string(cat.guard_population));
    }
    return rep;
}

namespace {

template <class F>
Threshold bisect(F above, double good, double bad, double tol, Threshold th) {
    // invariant: above(good) true, above(bad) false
    while (std::abs(bad - good) > tol) {
        const double mid = 0.5 * (good + bad);
        ++th.evals;
        if (above(mid))
            good = mid;
        else
            bad = mid;
    }
    th.status = Threshold::Status::Found;
    th.value = good;
    return th;
}

}  // namespace

Threshold find_loss_threshold(const GkpPipeline& cfg, double floor_db, double tol) {
    Threshold th;
    if (cfg.k <= 1) {
        th.status = Threshold::Status::NotApplicable;
        th.note = "single round, no switch in the path";
        return th;
    }
    auto above = [&](double loss) {
        GkpPipeline c = cfg;
        c.cat.switch_tau = 1.0 - loss;
        return run_gkp_pipeline(c).squeezing->symmetric_db >= floor_db;
    };
    ++th.evals;
    if (!above(0.0)) {
        th.status = Threshold::Status::NeverAbove;
        th.note = "lossless run is below the floor";
        return th;
    }
    double hi = 0.005;
    while (true) {
        ++th.evals;
        if (!above(hi)) break;
        if (hi >= 0.5) {
            th.status = Threshold::Status::Found;
            th.value = hi;
            th.note = "above the floor up to 50% loss";
            return th;
        }
        hi *= 2.0;
    }
    return bisect(above, hi > 0.005 ? hi / 2.0 : 0.0, hi, tol, th);
}

Threshold find_efficiency_threshold(const GkpPipeline& cfg, double dark_rate, double window, double floor_db, double tol) {
    Threshold th;
    auto above = [&](double eta) {
        GkpPipeline c = cfg;
        c.cat.detector = chan::DetectorModel{eta, dark_rate, window};
        return run_gkp_pipeline(c).squeezing->symmetric_db >= floor_db;
    };
    const double top = 1.0 - 1e-6;
    ++th.evals;
    if (!above(top)) {
        th.status = Threshold::Status::NeverAbove;
        th.note = "below the floor even at unit efficiency";
        return th;
    }
    const double bottom = 0.5;
    ++th.evals;
    if (above(bottom)) {
        th.status = Threshold::Status::Found;
        th.value = bottom;
        th.note = "above the floor down to 50% efficiency";
        return th;
    }
    return bisect(above, top, bottom, tol, th);
}

State rotate_state(const State& s, double phi) {
    if (const auto* p = std::get_if<PureState>(&s)) return PureState(p->t1, ops::rotate(p->amp, phi));
    DensityOperator d = std::get<DensityOperator>(s);
    for (int m = 0; m < d.dim(); ++m)
        for (int n = 0; n < d.dim(); ++n) d.rho(m, n) *= std::polar(1.0, phi * (m - n));
    return d;
}

Fit fit_photon_added(const State& s, int n, double r_lo, double r_hi, double r_start) {
    const Truncation t = std::visit([](const auto& x) { return x.t1; }, s);
    opt::Problem pb;
    pb.objective = [&](const opt::Point& x) {
        return metrics::fidelity(s, State(targets::ideal_photon_added_squeezed(x[0], n, t)));
    };
    pb.lower = {r_lo};
    pb.upper = {r_hi};
    pb.starts = {{r_start}};
    pb.f_tol = 1e-12;
    pb.x_tol = 1e-7;
    const auto res = opt::maximize(pb);
    return Fit{res.best_value, res.best_params, res.evals};
}

Fit fit_cubic(const PureState& s, const PureState& target, const std::vector<std::vector<double>>& starts, double r_lo,
              double r_hi, double b_lo, double b_hi) {
    opt::Problem pb;
    pb.objective = [&](const opt::Point& x) {
        const PureState c = gaussian_correct(s, x[0], cplx(0.0, x[1]));
        return std::norm(c.amp.dot(target.amp)) / c.norm2();
    };
    pb.lower = {r_lo, b_lo};
    pb.upper = {r_hi, b_hi};
    pb.starts = starts;
    pb.f_tol = 1e-10;
    pb.x_tol = 1e-6;
    pb.initial_step = 0.02;
    const auto res = opt::maximize(pb);
    return Fit{res.best_value, res.best_params, res.evals};
}

Fit fit_cat(const State& s, targets::Parity parity, const std::vector<std::vector<double>>& starts, double a_lo,
            double a_hi, double r_lo, double r_hi, bool rotate_quarter) {
    const State st = rotate_quarter ? rotate_state(s, 0.5 * std::numbers::pi) : s;
    const Truncation t = std::visit([](const auto& x) { return x.t1; }, st);
    opt::Problem pb;
    pb.objective = [&](const opt::Point& x) {
        return metrics::fidelity(st, State(targets::ideal_cat({x[0], x[1], parity}, t)));
    };
    pb.lower = {a_lo, r_lo};
    pb.upper = {a_hi, r_hi};
    pb.starts = starts;
    pb.f_tol = 1e-10;
    pb.x_tol = 1e-6;
    pb.initial_step = 0.05;
    const auto res = opt::maximize(pb);
    return Fit{res.best_value, res.best_params, res.evals};
}

}  // namespace fockopt::proto
