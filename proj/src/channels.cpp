#include "fockopt/channels.hpp"

#include "fockopt/operators.hpp"

#include <cmath>

namespace fockopt::chan {

namespace {

// log of x^k with the convention 0^0 = 1
double klog(double x, double k) {
    if (k == 0.0) return 0.0;
    if (x <= 0.0) return -INFINITY;
    return k * std::log(x);
}

}  // namespace

ThermalLossParams make_thermal_loss(double eta, double nbar) {
    if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("efficiency must be in (0,1]");
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw ValidationError("thermal mean photon number must be >= 0");
    return ThermalLossParams{eta, nbar};
}

DensityOperator pure_loss(const DensityOperator& s, double tau) {
    if (s.modes != 1) throw ValidationError("pure_loss acts on a single mode");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("transmissivity must be in [0,1]");
    if (tau == 1.0) return s;
    const int d = s.dim();
    Mat out = Mat::Zero(d, d);
    for (int m = 0; m < d; ++m)
        for (int mp = 0; mp < d; ++mp) {
            cplx acc = 0.0;
            const double base = klog(tau, 0.5 * (m + mp));
            if (base == -INFINITY) continue;
            for (int i = 0; m + i < d && mp + i < d; ++i) {
                const double lc = base + klog(1.0 - tau, i) + 0.5 * (ops::log_binomial(m + i, i) + ops::log_binomial(mp + i, i));
                if (lc == -INFINITY) break;
                acc += std::exp(lc) * s.rho(m + i, mp + i);
            }
            out(m, mp) = acc;
        }
    hermitize(out);
    return DensityOperator(s.t1, std::move(out));
}

DensityOperator pure_loss(const PureState& s, double tau) { return pure_loss(to_density(s), tau); }

DensityOperator amplifier(const DensityOperator& s, double gain) {
    if (s.modes != 1) throw ValidationError("amplifier acts on a single mode");
    if (!(gain >= 1.0)) throw ValidationError("amplifier gain must be >= 1");
    if (gain == 1.0) return s;
    const int d = s.dim();
    Mat out = Mat::Zero(d, d);
    const double lg = std::log(gain), lg1 = std::log(gain - 1.0);
    for (int j = 0; j < d; ++j)
        for (int jp = 0; jp < d; ++jp) {
            const cplx r = s.rho(j, jp);
            if (r == 0.0) continue;
            for (int k = 0; j + k < d && jp + k < d; ++k) {
                const double lc = k * lg1 - (k + 1) * lg - 0.5 * (j + jp) * lg +
                                  0.5 * (ops::log_binomial(j + k, k) + ops::log_binomial(jp + k, k));
                out(j + k, jp + k) += std::exp(lc) * r;
            }
        }
    hermitize(out);
    return DensityOperator(s.t1, std::move(out));
}

DensityOperator thermal_loss(const DensityOperator& s, const ThermalLossParams& p) {
    make_thermal_loss(p.eta, p.nbar);
    return amplifier(pure_loss(s, p.transmissivity()), p.gain());
}

DensityOperator thermal_loss_dilation_oracle(const DensityOperator& s, double eta, double nbar) {
    if (s.modes != 1) throw ValidationError("dilation oracle acts on a single mode");
    if (s.dim() > 32) throw ValidationError("dilation oracle refuses dim > 32");
    make_thermal_loss(eta, nbar);
    const int d = s.dim();
    Mat th = Mat::Zero(d, d);
    for (int t = 0; t < d; ++t) th(t, t) = std::exp(klog(nbar, t) - (t + 1) * std::log1p(nbar));
    DensityOperator joint = tensor(s, DensityOperator(s.t1, th));
    ops::ModeOperator u = ops::build_unitary(ops::Beamsplitter{eta}, s.t1);
    Mat r = u.m * joint.rho * u.m.adjoint();
    hermitize(r);
    return partial_trace(DensityOperator(s.t1, s.t1, std::move(r)), 0);
}

double dark_count_mean_photon(const DetectorModel& m) {
    const double p = m.dark_probability();
    if (!(p >= 0.0 && p < 1.0)) throw ValidationError("dark-count probability R_d*D_w must be in [0,1)");
    if (p == 0.0) return 0.0;
    if (m.eta >= 1.0) throw ValidationError("dark counts unrepresentable at unit efficiency");
    return p / ((1.0 - p) * (1.0 - m.eta));
}

double dark_count_probability(double eta, double nbar) {
    const double x = (1.0 - eta) * nbar;
    return x / (1.0 + x);
}

ThermalLossParams detector_params(const DetectorModel& m) {
    return make_thermal_loss(m.eta, dark_count_mean_photon(m));
}

RVec detector_response(int n, const ThermalLossParams& p, int mmax) {
    const double t = p.transmissivity(), g = p.gain();
    RVec w = RVec::Zero(mmax);
    for (int m = 0; m < mmax; ++m) {
        double acc = 0.0;
        for (int k = 0; k <= std::min(n, m); ++k) {
            const double loss = ops::log_binomial(m, k) + klog(t, k) + klog(1.0 - t, m - k);
            const double amp = ops::log_binomial(n, k) + klog(g - 1.0, n - k) - (n + 1) * std::log(g);
            const double lc = loss + amp;
            if (lc != -INFINITY) acc += std::exp(lc);
        }
        w(m) = acc;
    }
    return w;
}

Heralded<DensityOperator> noisy_herald_pnrd(const DensityOperator& s, int mode, int n, const DetectorModel& model) {
    if (s.modes != 2) throw ValidationError("noisy_herald_pnrd needs a two-mode state");
    if (mode != 0 && mode != 1) throw ValidationError("measured mode must be 0 or 1");
    const int dm = mode == 0 ? s.t1.dim : s.t2.dim;
    if (n < 0 || n >= dm) throw ValidationError("herald count outside truncation");
    const RVec w = detector_response(n, detector_params(model), dm);
    const Truncation kept = mode == 0 ? s.t2 : s.t1;
    Mat out = Mat::Zero(kept.dim, kept.dim);
    for (int m = 0; m < dm; ++m) {
        if (w(m) == 0.0) continue;
        const int d2 = s.t2.dim;
        for (int i = 0; i < kept.dim; ++i)
            for (int k = 0; k < kept.dim; ++k) {
                const Eigen::Index r = mode == 1 ? static_cast<Eigen::Index>(i) * d2 + m : static_cast<Eigen::Index>(m) * d2 + i;
                const Eigen::Index c = mode == 1 ? static_cast<Eigen::Index>(k) * d2 + m : static_cast<Eigen::Index>(m) * d2 + k;
                out(i, k) += w(m) * s.rho(r, c);
            }
    }
    hermitize(out);
    DensityOperator un(kept, std::move(out));
    const double p = un.trace();
    if (!(p > 0.0)) throw ZeroProbabilityError("zero-probability herald");
    Heralded<DensityOperator> h;
    h.probability = p;
    h.normalized = normalize(un).first;
    h.unnormalized = std::move(un);
    return h;
}

Heralded<DensityOperator> noisy_herald_pnrd(const PureState& s, int mode, int n, const DetectorModel& model) {
    if (s.modes != 2) throw ValidationError("noisy_herald_pnrd needs a two-mode state");
    if (mode != 0 && mode != 1) throw ValidationError("measured mode must be 0 or 1");
    const int dm = mode == 0 ? s.t1.dim : s.t2.dim;
    if (n < 0 || n >= dm) throw ValidationError("herald count outside truncation");
    const RVec w = detector_response(n, detector_params(model), dm);
    const Truncation kept = mode == 0 ? s.t2 : s.t1;
    Mat out = Mat::Zero(kept.dim, kept.dim);
    for (int m = 0; m < dm; ++m) {
        if (w(m) == 0.0) continue;
        Vec v(kept.dim);
        for (int i = 0; i < kept.dim; ++i) v(i) = mode == 1 ? s.at(i, m) : s.at(m, i);
        out += w(m) * (v * v.adjoint());
    }
    hermitize(out);
    DensityOperator un(kept, std::move(out));
    const double p = un.trace();
    if (!(p > 0.0)) throw ZeroProbabilityError("zero-probability herald");
    Heralded<DensityOperator> h;
    h.probability = p;
    h.normalized = normalize(un).first;
    h.unnormalized = std::move(un);
    return h;
}

}  // namespace fockopt::chan
