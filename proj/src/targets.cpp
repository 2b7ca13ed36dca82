#include "fockopt/targets.hpp"

#include "fockopt/measurement.hpp"
#include "fockopt/operators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace fockopt::targets {

PureState squeezed_vacuum(double r, const Truncation& t) {
    if (!std::isfinite(r)) throw ValidationError("squeeze parameter must be finite");
    Vec v = Vec::Zero(t.dim);
    const double th = std::tanh(r);
    const double pre = 1.0 / std::sqrt(std::cosh(r));
    v(0) = pre;
    if (th != 0.0) {
        const double la = std::log(std::abs(th));
        const int sgn = th > 0 ? -1 : 1;  // sign of -tanh r
        for (int n = 1; 2 * n < t.dim; ++n) {
            const double lc = 0.5 * std::lgamma(2.0 * n + 1) - n * std::log(2.0) - std::lgamma(n + 1.0) + n * la;
            v(2 * n) = pre * std::exp(lc) * ((n % 2 == 1 && sgn < 0) ? -1.0 : 1.0);
        }
    }
    return PureState(t, std::move(v));
}

PureState coherent(cplx alpha, const Truncation& t) {
    Vec v = Vec::Zero(t.dim);
    const double mag = std::abs(alpha), ph = std::arg(alpha);
    if (mag == 0.0) {
        v(0) = 1.0;
        return PureState(t, std::move(v));
    }
    for (int n = 0; n < t.dim; ++n) {
        const double lm = -0.5 * mag * mag + n * std::log(mag) - 0.5 * std::lgamma(n + 1.0);
        v(n) = std::polar(std::exp(lm), n * ph);
    }
    return PureState(t, std::move(v));
}

Vec raise(const Vec& v, int n) {
    const Eigen::Index d = v.size();
    Vec out = Vec::Zero(d);
    for (Eigen::Index j = 0; j + n < d; ++j)
        out(j + n) = v(j) * std::exp(0.5 * (std::lgamma(static_cast<double>(j + n + 1)) - std::lgamma(static_cast<double>(j + 1))));
    return out;
}

PureState ideal_photon_added_squeezed(double r, int n, const Truncation& t) {
    if (n < 0) throw ValidationError("photon number must be >= 0");
    Vec v = raise(squeezed_vacuum(r, t).amp, n);
    return normalize(PureState(t, std::move(v))).first;
}

PureState ideal_cubic(double gamma, const Truncation& t) {
    // built on a padded space so the top levels are not distorted by the cut
    const int p = ((t.dim + 40 + 63) / 64) * 64;
    Mat u = ops::cubic_phase_matrix(gamma, p);
    return normalize(PureState(t, u.col(0).head(t.dim))).first;
}

PureState ideal_cat(const CatSpec& spec, const Truncation& t) {
    if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha)) throw ValidationError("cat amplitude must be real and > 0");
    const int p = ops::displacement_pad_dim(t.dim, spec.alpha);
    Vec sv = squeezed_vacuum(spec.r, Truncation(p)).amp;
    Vec v = ops::displacement_spectrum(p)->apply(spec.alpha, sv).head(t.dim);
    // D(-a)S(r)|0> has amplitudes (-1)^n times those of D(a)S(r)|0>
    const int keep = spec.parity == Parity::Even ? 0 : 1;
    for (int n = 0; n < t.dim; ++n)
        if (n % 2 != keep) v(n) = 0.0;
    return normalize(PureState(t, std::move(v))).first;
}

PureState ideal_gkp(const GkpSpec& spec, const Truncation& t) {
    if (spec.logical != 0 && spec.logical != 1) throw ValidationError("GKP logical must be 0 or 1");
    if (!(spec.delta > 0.0 && spec.delta <= 1.0)) throw ValidationError("GKP delta must be in (0,1]");
    const double beta = 0.5 * std::sqrt(std::numbers::pi);
    const double dl = spec.delta;
    const double half = 2.0 * std::sqrt(static_cast<double>(t.dim)) + 12.0;
    const double step = std::min(0.01, dl / 20.0);
    const int npts = static_cast<int>(std::ceil(2.0 * half / step)) + 1;
    // peak centres 2(2s+mu)beta in x with width delta
    std::vector<std::pair<double, double>> peaks;
    for (int s = 0;; ++s) {
        bool any = false;
        for (int sign : {1, -1}) {
            if (s == 0 && sign == -1 && spec.logical == 0) continue;
            const int m = spec.logical == 0 ? sign * 2 * s : sign * (2 * s + 1);
            const double a = m * beta;
            const double w = std::exp(-0.5 * (a * dl) * (a * dl));
            if (w < spec.weight_cut) continue;
            peaks.emplace_back(2.0 * a, w);
            any = true;
        }
        if (!any && s > 0) break;
    }
    Vec c = Vec::Zero(t.dim);
    for (int k = 0; k < npts; ++k) {
        const double x = -half + k * step;
        double psi = 0.0;
        for (const auto& [x0, w] : peaks) {
            const double z = (x - x0) / dl;
            psi += w * std::exp(-0.25 * z * z);
        }
        if (psi == 0.0) continue;
        c += (psi * step) * meas::homodyne_x_functional(x, t.dim).cast<cplx>();
    }
    return normalize(PureState(t, std::move(c))).first;
}

}  // namespace fockopt::targets
