#pragma once

#include "fockopt/channels.hpp"
#include "fockopt/core.hpp"
#include "fockopt/metrics.hpp"
#include "fockopt/targets.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fockopt::proto {

struct Report {
    State state;  // normalized output
    std::vector<double> round_probabilities;
    double total_probability = 0.0;
    std::optional<double> fidelity;
    double r_corr = 0.0;
    cplx beta_corr = 0.0;
    std::optional<metrics::SqueezingReport> squeezing;
    // homodyne outcome density at x = 0 (GKP breeding only, never folded into probabilities)
    std::optional<double> homodyne_density;
    bool healthy = true;
    double guard_population = 0.0;
    std::vector<std::string> warnings;
};

// Ideal PNRD on the idler of a vacuum-seeded OPA: |n>, P = lambda^{2n}(1 - lambda^2).
Heralded<PureState> fock_prep(int n, double kappa, const Truncation& t);

// Squeezed vacuum S(r)|0> through the OPA, idler heralded on n photons.
Report photon_add_opa(double r_seed, double kappa, int n, const Truncation& t,
                      const std::optional<chan::DetectorModel>& det = std::nullopt);

// S(r)|0> and a heralded |n> (from an OPA of gain kappa_fock) on a beamsplitter
// of transmissivity tau; the second output is heralded on vacuum.
Report photon_add_fock(double r_seed, int n, double kappa_fock, double tau, const Truncation& t,
                       const std::optional<chan::DetectorModel>& det = std::nullopt);

// Coherent seed |alpha> through the OPA, idler heralded on n photons.
Report cubic_opa(cplx alpha, double kappa, int n, const Truncation& t);

// |alpha> and a heralded |n> on a 50:50 beamsplitter, second output heralded on vacuum.
Report cubic_fock(cplx alpha, int n, double kappa_fock, const Truncation& t);

// S(r_c) D(beta_c) rho D(beta_c)^dag S(r_c)^dag
PureState gaussian_correct(const PureState& s, double r_c, cplx beta_c);
DensityOperator gaussian_correct(const DensityOperator& s, double r_c, cplx beta_c);

struct CatOptions {
    double switch_tau = 1.0;
    // apply the switch loss after every round instead of between rounds only
    bool loss_every_round = false;
    std::optional<chan::DetectorModel> detector;
};

// k rounds of OPA photon addition with the same herald n each round.
Report cat_breed(double r_seed, double kappa, int n, int k, const Truncation& t, const CatOptions& opt = {});

// Two copies of the cat on a 50:50 beamsplitter, one output heralded at x = 0,
// then the variance-equalizing squeeze r_corr = (1/4) ln(var_x / var_p).
Report gkp_breed(const State& cat, const Truncation& t);

double generation_rate(double p_total, double clock_rate);

struct GkpPipeline {
    double r_seed = 0.0;
    double kappa = 0.7082;
    int n = 1;
    int k = 1;
    Truncation trunc{200};
    CatOptions cat;
};

Report run_gkp_pipeline(const GkpPipeline& cfg);

struct Threshold {
    enum class Status { Found, NeverAbove, NotApplicable };
    Status status = Status::NotApplicable;
    double value = 0.0;
    int evals = 0;
    std::string note;
};

// Largest per-round switch loss keeping symmetric GKP squeezing above floor_db.
Threshold find_loss_threshold(const GkpPipeline& cfg, double floor_db = 9.75, double tol = 1e-4);

// Smallest detector efficiency (dark rate and window held) keeping the floor.
Threshold find_efficiency_threshold(const GkpPipeline& cfg, double dark_rate, double window, double floor_db = 9.75,
                                    double tol = 1e-4);

struct Fit {
    double fidelity = 0.0;
    std::vector<double> params;
    int evals = 0;
};

// max over r2 of F(state, normalized a^dag^n S(r2)|0>)
Fit fit_photon_added(const State& s, int n, double r_lo, double r_hi, double r_start);

// max over (r, Im beta) of F(S(r) D(i b) psi, ideal cubic)
Fit fit_cubic(const PureState& s, const PureState& target, const std::vector<std::vector<double>>& starts,
              double r_lo = -0.5, double r_hi = 1.5, double b_lo = -5.0, double b_hi = 5.0);

// max over (alpha, r2) of F(state, ideal cat); rotate_quarter applies exp(i pi n/2) first
Fit fit_cat(const State& s, targets::Parity parity, const std::vector<std::vector<double>>& starts, double a_lo,
            double a_hi, double r_lo, double r_hi, bool rotate_quarter);

State rotate_state(const State& s, double phi);

}  // namespace fockopt::proto
