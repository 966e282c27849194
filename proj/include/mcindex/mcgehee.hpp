#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcindex/potential.hpp"

namespace mcindex {

/// Constants of the McGehee change of variables at a central
/// configuration.  Sign of delta_bar follows the mode: negative for
/// collision (rho decays), positive for parabolic.
struct Constants {
    double alpha = 0;
    double u0 = 0;          // U(s0)
    Mode mode = Mode::collision;
    double c_alpha = 0;     // (4/(2-alpha))^2 - 1
    double beta = 0;        // 2(2+alpha)/(2-alpha)
    double delta_bar = 0;   // -+ (2-alpha)/4 sqrt(2 U(s0))
    double delta_tilde = 0; // delta_bar (beta - 2)
};

Constants make_constants(double alpha, double u0, Mode mode);
inline Constants make_constants(const MassSystem& sys, const CentralConfiguration& cc, Mode mode) {
    return make_constants(sys.alpha, cc.u_value, mode);
}

/// Sundman-Sperling rate constant: r(t) ~ [K beta(t)]^{2/(2+alpha)} with
/// K = (alpha+2)/2 sqrt(2 b) from the h=0 radial equation.
double sundman_K(double alpha, double b);

/// Sampled trajectory in McGehee variables (tau, rho, rho', s, s') on a
/// strictly increasing tau grid.  Beyond the last sample callers use the
/// limit model (rho exponential at rate delta_bar, s = s0).
struct TrajectoryData {
    Mode mode = Mode::collision;
    std::string source;  // homothetic-closed-form | integrated | ingested | synthetic
    std::vector<double> grid;
    std::vector<double> rho;
    std::vector<double> rho_prime;
    Mat s;        // N x nsamples
    Mat s_prime;  // N x nsamples
    double energy_h = 0.0;

    // Tail diagnostics filled by the producers.
    double tail_rho_rate = 0.0;   // rho'/rho at the last sample
    double tail_s_speed = 0.0;    // |s'| at the last sample
    double physical_time = 0.0;   // t-span covered by the samples (0 if n/a)

    int N() const { return static_cast<int>(s.rows()); }
    int samples() const { return static_cast<int>(grid.size()); }
    double tau_max() const { return grid.empty() ? 0.0 : grid.back(); }
};

struct TrajectoryViolation {
    int row;  // sample index
    std::string message;
};

/// Invariant check: |s|=1, <s,s'>=0, rho>0, strictly increasing grid.
std::vector<TrajectoryViolation> validate_trajectory(const TrajectoryData& td,
                                                     double tol = 1e-8);

/// Closed-form s0-homothetic parabolic trajectory: rho = rho0 e^{delta_bar tau},
/// s = s0, s' = 0, h = 0.
TrajectoryData homothetic_parabolic(const CentralConfiguration& cc, const Constants& k,
                                    double tau_max, int n_samples, double rho0 = 1.0);

struct IntegratorOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double r_stop = 1e-9;        // collision-side stop radius for radial runs
    double abort_floor = 1e-8;   // close-approach abort for Newton runs
    double energy_drift_tol = 1e-6;
    int n_out = 800;             // uniform tau samples after the transform
};

/// Radial homothetic trajectory: integrates rdotdot = -alpha U(s0) r^{-alpha-1}
/// in physical time with the prescribed energy, then transforms to the
/// tau variables.  Collision mode starts inward, parabolic outward (h=0).
TrajectoryData integrate_homothetic(const MassSystem& sys, const CentralConfiguration& cc,
                                    Mode mode, double h, double r0, double t_span,
                                    const IntegratorOptions& opts = {});

/// Full Newton flow in chart coordinates with adaptive steps, then the
/// McGehee transform on the stored path.  Tail diagnostics are reported;
/// the caller decides whether the run qualifies as an approximate
/// s0-asymptotic solution.
TrajectoryData integrate_newton(const MassSystem& sys, const Chart& chart, const Vec& q0,
                                const Vec& v0, double t_span,
                                const IntegratorOptions& opts = {});

/// Raw physical-time record of a Newton integration (for diagnostics and
/// tests that work in t rather than tau).
struct PhysicalPath {
    std::vector<double> t;
    std::vector<Vec> q;
    std::vector<Vec> v;
};
PhysicalPath integrate_newton_raw(const MassSystem& sys, const Chart& chart, const Vec& q0,
                                  const Vec& v0, double t_span,
                                  const IntegratorOptions& opts = {});

/// Energy first integral in the y variables for one sample:
/// h = rho^{-beta} { c/2 rho'^2 + 1/2 (rho'^2 + rho^2 |s'|^2) - rho^2 U(s) }.
double energy_of(const MassSystem& sys, const Chart& chart, double alpha, double rho,
                 double rho_prime, const Vec& s, const Vec& s_prime);

/// Admissible synthetic data converging to the homothetic limit:
/// s = normalize(s0 + eps e^{-lambda tau} w), rho from the closed form.
/// Not a solution; valid input for the index engines.
TrajectoryData synthetic_perturbation(const CentralConfiguration& cc, const Constants& k,
                                      double eps, double lambda, const Vec& w, double tau_max,
                                      int n_samples);

/// CSV trajectory files: header tau,rho,rho_prime,h,s_1..s_N,sp_1..sp_N,
/// '#' comments, round-trippable precision.  emit_trajectory also writes
/// a chart sidecar <path>.chart.json when sys/chart are given.
void emit_trajectory(const TrajectoryData& td, const std::string& path,
                     const MassSystem* sys = nullptr, const Chart* chart = nullptr);
TrajectoryData ingest_trajectory(const std::string& path);

/// int_0^inf rho^beta dtau with the exponential tail correction; equals
/// the physical time span T of a collision trajectory.
double rho_beta_integral(const TrajectoryData& td, const Constants& k);

} // namespace mcindex
