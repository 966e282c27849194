#pragma once

#include "mcindex/config_space.hpp"

namespace mcindex {

/// Mutual distances below this floor raise CollisionError (keeps
/// r^{-alpha-2} finite in double precision).
inline constexpr double kCollisionFloor = 1e-13;

/// Normalized critical point of U on the inertia ellipsoid together with
/// the spectral data entering the [BS] condition.
struct CentralConfiguration {
    Vec s0;              // chart coordinates, |s0| = 1
    double residual = 0; // |grad U(s0) + alpha U(s0) s0|
    double u_value = 0;  // U(s0)
    double mu1 = 0;      // smallest eigenvalue of D2U~(s0)
    double bs_margin = 0;// mu1 + (2-alpha)^2/8 U(s0)
    int kernel_dim = 0;  // dim ker D2U~(s0) within tolerance
};

struct BsReport {
    double mu1 = 0;
    double threshold = 0;  // -(2-alpha)^2/8 U(s0)
    double margin = 0;
    bool holds = false;
    bool degenerate = false;  // |margin| within the undecided band
};

struct CcSolveOptions {
    int max_iter = 200;
    double tol = 1e-12;          // target on |grad U + alpha U s|
    double accept_tol = 1e-10;   // residual above this is a failure
    double collision_floor = kCollisionFloor;
};

double potential_value(const MassSystem& sys, const Chart& chart, const Vec& q,
                       double collision_floor = kCollisionFloor);
Vec potential_grad(const MassSystem& sys, const Chart& chart, const Vec& q,
                   double collision_floor = kCollisionFloor);
Mat potential_hess(const MassSystem& sys, const Chart& chart, const Vec& q,
                   double collision_floor = kCollisionFloor);

/// Newton (least-squares step on the Lagrange system, with line search
/// and projected-gradient fallback) refinement of a unit-sphere critical
/// point of U.  Fills the spectral fields from hess_U_tilde.
CentralConfiguration find_central_configuration(const MassSystem& sys, const Chart& chart,
                                                const Vec& guess,
                                                const CcSolveOptions& opts = {});

/// D2U~(s0) = D2U(s0) - alpha(alpha+2) U(s0) s0 s0^T + alpha U(s0) I in
/// chart coordinates; annihilates s0.
Mat hess_U_tilde(const MassSystem& sys, const Chart& chart, const Vec& s0);

/// [BS] verdict from the stored spectral data.  The margin band
/// [-tol, tol] is flagged degenerate: finiteness of the Morse index is
/// undecided there.
BsReport check_bs(const CentralConfiguration& cc, double alpha, double tol = 1e-9);

/// Smallest mutual distance of the configuration (chart coordinates).
double min_mutual_distance(const MassSystem& sys, const Chart& chart, const Vec& q);

/// Serialization of a central configuration record (JSON text).
std::string cc_to_record(const MassSystem& sys, const Chart& chart, const CentralConfiguration& cc);
CentralConfiguration cc_from_record(const std::string& text, MassSystem* sys_out = nullptr,
                                    Chart* chart_out = nullptr);

} // namespace mcindex
