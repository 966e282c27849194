#include "mcindex/potential.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mcindex {

namespace {

// Pairwise ambient quantities shared by value/grad/hess.
struct PairwiseCache {
    Mat pos;  // d x n
    double value = 0.0;
};

PairwiseCache eval_pairs(const MassSystem& sys, const Chart& chart, const Vec& q,
                         double floor) {
    PairwiseCache c;
    c.pos = particle_positions(sys, chart, q);
    const double a = sys.alpha;
    for (int i = 0; i < sys.n; ++i) {
        for (int j = i + 1; j < sys.n; ++j) {
            const double r = (c.pos.col(i) - c.pos.col(j)).norm();
            if (r < floor)
                throw CollisionError("configuration at collision: |q_" + std::to_string(i) +
                                     " - q_" + std::to_string(j) + "| = " + std::to_string(r));
            c.value += sys.masses[i] * sys.masses[j] / std::pow(r, a);
        }
    }
    return c;
}

Vec ambient_grad(const MassSystem& sys, const Mat& pos, double alpha) {
    Vec g = Vec::Zero(sys.ambient_dim());
    for (int i = 0; i < sys.n; ++i) {
        for (int j = i + 1; j < sys.n; ++j) {
            const Vec z = pos.col(i) - pos.col(j);
            const double r = z.norm();
            const Vec gij = -alpha * sys.masses[i] * sys.masses[j] * std::pow(r, -alpha - 2.0) * z;
            g.segment(i * sys.d, sys.d) += gij;
            g.segment(j * sys.d, sys.d) -= gij;
        }
    }
    return g;
}

Mat ambient_hess(const MassSystem& sys, const Mat& pos, double alpha) {
    const int nd = sys.ambient_dim();
    Mat H = Mat::Zero(nd, nd);
    for (int i = 0; i < sys.n; ++i) {
        for (int j = i + 1; j < sys.n; ++j) {
            const Vec z = pos.col(i) - pos.col(j);
            const double r = z.norm();
            const double c = sys.masses[i] * sys.masses[j] * alpha;
            const Mat Hij = c * ((alpha + 2.0) * std::pow(r, -alpha - 4.0) * (z * z.transpose()) -
                                 std::pow(r, -alpha - 2.0) * Mat::Identity(sys.d, sys.d));
            H.block(i * sys.d, i * sys.d, sys.d, sys.d) += Hij;
            H.block(j * sys.d, j * sys.d, sys.d, sys.d) += Hij;
            H.block(i * sys.d, j * sys.d, sys.d, sys.d) -= Hij;
            H.block(j * sys.d, i * sys.d, sys.d, sys.d) -= Hij;
        }
    }
    return H;
}

} // namespace

double min_mutual_distance(const MassSystem& sys, const Chart& chart, const Vec& q) {
    const Mat pos = particle_positions(sys, chart, q);
    double dmin = std::numeric_limits<double>::max();
    for (int i = 0; i < sys.n; ++i)
        for (int j = i + 1; j < sys.n; ++j)
            dmin = std::min(dmin, (pos.col(i) - pos.col(j)).norm());
    return dmin;
}

double potential_value(const MassSystem& sys, const Chart& chart, const Vec& q, double floor) {
    return eval_pairs(sys, chart, q, floor).value;
}

Vec potential_grad(const MassSystem& sys, const Chart& chart, const Vec& q, double floor) {
    const auto c = eval_pairs(sys, chart, q, floor);
    return chart.basis.transpose() * ambient_grad(sys, c.pos, sys.alpha);
}

Mat potential_hess(const MassSystem& sys, const Chart& chart, const Vec& q, double floor) {
    const auto c = eval_pairs(sys, chart, q, floor);
    return chart.basis.transpose() * ambient_hess(sys, c.pos, sys.alpha) * chart.basis;
}

Mat hess_U_tilde(const MassSystem& sys, const Chart& chart, const Vec& s0) {
    const double u = potential_value(sys, chart, s0);
    const double a = sys.alpha;
    Mat H = potential_hess(sys, chart, s0);
    H -= a * (a + 2.0) * u * (s0 * s0.transpose());
    H += a * u * Mat::Identity(s0.size(), s0.size());
    return 0.5 * (H + H.transpose());
}

CentralConfiguration find_central_configuration(const MassSystem& sys, const Chart& chart,
                                                const Vec& guess, const CcSolveOptions& opts) {
    const int N = sys.chart_dim();
    if (guess.size() != N) throw std::invalid_argument("find_central_configuration: guess size");
    if (guess.norm() == 0.0) throw std::invalid_argument("find_central_configuration: zero guess");

    Vec s = guess / guess.norm();
    // Raises CollisionError on a collision ray.
    (void)potential_value(sys, chart, s, opts.collision_floor);

    const double a = sys.alpha;
    auto residual_vec = [&](const Vec& sv) -> Vec {
        const double u = potential_value(sys, chart, sv, opts.collision_floor);
        return potential_grad(sys, chart, sv, opts.collision_floor) + a * u * sv;
    };

    double res = residual_vec(s).norm();
    for (int it = 0; it < opts.max_iter && res > opts.tol; ++it) {
        const double u = potential_value(sys, chart, s, opts.collision_floor);
        const Vec g = potential_grad(sys, chart, s, opts.collision_floor);
        const Vec F = g + a * u * s;
        const double lambda = a * u;

        // Extended Lagrange system; rotational zero modes make the KKT
        // matrix rank-deficient, so take the minimum-norm Newton step.
        Mat K(N + 1, N + 1);
        K.setZero();
        // dF/ds = D2U + alpha U I + alpha s g^T
        K.topLeftCorner(N, N) = potential_hess(sys, chart, s, opts.collision_floor) +
                                lambda * Mat::Identity(N, N) + a * (s * g.transpose());
        K.topRightCorner(N, 1) = s;
        K.bottomLeftCorner(1, N) = s.transpose();
        Vec rhs(N + 1);
        rhs.head(N) = -F;
        rhs[N] = -0.5 * (s.squaredNorm() - 1.0);

        Eigen::CompleteOrthogonalDecomposition<Mat> cod(K);
        const Vec step = cod.solve(rhs);

        bool accepted = false;
        double t = 1.0;
        for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
            Vec cand = s + t * step.head(N);
            cand /= cand.norm();
            if (min_mutual_distance(sys, chart, cand) < opts.collision_floor) continue;
            const double cand_res = residual_vec(cand).norm();
            if (cand_res < res * (1.0 - 1e-4 * t) || cand_res < opts.tol) {
                s = cand;
                res = cand_res;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Projected gradient fallback on |F|^2 over the sphere.
            Vec dir = -F;
            dir -= dir.dot(s) * s;
            double t2 = 1.0 / std::max(1.0, res);
            bool moved = false;
            for (int ls = 0; ls < 40; ++ls, t2 *= 0.5) {
                Vec cand = s + t2 * dir;
                cand /= cand.norm();
                if (min_mutual_distance(sys, chart, cand) < opts.collision_floor) continue;
                const double cand_res = residual_vec(cand).norm();
                if (cand_res < res) {
                    s = cand;
                    res = cand_res;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
    }

    if (res > opts.accept_tol)
        throw ConvergenceError("find_central_configuration: residual " + std::to_string(res) +
                               " above tolerance after iteration limit");

    CentralConfiguration cc;
    cc.s0 = s;
    cc.residual = res;
    cc.u_value = potential_value(sys, chart, s, opts.collision_floor);
    const Mat Ht = hess_U_tilde(sys, chart, s);
    Eigen::SelfAdjointEigenSolver<Mat> es(Ht, Eigen::EigenvaluesOnly);
    cc.mu1 = es.eigenvalues().minCoeff();
    const double kscale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
    cc.kernel_dim = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()[i]) < 1e-8 * kscale) ++cc.kernel_dim;
    cc.bs_margin = cc.mu1 + (2.0 - sys.alpha) * (2.0 - sys.alpha) / 8.0 * cc.u_value;
    return cc;
}

BsReport check_bs(const CentralConfiguration& cc, double alpha, double tol) {
    BsReport r;
    r.mu1 = cc.mu1;
    r.threshold = -(2.0 - alpha) * (2.0 - alpha) / 8.0 * cc.u_value;
    r.margin = cc.mu1 - r.threshold;
    r.degenerate = std::abs(r.margin) <= tol;
    r.holds = r.margin > tol;
    return r;
}

std::string cc_to_record(const MassSystem& sys, const Chart& chart, const CentralConfiguration& cc) {
    nlohmann::json j;
    j["masses"] = std::vector<double>(sys.masses.data(), sys.masses.data() + sys.n);
    j["d"] = sys.d;
    j["alpha"] = sys.alpha;
    const Vec amb = to_ambient(chart, cc.s0);
    j["s0_ambient"] = std::vector<double>(amb.data(), amb.data() + amb.size());
    j["residual"] = cc.residual;
    return j.dump(2);
}

CentralConfiguration cc_from_record(const std::string& text, MassSystem* sys_out, Chart* chart_out) {
    const auto j = nlohmann::json::parse(text);
    const auto masses = j.at("masses").get<std::vector<double>>();
    Vec m(masses.size());
    for (size_t i = 0; i < masses.size(); ++i) m[static_cast<int>(i)] = masses[i];
    MassSystem sys = MassSystem::make(static_cast<int>(masses.size()), j.at("d").get<int>(), m,
                                      j.at("alpha").get<double>());
    Chart chart = build_chart(sys);
    const auto amb = j.at("s0_ambient").get<std::vector<double>>();
    if (static_cast<int>(amb.size()) != sys.ambient_dim())
        throw std::invalid_argument("cc_from_record: s0_ambient has wrong length");
    Vec qa(amb.size());
    for (size_t i = 0; i < amb.size(); ++i) qa[static_cast<int>(i)] = amb[i];
    const Vec s = to_chart(sys, chart, qa);
    CentralConfiguration cc = find_central_configuration(sys, chart, s);
    if (sys_out) *sys_out = sys;
    if (chart_out) *chart_out = chart;
    return cc;
}

} // namespace mcindex
