#include "mcindex/mcgehee.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mcindex/interp.hpp"

namespace odeint = boost::numeric::odeint;

namespace mcindex {

Constants make_constants(double alpha, double u0, Mode mode) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("make_constants: alpha range");
    if (!(u0 > 0.0)) throw std::invalid_argument("make_constants: U(s0) must be positive");
    Constants k;
    k.alpha = alpha;
    k.u0 = u0;
    k.mode = mode;
    const double q = 4.0 / (2.0 - alpha);
    k.c_alpha = q * q - 1.0;
    k.beta = 2.0 * (2.0 + alpha) / (2.0 - alpha);
    k.delta_bar = (2.0 - alpha) / 4.0 * std::sqrt(2.0 * u0);
    if (mode == Mode::collision) k.delta_bar = -k.delta_bar;
    k.delta_tilde = k.delta_bar * (k.beta - 2.0);
    return k;
}

double sundman_K(double alpha, double b) {
    return (alpha + 2.0) / 2.0 * std::sqrt(2.0 * b);
}

std::vector<TrajectoryViolation> validate_trajectory(const TrajectoryData& td, double tol) {
    std::vector<TrajectoryViolation> out;
    const int n = td.samples();
    if (n == 0) {
        out.push_back({-1, "empty trajectory"});
        return out;
    }
    if (td.rho.size() != static_cast<size_t>(n) || td.rho_prime.size() != static_cast<size_t>(n) ||
        td.s.cols() != n || td.s_prime.cols() != n) {
        out.push_back({-1, "inconsistent sample counts"});
        return out;
    }
    for (int i = 0; i < n; ++i) {
        if (i > 0 && !(td.grid[i] > td.grid[i - 1]))
            out.push_back({i, "tau grid not strictly increasing"});
        if (!(td.rho[i] > 0.0)) out.push_back({i, "rho must be positive"});
        const double nrm = td.s.col(i).norm();
        if (std::abs(nrm - 1.0) > tol)
            out.push_back({i, "|s| = " + std::to_string(nrm) + " deviates from 1"});
        const double ortho = td.s.col(i).dot(td.s_prime.col(i));
        if (std::abs(ortho) > tol)
            out.push_back({i, "<s, s'> = " + std::to_string(ortho) + " not orthogonal"});
    }
    if (td.mode == Mode::parabolic && std::abs(td.energy_h) > 1e-10)
        out.push_back({-1, "parabolic trajectory must have zero energy"});
    return out;
}

TrajectoryData homothetic_parabolic(const CentralConfiguration& cc, const Constants& k,
                                    double tau_max, int n_samples, double rho0) {
    if (n_samples < 2) throw std::invalid_argument("homothetic_parabolic: need >= 2 samples");
    if (!(tau_max > 0.0) || !(rho0 > 0.0))
        throw std::invalid_argument("homothetic_parabolic: tau_max and rho0 must be positive");
    const int N = static_cast<int>(cc.s0.size());
    TrajectoryData td;
    td.mode = k.mode;
    td.source = "homothetic-closed-form";
    td.energy_h = 0.0;
    td.grid.resize(n_samples);
    td.rho.resize(n_samples);
    td.rho_prime.resize(n_samples);
    td.s.resize(N, n_samples);
    td.s_prime = Mat::Zero(N, n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double tau = tau_max * i / (n_samples - 1);
        td.grid[i] = tau;
        td.rho[i] = rho0 * std::exp(k.delta_bar * tau);
        td.rho_prime[i] = k.delta_bar * td.rho[i];
        td.s.col(i) = cc.s0;
    }
    td.tail_rho_rate = k.delta_bar;
    td.tail_s_speed = 0.0;
    return td;
}

namespace {

using State = std::vector<double>;

// Adaptive dopri5 run storing every accepted step; a stop predicate is
// evaluated after each step.
template <typename Rhs, typename Stop>
void integrate_with_stop(Rhs rhs, State& state, double t0, double t1, double dt0, double abs_tol,
                         double rel_tol, std::vector<double>& ts, std::vector<State>& states,
                         Stop stop) {
    auto stepper = odeint::make_dense_output(abs_tol, rel_tol,
                                             odeint::runge_kutta_dopri5<State>());
    stepper.initialize(state, t0, dt0);
    ts.push_back(t0);
    states.push_back(state);
    while (stepper.current_time() < t1) {
        if (stepper.current_time() + stepper.current_time_step() > t1)
            stepper.initialize(stepper.current_state(), stepper.current_time(),
                               t1 - stepper.current_time());
        stepper.do_step(rhs);
        ts.push_back(stepper.current_time());
        states.push_back(stepper.current_state());
        if (stop(stepper.current_state(), stepper.current_time())) break;
    }
    state = states.back();
}

// McGehee transform of a stored physical-time path (chart coordinates).
TrajectoryData transform_path(const std::vector<double>& ts, const std::vector<Vec>& qs,
                              const std::vector<Vec>& vs, double alpha, int n_out, Mode mode,
                              const std::string& source, double energy_h) {
    const size_t M = ts.size();
    if (M < 4) throw ConvergenceError("McGehee transform: too few integration samples");
    const int N = static_cast<int>(qs.front().size());

    // tau(t) by cumulative Simpson of r^{-(2+alpha)/2} on the adaptive grid.
    std::vector<double> integrand(M);
    for (size_t i = 0; i < M; ++i) {
        const double r = qs[i].norm();
        if (!(r > 0.0)) throw CollisionError("McGehee transform: r reached zero");
        integrand[i] = std::pow(r, -(2.0 + alpha) / 2.0);
    }
    const std::vector<double> tau = cumulative_simpson(ts, integrand);

    // Inverse map tau -> t and componentwise state interpolants in t.
    const Pchip t_of_tau(tau, ts);
    std::vector<Pchip> q_interp(N), v_interp(N);
    {
        std::vector<double> comp(M);
        for (int c = 0; c < N; ++c) {
            for (size_t i = 0; i < M; ++i) comp[i] = qs[i][c];
            q_interp[c] = Pchip(ts, comp);
            for (size_t i = 0; i < M; ++i) comp[i] = vs[i][c];
            v_interp[c] = Pchip(ts, comp);
        }
    }

    TrajectoryData td;
    td.mode = mode;
    td.source = source;
    td.energy_h = energy_h;
    td.grid.resize(n_out);
    td.rho.resize(n_out);
    td.rho_prime.resize(n_out);
    td.s.resize(N, n_out);
    td.s_prime.resize(N, n_out);

    const double tau_end = tau.back();
    for (int j = 0; j < n_out; ++j) {
        const double tj = tau_end * j / (n_out - 1);
        const double t = t_of_tau(tj);
        Vec q(N), v(N);
        for (int c = 0; c < N; ++c) {
            q[c] = q_interp[c](t);
            v[c] = v_interp[c](t);
        }
        const double r = q.norm();
        const double rdot = q.dot(v) / r;
        const Vec s = q / r;
        const Vec sdot = v / r - (q.dot(v) / (r * r * r)) * q;
        td.grid[j] = tj;
        td.rho[j] = std::pow(r, (2.0 - alpha) / 4.0);
        td.rho_prime[j] = (2.0 - alpha) / 4.0 * std::pow(r, (2.0 + alpha) / 4.0) * rdot;
        td.s.col(j) = s;
        td.s_prime.col(j) = (sdot - s.dot(sdot) * s) * std::pow(r, (2.0 + alpha) / 2.0);
    }
    td.tail_rho_rate = td.rho_prime.back() / td.rho.back();
    td.tail_s_speed = td.s_prime.col(n_out - 1).norm();
    td.physical_time = ts.back() - ts.front();
    return td;
}

} // namespace

TrajectoryData integrate_homothetic(const MassSystem& sys, const CentralConfiguration& cc,
                                    Mode mode, double h, double r0, double t_span,
                                    const IntegratorOptions& opts) {
    if (!(r0 > 0.0)) throw std::invalid_argument("integrate_homothetic: r0 must be positive");
    if (mode == Mode::parabolic && h != 0.0)
        throw std::invalid_argument("integrate_homothetic: parabolic runs have h = 0");
    const double alpha = sys.alpha;
    const double u0 = cc.u_value;

    const double v2 = 2.0 * (h + u0 * std::pow(r0, -alpha));
    if (!(v2 >= 0.0))
        throw std::invalid_argument("integrate_homothetic: energy incompatible with r0");
    const double rdot0 = (mode == Mode::collision ? -1.0 : 1.0) * std::sqrt(v2);

    State y = {r0, rdot0};
    auto rhs = [&](const State& x, State& dxdt, double) {
        dxdt.resize(2);
        dxdt[0] = x[1];
        dxdt[1] = -alpha * u0 * std::pow(x[0], -alpha - 1.0);
    };
    std::vector<double> ts;
    std::vector<State> states;
    integrate_with_stop(rhs, y, 0.0, t_span, 1e-6, opts.abs_tol, opts.rel_tol, ts, states,
                        [&](const State& x, double) { return x[0] <= opts.r_stop; });
    if (states.back()[0] <= 0.0)
        throw CollisionError("integrate_homothetic: radius crossed zero");

    // 1-D energy conservation guard.
    for (size_t i = 0; i < ts.size(); ++i) {
        const double e = 0.5 * states[i][1] * states[i][1] - u0 * std::pow(states[i][0], -alpha);
        if (std::abs(e - h) > opts.energy_drift_tol)
            throw ConvergenceError("integrate_homothetic: energy drift " + std::to_string(e - h));
    }

    // Lift the radial motion to the full chart along s0.
    std::vector<Vec> qs(ts.size()), vs(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        qs[i] = states[i][0] * cc.s0;
        vs[i] = states[i][1] * cc.s0;
    }
    return transform_path(ts, qs, vs, alpha, opts.n_out, mode, "integrated", h);
}

PhysicalPath integrate_newton_raw(const MassSystem& sys, const Chart& chart, const Vec& q0,
                                  const Vec& v0, double t_span, const IntegratorOptions& opts) {
    const int N = sys.chart_dim();
    if (q0.size() != N || v0.size() != N)
        throw std::invalid_argument("integrate_newton: state dimension mismatch");
    if (min_mutual_distance(sys, chart, q0) < opts.abort_floor)
        throw CollisionError("integrate_newton: initial data too close to a collision");

    State y(2 * N);
    Eigen::Map<Vec>(y.data(), N) = q0;
    Eigen::Map<Vec>(y.data() + N, N) = v0;

    auto rhs = [&](const State& x, State& dxdt, double) {
        dxdt.resize(2 * N);
        const Vec q = Eigen::Map<const Vec>(x.data(), N);
        const Vec g = potential_grad(sys, chart, q, opts.abort_floor);
        for (int i = 0; i < N; ++i) {
            dxdt[i] = x[N + i];
            dxdt[N + i] = g[i];
        }
    };

    const double e0 = 0.5 * v0.squaredNorm() - potential_value(sys, chart, q0);
    std::vector<double> ts;
    std::vector<State> states;
    integrate_with_stop(rhs, y, 0.0, t_span, 1e-6, opts.abs_tol, opts.rel_tol, ts, states,
                        [&](const State& x, double) {
                            const Vec q = Eigen::Map<const Vec>(x.data(), N);
                            return min_mutual_distance(sys, chart, q) <= opts.abort_floor ||
                                   q.norm() <= opts.r_stop;
                        });

    PhysicalPath path;
    path.t = ts;
    path.q.reserve(ts.size());
    path.v.reserve(ts.size());
    for (const auto& st : states) {
        path.q.push_back(Eigen::Map<const Vec>(st.data(), N));
        path.v.push_back(Eigen::Map<const Vec>(st.data() + N, N));
    }
    // Energy drift guard over the stored path.
    for (size_t i = 0; i < path.t.size(); ++i) {
        const double e = 0.5 * path.v[i].squaredNorm() - potential_value(sys, chart, path.q[i]);
        if (std::abs(e - e0) > opts.energy_drift_tol)
            throw ConvergenceError("integrate_newton: energy drift " + std::to_string(e - e0) +
                                   " at t = " + std::to_string(path.t[i]));
    }
    return path;
}

TrajectoryData integrate_newton(const MassSystem& sys, const Chart& chart, const Vec& q0,
                                const Vec& v0, double t_span, const IntegratorOptions& opts) {
    const PhysicalPath path = integrate_newton_raw(sys, chart, q0, v0, t_span, opts);
    const double e0 = 0.5 * v0.squaredNorm() - potential_value(sys, chart, q0);
    const double r_first = path.q.front().norm();
    const double r_last = path.q.back().norm();
    const Mode mode = r_last < r_first ? Mode::collision : Mode::parabolic;
    return transform_path(path.t, path.q, path.v, sys.alpha, opts.n_out, mode, "integrated", e0);
}

double energy_of(const MassSystem& sys, const Chart& chart, double alpha, double rho,
                 double rho_prime, const Vec& s, const Vec& s_prime) {
    const double q = 4.0 / (2.0 - alpha);
    const double c_alpha = q * q - 1.0;
    const double beta = 2.0 * (2.0 + alpha) / (2.0 - alpha);
    const double us = potential_value(sys, chart, s);
    const double y_prime_sq = rho_prime * rho_prime + rho * rho * s_prime.squaredNorm();
    return std::pow(rho, -beta) *
           (0.5 * c_alpha * rho_prime * rho_prime + 0.5 * y_prime_sq - rho * rho * us);
}

TrajectoryData synthetic_perturbation(const CentralConfiguration& cc, const Constants& k,
                                      double eps, double lambda, const Vec& w, double tau_max,
                                      int n_samples) {
    const int N = static_cast<int>(cc.s0.size());
    if (w.size() != N) throw std::invalid_argument("synthetic_perturbation: direction size");
    if (std::abs(w.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("synthetic_perturbation: direction must be unit");
    if (std::abs(w.dot(cc.s0)) > 1e-10)
        throw std::invalid_argument("synthetic_perturbation: direction must be orthogonal to s0");
    if (!(lambda > 0.0)) throw std::invalid_argument("synthetic_perturbation: lambda > 0 required");
    if (!(std::abs(eps) < 1.0))
        throw std::invalid_argument("synthetic_perturbation: |eps| < 1 required");
    if (n_samples < 2) throw std::invalid_argument("synthetic_perturbation: need >= 2 samples");

    TrajectoryData td;
    td.mode = k.mode;
    td.source = "synthetic";
    td.energy_h = 0.0;
    td.grid.resize(n_samples);
    td.rho.resize(n_samples);
    td.rho_prime.resize(n_samples);
    td.s.resize(N, n_samples);
    td.s_prime.resize(N, n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double tau = tau_max * i / (n_samples - 1);
        const double a = eps * std::exp(-lambda * tau);
        const Vec v = cc.s0 + a * w;
        const Vec vp = -lambda * a * w;
        const double nv = v.norm();
        const Vec s = v / nv;
        td.grid[i] = tau;
        td.rho[i] = std::exp(k.delta_bar * tau);
        td.rho_prime[i] = k.delta_bar * td.rho[i];
        td.s.col(i) = s;
        td.s_prime.col(i) = vp / nv - (v.dot(vp) / (nv * nv * nv)) * v;
    }
    td.tail_rho_rate = k.delta_bar;
    td.tail_s_speed = td.s_prime.col(n_samples - 1).norm();
    return td;
}

void emit_trajectory(const TrajectoryData& td, const std::string& path, const MassSystem* sys,
                     const Chart* chart) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_trajectory: cannot open " + path);
    const int N = td.N();
    out << "# mode=" << mode_name(td.mode) << "\n";
    out << "# source=" << td.source << "\n";
    out << "tau,rho,rho_prime,h";
    for (int c = 1; c <= N; ++c) out << ",s_" << c;
    for (int c = 1; c <= N; ++c) out << ",sp_" << c;
    out << "\n";
    char buf[32];
    auto put = [&](double v, bool lead_comma = true) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (lead_comma) out << ',';
        out << buf;
    };
    for (int i = 0; i < td.samples(); ++i) {
        put(td.grid[i], false);
        put(td.rho[i]);
        put(td.rho_prime[i]);
        put(td.energy_h);
        for (int c = 0; c < N; ++c) put(td.s(c, i));
        for (int c = 0; c < N; ++c) put(td.s_prime(c, i));
        out << "\n";
    }
    if (sys && chart) {
        nlohmann::json j;
        j["masses"] = std::vector<double>(sys->masses.data(), sys->masses.data() + sys->n);
        j["d"] = sys->d;
        j["alpha"] = sys->alpha;
        std::vector<std::vector<double>> basis;
        for (int c = 0; c < chart->N(); ++c)
            basis.emplace_back(chart->basis.col(c).data(),
                               chart->basis.col(c).data() + chart->basis.rows());
        j["chart_columns"] = basis;
        std::ofstream side(path + ".chart.json");
        side << j.dump(2) << "\n";
    }
}

TrajectoryData ingest_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest_trajectory: cannot open " + path);
    std::string line;
    TrajectoryData td;
    td.source = "ingested";
    bool have_header = false;
    int N = -1;
    std::vector<double> grid, rho, rhop, h_col;
    std::vector<std::vector<double>> scols, spcols;
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                auto trim = [](std::string s) {
                    s.erase(0, s.find_first_not_of(" \t"));
                    s.erase(s.find_last_not_of(" \t\r") + 1);
                    return s;
                };
                const std::string k = trim(line.substr(1, eq - 1));
                const std::string v = trim(line.substr(eq + 1));
                if (k == "mode") td.mode = (v == "parabolic" ? Mode::parabolic : Mode::collision);
                if (k == "source") td.source = v;
            }
            continue;
        }
        if (!have_header) {
            int cols = 1;
            for (char ch : line)
                if (ch == ',') ++cols;
            if (cols < 6 || (cols - 4) % 2 != 0)
                throw std::runtime_error("ingest_trajectory: malformed header '" + line + "'");
            N = (cols - 4) / 2;
            if (line.rfind("tau,rho,rho_prime,h", 0) != 0)
                throw std::runtime_error("ingest_trajectory: unexpected header '" + line + "'");
            have_header = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("ingest_trajectory: malformed value '" + cell +
                                         "' at data row " + std::to_string(row));
            }
        }
        if (static_cast<int>(vals.size()) != 4 + 2 * N)
            throw std::runtime_error("ingest_trajectory: wrong column count at data row " +
                                     std::to_string(row));
        grid.push_back(vals[0]);
        rho.push_back(vals[1]);
        rhop.push_back(vals[2]);
        h_col.push_back(vals[3]);
        scols.emplace_back(vals.begin() + 4, vals.begin() + 4 + N);
        spcols.emplace_back(vals.begin() + 4 + N, vals.end());
        ++row;
    }
    if (!have_header || row == 0) throw std::runtime_error("ingest_trajectory: no data in " + path);

    td.grid = grid;
    td.rho = rho;
    td.rho_prime = rhop;
    td.energy_h = h_col.front();
    td.s.resize(N, row);
    td.s_prime.resize(N, row);
    for (int i = 0; i < row; ++i)
        for (int c = 0; c < N; ++c) {
            td.s(c, i) = scols[i][c];
            td.s_prime(c, i) = spcols[i][c];
        }

    const auto violations = validate_trajectory(td);
    if (!violations.empty()) {
        std::string msg = "ingest_trajectory: invariant violations:";
        for (const auto& v : violations)
            msg += "\n  row " + std::to_string(v.row) + ": " + v.message;
        throw std::runtime_error(msg);
    }
    td.tail_rho_rate = td.rho_prime.back() / td.rho.back();
    td.tail_s_speed = td.s_prime.col(td.samples() - 1).norm();
    return td;
}

double rho_beta_integral(const TrajectoryData& td, const Constants& k) {
    std::vector<double> f(td.samples());
    for (int i = 0; i < td.samples(); ++i) f[i] = std::pow(td.rho[i], k.beta);
    const auto F = cumulative_simpson(td.grid, f);
    double tail = 0.0;
    if (k.delta_bar < 0.0) {
        // rho ~ rho_end e^{delta_bar (tau - tau_end)} beyond the grid.
        tail = std::pow(td.rho.back(), k.beta) / (-k.beta * k.delta_bar);
    }
    return F.back() + tail;
}

} // namespace mcindex
