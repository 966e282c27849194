#include "mcindex/config_space.hpp"

#include <cmath>

namespace mcindex {

MassSystem MassSystem::make(int n, int d, Vec masses, double alpha) {
    if (n < 2) throw std::invalid_argument("MassSystem: need n >= 2 particles");
    if (d < 2) throw std::invalid_argument("MassSystem: need dimension d >= 2");
    if (masses.size() != n) throw std::invalid_argument("MassSystem: masses size != n");
    for (int i = 0; i < n; ++i)
        if (!(masses[i] > 0.0)) throw std::invalid_argument("MassSystem: masses must be positive");
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("MassSystem: alpha must lie in (0,2), got " + std::to_string(alpha));
    MassSystem sys;
    sys.n = n;
    sys.d = d;
    sys.masses = std::move(masses);
    sys.alpha = alpha;
    return sys;
}

double mass_inner(const MassSystem& sys, const Vec& u, const Vec& v) {
    if (u.size() != sys.ambient_dim() || v.size() != sys.ambient_dim())
        throw std::invalid_argument("mass_inner: dimension mismatch");
    double acc = 0.0;
    for (int i = 0; i < sys.n; ++i)
        acc += sys.masses[i] * u.segment(i * sys.d, sys.d).dot(v.segment(i * sys.d, sys.d));
    return acc;
}

Chart build_chart(const MassSystem& sys) {
    const int nd = sys.ambient_dim();
    const int N = sys.chart_dim();
    const double mtot = sys.total_mass();

    Mat seeds(nd, N);
    int col = 0;
    for (int axis = 0; axis < sys.d; ++axis) {
        for (int k = 1; k < sys.n; ++k) {
            Vec v = Vec::Zero(nd);
            // Displace particle k along this axis, shift all particles to
            // keep the barycenter at the origin.
            v[k * sys.d + axis] += 1.0;
            for (int i = 0; i < sys.n; ++i) v[i * sys.d + axis] -= sys.masses[k] / mtot;
            seeds.col(col++) = v;
        }
    }

    // Gram-Schmidt in the mass metric, fixed order.
    Mat basis(nd, N);
    for (int j = 0; j < N; ++j) {
        Vec v = seeds.col(j);
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i < j; ++i)
                v -= mass_inner(sys, basis.col(i), v) * basis.col(i);
        const double nrm = std::sqrt(mass_inner(sys, v, v));
        if (nrm < 1e-12) throw std::runtime_error("build_chart: degenerate seed set");
        basis.col(j) = v / nrm;
    }
    return Chart{std::move(basis)};
}

Vec to_chart(const MassSystem& sys, const Chart& chart, const Vec& ambient) {
    Vec Mq(ambient.size());
    for (int i = 0; i < sys.n; ++i)
        Mq.segment(i * sys.d, sys.d) = sys.masses[i] * ambient.segment(i * sys.d, sys.d);
    return chart.basis.transpose() * Mq;
}

Vec to_ambient(const Chart& chart, const Vec& coords) { return chart.basis * coords; }

Mat tensor_chart(const Vec& u, const Vec& w) { return u * w.transpose(); }

Mat particle_positions(const MassSystem& sys, const Chart& chart, const Vec& coords) {
    const Vec q = to_ambient(chart, coords);
    Mat pos(sys.d, sys.n);
    for (int i = 0; i < sys.n; ++i) pos.col(i) = q.segment(i * sys.d, sys.d);
    return pos;
}

} // namespace mcindex
