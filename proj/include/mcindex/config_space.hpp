#pragma once

#include "mcindex/types.hpp"

namespace mcindex {

/// Masses, spatial dimension and homogeneity exponent of the potential.
/// The reduced (barycenter-free) configuration space has dimension
/// N = d(n-1).
struct MassSystem {
    int n = 0;
    int d = 0;
    Vec masses;
    double alpha = 1.0;

    int ambient_dim() const { return n * d; }
    int chart_dim() const { return d * (n - 1); }
    double total_mass() const { return masses.sum(); }

    static MassSystem make(int n, int d, Vec masses, double alpha);
};

/// M-orthonormal basis of the zero-barycenter subspace.  Columns are
/// ambient vectors (length nd), basis^T M basis = I and every column has
/// vanishing mass-weighted barycenter.  All endomorphisms downstream
/// are expressed in these coordinates, where the mass scalar product
/// becomes the Euclidean one.
struct Chart {
    Mat basis;  // nd x N

    int N() const { return static_cast<int>(basis.cols()); }
};

/// Deterministic chart: per spatial axis, the n-1 single-particle
/// displacement seeds projected to zero barycenter, then Gram-Schmidt in
/// the mass metric in fixed column order.
Chart build_chart(const MassSystem& sys);

/// <Mu, v> on ambient vectors.
double mass_inner(const MassSystem& sys, const Vec& u, const Vec& v);

/// Chart coordinates of an ambient zero-barycenter vector (basis^T M q).
Vec to_chart(const MassSystem& sys, const Chart& chart, const Vec& ambient);

/// Ambient vector of chart coordinates.
Vec to_ambient(const Chart& chart, const Vec& coords);

/// Mass-metric tensor product in chart coordinates:
/// (u (x) w) v = <w, v> u, i.e. the matrix u w^T.
Mat tensor_chart(const Vec& u, const Vec& w);

/// Positions of the n particles as d-vectors from chart coordinates.
Mat particle_positions(const MassSystem& sys, const Chart& chart, const Vec& coords);

} // namespace mcindex
