// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "holosched/common.hpp"
#include "holosched/rng.hpp"

namespace holosched::channel {

// Normalization of the array response. The literal convention divides by M;
// the sqrt convention divides by sqrt(M) and is selectable for sensitivity runs.
enum class ArrayNorm { literal, sqrt };

struct ArrayGeometry {
    int side = 0;        // sqrt(M) elements per axis
    double dx = 0.0;     // element spacing along x, meters
    double dy = 0.0;     // element spacing along y, meters
    double k_f = 0.0;    // free-space wavenumber, rad/m

    int elements() const { return side * side; }

    // Square grid with lambda/3 spacing derived from the carrier frequency.
    static ArrayGeometry from_carrier(int m, double carrier_hz, double spacing_divisor = 3.0) {
        if (carrier_hz <= 0.0) throw std::invalid_argument("carrier frequency must be positive");
        if (spacing_divisor <= 0.0) throw std::invalid_argument("spacing divisor must be positive");
        const double lambda = kSpeedOfLight / carrier_hz;
        ArrayGeometry g;
        g.side = isqrt_exact(m);
        g.dx = g.dy = lambda / spacing_divisor;
        g.k_f = 2.0 * std::numbers::pi / lambda;
        return g;
    }

    void validate() const {
        if (side < 1) throw std::invalid_argument("array side must be at least 1");
        if (dx <= 0.0 || dy <= 0.0) throw std::invalid_argument("element spacing must be positive");
        if (k_f <= 0.0) throw std::invalid_argument("wavenumber must be positive");
    }
};

struct PathRealization {
    cxd gain;
    double elevation = 0.0;  // [0, pi/2]
    double azimuth = 0.0;    // [0, 2*pi)
};

enum class Axis { x, y };

// Per-axis steering vector; entry n is exp(j n k_f d u) with u the direction cosine.
inline VecC steering_vector_axis(Axis axis, double elevation, double azimuth,
                                 const ArrayGeometry& geom) {
    geom.validate();
    const double u = axis == Axis::x ? std::sin(elevation) * std::cos(azimuth)
                                     : std::sin(elevation) * std::sin(azimuth);
    const double d = axis == Axis::x ? geom.dx : geom.dy;
    VecC a(geom.side);
    for (int n = 0; n < geom.side; ++n)
        a(n) = std::exp(cxd(0.0, geom.k_f * d * u * n));
    return a;
}

// Planar-array response a_x kron a_y with the selected normalization prefactor.
inline VecC array_response(double elevation, double azimuth, const ArrayGeometry& geom,
                           ArrayNorm norm = ArrayNorm::literal) {
    const VecC ax = steering_vector_axis(Axis::x, elevation, azimuth, geom);
    const VecC ay = steering_vector_axis(Axis::y, elevation, azimuth, geom);
    const int m = geom.elements();
    const double pref =
        norm == ArrayNorm::literal ? 1.0 / m : 1.0 / std::sqrt(static_cast<double>(m));
    VecC a(m);
    for (int i = 0; i < geom.side; ++i)
        for (int j = 0; j < geom.side; ++j)
            a(i * geom.side + j) = pref * ax(i) * ay(j);
    return a;
}

inline std::vector<PathRealization> sample_paths(Rng& rng, int count) {
    if (count < 1) throw std::invalid_argument("path count must be at least 1");
    std::vector<PathRealization> paths(count);
    for (auto& p : paths) {
        p.gain = rng.cnormal();
        p.elevation = rng.uniform(0.0, std::numbers::pi / 2.0);
        p.azimuth = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    return paths;
}

// Sparse multipath channel: scale * sqrt(M/I) * sum_i alpha_i a_t(theta_i, phi_i).
inline VecC generate_channel(const std::vector<PathRealization>& paths,
                             const ArrayGeometry& geom, double scale,
                             ArrayNorm norm = ArrayNorm::literal) {
    if (paths.empty()) throw std::invalid_argument("degenerate channel: no paths");
    const int m = geom.elements();
    VecC h = VecC::Zero(m);
    for (const auto& p : paths)
        h += p.gain * array_response(p.elevation, p.azimuth, geom, norm);
    h *= scale * std::sqrt(static_cast<double>(m) / static_cast<double>(paths.size()));
    return h;
}

struct ChannelSet {
    MatC H;                // M x D, column d is user d's channel
    VecD scale_factors;    // D deterministic gains

    int users() const { return static_cast<int>(H.cols()); }
    int elements() const { return static_cast<int>(H.rows()); }
};

inline ChannelSet sample_channel_set(Rng& rng, const ArrayGeometry& geom,
                                     const VecD& scale_factors, int paths,
                                     ArrayNorm norm = ArrayNorm::literal) {
    const int d = static_cast<int>(scale_factors.size());
    if (d < 1) throw std::invalid_argument("need at least one user");
    if ((scale_factors.array() <= 0.0).any())
        throw std::invalid_argument("scale factors must be strictly positive");
    ChannelSet set;
    set.H.resize(geom.elements(), d);
    set.scale_factors = scale_factors;
    for (int u = 0; u < d; ++u)
        set.H.col(u) = generate_channel(sample_paths(rng, paths), geom, scale_factors(u), norm);
    return set;
}

}  // namespace holosched::channel
