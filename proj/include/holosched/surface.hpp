// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "holosched/common.hpp"

namespace holosched::surface {

// RHS geometry: a side x side element grid in the z = 0 plane plus the feed
// points that launch the reference wave along the surface.
struct SurfaceGeometry {
    int side = 0;
    double dx = 0.0;
    double dy = 0.0;
    double surface_wavenumber = 0.0;             // |k_s| inside the substrate, rad/m
    std::vector<Eigen::Vector2d> feed_positions;  // in-plane, meters

    int elements() const { return side * side; }
    int feeds() const { return static_cast<int>(feed_positions.size()); }

    Eigen::Vector2d element_position(int m) const {
        return {(m % side) * dx, (m / side) * dy};
    }

    // K feeds spread uniformly along the lower edge, one spacing below the grid.
    static SurfaceGeometry regular(int m, int k, double dx, double dy,
                                   double surface_wavenumber) {
        SurfaceGeometry g;
        g.side = isqrt_exact(m);
        g.dx = dx;
        g.dy = dy;
        g.surface_wavenumber = surface_wavenumber;
        const double width = g.side * dx;
        g.feed_positions.reserve(k);
        for (int i = 0; i < k; ++i)
            g.feed_positions.push_back({(i + 0.5) * width / k, -dy});
        g.validate();
        return g;
    }

    void validate() const {
        if (side < 1) throw std::invalid_argument("surface side must be at least 1");
        if (dx <= 0.0 || dy <= 0.0) throw std::invalid_argument("element spacing must be positive");
        if (surface_wavenumber <= 0.0)
            throw std::invalid_argument("surface wavenumber must be positive");
        if (feed_positions.empty()) throw std::invalid_argument("need at least one feed");
        for (std::size_t a = 0; a < feed_positions.size(); ++a)
            for (std::size_t b = a + 1; b < feed_positions.size(); ++b)
                if ((feed_positions[a] - feed_positions[b]).norm() < 1e-12)
                    throw std::invalid_argument("feed positions must be distinct");
    }
};

// Fixed reference-wave phases: entry (m, k) = exp(-j k_s r) with r the in-plane
// distance from feed k to element m. Constant for a given geometry.
inline MatC build_phase_matrix(const SurfaceGeometry& geom) {
    geom.validate();
    MatC phi(geom.elements(), geom.feeds());
    for (int m = 0; m < geom.elements(); ++m) {
        const Eigen::Vector2d pos = geom.element_position(m);
        for (int k = 0; k < geom.feeds(); ++k) {
            const double r = (pos - geom.feed_positions[k]).norm();
            phi(m, k) = std::exp(cxd(0.0, -geom.surface_wavenumber * r));
        }
    }
    return phi;
}

inline void validate_weights(const VecD& w) {
    if ((w.array() < 0.0).any() || (w.array() > 1.0).any())
        throw std::invalid_argument("holographic weights must lie in [0, 1]");
}

// W = diag(w) * Phi.
inline MatC effective_surface(const VecD& w, const MatC& phi) {
    if (w.size() != phi.rows())
        throw std::invalid_argument("weight vector length does not match phase matrix rows");
    validate_weights(w);
    return w.asDiagonal() * phi;
}

inline std::vector<int> scheduled_indices(const VecI& x) {
    std::vector<int> idx;
    for (int d = 0; d < x.size(); ++d)
        if (x(d) != 0) idx.push_back(d);
    return idx;
}

// Stacks rows h_d^H * W for the scheduled users in ascending user order.
inline MatC effective_channel(const MatC& h, const MatC& w_eff, const VecI& x) {
    if (h.rows() != w_eff.rows())
        throw std::invalid_argument("channel and surface dimensions disagree");
    if (x.size() != h.cols())
        throw std::invalid_argument("schedule length does not match user count");
    const std::vector<int> sched = scheduled_indices(x);
    if (sched.empty()) throw std::invalid_argument("no scheduled users");
    MatC h_eff(static_cast<int>(sched.size()), w_eff.cols());
    for (std::size_t i = 0; i < sched.size(); ++i)
        h_eff.row(static_cast<int>(i)) = h.col(sched[i]).adjoint() * w_eff;
    return h_eff;
}

}  // namespace holosched::surface
