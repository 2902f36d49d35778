// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "holosched/common.hpp"
#include "holosched/surface.hpp"

namespace holosched::precoder {

inline constexpr double kRankTolerance = 1e-10;

// Zero-forcing precoder for the scheduled rows of the effective channel.
// Returns the K x D' column block, scaled so trace(V V^H) = p_max exactly.
// The pseudo-inverse is applied through a solve of the Gram system; the rank
// gate uses a relative singular-value cutoff.
inline MatC zero_forcing(const MatC& h_eff, double p_max) {
    const int d = static_cast<int>(h_eff.rows());
    const int k = static_cast<int>(h_eff.cols());
    if (d < 1) throw std::invalid_argument("effective channel has no rows");
    if (d > k) throw zf_infeasible("more scheduled users than feeds");
    if (p_max <= 0.0) throw std::invalid_argument("power budget must be positive");

    Eigen::JacobiSVD<MatC> svd(h_eff);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(d - 1) <= kRankTolerance * sv(0))
        throw zf_infeasible("ZF infeasible: effective channel is rank deficient");

    const MatC gram = h_eff * h_eff.adjoint();
    const MatC v_zf = h_eff.adjoint() * gram.llt().solve(MatC::Identity(d, d));
    const double fro2 = v_zf.squaredNorm();
    if (!(fro2 > 0.0) || !std::isfinite(fro2))
        throw zf_infeasible("ZF infeasible: unbounded precoder norm");
    return std::sqrt(p_max / fro2) * v_zf;
}

// Expands the scheduled column block into a K x D beamformer with zero columns
// for unscheduled users, keeping downstream indexing stable.
inline MatC embed_columns(const MatC& v_sched, const VecI& x) {
    const std::vector<int> sched = surface::scheduled_indices(x);
    if (static_cast<int>(sched.size()) != v_sched.cols())
        throw std::invalid_argument("scheduled column count does not match schedule");
    MatC v = MatC::Zero(v_sched.rows(), x.size());
    for (std::size_t i = 0; i < sched.size(); ++i)
        v.col(sched[i]) = v_sched.col(static_cast<int>(i));
    return v;
}

// Per-user achievable rates in bps/Hz:
//   rate_d = log2(1 + |x_d h_d^H W v_d|^2 / (sigma^2 + sum_{j != d} |x_j h_d^H W v_j|^2)).
// Unscheduled users evaluate the same formula and come out at zero.
inline VecD per_user_rates(const MatC& h, const MatC& w_eff, const MatC& v, const VecI& x,
                           double noise_variance) {
    if (noise_variance <= 0.0) throw std::invalid_argument("noise variance must be positive");
    if (h.rows() != w_eff.rows() || w_eff.cols() != v.rows() || v.cols() != h.cols() ||
        x.size() != h.cols())
        throw std::invalid_argument("rate evaluation dimensions disagree");
    const int users = static_cast<int>(h.cols());
    const MatC amps = h.adjoint() * w_eff * v;  // amps(d, j) = h_d^H W v_j
    VecD rates(users);
    for (int d = 0; d < users; ++d) {
        const double desired = x(d) ? std::norm(amps(d, d)) : 0.0;
        double interference = 0.0;
        for (int j = 0; j < users; ++j)
            if (j != d && x(j)) interference += std::norm(amps(d, j));
        rates(d) = std::log2(1.0 + desired / (noise_variance + interference));
    }
    return rates;
}

inline double scheduled_sum(const VecD& rates, const VecI& x) {
    double s = 0.0;
    for (int d = 0; d < x.size(); ++d)
        if (x(d)) s += rates(d);
    return s;
}

}  // namespace holosched::precoder
