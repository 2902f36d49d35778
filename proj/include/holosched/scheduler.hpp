// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "holosched/common.hpp"
#include "holosched/holo_opt.hpp"
#include "holosched/precoder.hpp"
#include "holosched/rng.hpp"
#include "holosched/surface.hpp"

namespace holosched::scheduler {

struct SchedulerParams {
    double p_max = 1.0;
    double r_min = 5.0;
    double noise_variance = 0.1;
    int n_alt = 3;  // outer rounds alternating ZF and weight ascent
    holo_opt::OptimizerSettings optimizer;

    void validate() const {
        if (p_max <= 0.0) throw std::invalid_argument("power budget must be positive");
        if (r_min < 0.0) throw std::invalid_argument("rate floor cannot be negative");
        if (noise_variance <= 0.0) throw std::invalid_argument("noise variance must be positive");
        if (n_alt < 1) throw std::invalid_argument("need at least one alternation round");
        optimizer.validate();
    }
};

struct JointSolution {
    VecI x;           // schedule flags
    VecD w;           // holographic weights
    MatC v;           // K x D digital beamformer, zero columns when unscheduled
    VecD rates;       // per-user rates, zero when unscheduled
    double sum_rate = 0.0;

    int scheduled_count() const { return (x != 0).count(); }
};

// Matched-filter digital beams through the initial surface, equal power split.
// Used only to rank users for admission; ZF through the same surface would
// equalize every rate and leave the ordering meaningless.
inline MatC initial_digital_mrt(const MatC& h, const MatC& w_eff, double p_max) {
    const int users = static_cast<int>(h.cols());
    const MatC g = h.adjoint() * w_eff;  // D x K effective rows
    MatC v = MatC::Zero(w_eff.cols(), users);
    const double per_user = std::sqrt(p_max / users);
    for (int d = 0; d < users; ++d) {
        const VecC col = g.row(d).adjoint();
        const double n = col.norm();
        if (n > 0.0) v.col(d) = per_user * col / n;
    }
    return v;
}

// Rates with every user treated as active, interference included.
inline VecD initial_rates(const MatC& h, const MatC& w0_eff, const MatC& v0,
                          double noise_variance) {
    const VecI all = VecI::Ones(h.cols());
    return precoder::per_user_rates(h, w0_eff, v0, all, noise_variance);
}

// Descending initial rate; keys quantized to nano-bps/Hz so exact ties resolve
// by ascending user index instead of float noise.
inline std::vector<int> admission_order(const VecD& init) {
    std::vector<int> order(init.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const long long qa = std::llround(init(a) * 1e9);
        const long long qb = std::llround(init(b) * 1e9);
        if (qa != qb) return qa > qb;
        return a < b;
    });
    return order;
}

// Alternates ZF for the current weights with gradient ascent on the weights,
// stopping early when a round moves the sum rate by less than the optimizer
// tolerance. A trailing ZF keeps the returned pair self-consistent.
inline std::pair<VecD, MatC> joint_inner_update(const VecI& x, const VecD& w, const MatC& h,
                                                const MatC& phi, const SchedulerParams& params) {
    params.validate();
    VecD w_cur = w;
    double prev = 0.0;
    bool have_prev = false;
    for (int round = 0; round < params.n_alt; ++round) {
        const MatC h_eff = surface::effective_channel(h, surface::effective_surface(w_cur, phi), x);
        const MatC v = precoder::embed_columns(precoder::zero_forcing(h_eff, params.p_max), x);
        const auto result =
            holo_opt::optimize_weights(w_cur, h, phi, v, x, params.noise_variance, params.optimizer);
        w_cur = result.w;
        const double sum = result.final_sum_rate();
        if (have_prev && std::abs(sum - prev) < params.optimizer.tolerance) break;
        prev = sum;
        have_prev = true;
    }
    const MatC h_eff = surface::effective_channel(h, surface::effective_surface(w_cur, phi), x);
    const MatC v = precoder::embed_columns(precoder::zero_forcing(h_eff, params.p_max), x);
    return {w_cur, v};
}

namespace detail {

// Greedy admission pass shared by the proposed scheme and the random-weight
// benchmark. Candidates are examined in descending initial-rate order; a
// tentative admission is kept only when every scheduled user still clears
// r_min and the scheduled sum rate does not drop. Rejections restore the
// previous solution exactly. When bench_rng is set, the weight ascent is
// replaced by one uniform draw of w per tentative admission.
inline JointSolution greedy_core(const MatC& h, const MatC& phi, const SchedulerParams& params,
                                 Rng* bench_rng, std::vector<double>* kept_sums) {
    params.validate();
    const int users = static_cast<int>(h.cols());
    const int elements = static_cast<int>(h.rows());
    const int feeds = static_cast<int>(phi.cols());

    JointSolution sol;
    sol.x = VecI::Zero(users);
    sol.w = VecD::Constant(elements, 0.5);
    sol.v = MatC::Zero(feeds, users);
    sol.rates = VecD::Zero(users);
    sol.sum_rate = 0.0;

    const MatC w0_eff = surface::effective_surface(sol.w, phi);
    const VecD init = initial_rates(h, w0_eff, initial_digital_mrt(h, w0_eff, params.p_max),
                                    params.noise_variance);

    for (int d : admission_order(init)) {
        sol.x(d) = 1;
        bool keep = false;
        VecD w_t;
        MatC v_t;
        VecD r_t;
        double s_t = 0.0;
        try {
            if (bench_rng != nullptr) {
                w_t.resize(elements);
                for (int m = 0; m < elements; ++m) w_t(m) = bench_rng->uniform01();
                const MatC h_eff =
                    surface::effective_channel(h, surface::effective_surface(w_t, phi), sol.x);
                v_t = precoder::embed_columns(precoder::zero_forcing(h_eff, params.p_max), sol.x);
            } else {
                std::tie(w_t, v_t) = joint_inner_update(sol.x, sol.w, h, phi, params);
            }
            r_t = precoder::per_user_rates(h, surface::effective_surface(w_t, phi), v_t, sol.x,
                                           params.noise_variance);
            s_t = precoder::scheduled_sum(r_t, sol.x);
            bool qos = true;
            for (int u = 0; u < users; ++u)
                if (sol.x(u) && r_t(u) < params.r_min) qos = false;
            keep = qos && s_t >= sol.sum_rate;
        } catch (const zf_infeasible&) {
            keep = false;
        }
        if (keep) {
            sol.w = std::move(w_t);
            sol.v = std::move(v_t);
            sol.rates = std::move(r_t);
            sol.sum_rate = s_t;
            if (kept_sums != nullptr) kept_sums->push_back(s_t);
        } else {
            sol.x(d) = 0;
        }
    }
    return sol;
}

}  // namespace detail

inline JointSolution greedy_schedule(const MatC& h, const MatC& phi, const SchedulerParams& params,
                                     std::vector<double>* kept_sums = nullptr) {
    return detail::greedy_core(h, phi, params, nullptr, kept_sums);
}

// Brute force over all schedules up to max_cardinality (0 means no limit
// beyond the feed count), each evaluated with the same inner optimizers.
// Intended for small D; serves as a test oracle.
inline JointSolution exhaustive_schedule(const MatC& h, const MatC& phi,
                                         const SchedulerParams& params, int max_cardinality = 0) {
    params.validate();
    const int users = static_cast<int>(h.cols());
    const int feeds = static_cast<int>(phi.cols());
    if (users > 20) throw std::invalid_argument("exhaustive search limited to 20 users");

    JointSolution best;
    best.x = VecI::Zero(users);
    best.w = VecD::Constant(h.rows(), 0.5);
    best.v = MatC::Zero(feeds, users);
    best.rates = VecD::Zero(users);
    best.sum_rate = 0.0;

    const int limit = max_cardinality > 0 ? max_cardinality : feeds;
    for (unsigned mask = 1; mask < (1u << users); ++mask) {
        const int size = std::popcount(mask);
        if (size > limit || size > feeds) continue;
        VecI x = VecI::Zero(users);
        for (int d = 0; d < users; ++d)
            if (mask & (1u << d)) x(d) = 1;
        try {
            const auto [w, v] =
                joint_inner_update(x, VecD::Constant(h.rows(), 0.5), h, phi, params);
            const VecD rates = precoder::per_user_rates(h, surface::effective_surface(w, phi), v,
                                                        x, params.noise_variance);
            bool feasible = true;
            for (int u = 0; u < users; ++u)
                if (x(u) && rates(u) < params.r_min) feasible = false;
            const double sum = precoder::scheduled_sum(rates, x);
            if (feasible && sum > best.sum_rate) {
                best.x = x;
                best.w = w;
                best.v = v;
                best.rates = rates;
                best.sum_rate = sum;
            }
        } catch (const zf_infeasible&) {
            continue;
        }
    }
    return best;
}

}  // namespace holosched::scheduler
