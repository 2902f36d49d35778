// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "holosched/common.hpp"
#include "holosched/precoder.hpp"
#include "holosched/rng.hpp"
#include "holosched/surface.hpp"

namespace holosched::holo_opt {

struct OptimizerSettings {
    double learning_rate = 0.01;
    double tolerance = 1e-5;
    int max_iterations = 500;
    bool backtracking = true;
    int max_halvings = 20;

    void validate() const {
        if (learning_rate <= 0.0) throw std::invalid_argument("learning rate must be positive");
        if (tolerance <= 0.0) throw std::invalid_argument("tolerance must be positive");
        if (max_iterations < 1) throw std::invalid_argument("need at least one iteration");
        if (max_halvings < 0) throw std::invalid_argument("halving count cannot be negative");
    }
};

// Cached quantities for the closed-form sum-rate gradient. The feed-domain
// image E = Phi * V depends only on the digital beamformer and is computed
// once; everything that depends on w is rebuilt by refresh().
//
// Notation: amps(d, j) = h_d^H diag(w) Phi v_j is the amplitude user d sees
// from user j's stream. Its per-weight derivative is
// c_{d,j,m} = conj(h_{d,m}) (Phi V)_{m,j}, which is what the gradient needs.
class GradientWorkspace {
public:
    GradientWorkspace(const MatC& h, const MatC& phi, const MatC& v, const VecD& w,
                      const VecI& x, double noise_variance)
        : h_(h), x_(x), noise_variance_(noise_variance) {
        if (noise_variance <= 0.0) throw std::invalid_argument("noise variance must be positive");
        if (h.rows() != phi.rows() || phi.cols() != v.rows() || v.cols() != h.cols() ||
            x.size() != h.cols())
            throw std::invalid_argument("gradient workspace dimensions disagree");
        e_ = phi * v;
        refresh(w);
    }

    void refresh(const VecD& w) {
        if (w.size() != h_.rows())
            throw std::invalid_argument("weight vector length does not match surface");
        amps_ = h_.adjoint() * (w.asDiagonal() * e_);
        const int users = static_cast<int>(h_.cols());
        num_.resize(users);
        den_.resize(users);
        for (int d = 0; d < users; ++d) {
            num_(d) = x_(d) ? std::norm(amps_(d, d)) : 0.0;
            double interference = 0.0;
            for (int j = 0; j < users; ++j)
                if (j != d && x_(j)) interference += std::norm(amps_(d, j));
            den_(d) = noise_variance_ + interference;
        }
    }

    int users() const { return static_cast<int>(h_.cols()); }
    int elements() const { return static_cast<int>(h_.rows()); }
    bool scheduled(int d) const { return x_(d) != 0; }
    double sinr(int d) const { return num_(d) / den_(d); }
    cxd amp(int d, int j) const { return amps_(d, j); }
    cxd amp_derivative(int d, int j, int m) const { return std::conj(h_(m, d)) * e_(m, j); }

    double sum_rate() const {
        double r = 0.0;
        for (int d = 0; d < users(); ++d)
            if (x_(d)) r += std::log2(1.0 + sinr(d));
        return r;
    }

    // d(SINR_d)/dw_m by the quotient rule over Num_d and Den_d.
    double sinr_gradient(int d, int m) const {
        if (!x_(d)) return 0.0;
        const double dnum = 2.0 * std::real(std::conj(amps_(d, d)) * amp_derivative(d, d, m));
        double dden = 0.0;
        for (int j = 0; j < users(); ++j)
            if (j != d && x_(j))
                dden += 2.0 * std::real(std::conj(amps_(d, j)) * amp_derivative(d, j, m));
        return (dnum * den_(d) - num_(d) * dden) / (den_(d) * den_(d));
    }

    double sum_rate_gradient(int m) const {
        double g = 0.0;
        for (int d = 0; d < users(); ++d) {
            if (!x_(d)) continue;
            g += sinr_gradient(d, m) / ((1.0 + sinr(d)) * std::numbers::ln2);
        }
        return g;
    }

    // All elements at once; same values as the per-element form, organized so
    // each user contributes one pass over the element axis.
    VecD sum_rate_gradient_all() const {
        VecD g = VecD::Zero(elements());
        VecD dnum(elements());
        VecD dden(elements());
        for (int d = 0; d < users(); ++d) {
            if (!x_(d)) continue;
            const VecC cd = h_.col(d).conjugate().cwiseProduct(e_.col(d));
            dnum = 2.0 * (std::conj(amps_(d, d)) * cd.array()).real().matrix();
            dden.setZero();
            for (int j = 0; j < users(); ++j) {
                if (j == d || !x_(j)) continue;
                const VecC cj = h_.col(d).conjugate().cwiseProduct(e_.col(j));
                dden += 2.0 * (std::conj(amps_(d, j)) * cj.array()).real().matrix();
            }
            const double coef = 1.0 / ((1.0 + sinr(d)) * std::numbers::ln2);
            const double den2 = den_(d) * den_(d);
            g += coef * (dnum * den_(d) - num_(d) * dden) / den2;
        }
        return g;
    }

private:
    MatC h_;
    VecI x_;
    double noise_variance_;
    MatC e_;     // Phi * V
    MatC amps_;  // D x D
    VecD num_;
    VecD den_;
};

inline double sinr_of_weights(int d, const VecD& w, const MatC& h, const MatC& phi,
                              const MatC& v, const VecI& x, double noise_variance) {
    GradientWorkspace ws(h, phi, v, w, x, noise_variance);
    return ws.sinr(d);
}

inline double sinr_gradient(int d, int m, const GradientWorkspace& ws) {
    return ws.sinr_gradient(d, m);
}

inline double sum_rate_gradient(int m, const GradientWorkspace& ws) {
    return ws.sum_rate_gradient(m);
}

struct TraceEntry {
    int iteration;
    double sum_rate;
    double step;
};

struct AscentResult {
    VecD w;
    std::vector<TraceEntry> trace;  // entry 0 is the starting point

    double final_sum_rate() const { return trace.back().sum_rate; }
};

inline std::string trace_to_csv(const std::vector<TraceEntry>& trace) {
    std::string out = "iteration,sum_rate,step\n";
    for (const auto& t : trace) {
        out += std::to_string(t.iteration);
        out += ',';
        out += format_double(t.sum_rate);
        out += ',';
        out += format_double(t.step);
        out += '\n';
    }
    return out;
}

// Projected gradient ascent on the holographic weights over the [0,1] box.
// With backtracking on, a step that would lower the sum rate is retried with a
// halved step size, so the reported trace is non-decreasing; with it off the
// fixed-step update is applied as-is.
inline AscentResult optimize_weights(const VecD& w0, const MatC& h, const MatC& phi,
                                     const MatC& v, const VecI& x, double noise_variance,
                                     const OptimizerSettings& settings = {}) {
    settings.validate();
    surface::validate_weights(w0);

    const auto clamp_box = [](const VecD& w) -> VecD {
        return w.cwiseMax(0.0).cwiseMin(1.0);
    };

    GradientWorkspace ws(h, phi, v, w0, x, noise_variance);
    VecD w = w0;
    double current = ws.sum_rate();
    if (!std::isfinite(current)) throw numerical_failure("non-finite sum rate at start");
    AscentResult result;
    result.trace.push_back({0, current, 0.0});

    for (int t = 1; t <= settings.max_iterations; ++t) {
        const VecD grad = ws.sum_rate_gradient_all();
        if (!grad.allFinite())
            throw numerical_failure("non-finite gradient at iteration " + std::to_string(t));

        double step = settings.learning_rate;
        VecD w_next = clamp_box(w + step * grad);
        ws.refresh(w_next);
        double next = ws.sum_rate();
        if (settings.backtracking) {
            int halvings = 0;
            while (next < current && halvings < settings.max_halvings) {
                step *= 0.5;
                w_next = clamp_box(w + step * grad);
                ws.refresh(w_next);
                next = ws.sum_rate();
                ++halvings;
            }
            if (next < current) break;  // no ascent direction left at this scale
        }
        if (!std::isfinite(next))
            throw numerical_failure("non-finite sum rate at iteration " + std::to_string(t));
        if ((w_next.array() == w.array()).all()) break;  // projection absorbed the whole step

        w = w_next;
        result.trace.push_back({t, next, step});
        const double delta = std::abs(next - current);
        current = next;
        if (delta < settings.tolerance) break;
    }

    result.w = w;
    return result;
}

struct FdCheckResult {
    double max_rel_error = 0.0;
    int worst_instance = -1;
    int instances = 0;
};

// Central finite differences on the sum rate versus the analytic gradient over
// random small instances. Per-instance error is the largest element gap
// relative to the largest finite-difference entry.
inline FdCheckResult gradient_fd_suite(std::uint64_t seed, int instances, double fd_step = 1e-6) {
    if (instances < 1) throw std::invalid_argument("need at least one instance");
    Rng rng(seed);
    constexpr int kUsers[] = {1, 2, 3};
    constexpr int kElements[] = {4, 9};
    constexpr int kFeeds[] = {2, 3};
    FdCheckResult result;
    result.instances = instances;

    for (int i = 0; i < instances; ++i) {
        const int users = kUsers[rng.next_u64() % 3];
        const int m = kElements[rng.next_u64() % 2];
        const int k = kFeeds[rng.next_u64() % 2];

        MatC h(m, users);
        for (int c = 0; c < users; ++c)
            for (int r = 0; r < m; ++r) h(r, c) = rng.cnormal();
        MatC phi(m, k);
        for (int c = 0; c < k; ++c)
            for (int r = 0; r < m; ++r)
                phi(r, c) = std::exp(cxd(0.0, rng.uniform(0.0, 2.0 * std::numbers::pi)));
        MatC v(k, users);
        for (int c = 0; c < users; ++c)
            for (int r = 0; r < k; ++r) v(r, c) = rng.cnormal();
        v *= std::sqrt(1.0 / v.squaredNorm());
        VecI x = VecI::Ones(users);
        if (users > 1 && rng.uniform01() < 0.3)
            x(static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(users))) = 0;
        VecD w(m);
        for (int r = 0; r < m; ++r) w(r) = rng.uniform01();
        const double noise = rng.uniform(0.05, 1.0);

        GradientWorkspace ws(h, phi, v, w, x, noise);
        const VecD analytic = ws.sum_rate_gradient_all();
        // The differenced sum rate goes through the matrix-form rate path, not
        // the workspace, so the two implementations cross-check each other.
        const auto sum_rate_at = [&](const VecD& wv) {
            const MatC w_eff = wv.asDiagonal() * phi;
            return precoder::scheduled_sum(precoder::per_user_rates(h, w_eff, v, x, noise), x);
        };
        VecD fd(m);
        for (int e = 0; e < m; ++e) {
            VecD w_hi = w;
            VecD w_lo = w;
            w_hi(e) += fd_step;
            w_lo(e) -= fd_step;
            fd(e) = (sum_rate_at(w_hi) - sum_rate_at(w_lo)) / (2.0 * fd_step);
        }
        const double scale = std::max(fd.cwiseAbs().maxCoeff(), 1e-12);
        const double err = (analytic - fd).cwiseAbs().maxCoeff() / scale;
        if (err > result.max_rel_error) {
            result.max_rel_error = err;
            result.worst_instance = i;
        }
    }
    return result;
}

}  // namespace holosched::holo_opt
