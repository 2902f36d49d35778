// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "holosched/channel.hpp"
#include "holosched/scheduler.hpp"
#include "holosched/surface.hpp"

using namespace holosched;
using namespace holosched::scheduler;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Setup {
    MatC h;
    MatC phi;
};

Setup sample_setup(std::uint64_t seed, int users, int feeds, int m,
                   double scale_low = 1.0, double scale_high = 1.0) {
    const auto geom = channel::ArrayGeometry::from_carrier(m, 30.0e9);
    const double k_s = geom.k_f * std::sqrt(3.0);
    const auto surf = surface::SurfaceGeometry::regular(m, feeds, geom.dx, geom.dy, k_s);
    VecD scales(users);
    for (int d = 0; d < users; ++d)
        scales(d) = scale_low + (scale_high - scale_low) * d / std::max(1, users - 1);
    Rng rng(seed);
    Setup s;
    s.h = channel::sample_channel_set(rng, geom, scales, 3).H;
    s.phi = surface::build_phase_matrix(surf);
    return s;
}

SchedulerParams params_at_snr(double snr_db, double r_min) {
    SchedulerParams p;
    p.r_min = r_min;
    p.noise_variance = p.p_max * std::pow(10.0, -snr_db / 10.0);
    return p;
}

double solution_sum(const Setup& s, const JointSolution& sol, double noise) {
    if (sol.scheduled_count() == 0) return 0.0;
    const VecD rates = precoder::per_user_rates(
        s.h, surface::effective_surface(sol.w, s.phi), sol.v, sol.x, noise);
    return precoder::scheduled_sum(rates, sol.x);
}

}  // namespace

TEST_CASE("scheduler parameter validation") {
    SchedulerParams p;
    CHECK_NOTHROW(p.validate());
    p.p_max = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.r_min = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.noise_variance = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.n_alt = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("matched-filter initialization") {
    const Setup s = sample_setup(11, 4, 6, 16);
    const MatC w_eff = surface::effective_surface(VecD::Constant(16, 0.5), s.phi);
    const double p_max = 2.0;
    const MatC v0 = initial_digital_mrt(s.h, w_eff, p_max);

    REQUIRE(v0.rows() == 6);
    REQUIRE(v0.cols() == 4);
    for (int d = 0; d < 4; ++d)
        REQUIRE_THAT(v0.col(d).norm(), WithinRel(std::sqrt(p_max / 4.0), 1e-12));
    CHECK_THAT(v0.squaredNorm(), WithinRel(p_max, 1e-12));

    // Each beam is aligned with its own effective channel row.
    const MatC g = s.h.adjoint() * w_eff;
    for (int d = 0; d < 4; ++d) {
        const VecC dir = g.row(d).adjoint().normalized();
        const double align = std::abs(dir.dot(v0.col(d).normalized()));
        REQUIRE_THAT(align, WithinAbs(1.0, 1e-12));
    }

    // A dead channel keeps a zero beam instead of dividing by zero.
    MatC h_dead = s.h;
    h_dead.col(2).setZero();
    const MatC v_dead = initial_digital_mrt(h_dead, w_eff, p_max);
    CHECK(v_dead.col(2).norm() == 0.0);
}

TEST_CASE("initial rates treat everyone as active") {
    const Setup s = sample_setup(12, 3, 4, 9);
    const MatC w_eff = surface::effective_surface(VecD::Constant(9, 0.5), s.phi);
    const MatC v0 = initial_digital_mrt(s.h, w_eff, 1.0);
    const VecD init = initial_rates(s.h, w_eff, v0, 0.1);
    const VecD direct = precoder::per_user_rates(s.h, w_eff, v0, VecI::Ones(3), 0.1);
    CHECK((init - direct).norm() == 0.0);
}

TEST_CASE("admission order sorts by quantized rate") {
    VecD init(4);
    init << 1.0, 2.0, 1.0 + 1e-12, 3.0;
    const auto order = admission_order(init);
    // The 1e-12 perturbation is below the nano quantum, so 0 and 2 tie and
    // resolve by index.
    REQUIRE(order == std::vector<int>{3, 1, 0, 2});

    VecD distinct(3);
    distinct << 1.0, 1.0 + 1e-8, 0.5;
    REQUIRE(admission_order(distinct) == std::vector<int>{1, 0, 2});
}

TEST_CASE("joint inner update") {
    const Setup s = sample_setup(13, 3, 4, 16);
    SchedulerParams p = params_at_snr(20.0, 0.0);
    const VecI x = VecI::Ones(3);
    const VecD w0 = VecD::Constant(16, 0.5);

    SECTION("one round matches a manual composition") {
        p.n_alt = 1;
        const auto [w, v] = joint_inner_update(x, w0, s.h, s.phi, p);

        const MatC h0 = surface::effective_channel(s.h, surface::effective_surface(w0, s.phi), x);
        const MatC v0 = precoder::embed_columns(precoder::zero_forcing(h0, p.p_max), x);
        const auto ascent =
            holo_opt::optimize_weights(w0, s.h, s.phi, v0, x, p.noise_variance, p.optimizer);
        const MatC h1 =
            surface::effective_channel(s.h, surface::effective_surface(ascent.w, s.phi), x);
        const MatC v1 = precoder::embed_columns(precoder::zero_forcing(h1, p.p_max), x);

        CHECK((w - ascent.w).norm() == 0.0);
        CHECK((v - v1).norm() == 0.0);
    }

    SECTION("alternation does not lose rate over rounds") {
        for (std::uint64_t seed = 30; seed < 42; ++seed) {
            const Setup inst = sample_setup(seed, 3, 4, 16);
            double prev = -1.0;
            for (int rounds = 1; rounds <= 3; ++rounds) {
                SchedulerParams pr = p;
                pr.n_alt = rounds;
                const auto [w, v] = joint_inner_update(x, w0, inst.h, inst.phi, pr);
                const VecD rates = precoder::per_user_rates(
                    inst.h, surface::effective_surface(w, inst.phi), v, x, pr.noise_variance);
                const double sum = precoder::scheduled_sum(rates, x);
                INFO("seed " << seed << " rounds " << rounds);
                REQUIRE(sum >= prev - 1e-9);
                prev = sum;
            }
        }
    }

    SECTION("single-user ascent beats the initial surface") {
        const VecI one = VecI::Ones(1);
        const Setup inst = sample_setup(14, 1, 4, 16);
        const MatC h0 =
            surface::effective_channel(inst.h, surface::effective_surface(w0, inst.phi), one);
        const MatC v0 = precoder::embed_columns(precoder::zero_forcing(h0, p.p_max), one);
        const double before = precoder::scheduled_sum(
            precoder::per_user_rates(inst.h, surface::effective_surface(w0, inst.phi), v0, one,
                                     p.noise_variance),
            one);
        const auto [w, v] = joint_inner_update(one, w0, inst.h, inst.phi, p);
        const double after = precoder::scheduled_sum(
            precoder::per_user_rates(inst.h, surface::effective_surface(w, inst.phi), v, one,
                                     p.noise_variance),
            one);
        CHECK(after >= before - 1e-9);
    }
}

TEST_CASE("greedy scheduling") {
    SECTION("qos floor holds and the kept chain is monotone") {
        for (std::uint64_t seed = 50; seed < 56; ++seed) {
            const Setup s = sample_setup(seed, 6, 8, 36, 0.2, 1.2);
            const SchedulerParams p = params_at_snr(25.0, 5.0);
            std::vector<double> kept;
            const JointSolution sol = greedy_schedule(s.h, s.phi, p, &kept);

            REQUIRE(static_cast<int>(kept.size()) == sol.scheduled_count());
            for (std::size_t i = 1; i < kept.size(); ++i)
                REQUIRE(kept[i] >= kept[i - 1] - 1e-12);
            for (int d = 0; d < 6; ++d) {
                if (sol.x(d))
                    REQUIRE(sol.rates(d) >= p.r_min - 1e-9);
                else
                    REQUIRE(sol.rates(d) == 0.0);
            }
            if (!kept.empty()) REQUIRE_THAT(sol.sum_rate, WithinAbs(kept.back(), 1e-12));

            // The stored rates are reproducible from the stored (w, v).
            if (sol.scheduled_count() > 0)
                REQUIRE_THAT(solution_sum(s, sol, p.noise_variance),
                             WithinAbs(sol.sum_rate, 1e-9));
        }
    }

    SECTION("an unreachable floor leaves the initial state untouched") {
        const Setup s = sample_setup(57, 4, 6, 16);
        const SchedulerParams p = params_at_snr(20.0, 1e6);
        const JointSolution sol = greedy_schedule(s.h, s.phi, p);
        CHECK(sol.scheduled_count() == 0);
        CHECK(sol.sum_rate == 0.0);
        CHECK((sol.w - VecD::Constant(16, 0.5)).norm() == 0.0);
        CHECK(sol.v.norm() == 0.0);
        CHECK(sol.rates.norm() == 0.0);
    }

    SECTION("no floor and ample feeds admit everyone at high SNR") {
        for (const std::uint64_t seed : {70ULL, 71ULL, 72ULL}) {
            const Setup s = sample_setup(seed, 6, 16, 64);
            const SchedulerParams p = params_at_snr(40.0, 0.0);
            const JointSolution sol = greedy_schedule(s.h, s.phi, p);
            INFO("seed " << seed);
            REQUIRE(sol.scheduled_count() == 6);
        }
    }

    SECTION("cardinality never exceeds the feed count") {
        const Setup s = sample_setup(58, 5, 3, 16);
        const SchedulerParams p = params_at_snr(30.0, 0.0);
        const JointSolution sol = greedy_schedule(s.h, s.phi, p);
        CHECK(sol.scheduled_count() <= 3);
        CHECK(sol.scheduled_count() > 0);
    }

    SECTION("deterministic for fixed inputs") {
        const Setup s = sample_setup(59, 4, 6, 16);
        const SchedulerParams p = params_at_snr(20.0, 2.0);
        const JointSolution a = greedy_schedule(s.h, s.phi, p);
        const JointSolution b = greedy_schedule(s.h, s.phi, p);
        CHECK((a.x == b.x).all());
        CHECK((a.w - b.w).norm() == 0.0);
        CHECK((a.v - b.v).norm() == 0.0);
        CHECK(a.sum_rate == b.sum_rate);
    }
}

TEST_CASE("exhaustive search dominates cold-started schedules") {
    // Greedy warm-starts each admission from the previously accepted weights,
    // so its final operating point can edge past the cold-started evaluation
    // of the same subset. The comparison below re-evaluates the greedy
    // schedule from the shared w = 0.5 start, where the exhaustive maximum is
    // a true upper bound.
    for (const std::uint64_t seed : {80ULL, 81ULL, 82ULL}) {
        const Setup s = sample_setup(seed, 3, 3, 9);
        const SchedulerParams p = params_at_snr(25.0, 2.0);
        const JointSolution greedy = greedy_schedule(s.h, s.phi, p);
        const JointSolution best = exhaustive_schedule(s.h, s.phi, p);
        INFO("seed " << seed);
        for (int d = 0; d < 3; ++d)
            if (best.x(d)) REQUIRE(best.rates(d) >= p.r_min - 1e-9);
        if (greedy.scheduled_count() == 0) continue;
        const auto [w, v] =
            joint_inner_update(greedy.x, VecD::Constant(9, 0.5), s.h, s.phi, p);
        const VecD rates = precoder::per_user_rates(
            s.h, surface::effective_surface(w, s.phi), v, greedy.x, p.noise_variance);
        bool feasible = true;
        for (int d = 0; d < 3; ++d)
            if (greedy.x(d) && rates(d) < p.r_min) feasible = false;
        if (feasible)
            REQUIRE(best.sum_rate >= precoder::scheduled_sum(rates, greedy.x) - 1e-9);
    }
}

TEST_CASE("exhaustive search respects the cardinality cap") {
    const Setup s = sample_setup(83, 3, 3, 9);
    const SchedulerParams p = params_at_snr(25.0, 0.0);
    const JointSolution single = exhaustive_schedule(s.h, s.phi, p, 1);
    CHECK(single.scheduled_count() <= 1);
    const JointSolution full = exhaustive_schedule(s.h, s.phi, p);
    CHECK(full.sum_rate >= single.sum_rate - 1e-12);
}
