#include <doctest.h>

#include <cmath>
#include <random>

#include "herglotz/oscillator.hpp"

using namespace herglotz;

TEST_SUITE_BEGIN("oscillator");

namespace {

SolveOptions tight_options() {
    SolveOptions o;
    o.gradient_tolerance = 1e-7;
    o.step_tolerance = 1e-14;
    o.max_iterations = 50000;
    o.memory = 20;
    return o;
}

}  // namespace

TEST_CASE("parameter validation") {
    OscillatorParams p;
    p.m = -1.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p.m = 1.0;
    p.b = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p.b = 1.0;
    p.alpha = 1.5;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p.alpha.reset();
    p.kernel = KernelSpec::exponential(1.0, 1.0);
    CHECK_THROWS_AS(p.validate(), std::domain_error);  // kernel without alpha
}

TEST_CASE("free particle limit") {
    OscillatorParams p;
    p.k = 0.0;
    p.lambda0 = 0.0;
    p.b = 1.0;
    p.x0 = 0.0;
    p.xb = 1.0;
    HerglotzProblem prob = oscillator_problem(p);
    const SolveResult r = solve_direct(prob, Grid(0.0, 1.0, 21), tight_options());
    CHECK(r.converged);
    for (int i = 0; i < 21; ++i) {
        CHECK(std::abs(r.evaluation.x(i) - i / 20.0) <= 1e-6);
    }
}

TEST_CASE("classical harmonic oscillator recovers the cosine") {
    // Interval kept below half a period so the extremal is a minimizer.
    const double b = 0.9 * M_PI;
    OscillatorParams p;
    p.m = 1.0;
    p.k = 1.0;
    p.lambda0 = 0.0;
    p.b = b;
    p.x0 = 1.0;
    p.xb = std::cos(b);
    HerglotzProblem prob = oscillator_problem(p);
    const SolveResult r =
        solve_direct(prob, Grid(0.0, b, 401), tight_options());
    CHECK(r.converged);
    double err = 0.0;
    for (int i = 0; i < 401; ++i) {
        err = std::max(err, std::abs(r.evaluation.x(i) -
                                     std::cos(i * b / 400.0)));
    }
    CHECK(err <= 1e-3);
}

TEST_CASE("fractional construction smoke test") {
    OscillatorParams p;
    p.m = 1.0;
    p.k = 1.0;
    p.lambda0 = 0.5;
    p.alpha = 0.5;
    p.b = 1.0;
    p.x0 = 0.0;
    p.xb = 1.0;
    HerglotzProblem prob = oscillator_problem(p);
    const Grid g(0.0, 1.0, 51);
    const GridFunction x = GridFunction::sample(g, [](double t) { return t; });
    const HerglotzEvaluation ev = evaluate_z(prob, x);
    CHECK(std::isfinite(ev.z_b));
    CHECK(check_partials(prob, 30, 7).worst() <= 1e-6);
}

TEST_CASE("lambda equals the exponential of the coupling") {
    OscillatorParams p;
    p.lambda0 = 0.7;
    p.alpha = 0.4;
    p.b = 1.0;
    p.x0 = 0.0;
    p.xb = 1.0;
    HerglotzProblem prob = oscillator_problem(p);
    const Grid g(0.0, 1.0, 101);
    const GridFunction x = GridFunction::sample(g, [](double t) { return t; });
    const HerglotzEvaluation ev = evaluate_z(prob, x);
    for (int i = 0; i < 101; ++i) {
        CHECK(ev.lambda(i) ==
              doctest::Approx(std::exp(-0.7 * g.node(i))).epsilon(1e-12));
    }
}

TEST_CASE("specialized residual equals the generic one") {
    OscillatorParams p;
    p.m = 1.4;
    p.k = 0.6;
    p.lambda0 = 0.3;
    p.alpha = 0.5;
    p.b = 1.0;
    p.x0 = 0.0;
    p.xb = 1.0;
    HerglotzProblem prob = oscillator_problem(p);
    const Grid g(0.0, 1.0, 101);
    const GridFunction x =
        GridFunction::sample(g, [](double t) { return t + 0.2 * std::sin(3 * t); });
    const HerglotzEvaluation ev = evaluate_z_unchecked(prob, x);
    const GridFunction specialized = oscillator_el_residual(p, ev);
    const GridFunction generic = el_residual(prob, ev);
    for (int i = 0; i < 101; ++i) {
        CHECK(specialized(i) ==
              doctest::Approx(generic(i)).epsilon(1e-10));
    }
}

TEST_CASE("classical cosine annihilates the specialized residual") {
    const double b = 0.9 * M_PI;
    OscillatorParams p;
    p.m = 1.0;
    p.k = 1.0;
    p.lambda0 = 0.0;
    p.b = b;
    p.x0 = 1.0;
    p.xb = std::cos(b);
    const Grid g(0.0, b, 401);
    const GridFunction x =
        GridFunction::sample(g, [](double t) { return std::cos(t); });
    HerglotzProblem prob = oscillator_problem(p);
    const HerglotzEvaluation ev = evaluate_z(prob, x);
    const GridFunction r = oscillator_el_residual(p, ev);
    CHECK(residual_sup_norm(r) <= 1e-3);
}

TEST_CASE("elasticity-free constant trajectory has zero residual") {
    OscillatorParams p;
    p.k = 0.0;
    p.lambda0 = 0.4;
    p.alpha = 0.5;
    p.b = 1.0;
    p.x0 = 2.0;
    p.xb = 2.0;
    HerglotzProblem prob = oscillator_problem(p);
    const Grid g(0.0, 1.0, 51);
    const GridFunction x = GridFunction::sample(g, [](double) { return 2.0; });
    const HerglotzEvaluation ev = evaluate_z(prob, x);
    const GridFunction r = oscillator_el_residual(p, ev);
    for (int i = 0; i < 51; ++i) CHECK(r(i) == doctest::Approx(0.0));
}

TEST_CASE("sign convention ties the damped-oscillator forms together") {
    // In classical mode the specialized residual is exactly the negative of
    // m d/dt(e^(-lambda0 t) x') + k e^(-lambda0 t) x on any trajectory.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int rep = 0; rep < 6; ++rep) {
        OscillatorParams p;
        p.m = 0.5 + std::abs(unit(rng));
        p.k = std::abs(unit(rng));
        p.lambda0 = unit(rng);
        p.b = 1.0;
        p.x0 = unit(rng);
        p.xb = unit(rng);
        HerglotzProblem prob = oscillator_problem(p);
        const Grid g(0.0, 1.0, 101);
        const double c1 = unit(rng), c2 = unit(rng);
        GridFunction x(g, 1);
        for (int i = 0; i < 101; ++i) {
            const double t = g.node(i);
            x(i) = p.x0 + c1 * std::sin(2 * t) + c2 * t * t;
        }
        const HerglotzEvaluation ev = evaluate_z_unchecked(prob, x);
        const GridFunction lhs = oscillator_el_residual(p, ev);
        const GridFunction rhs = classical_damped_residual(p, x);
        for (int i = 0; i < 101; ++i) {
            CHECK(lhs(i) == doctest::Approx(-rhs(i)).epsilon(1e-10));
        }
    }
}

TEST_CASE("classical reference branches") {
    // Undamped: cos(t).
    {
        OscillatorParams p;
        p.m = 1.0;
        p.k = 1.0;
        p.lambda0 = 0.0;
        p.b = 0.9 * M_PI;
        p.x0 = 1.0;
        p.xb = std::cos(0.9 * M_PI);
        const auto ref = classical_reference(p);
        for (double t : {0.0, 0.4, 1.1, 2.0}) {
            CHECK(ref(t) == doctest::Approx(std::cos(t)).epsilon(1e-12));
        }
    }
    // Zero elasticity with damping: (e^t - 1)/(e - 1).
    {
        OscillatorParams p;
        p.m = 1.0;
        p.k = 0.0;
        p.lambda0 = 1.0;
        p.b = 1.0;
        p.x0 = 0.0;
        p.xb = 1.0;
        const auto ref = classical_reference(p);
        for (double t : {0.0, 0.3, 0.7, 1.0}) {
            CHECK(ref(t) ==
                  doctest::Approx((std::exp(t) - 1.0) / (M_E - 1.0)).epsilon(1e-12));
        }
    }
    // Repeated root: lambda0^2 = 4k/m.
    {
        OscillatorParams p;
        p.m = 1.0;
        p.k = 1.0;
        p.lambda0 = 2.0;
        p.b = 1.0;
        p.x0 = 1.0;
        p.xb = 0.5;
        const auto ref = classical_reference(p);
        CHECK(ref(0.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ref(1.0) == doctest::Approx(0.5).epsilon(1e-12));
        // (c1 + c2 t) e^t through the boundary data.
        const double c2 = 0.5 / M_E - 1.0;
        CHECK(ref(0.5) == doctest::Approx((1.0 + c2 * 0.5) * std::exp(0.5))
                              .epsilon(1e-12));
    }
    // Degenerate boundary system: undamped oscillator across a full
    // half period has sin(b) = 0.
    {
        OscillatorParams p;
        p.m = 1.0;
        p.k = 1.0;
        p.lambda0 = 0.0;
        p.b = M_PI;
        p.x0 = 1.0;
        p.xb = 0.5;
        CHECK_THROWS_AS(classical_reference(p), std::domain_error);
    }
}

TEST_CASE("alpha sweep consistency") {
    OscillatorParams p;
    p.m = 1.0;
    p.k = 0.0;
    p.lambda0 = 0.0;
    p.b = 1.0;
    p.x0 = 0.0;
    p.xb = 1.0;
    SolveOptions opts = tight_options();
    opts.gradient_tolerance = 1e-7;

    const SweepTable table = alpha_sweep(p, {0.5}, 51, opts);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].solved);
    CHECK(table.rows[0].converged);

    // The single row must match the standalone solve.
    OscillatorParams single = p;
    single.alpha = 0.5;
    const SolveResult r =
        solve_direct(oscillator_problem(single), Grid(0.0, 1.0, 51), opts);
    CHECK(linf_distance(table.trajectories[0], r.evaluation.x) <= 1e-9);
}

TEST_CASE("alpha sweep with an empty order list") {
    OscillatorParams p;
    p.b = 1.0;
    p.x0 = 0.0;
    p.xb = 1.0;
    const SweepTable table = alpha_sweep(p, {}, 51, tight_options());
    CHECK(table.rows.empty());
    CHECK(table.trajectories.empty());
}

TEST_CASE("alpha sweep records per-order failures and continues") {
    OscillatorParams p;
    p.b = 1.0;
    p.x0 = 0.0;
    p.xb = 1.0;
    SolveOptions opts = tight_options();
    opts.gradient_tolerance = 1e-7;
    // 1.5 is out of range: that row must fail, the others succeed.
    const SweepTable table = alpha_sweep(p, {0.5, 1.5}, 31, opts);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].solved);
    CHECK_FALSE(table.rows[1].solved);
    CHECK_FALSE(table.rows[1].error.empty());
}

TEST_CASE("alpha sweep runs concurrently") {
    OscillatorParams p;
    p.m = 1.0;
    p.k = 1.0;
    p.lambda0 = 0.0;
    p.b = 2.0;
    p.x0 = 1.0;
    p.xb = std::cos(2.0);
    SolveOptions opts = tight_options();
    opts.gradient_tolerance = 1e-7;
    const std::vector<double> alphas = {0.6, 0.75, 0.9};
    const SweepTable serial = alpha_sweep(p, alphas, 51, opts, 1);
    const SweepTable parallel = alpha_sweep(p, alphas, 51, opts, 3);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (size_t i = 0; i < alphas.size(); ++i) {
        CHECK(serial.rows[i].solved);
        CHECK(parallel.rows[i].solved);
        CHECK(linf_distance(serial.trajectories[i], parallel.trajectories[i]) <= 1e-12);
    }
}

TEST_SUITE_END();
