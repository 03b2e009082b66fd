#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "herglotz/operators.hpp"
#include "oracles.hpp"

using namespace herglotz;

TEST_SUITE_BEGIN("operators");

namespace {

OperatorConfig caputo_config(double alpha, const ParameterSet& pset) {
    return OperatorConfig::fractional(FractionalOrder(alpha),
                                      KernelSpec::caputo(FractionalOrder(alpha)),
                                      pset);
}

}  // namespace

TEST_CASE("K of a constant against a flat kernel") {
    // Exponential with a vanishing rate approximates k == 1, so K becomes
    // plain integration: left-sided K[1](x) = x - a.
    const Grid g(0.0, 1.0, 101);
    const GridFunction one = GridFunction::sample(g, [](double) { return 1.0; });
    OperatorConfig cfg = OperatorConfig::fractional(
        FractionalOrder(0.5), KernelSpec::exponential(1e-12, 1.0),
        ParameterSet(0.0, 1.0, 1.0, 0.0));
    const GridFunction kf = apply_K(cfg, one);
    for (int i = 0; i < 101; ++i) {
        CHECK(kf(i) == doctest::Approx(g.node(i)).epsilon(1e-9));
    }

    // Right-sided: K[1](x) = b - x.
    cfg.pset = ParameterSet(0.0, 1.0, 0.0, 1.0);
    const GridFunction kr = apply_K(cfg, one);
    for (int i = 0; i < 101; ++i) {
        CHECK(kr(i) == doctest::Approx(1.0 - g.node(i)).epsilon(1e-9));
    }
}

TEST_CASE("K of a constant for the order-0.5 power-law kernel") {
    // K^(1/2)[1](x) = x^(1/2)/Gamma(3/2).
    const Grid g(0.0, 1.0, 257);
    const GridFunction one = GridFunction::sample(g, [](double) { return 1.0; });
    OperatorConfig cfg = OperatorConfig::fractional(
        FractionalOrder(0.5), KernelSpec::power_law(0.5),
        ParameterSet(0.0, 1.0, 1.0, 0.0));
    const GridFunction kf = apply_K(cfg, one);
    const double coef = 1.0 / oracles::gamma(1.5);
    for (int i = 0; i < 257; ++i) {
        CHECK(kf(i) ==
              doctest::Approx(coef * std::sqrt(g.node(i))).epsilon(1e-12));
    }
}

TEST_CASE("B annihilates constants, A does not") {
    const Grid g(0.0, 1.0, 65);
    const GridFunction c = GridFunction::sample(g, [](double) { return 2.5; });

    for (double alpha : {0.3, 0.7}) {
        for (auto pq : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0},
                        std::pair{0.6, -0.4}}) {
            const OperatorConfig cfg =
                caputo_config(alpha, ParameterSet(0.0, 1.0, pq.first, pq.second));
            const GridFunction bc = apply_B(cfg, c);
            for (int i = 0; i < 65; ++i) CHECK(bc(i) == doctest::Approx(0.0));
        }
    }

    // Left-sided A of a constant is the classic power-law derivative of a
    // constant: c * x^(-alpha) / Gamma(1-alpha), checked away from the origin.
    const int n = 1001;
    const Grid fine(0.0, 1.0, n);
    const GridFunction cf = GridFunction::sample(fine, [](double) { return 2.5; });
    const double alpha = 0.5;
    const OperatorConfig cfg = caputo_config(alpha, ParameterSet(0.0, 1.0, 1.0, 0.0));
    const GridFunction ac = apply_A(cfg, cf);
    for (int i = 0; i < n; ++i) {
        const double t = fine.node(i);
        if (t < 0.2) continue;
        const double exact = 2.5 * std::pow(t, -alpha) / oracles::gamma(1.0 - alpha);
        CHECK(ac(i) == doctest::Approx(exact).epsilon(1e-3));
    }
}

TEST_CASE("B on monomials against the power-law calculus") {
    // D^alpha[t^p] = Gamma(p+1)/Gamma(p+1-alpha) t^(p-alpha).
    const ParameterSet pset(0.0, 1.0, 1.0, 0.0);
    for (double alpha : {0.25, 0.5, 0.75}) {
        const OperatorConfig cfg = caputo_config(alpha, pset);
        const Grid g(0.0, 1.0, 513);

        const GridFunction t1 = GridFunction::sample(g, [](double t) { return t; });
        const GridFunction bt1 = apply_B(cfg, t1);
        const double c1 = oracles::gamma(2.0) / oracles::gamma(2.0 - alpha);
        for (int i = 0; i < 513; ++i) {
            CHECK(bt1(i) ==
                  doctest::Approx(c1 * std::pow(g.node(i), 1.0 - alpha))
                      .epsilon(1e-10));
        }

        const GridFunction t2 = GridFunction::sample(g, [](double t) { return t * t; });
        const GridFunction bt2 = apply_B(cfg, t2);
        const double c2 = oracles::gamma(3.0) / oracles::gamma(3.0 - alpha);
        for (int i = 0; i < 513; ++i) {
            CHECK(bt2(i) ==
                  doctest::Approx(c2 * std::pow(g.node(i), 2.0 - alpha))
                      .epsilon(1e-10));
        }
    }
    // Spot value of the t^2 coefficient at alpha = 1/2.
    CHECK(oracles::gamma(3.0) / oracles::gamma(2.5) ==
          doctest::Approx(1.5045055561273502).epsilon(1e-12));
}

TEST_CASE("monomial convergence order of B on t^3") {
    const ParameterSet pset(0.0, 1.0, 1.0, 0.0);
    for (double alpha : {0.25, 0.5, 0.75}) {
        double prev = 0.0;
        for (int n : {256, 512, 1024}) {
            const Grid g(0.0, 1.0, n);
            const GridFunction f =
                GridFunction::sample(g, [](double t) { return t * t * t; });
            const GridFunction bf = apply_B(caputo_config(alpha, pset), f);
            const double coef = oracles::gamma(4.0) / oracles::gamma(4.0 - alpha);
            double err = 0.0;
            for (int i = 0; i < n; ++i) {
                err = std::max(err, std::abs(bf(i) - coef * std::pow(g.node(i),
                                                                     3.0 - alpha)));
            }
            if (prev > 0.0) {
                const double order = std::log2(prev / err);
                CHECK(order >= 2.0 - alpha - 0.2);
            }
            prev = err;
        }
    }
}

TEST_CASE("A agrees with B on functions vanishing at a") {
    const OperatorConfig cfg = caputo_config(0.5, ParameterSet(0.0, 1.0, 1.0, 0.0));
    const Grid g(0.0, 1.0, 801);
    const GridFunction f = GridFunction::sample(g, [](double t) { return t; });
    const GridFunction bf = apply_B(cfg, f);
    const GridFunction af = apply_A(cfg, f);
    const double coef = 1.0 / oracles::gamma(1.5);
    for (int i = 2; i < 799; ++i) {
        const double exact = coef * std::sqrt(g.node(i));
        CHECK(bf(i) == doctest::Approx(exact).epsilon(1e-8));
        CHECK(af(i) == doctest::Approx(exact).epsilon(2e-2));
    }
}

TEST_CASE("classical limits") {
    const Grid g(0.0, 1.0, 41);
    const GridFunction f = GridFunction::sample(g, [](double t) { return t; });

    const OperatorConfig right = OperatorConfig::classical(ParameterSet(0, 1, 0, 1));
    const GridFunction ar = apply_A(right, f);
    for (int i = 0; i < 41; ++i) CHECK(ar(i) == doctest::Approx(-1.0));

    const OperatorConfig left = OperatorConfig::classical(ParameterSet(0, 1, 1, 0));
    const GridFunction al = apply_A(left, f);
    for (int i = 0; i < 41; ++i) CHECK(al(i) == doctest::Approx(1.0));
    const GridFunction bl = apply_B(left, f);
    for (int i = 0; i < 41; ++i) CHECK(bl(i) == doctest::Approx(1.0));
    const GridFunction kl = apply_K(left, f);
    for (int i = 0; i < 41; ++i) CHECK(kl(i) == doctest::Approx(f(i)));
}

TEST_CASE("operators are linear") {
    const Grid g(0.0, 1.0, 101);
    const GridFunction f = GridFunction::sample(g, [](double t) { return std::sin(2 * t); });
    const GridFunction h = GridFunction::sample(g, [](double t) { return std::exp(-t); });
    const OperatorConfig cfg = caputo_config(0.4, ParameterSet(0.0, 1.0, 0.7, 0.3));

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    for (auto op : {apply_K, apply_A, apply_B}) {
        const GridFunction of = op(cfg, f);
        const GridFunction oh = op(cfg, h);
        for (int rep = 0; rep < 5; ++rep) {
            const double a = unit(rng), b = unit(rng);
            GridFunction combo(g, 1);
            for (int i = 0; i < 101; ++i) combo(i) = a * f(i) + b * h(i);
            const GridFunction oc = op(cfg, combo);
            for (int i = 0; i < 101; ++i) {
                CHECK(oc(i) ==
                      doctest::Approx(a * of(i) + b * oh(i)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("non-integrable kernels are rejected") {
    std::vector<double> s, k;
    for (double t = 0.01; t <= 2.0; t *= 1.5) {
        s.push_back(t);
        k.push_back(1.0 / (t * t));  // sigma = 2 >= 1
    }
    const KernelSpec tab = KernelSpec::tabulated(s, k);
    const OperatorConfig cfg = OperatorConfig::fractional(
        FractionalOrder(0.5), tab, ParameterSet(0.0, 1.0, 1.0, 0.0));
    const Grid g(0.0, 1.0, 11);
    const GridFunction one = GridFunction::sample(g, [](double) { return 1.0; });
    CHECK_THROWS_AS(apply_K(cfg, one), std::domain_error);
}

TEST_CASE("ibp identity: zero function") {
    const Grid g(0.0, 1.0, 33);
    const GridFunction zero(g, 1);
    const GridFunction gfun = GridFunction::sample(g, [](double t) { return std::cos(t); });
    const IbpCheck check =
        ibp_check(caputo_config(0.5, ParameterSet(0.0, 1.0, 1.0, 0.0)), zero, gfun);
    CHECK(check.lhs == doctest::Approx(0.0));
    CHECK(check.rhs == doctest::Approx(0.0));
    CHECK(check.residual == doctest::Approx(0.0));
}

TEST_CASE("ibp identity: the worked half-order pair") {
    // f(t) = t, g = 1, alpha = 1/2: both sides equal 4/(3 sqrt(pi)).
    const double exact = 4.0 / (3.0 * std::sqrt(M_PI));
    CHECK(exact == doctest::Approx(0.7522527780636751).epsilon(1e-14));
    // Cross-check the frozen value by quadrature of 2 sqrt(t/pi).
    CHECK(oracles::simpson(
              [](double t) { return 2.0 * std::sqrt(t / M_PI); }, 0.0, 1.0) ==
          doctest::Approx(exact).epsilon(1e-6));

    double prev_residual = 0.0;
    for (int n : {512, 1024, 2048}) {
        const Grid g(0.0, 1.0, n);
        const GridFunction f = GridFunction::sample(g, [](double t) { return t; });
        const GridFunction one = GridFunction::sample(g, [](double) { return 1.0; });
        const IbpCheck check = ibp_check(
            caputo_config(0.5, ParameterSet(0.0, 1.0, 1.0, 0.0)), f, one);
        if (n == 2048) {
            CHECK(check.lhs == doctest::Approx(exact).epsilon(1e-4));
            CHECK(std::abs(check.lhs - exact) <= 1e-4);
        }
        if (prev_residual > 0.0) CHECK(check.residual < prev_residual);
        prev_residual = check.residual;
    }
}

TEST_CASE("ibp identity: smooth pair at alpha 0.3") {
    double prev = 0.0;
    for (int n : {512, 1024, 2048}) {
        const Grid g(0.0, 1.0, n);
        const GridFunction f =
            GridFunction::sample(g, [](double t) { return t * (1.0 - t); });
        const GridFunction gg =
            GridFunction::sample(g, [](double t) { return std::sin(M_PI * t); });
        const IbpCheck check = ibp_check(
            caputo_config(0.3, ParameterSet(0.0, 1.0, 1.0, 0.0)), f, gg);
        if (n == 2048) CHECK(check.residual <= 1e-3);
        if (prev > 0.0) CHECK(check.residual < prev);
        prev = check.residual;
    }
}

TEST_CASE("ibp residual decreases for every kernel family") {
    const Grid coarse(0.0, 1.0, 256);
    std::vector<double> s, k;
    for (double t = 1e-4; t <= 1.2; t *= 1.4) {
        s.push_back(t);
        k.push_back(std::pow(t, -0.3));
    }
    const std::vector<KernelSpec> kernels = {
        KernelSpec::power_law(0.6), KernelSpec::exponential(2.0, 1.0),
        KernelSpec::tabulated(s, k)};
    for (const auto& kernel : kernels) {
        double prev = 0.0;
        for (int n : {256, 512, 1024}) {
            const Grid g(0.0, 1.0, n);
            const GridFunction f =
                GridFunction::sample(g, [](double t) { return t * (1.0 - t); });
            const GridFunction gg =
                GridFunction::sample(g, [](double t) { return std::sin(M_PI * t); });
            const OperatorConfig cfg = OperatorConfig::fractional(
                FractionalOrder(0.4), kernel, ParameterSet(0.0, 1.0, 1.0, 0.0));
            const IbpCheck check = ibp_check(cfg, f, gg);
            // Monotone within the usual 20% slack.
            if (prev > 0.0) CHECK(check.residual <= prev * 1.2);
            prev = check.residual;
        }
    }
}

TEST_CASE("ibp identity across the whole order range") {
    // Orders above 1/2 put the kernel outside square integrability near the
    // diagonal; the discrete identity still closes under refinement.
    for (double alpha : {0.25, 0.5, 0.75, 0.9}) {
        double prev = 0.0;
        for (int n : {512, 1024}) {
            const Grid g(0.0, 1.0, n);
            const GridFunction f =
                GridFunction::sample(g, [](double t) { return t * (1.0 - t); });
            const GridFunction gg =
                GridFunction::sample(g, [](double t) { return std::sin(M_PI * t); });
            const IbpCheck check =
                ibp_check(caputo_config(alpha, ParameterSet(0.0, 1.0, 1.0, 0.0)),
                          f, gg);
            if (n == 1024) CHECK(check.residual <= 1e-3);
            if (prev > 0.0) CHECK(check.residual <= prev * 1.2);
            prev = check.residual;
        }
    }
}

TEST_CASE("ibp adjoint-swap consistency") {
    const Grid g(0.0, 1.0, 512);
    const GridFunction f =
        GridFunction::sample(g, [](double t) { return t * (1.0 - t); });
    const GridFunction gg =
        GridFunction::sample(g, [](double t) { return std::sin(M_PI * t); });
    const OperatorConfig cfg = caputo_config(0.4, ParameterSet(0.0, 1.0, 1.0, 0.0));
    const IbpCheck direct = ibp_check(cfg, f, gg);
    const IbpCheck swapped = ibp_check(cfg.with_adjoint_pset(), gg, f);
    CHECK(direct.residual <= 1e-3);
    CHECK(swapped.residual <= 1e-3);
    const double d1 = std::abs(direct.lhs - direct.rhs);
    const double d2 = std::abs(swapped.lhs - swapped.rhs);
    CHECK(std::abs(d1 - d2) <= 2.0 * std::max(d1, d2));
}

TEST_CASE("weight cache is safe under concurrent application") {
    const KernelSpec kernel = KernelSpec::power_law(0.45);
    const OperatorConfig cfg = OperatorConfig::fractional(
        FractionalOrder(0.55), kernel, ParameterSet(0.0, 1.0, 1.0, 0.0));
    const Grid g(0.0, 1.0, 301);
    const GridFunction f = GridFunction::sample(g, [](double t) { return std::sin(3 * t); });
    const GridFunction reference = apply_K(cfg, f);

    std::vector<std::thread> pool;
    std::vector<double> worst(8, 0.0);
    for (int w = 0; w < 8; ++w) {
        pool.emplace_back([&, w]() {
            const GridFunction mine = apply_K(cfg, f);
            double m = 0.0;
            for (int i = 0; i < 301; ++i) m = std::max(m, std::abs(mine(i) - reference(i)));
            worst[w] = m;
        });
    }
    for (auto& t : pool) t.join();
    for (double m : worst) CHECK(m == 0.0);
}

TEST_SUITE_END();
