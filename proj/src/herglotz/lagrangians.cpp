#include "herglotz/lagrangians.hpp"

#include <cmath>

namespace herglotz {

Lagrangian oscillator_lagrangian(double m, double k, double lambda0) {
    Lagrangian L;
    L.value = [m, k, lambda0](double, std::span<const double> x,
                              std::span<const double> v, double z) {
        double xx = 0.0, vv = 0.0;
        for (double xi : x) xx += xi * xi;
        for (double vi : v) vv += vi * vi;
        return 0.5 * m * vv - 0.5 * k * xx + lambda0 * z;
    };
    L.dx = [k](double, std::span<const double> x, std::span<const double>,
               double, std::span<double> out) {
        for (std::size_t j = 0; j < x.size(); ++j) out[j] = -k * x[j];
    };
    L.dv = [m](double, std::span<const double>, std::span<const double> v,
               double, std::span<double> out) {
        for (std::size_t j = 0; j < v.size(); ++j) out[j] = m * v[j];
    };
    L.dz = [lambda0](double, std::span<const double>, std::span<const double>,
                     double) { return lambda0; };
    return L;
}

Lagrangian quadratic_lagrangian(double v2, double x2, double z_coef,
                                double constant) {
    Lagrangian L;
    L.value = [v2, x2, z_coef, constant](double, std::span<const double> x,
                                         std::span<const double> v, double z) {
        double xx = 0.0, vv = 0.0;
        for (double xi : x) xx += xi * xi;
        for (double vi : v) vv += vi * vi;
        return 0.5 * v2 * vv + 0.5 * x2 * xx + z_coef * z + constant;
    };
    L.dx = [x2](double, std::span<const double> x, std::span<const double>,
                double, std::span<double> out) {
        for (std::size_t j = 0; j < x.size(); ++j) out[j] = x2 * x[j];
    };
    L.dv = [v2](double, std::span<const double>, std::span<const double> v,
                double, std::span<double> out) {
        for (std::size_t j = 0; j < v.size(); ++j) out[j] = v2 * v[j];
    };
    L.dz = [z_coef](double, std::span<const double>, std::span<const double>,
                    double) { return z_coef; };
    return L;
}

namespace {

double int_pow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace

Lagrangian polynomial_lagrangian(int dim, std::vector<PolynomialTerm> terms) {
    for (auto& term : terms) {
        if (term.px.size() != static_cast<std::size_t>(dim) ||
            term.pv.size() != static_cast<std::size_t>(dim)) {
            throw std::invalid_argument(
                "polynomial term exponent lists must match the dimension");
        }
        if (term.pt < 0 || term.pz < 0) {
            throw std::invalid_argument("polynomial exponents must be non-negative");
        }
        for (int e : term.px) {
            if (e < 0) throw std::invalid_argument("polynomial exponents must be non-negative");
        }
        for (int e : term.pv) {
            if (e < 0) throw std::invalid_argument("polynomial exponents must be non-negative");
        }
    }
    auto shared = std::make_shared<std::vector<PolynomialTerm>>(std::move(terms));

    auto eval_term = [](const PolynomialTerm& term, double t,
                        std::span<const double> x, std::span<const double> v,
                        double z) {
        double r = term.coef * int_pow(t, term.pt) * int_pow(z, term.pz);
        for (std::size_t j = 0; j < x.size(); ++j) r *= int_pow(x[j], term.px[j]);
        for (std::size_t j = 0; j < v.size(); ++j) r *= int_pow(v[j], term.pv[j]);
        return r;
    };

    Lagrangian L;
    L.value = [shared, eval_term](double t, std::span<const double> x,
                                  std::span<const double> v, double z) {
        double sum = 0.0;
        for (const auto& term : *shared) sum += eval_term(term, t, x, v, z);
        return sum;
    };
    L.dx = [shared](double t, std::span<const double> x, std::span<const double> v,
                    double z, std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = 0.0;
        for (const auto& term : *shared) {
            for (std::size_t j = 0; j < x.size(); ++j) {
                if (term.px[j] == 0) continue;
                double r = term.coef * term.px[j] * int_pow(t, term.pt) *
                           int_pow(z, term.pz) * int_pow(x[j], term.px[j] - 1);
                for (std::size_t m = 0; m < x.size(); ++m) {
                    if (m != j) r *= int_pow(x[m], term.px[m]);
                }
                for (std::size_t m = 0; m < v.size(); ++m) r *= int_pow(v[m], term.pv[m]);
                out[j] += r;
            }
        }
    };
    L.dv = [shared](double t, std::span<const double> x, std::span<const double> v,
                    double z, std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = 0.0;
        for (const auto& term : *shared) {
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (term.pv[j] == 0) continue;
                double r = term.coef * term.pv[j] * int_pow(t, term.pt) *
                           int_pow(z, term.pz) * int_pow(v[j], term.pv[j] - 1);
                for (std::size_t m = 0; m < v.size(); ++m) {
                    if (m != j) r *= int_pow(v[m], term.pv[m]);
                }
                for (std::size_t m = 0; m < x.size(); ++m) r *= int_pow(x[m], term.px[m]);
                out[j] += r;
            }
        }
    };
    L.dz = [shared](double t, std::span<const double> x, std::span<const double> v,
                    double z) {
        double sum = 0.0;
        for (const auto& term : *shared) {
            if (term.pz == 0) continue;
            double r = term.coef * term.pz * int_pow(t, term.pt) *
                       int_pow(z, term.pz - 1);
            for (std::size_t m = 0; m < x.size(); ++m) r *= int_pow(x[m], term.px[m]);
            for (std::size_t m = 0; m < v.size(); ++m) r *= int_pow(v[m], term.pv[m]);
            sum += r;
        }
        return sum;
    };
    return L;
}

}  // namespace herglotz
