#include "herglotz/noether.hpp"

#include <cmath>

namespace herglotz {

TransformationFamily TransformationFamily::translation(int dim,
                                                       std::vector<double> direction) {
    if (direction.empty()) direction.assign(dim, 1.0);
    if (direction.size() != static_cast<std::size_t>(dim)) {
        throw std::invalid_argument("translation direction has the wrong dimension");
    }
    TransformationFamily fam;
    fam.xi = [dir = std::move(direction)](double, std::span<const double>,
                                          std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = dir[j];
    };
    return fam;
}

TransformationFamily TransformationFamily::scaling() {
    TransformationFamily fam;
    fam.xi = [](double, std::span<const double> x, std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = x[j];
    };
    return fam;
}

TransformationFamily TransformationFamily::from_table(GridFunction table) {
    TransformationFamily fam;
    fam.xi = [table = std::move(table)](double t, std::span<const double>,
                                        std::span<double> out) {
        const auto vals = interpolate(table, t);
        if (vals.size() != out.size()) {
            throw std::invalid_argument("generator table has the wrong dimension");
        }
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = vals[j];
    };
    return fam;
}

GridFunction sample_generator(const TransformationFamily& family,
                              const GridFunction& x) {
    if (!family.xi) {
        throw std::invalid_argument("transformation family has no generator");
    }
    GridFunction out(x.grid(), x.dim());
    std::vector<double> buf(x.dim());
    for (int i = 0; i < x.n_nodes(); ++i) {
        family.xi(x.grid().node(i), x.row(i), buf);
        for (int j = 0; j < x.dim(); ++j) {
            if (!std::isfinite(buf[j])) {
                throw std::invalid_argument("generator produced a non-finite value");
            }
            out(i, j) = buf[j];
        }
    }
    return out;
}

namespace {

void check_s_step(double s_step) {
    if (!(s_step > 1e-8 && s_step < 1e-2)) {
        throw std::domain_error("s_step must lie in (1e-8, 1e-2)");
    }
}

double defect_from_samples(const HerglotzProblem& prob, const GridFunction& x,
                           const GridFunction& xi, double s_step) {
    // B is linear, so the velocity of x +- s*xi is v +- s*B[xi].
    const GridFunction v = apply_B(prob.op_config(), x);
    const GridFunction vxi = apply_B(prob.op_config(), xi);

    GridFunction xp(x.grid(), x.dim()), xm(x.grid(), x.dim());
    GridFunction vp(x.grid(), x.dim()), vm(x.grid(), x.dim());
    for (int i = 0; i < x.n_nodes(); ++i) {
        for (int j = 0; j < x.dim(); ++j) {
            xp(i, j) = x(i, j) + s_step * xi(i, j);
            xm(i, j) = x(i, j) - s_step * xi(i, j);
            vp(i, j) = v(i, j) + s_step * vxi(i, j);
            vm(i, j) = v(i, j) - s_step * vxi(i, j);
        }
    }
    const double zp = terminal_z(prob, xp, vp);
    const double zm = terminal_z(prob, xm, vm);
    return (zp - zm) / (2.0 * s_step);
}

}  // namespace

double invariance_defect(const HerglotzProblem& prob, const GridFunction& x,
                         const TransformationFamily& family, double s_step) {
    check_s_step(s_step);
    const GridFunction xi = sample_generator(family, x);
    return defect_from_samples(prob, x, xi, s_step);
}

GridFunction noether_operator(const GridFunction& f, const GridFunction& g,
                              const OperatorConfig& cfg) {
    if (f.dim() != 1 || g.dim() != 1) {
        throw std::invalid_argument("noether_operator expects scalar grid functions");
    }
    if (!same_grid(f.grid(), g.grid())) {
        throw std::invalid_argument("noether_operator operands live on different grids");
    }
    const GridFunction bg = apply_B(cfg, g);
    const GridFunction af = apply_A(cfg.with_adjoint_pset(), f);
    GridFunction out(f.grid(), 1);
    for (int i = 0; i < f.n_nodes(); ++i) {
        out(i) = f(i) * bg(i) - g(i) * af(i);
    }
    return out;
}

NoetherResidual noether_residual(const HerglotzProblem& prob,
                                 const HerglotzEvaluation& ev,
                                 const TransformationFamily& family) {
    const int n = ev.x.n_nodes();
    const int d = prob.dim();
    const Grid& grid = ev.x.grid();
    const auto& L = prob.lagrangian();

    const GridFunction xi = sample_generator(family, ev.x);

    GridFunction sum(grid, 1);
    std::vector<double> lv(d);
    GridFunction psi(grid, 1), xij(grid, 1);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < n; ++i) {
            L.dv(grid.node(i), ev.x.row(i), ev.v.row(i), ev.z(i), lv);
            psi(i) = ev.lambda(i) * lv[j];
            xij(i) = xi(i, j);
        }
        const GridFunction term = noether_operator(psi, xij, prob.op_config());
        for (int i = 0; i < n; ++i) sum(i) += term(i);
    }

    NoetherResidual out{sum, residual_sup_norm(sum), integrate(sum)};
    return out;
}

VariationalIdentity variational_identity(const HerglotzProblem& prob,
                                         const GridFunction& x,
                                         const TransformationFamily& family,
                                         double s_step) {
    check_s_step(s_step);
    const HerglotzEvaluation ev = evaluate_z_unchecked(prob, x);
    const GridFunction xi = sample_generator(family, x);
    const double theta_b = defect_from_samples(prob, x, xi, s_step);

    const GridFunction bxi = apply_B(prob.op_config(), xi);
    const int n = x.n_nodes(), d = prob.dim();
    const auto& L = prob.lagrangian();
    GridFunction integrand(x.grid(), 1);
    std::vector<double> lx(d), lv(d);
    for (int i = 0; i < n; ++i) {
        const double t = x.grid().node(i);
        L.dx(t, ev.x.row(i), ev.v.row(i), ev.z(i), lx);
        L.dv(t, ev.x.row(i), ev.v.row(i), ev.z(i), lv);
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += lx[j] * xi(i, j) + lv[j] * bxi(i, j);
        integrand(i) = s * ev.lambda(i);
    }

    const double lhs = theta_b * ev.lambda(n - 1);
    const double rhs = integrate(integrand);
    const double rel =
        std::abs(lhs - rhs) / (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
    return VariationalIdentity{lhs, rhs, rel};
}

}  // namespace herglotz
