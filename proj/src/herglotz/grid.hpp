#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace herglotz {

/// Uniform grid t_i = a + i*h on [a, b] with h = (b-a)/(n_nodes-1).
struct Grid {
    double a;
    double b;
    int n_nodes;

    Grid(double a_, double b_, int n_nodes_);

    double h() const noexcept { return (b - a) / (n_nodes - 1); }
    double node(int i) const noexcept { return a + i * h(); }
};

bool same_grid(const Grid& g1, const Grid& g2);

/// Real vector-valued function sampled on a uniform grid. Values are stored
/// node-major: values[i*dim + j] is component j at node i.
class GridFunction {
public:
    GridFunction(Grid grid, int dim);
    GridFunction(Grid grid, int dim, std::vector<double> values);

    static GridFunction sample(const Grid& grid, const std::function<double(double)>& f);

    const Grid& grid() const noexcept { return grid_; }
    int n_nodes() const noexcept { return grid_.n_nodes; }
    int dim() const noexcept { return dim_; }

    double operator()(int node, int comp = 0) const { return values_[node * dim_ + comp]; }
    double& operator()(int node, int comp = 0) { return values_[node * dim_ + comp]; }

    std::span<const double> row(int node) const {
        return {values_.data() + static_cast<std::size_t>(node) * dim_,
                static_cast<std::size_t>(dim_)};
    }
    std::span<const double> flat() const noexcept { return values_; }
    std::span<double> flat_mut() noexcept { return values_; }

    std::vector<double> component(int comp) const;
    GridFunction component_function(int comp) const;
    void set_component(int comp, std::span<const double> values);

    bool all_finite() const noexcept;
    void require_finite(const std::string& what) const;

private:
    Grid grid_;
    int dim_;
    std::vector<double> values_;
};

/// Second-order finite differences: central in the interior, 3-point
/// one-sided at both endpoints. Exact for quadratics up to roundoff.
GridFunction derivative(const GridFunction& f);

/// Composite trapezoid over [a, b]; f must be scalar.
double integrate(const GridFunction& f);

/// Componentwise running trapezoid; result(a) = 0.
GridFunction cumulative_integral(const GridFunction& f);

/// Piecewise-linear interpolation; t must lie in [a, b].
std::vector<double> interpolate(const GridFunction& f, double t);

double sup_norm(const GridFunction& f);
/// Sup norm over nodes 1..n-2, where the one-sided differentiation stencils
/// do not apply.
double interior_sup_norm(const GridFunction& f);
double linf_distance(const GridFunction& f, const GridFunction& g);

/// CSV with header "t,x_1,...,x_d", one row per node, 17 significant digits.
void write_csv(const GridFunction& f, const std::string& path);
GridFunction read_csv(const std::string& path);

}  // namespace herglotz
