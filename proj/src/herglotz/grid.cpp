#include "herglotz/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace herglotz {

Grid::Grid(double a_, double b_, int n_nodes_) : a(a_), b(b_), n_nodes(n_nodes_) {
    if (!(a < b)) {
        throw std::domain_error("grid requires a < b");
    }
    if (n_nodes < 3) {
        throw std::domain_error("grid requires at least 3 nodes");
    }
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw std::domain_error("grid endpoints must be finite");
    }
}

bool same_grid(const Grid& g1, const Grid& g2) {
    const double scale = std::abs(g1.b - g1.a);
    return g1.n_nodes == g2.n_nodes && std::abs(g1.a - g2.a) <= 1e-12 * scale &&
           std::abs(g1.b - g2.b) <= 1e-12 * scale;
}

GridFunction::GridFunction(Grid grid, int dim)
    : grid_(grid), dim_(dim),
      values_(static_cast<std::size_t>(grid.n_nodes) * dim, 0.0) {
    if (dim < 1) {
        throw std::domain_error("grid function dimension must be >= 1");
    }
}

GridFunction::GridFunction(Grid grid, int dim, std::vector<double> values)
    : grid_(grid), dim_(dim), values_(std::move(values)) {
    if (dim < 1) {
        throw std::domain_error("grid function dimension must be >= 1");
    }
    if (values_.size() != static_cast<std::size_t>(grid.n_nodes) * dim) {
        throw std::invalid_argument("grid function value count does not match grid");
    }
    require_finite("grid function values");
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<double(double)>& f) {
    GridFunction out(grid, 1);
    for (int i = 0; i < grid.n_nodes; ++i) out(i) = f(grid.node(i));
    out.require_finite("sampled values");
    return out;
}

std::vector<double> GridFunction::component(int comp) const {
    std::vector<double> out(n_nodes());
    for (int i = 0; i < n_nodes(); ++i) out[i] = (*this)(i, comp);
    return out;
}

GridFunction GridFunction::component_function(int comp) const {
    return GridFunction(grid_, 1, component(comp));
}

void GridFunction::set_component(int comp, std::span<const double> values) {
    if (values.size() != static_cast<std::size_t>(n_nodes())) {
        throw std::invalid_argument("component length does not match grid");
    }
    for (int i = 0; i < n_nodes(); ++i) (*this)(i, comp) = values[i];
}

bool GridFunction::all_finite() const noexcept {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void GridFunction::require_finite(const std::string& what) const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument(what + ": non-finite entry at node " +
                                        std::to_string(i / dim_));
        }
    }
}

GridFunction derivative(const GridFunction& f) {
    const int n = f.n_nodes(), d = f.dim();
    const double h = f.grid().h();
    GridFunction out(f.grid(), d);
    for (int j = 0; j < d; ++j) {
        out(0, j) = (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) / (2.0 * h);
        for (int i = 1; i < n - 1; ++i) {
            out(i, j) = (f(i + 1, j) - f(i - 1, j)) / (2.0 * h);
        }
        out(n - 1, j) =
            (3.0 * f(n - 1, j) - 4.0 * f(n - 2, j) + f(n - 3, j)) / (2.0 * h);
    }
    return out;
}

double integrate(const GridFunction& f) {
    if (f.dim() != 1) {
        throw std::invalid_argument("integrate expects a scalar grid function");
    }
    const int n = f.n_nodes();
    const double h = f.grid().h();
    double sum = 0.5 * (f(0) + f(n - 1));
    for (int i = 1; i < n - 1; ++i) sum += f(i);
    return sum * h;
}

GridFunction cumulative_integral(const GridFunction& f) {
    const int n = f.n_nodes(), d = f.dim();
    const double h = f.grid().h();
    GridFunction out(f.grid(), d);
    for (int j = 0; j < d; ++j) {
        out(0, j) = 0.0;
        for (int i = 1; i < n; ++i) {
            out(i, j) = out(i - 1, j) + 0.5 * h * (f(i - 1, j) + f(i, j));
        }
    }
    return out;
}

std::vector<double> interpolate(const GridFunction& f, double t) {
    const Grid& g = f.grid();
    const double tol = 1e-12 * (g.b - g.a);
    if (t < g.a - tol || t > g.b + tol) {
        throw std::domain_error("interpolation point " + std::to_string(t) +
                                " outside [" + std::to_string(g.a) + ", " +
                                std::to_string(g.b) + "]");
    }
    const double h = g.h();
    int i = static_cast<int>(std::floor((t - g.a) / h));
    i = std::max(0, std::min(i, g.n_nodes - 2));
    const double w = (t - g.node(i)) / h;
    std::vector<double> out(f.dim());
    for (int j = 0; j < f.dim(); ++j) {
        out[j] = (1.0 - w) * f(i, j) + w * f(i + 1, j);
    }
    return out;
}

double sup_norm(const GridFunction& f) {
    double m = 0.0;
    for (double v : f.flat()) m = std::max(m, std::abs(v));
    return m;
}

double interior_sup_norm(const GridFunction& f) {
    double m = 0.0;
    for (int i = 1; i < f.n_nodes() - 1; ++i) {
        for (int j = 0; j < f.dim(); ++j) m = std::max(m, std::abs(f(i, j)));
    }
    return m;
}

double linf_distance(const GridFunction& f, const GridFunction& g) {
    if (f.n_nodes() != g.n_nodes() || f.dim() != g.dim()) {
        throw std::invalid_argument("grid functions are not comparable");
    }
    double m = 0.0;
    for (int i = 0; i < f.n_nodes(); ++i) {
        for (int j = 0; j < f.dim(); ++j) m = std::max(m, std::abs(f(i, j) - g(i, j)));
    }
    return m;
}

void write_csv(const GridFunction& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << "t";
    for (int j = 1; j <= f.dim(); ++j) out << ",x_" << j;
    out << "\n";
    char buf[40];
    for (int i = 0; i < f.n_nodes(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", f.grid().node(i));
        out << buf;
        for (int j = 0; j < f.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", f(i, j));
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) {
        throw std::runtime_error("failed while writing " + path);
    }
}

GridFunction read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(path + ": empty file");
    }
    int dim = 0;
    for (char c : line) {
        if (c == ',') ++dim;
    }
    if (dim < 1) {
        throw std::runtime_error(path + ": expected header t,x_1,...");
    }
    std::vector<double> ts;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            const double v = std::stod(cell);
            if (col == 0) {
                ts.push_back(v);
            } else {
                values.push_back(v);
            }
            ++col;
        }
        if (col != dim + 1) {
            throw std::runtime_error(path + ": row with wrong column count");
        }
    }
    if (ts.size() < 3) {
        throw std::runtime_error(path + ": needs at least 3 rows");
    }
    const int n = static_cast<int>(ts.size());
    Grid grid(ts.front(), ts.back(), n);
    for (int i = 0; i < n; ++i) {
        if (std::abs(ts[i] - grid.node(i)) > 1e-9 * (1.0 + std::abs(ts[i]))) {
            throw std::runtime_error(path + ": nodes are not on a uniform grid");
        }
    }
    return GridFunction(grid, dim, std::move(values));
}

}  // namespace herglotz
