#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace halfflow {

/// A point of R^n, n <= 2. The second coordinate is ignored in 1D.
using Point = std::array<double, 2>;

/**
 * Periodic uniform discretization of the box [-L/2, L/2)^n.
 *
 * Site coordinates are x_i = -L/2 + i*dx per axis. Sites are numbered
 * lexicographically (axis 0 slowest), so a 2D site (i, j) has index i*N + j.
 */
class Grid {
public:
    static Grid make(int n, double L, int N);

    int dim() const noexcept { return n_; }
    double length() const noexcept { return L_; }
    int points() const noexcept { return N_; }
    double spacing() const noexcept { return L_ / N_; }
    std::size_t sites() const noexcept { return n_ == 1 ? std::size_t(N_) : std::size_t(N_) * N_; }
    /// Volume element dx^n.
    double cell_volume() const noexcept;

    double coord(int i) const noexcept { return -0.5 * L_ + i * spacing(); }
    Point site_point(std::size_t site) const noexcept;
    std::array<int, 2> site_index(std::size_t site) const noexcept;
    /// Site for (possibly out of range) per-axis indices, wrapped periodically.
    std::size_t site(int i, int j = 0) const noexcept;

    /// Minimal-image displacement y - x on the torus.
    Point periodic_delta(const Point& x, const Point& y) const noexcept;
    double periodic_distance(const Point& x, const Point& y) const noexcept;

    bool operator==(const Grid& other) const noexcept = default;

private:
    Grid(int n, double L, int N) : n_(n), L_(L), N_(N) {}
    int n_ = 1;
    double L_ = 1.0;
    int N_ = 16;
};

/**
 * R^m valued samples on a Grid, stored component-major:
 * component c of site s lives at values[c * sites + s].
 */
class Field {
public:
    Field(const Grid& grid, int m);
    Field(const Grid& grid, int m, std::vector<double> values);

    static Field constant(const Grid& grid, std::span<const double> value);

    const Grid& grid() const noexcept { return grid_; }
    int components() const noexcept { return m_; }
    std::size_t sites() const noexcept { return grid_.sites(); }

    double& operator()(int c, std::size_t site) noexcept { return values_[c * sites() + site]; }
    double operator()(int c, std::size_t site) const noexcept { return values_[c * sites() + site]; }

    std::span<double> component(int c) noexcept { return {values_.data() + c * sites(), sites()}; }
    std::span<const double> component(int c) const noexcept { return {values_.data() + c * sites(), sites()}; }

    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    std::vector<double> value_at(std::size_t site) const;
    /// Euclidean length of the vector at a site.
    double magnitude_at(std::size_t site) const noexcept;
    /// max_x |u(x)| with |.| the Euclidean norm on R^m.
    double sup_norm() const noexcept;

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double s) noexcept;
    /// this += s * other
    Field& axpy(double s, const Field& other);

    /// Same grid and component count.
    bool compatible(const Field& other) const noexcept {
        return grid_ == other.grid_ && m_ == other.m_;
    }

private:
    Grid grid_;
    int m_;
    std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// sup over sites of |a(x) - b(x)|.
double sup_distance(const Field& a, const Field& b);

/// Geometric time mesh t_j = T * ratio^(j - M), j = 1..M, so t_M = T.
class TimeMesh {
public:
    static TimeMesh geometric(double T, int M, double ratio);

    double horizon() const noexcept { return T_; }
    double ratio() const noexcept { return ratio_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double operator[](std::size_t j) const noexcept { return nodes_[j]; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }

    /// Index of the node equal to t up to a relative tolerance, if any.
    std::optional<std::size_t> find(double t, double rel_tol = 1e-9) const noexcept;

private:
    TimeMesh(double T, double ratio, std::vector<double> nodes)
        : T_(T), ratio_(ratio), nodes_(std::move(nodes)) {}
    double T_;
    double ratio_;
    std::vector<double> nodes_;
};

/// One Field per mesh node.
struct SpaceTimeField {
    TimeMesh mesh;
    std::vector<Field> frames;

    SpaceTimeField(TimeMesh mesh, std::vector<Field> frames);
    const Grid& grid() const noexcept { return frames.front().grid(); }
    int components() const noexcept { return frames.front().components(); }
};

using SampleFn = std::function<std::vector<double>(const Point&)>;

/// values[s] = f(x_s). Throws DataError on non-finite output.
Field sample_function(const Grid& grid, int m, const SampleFn& f);

/// Periodic 4-point Lagrange cubic interpolation, tensor product in 2D. Exact at sites.
std::vector<double> interpolate(const Field& field, const Point& point);

/// Sites with periodic distance to `center` strictly below r.
std::vector<std::size_t> window_sites(const Grid& grid, const Point& center, double r);

/// Mean of component 0 over the ball B_r(center). Requires 0 < r <= L/4.
double window_average(const Field& scalar, const Point& center, double r);

/**
 * Precomputed ball of radius r around a site, as index offsets. Used when the
 * same radius is averaged around many grid-site centers.
 */
class WindowStencil {
public:
    WindowStencil(const Grid& grid, double r);
    double radius() const noexcept { return r_; }
    std::size_t count() const noexcept { return offsets_.size(); }
    double average(std::span<const double> scalar, std::size_t center_site) const noexcept;
    /// Averages around many centers at once, via periodic row prefix sums.
    std::vector<double> averages(std::span<const double> scalar, std::span<const std::size_t> centers) const;
    /// Row structure of the ball: for each axis-0 offset, the axis-1 half-width.
    const std::vector<std::array<int, 2>>& rows() const noexcept { return rows_; }
    template <class Fn>
    void for_each(std::size_t center_site, Fn&& fn) const {
        const auto c = grid_.site_index(center_site);
        for (const auto& o : offsets_) fn(grid_.site(c[0] + o[0], c[1] + o[1]));
    }

private:
    Grid grid_;
    double r_;
    std::vector<std::array<int, 2>> offsets_;
    std::vector<std::array<int, 2>> rows_;
};

/// Grid sites whose index is a multiple of stride along every axis.
std::vector<std::size_t> strided_sites(const Grid& grid, int stride);

}  // namespace halfflow
