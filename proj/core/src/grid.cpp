#include "halfflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "halfflow/errors.hpp"

namespace halfflow {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int wrap(int i, int N) {
    const int r = i % N;
    return r < 0 ? r + N : r;
}

// 4-point Lagrange weights on nodes -1, 0, 1, 2 for fractional position s in [0, 1).
std::array<double, 4> cubic_weights(double s) {
    return {
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    };
}

}  // namespace

Grid Grid::make(int n, double L, int N) {
    if (n != 1 && n != 2) {
        std::ostringstream os;
        os << "unsupported dimension n=" << n << " (expected 1 or 2)";
        throw ConfigError(os.str());
    }
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("domain length L must be positive and finite");
    if (N < 16 || !is_power_of_two(N)) {
        std::ostringstream os;
        os << "N=" << N << " must be a power of two >= 16";
        throw ConfigError(os.str());
    }
    return Grid(n, L, N);
}

double Grid::cell_volume() const noexcept {
    const double h = spacing();
    return n_ == 1 ? h : h * h;
}

Point Grid::site_point(std::size_t site) const noexcept {
    const auto idx = site_index(site);
    return {coord(idx[0]), n_ == 2 ? coord(idx[1]) : 0.0};
}

std::array<int, 2> Grid::site_index(std::size_t site) const noexcept {
    if (n_ == 1) return {static_cast<int>(site), 0};
    return {static_cast<int>(site / N_), static_cast<int>(site % N_)};
}

std::size_t Grid::site(int i, int j) const noexcept {
    if (n_ == 1) return static_cast<std::size_t>(wrap(i, N_));
    return static_cast<std::size_t>(wrap(i, N_)) * N_ + static_cast<std::size_t>(wrap(j, N_));
}

Point Grid::periodic_delta(const Point& x, const Point& y) const noexcept {
    Point d{0.0, 0.0};
    for (int a = 0; a < n_; ++a) {
        double v = y[a] - x[a];
        v -= L_ * std::round(v / L_);
        d[a] = v;
    }
    return d;
}

double Grid::periodic_distance(const Point& x, const Point& y) const noexcept {
    const Point d = periodic_delta(x, y);
    return std::hypot(d[0], d[1]);
}

// ---------------------------------------------------------------------------

Field::Field(const Grid& grid, int m) : grid_(grid), m_(m), values_(grid.sites() * m, 0.0) {
    if (m < 1) throw ConfigError("field needs at least one component");
}

Field::Field(const Grid& grid, int m, std::vector<double> values)
    : grid_(grid), m_(m), values_(std::move(values)) {
    if (m < 1) throw ConfigError("field needs at least one component");
    if (values_.size() != grid.sites() * m) throw ShapeError("field value count does not match grid");
}

Field Field::constant(const Grid& grid, std::span<const double> value) {
    Field f(grid, static_cast<int>(value.size()));
    for (int c = 0; c < f.components(); ++c) std::ranges::fill(f.component(c), value[c]);
    return f;
}

std::vector<double> Field::value_at(std::size_t site) const {
    std::vector<double> v(m_);
    for (int c = 0; c < m_; ++c) v[c] = (*this)(c, site);
    return v;
}

double Field::magnitude_at(std::size_t site) const noexcept {
    double s = 0.0;
    for (int c = 0; c < m_; ++c) s += (*this)(c, site) * (*this)(c, site);
    return std::sqrt(s);
}

double Field::sup_norm() const noexcept {
    double best = 0.0;
    for (std::size_t s = 0; s < sites(); ++s) best = std::max(best, magnitude_at(s));
    return best;
}

Field& Field::operator+=(const Field& other) {
    if (!compatible(other)) throw ShapeError("field shapes differ");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    if (!compatible(other)) throw ShapeError("field shapes differ");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

Field& Field::operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return *this;
}

Field& Field::axpy(double s, const Field& other) {
    if (!compatible(other)) throw ShapeError("field shapes differ");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

double sup_distance(const Field& a, const Field& b) {
    if (!a.compatible(b)) throw ShapeError("field shapes differ");
    double best = 0.0;
    for (std::size_t s = 0; s < a.sites(); ++s) {
        double acc = 0.0;
        for (int c = 0; c < a.components(); ++c) {
            const double d = a(c, s) - b(c, s);
            acc += d * d;
        }
        best = std::max(best, acc);
    }
    return std::sqrt(best);
}

// ---------------------------------------------------------------------------

TimeMesh TimeMesh::geometric(double T, int M, double ratio) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("time horizon T must be positive");
    if (M < 2) throw ConfigError("time mesh needs at least two nodes");
    if (!(ratio > 1.0)) throw ConfigError("geometric grading ratio must exceed 1");
    std::vector<double> nodes(M);
    for (int j = 0; j < M; ++j) nodes[j] = T * std::pow(ratio, static_cast<double>(j + 1 - M));
    nodes.back() = T;
    return TimeMesh(T, ratio, std::move(nodes));
}

std::optional<std::size_t> TimeMesh::find(double t, double rel_tol) const noexcept {
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (std::abs(nodes_[j] - t) <= rel_tol * std::max(std::abs(t), nodes_[j])) return j;
    }
    return std::nullopt;
}

SpaceTimeField::SpaceTimeField(TimeMesh mesh_, std::vector<Field> frames_)
    : mesh(std::move(mesh_)), frames(std::move(frames_)) {
    if (frames.size() != mesh.size()) throw ShapeError("frame count must equal mesh size");
    for (const Field& f : frames) {
        if (!f.compatible(frames.front())) throw ShapeError("frames must share grid and components");
    }
}

// ---------------------------------------------------------------------------

Field sample_function(const Grid& grid, int m, const SampleFn& f) {
    Field out(grid, m);
    for (std::size_t s = 0; s < grid.sites(); ++s) {
        const auto v = f(grid.site_point(s));
        if (static_cast<int>(v.size()) != m) throw ShapeError("sample function returned wrong component count");
        for (int c = 0; c < m; ++c) {
            if (!std::isfinite(v[c])) throw DataError("sample function produced a non-finite value");
            out(c, s) = v[c];
        }
    }
    return out;
}

std::vector<double> interpolate(const Field& field, const Point& point) {
    const Grid& g = field.grid();
    const double h = g.spacing();
    std::array<int, 2> base{0, 0};
    std::array<std::array<double, 4>, 2> w{};
    for (int a = 0; a < g.dim(); ++a) {
        const double u = (point[a] + 0.5 * g.length()) / h;
        const double fl = std::floor(u);
        base[a] = static_cast<int>(fl);
        w[a] = cubic_weights(u - fl);
    }
    std::vector<double> out(field.components(), 0.0);
    if (g.dim() == 1) {
        for (int k = 0; k < 4; ++k) {
            const std::size_t s = g.site(base[0] - 1 + k);
            for (int c = 0; c < field.components(); ++c) out[c] += w[0][k] * field(c, s);
        }
        return out;
    }
    for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) {
            const std::size_t s = g.site(base[0] - 1 + k, base[1] - 1 + l);
            const double wk = w[0][k] * w[1][l];
            for (int c = 0; c < field.components(); ++c) out[c] += wk * field(c, s);
        }
    }
    return out;
}

namespace {

void check_window_radius(const Grid& g, double r) {
    if (!(r > 0.0)) throw DomainError("window radius must be positive");
    if (r > 0.25 * g.length() * (1.0 + 1e-12)) throw DomainError("window radius exceeds L/4");
}

}  // namespace

std::vector<std::size_t> window_sites(const Grid& g, const Point& center, double r) {
    check_window_radius(g, r);
    const double h = g.spacing();
    const int reach = static_cast<int>(std::ceil(r / h)) + 1;
    // Nearest site index to the center per axis.
    std::array<int, 2> c{0, 0};
    for (int a = 0; a < g.dim(); ++a) c[a] = static_cast<int>(std::lround((center[a] + 0.5 * g.length()) / h));
    std::vector<std::size_t> out;
    const int jr = g.dim() == 2 ? reach : 0;
    for (int di = -reach; di <= reach; ++di) {
        for (int dj = -jr; dj <= jr; ++dj) {
            const std::size_t s = g.site(c[0] + di, c[1] + dj);
            if (g.periodic_distance(center, g.site_point(s)) < r) out.push_back(s);
        }
    }
    std::ranges::sort(out);
    return out;
}

double window_average(const Field& scalar, const Point& center, double r) {
    const auto sites = window_sites(scalar.grid(), center, r);
    if (sites.empty()) throw DomainError("empty window: no site within radius");
    double acc = 0.0;
    for (std::size_t s : sites) acc += scalar(0, s);
    return acc / static_cast<double>(sites.size());
}

WindowStencil::WindowStencil(const Grid& grid, double r) : grid_(grid), r_(r) {
    check_window_radius(grid, r);
    const double h = grid.spacing();
    const int reach = static_cast<int>(std::ceil(r / h));
    const int jr = grid.dim() == 2 ? reach : 0;
    for (int di = -reach; di <= reach; ++di) {
        for (int dj = -jr; dj <= jr; ++dj) {
            if (std::hypot(di * h, dj * h) < r) offsets_.push_back({di, dj});
        }
    }
    if (offsets_.empty()) throw DomainError("empty window: no site within radius");
    if (grid.dim() == 1) {
        rows_.push_back({0, reach});
        while (rows_[0][1] > 0 && rows_[0][1] * h >= r) --rows_[0][1];
    } else {
        for (int di = -reach; di <= reach; ++di) {
            int w = -1;
            for (int dj = 0; dj <= reach; ++dj) {
                if (std::hypot(di * h, dj * h) < r) w = dj;
            }
            if (w >= 0) rows_.push_back({di, w});
        }
    }
}

double WindowStencil::average(std::span<const double> scalar, std::size_t center_site) const noexcept {
    double acc = 0.0;
    for_each(center_site, [&](std::size_t s) { acc += scalar[s]; });
    return acc / static_cast<double>(offsets_.size());
}

std::vector<double> WindowStencil::averages(std::span<const double> scalar, std::span<const std::size_t> centers) const {
    const int N = grid_.points();
    const std::size_t rows = grid_.dim() == 1 ? 1 : static_cast<std::size_t>(N);
    // Prefix sums over three periodic copies of each row so every window is one difference.
    std::vector<double> prefix(rows * (3 * N + 1), 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        double* p = prefix.data() + i * (3 * N + 1);
        const double* row = scalar.data() + i * (grid_.dim() == 1 ? 0 : N);
        for (int k = 0; k < 3 * N; ++k) p[k + 1] = p[k] + row[k % N];
    }
    std::vector<double> out(centers.size());
    const double inv = 1.0 / static_cast<double>(offsets_.size());
    for (std::size_t q = 0; q < centers.size(); ++q) {
        const auto c = grid_.site_index(centers[q]);
        double acc = 0.0;
        if (grid_.dim() == 1) {
            const int w = rows_[0][1];
            acc = prefix[c[0] + w + N + 1] - prefix[c[0] - w + N];
        } else {
            for (const auto& rw : rows_) {
                const int i = ((c[0] + rw[0]) % N + N) % N;
                const double* p = prefix.data() + static_cast<std::size_t>(i) * (3 * N + 1);
                acc += p[c[1] + rw[1] + N + 1] - p[c[1] - rw[1] + N];
            }
        }
        out[q] = acc * inv;
    }
    return out;
}

std::vector<std::size_t> strided_sites(const Grid& grid, int stride) {
    if (stride < 1) throw ConfigError("site stride must be >= 1");
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < grid.sites(); ++s) {
        const auto idx = grid.site_index(s);
        if (idx[0] % stride == 0 && idx[1] % stride == 0) out.push_back(s);
    }
    return out;
}

}  // namespace halfflow
