#include "halfflow/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "halfflow/errors.hpp"

namespace halfflow {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_field_csv(std::ostream& os, const Field& field) {
    const Grid& g = field.grid();
    os << "# n=" << g.dim() << ",L=" << format_double(g.length()) << ",N=" << g.points()
       << ",m=" << field.components() << '\n';
    for (std::size_t s = 0; s < g.sites(); ++s) {
        const Point x = g.site_point(s);
        os << format_double(x[0]);
        if (g.dim() == 2) os << ',' << format_double(x[1]);
        for (int c = 0; c < field.components(); ++c) os << ',' << format_double(field(c, s));
        os << '\n';
    }
}

void write_field_csv(const std::filesystem::path& path, const Field& field) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    write_field_csv(os, field);
}

Field read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw DataError("field csv: missing header");
    std::map<std::string, std::string> kv;
    std::istringstream hs(line.substr(2));
    std::string item;
    while (std::getline(hs, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw DataError("field csv: malformed header entry '" + item + "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    for (const char* key : {"n", "L", "N", "m"}) {
        if (!kv.count(key)) throw DataError(std::string("field csv: header lacks ") + key);
    }
    const Grid g = Grid::make(std::stoi(kv["n"]), std::stod(kv["L"]), std::stoi(kv["N"]));
    const int m = std::stoi(kv["m"]);
    Field f(g, m);
    for (std::size_t s = 0; s < g.sites(); ++s) {
        if (!std::getline(is, line)) throw DataError("field csv: too few rows");
        std::istringstream rs(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
        if (static_cast<int>(row.size()) != g.dim() + m) throw DataError("field csv: wrong column count");
        for (int c = 0; c < m; ++c) f(c, s) = row[g.dim() + c];
    }
    return f;
}

Field read_field_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path.string());
    return read_field_csv(is);
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
}

}  // namespace halfflow
