#include "pcgrr/matrix_market.hpp"

#include "pcgrr/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>
#include <vector>

namespace pcgrr {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

std::size_t parse_index(const std::string& token, std::size_t line_no) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError("bad index '" + token + "'", line_no);
    }
    return v;
}

double parse_value(const std::string& token, std::size_t line_no) {
    // strtod also accepts Fortran-style exponents written with 'e'; 'd' is rewritten.
    std::string t = token;
    std::replace(t.begin(), t.end(), 'd', 'e');
    std::replace(t.begin(), t.end(), 'D', 'e');
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw ParseError("bad value '" + token + "'", line_no);
    return v;
}

} // namespace

MatrixMarketData read_matrix_market(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty input", 1);
    ++line_no;

    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", line_no);
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix") throw ParseError("unsupported object '" + object + "'", line_no);
    if (format != "coordinate") throw ParseError("unsupported format '" + format + "'", line_no);
    if (field != "real" && field != "integer" && field != "double") {
        throw ParseError("unsupported field qualifier '" + field + "'", line_no);
    }
    if (field == "double") field = "real";
    if (symmetry != "symmetric" && symmetry != "general") {
        throw ParseError("unsupported symmetry qualifier '" + symmetry + "'", line_no);
    }

    std::size_t rows = 0, cols = 0, entries = 0;
    bool have_size = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line) || line[0] == '%') continue;
        std::istringstream ss(line);
        std::string a, b, c;
        if (!(ss >> a >> b >> c)) throw ParseError("bad size line", line_no);
        rows = parse_index(a, line_no);
        cols = parse_index(b, line_no);
        entries = parse_index(c, line_no);
        have_size = true;
        break;
    }
    if (!have_size) throw ParseError("missing size line", line_no);
    if (rows != cols) {
        throw ParseError("matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                             ", expected square",
                         line_no);
    }

    std::vector<Triplet> triplets;
    triplets.reserve(symmetry == "symmetric" ? 2 * entries : entries);
    std::size_t seen = 0;
    while (seen < entries && std::getline(in, line)) {
        ++line_no;
        if (blank(line) || line[0] == '%') continue;
        std::istringstream ss(line);
        std::string a, b, c;
        if (!(ss >> a >> b >> c)) throw ParseError("expected 'row col value'", line_no);
        const std::size_t i = parse_index(a, line_no);
        const std::size_t j = parse_index(b, line_no);
        if (i < 1 || i > rows || j < 1 || j > cols) {
            throw ParseError("index (" + a + ", " + b + ") out of range", line_no);
        }
        const double v = parse_value(c, line_no);
        triplets.push_back({i - 1, j - 1, v});
        if (symmetry == "symmetric" && i != j) triplets.push_back({j - 1, i - 1, v});
        ++seen;
    }
    if (seen != entries) {
        throw ParseError("expected " + std::to_string(entries) + " entries, found " +
                             std::to_string(seen),
                         line_no);
    }

    std::sort(triplets.begin(), triplets.end(), [](const Triplet& x, const Triplet& y) {
        return std::tie(x.row, x.col) < std::tie(y.row, y.col);
    });
    std::vector<std::size_t> row_ptr(rows + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(triplets.size());
    values.reserve(triplets.size());
    for (std::size_t k = 0; k < triplets.size(); ++k) {
        const Triplet& t = triplets[k];
        if (k > 0 && t.row == triplets[k - 1].row && t.col == triplets[k - 1].col) {
            values.back() += t.value;
            continue;
        }
        col_idx.push_back(t.col);
        values.push_back(t.value);
        ++row_ptr[t.row + 1];
    }
    for (std::size_t i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];

    MatrixMarketData data;
    try {
        data.matrix = CsrMatrix(rows, std::move(row_ptr), std::move(col_idx), std::move(values));
    } catch (const std::invalid_argument& e) {
        throw ParseError(symmetry + " matrix rejected: " + e.what());
    }
    data.raw_entries = entries;
    data.field = field;
    data.symmetry = symmetry;
    return data;
}

MatrixMarketData read_matrix_market_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file " + path.string());
    return read_matrix_market(in);
}

void write_matrix_market(const CsrMatrix& A, std::ostream& out) {
    const auto rp = A.row_ptr();
    const auto ci = A.col_idx();
    const auto v = A.values();
    std::size_t lower_nnz = 0;
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) lower_nnz += ci[k] <= i ? 1 : 0;
    }
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << A.size() << ' ' << A.size() << ' ' << lower_nnz << '\n';
    char buf[64];
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            if (ci[k] > i) continue;
            std::snprintf(buf, sizeof buf, "%.17g", v[k]);
            out << i + 1 << ' ' << ci[k] + 1 << ' ' << buf << '\n';
        }
    }
}

} // namespace pcgrr
