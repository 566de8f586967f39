#include "sonoheat/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace sonoheat {

namespace {

double to_double(std::string_view s, std::string_view whole) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || first == last)
        throw MatrixFormatError("bad complex entry '" + std::string(whole) + "'");
    return v;
}

}  // namespace

cplx parse_complex(std::string_view token) {
    if (token.empty()) throw MatrixFormatError("empty complex entry");
    if (token.back() != 'j') return {to_double(token, token), 0.0};

    const std::string_view body = token.substr(0, token.size() - 1);
    // Split at the last sign that is not a leading sign or an exponent sign.
    std::size_t split = std::string_view::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string_view::npos) {
        if (body.empty() || body == "+" ) return {0.0, 1.0};
        if (body == "-") return {0.0, -1.0};
        return {0.0, to_double(body, token)};
    }
    const std::string_view re = body.substr(0, split);
    const std::string_view im = body.substr(split);
    const double im_v = (im == "+") ? 1.0 : (im == "-") ? -1.0 : to_double(im, token);
    return {to_double(re, token), im_v};
}

std::string format_complex(cplx z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
    return buf;
}

CMatrix read_matrix(std::istream& in) {
    std::vector<std::vector<cplx>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::vector<cplx> row;
        std::string tok;
        try {
            while (ls >> tok) row.push_back(parse_complex(tok));
        } catch (const MatrixFormatError& e) {
            throw MatrixFormatError("line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw MatrixFormatError("line " + std::to_string(lineno) + ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw MatrixFormatError("matrix file is empty");
    CMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

CMatrix read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MatrixFormatError("cannot open " + path.string());
    try {
        return read_matrix(in);
    } catch (const MatrixFormatError& e) {
        throw MatrixFormatError(path.string() + ": " + e.what());
    }
}

void write_matrix(std::ostream& out, const CMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_complex(m(i, j));
        }
        out << '\n';
    }
}

}  // namespace sonoheat
