#pragma once

// Plain-text complex matrix format: one row per line, whitespace-separated
// entries written as "re+imj" (e.g. "0.5-1.25e-3j"). A bare real "0.5" or a
// bare imaginary "2j" is accepted on input. Lines starting with '#' are skipped.

#include "sonoheat/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace sonoheat {

class MatrixFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] cplx parse_complex(std::string_view token);
[[nodiscard]] std::string format_complex(cplx z);

[[nodiscard]] CMatrix read_matrix(std::istream& in);
[[nodiscard]] CMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix(std::ostream& out, const CMatrix& m);

}  // namespace sonoheat
