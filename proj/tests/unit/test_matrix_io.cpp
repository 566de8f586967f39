#include "doctest.h"
#include "helpers.hpp"

#include "sonoheat/matrix_io.hpp"

#include <sstream>

using namespace sonoheat;

TEST_SUITE("matrix_io") {

TEST_CASE("complex tokens") {
    CHECK(parse_complex("1.5") == cplx(1.5, 0.0));
    CHECK(parse_complex("2j") == cplx(0.0, 2.0));
    CHECK(parse_complex("-j") == cplx(0.0, -1.0));
    CHECK(parse_complex("1+2j") == cplx(1.0, 2.0));
    CHECK(parse_complex("-1e-3-2.5e+2j") == cplx(-1e-3, -250.0));
    CHECK(parse_complex("3e-5j") == cplx(0.0, 3e-5));
    CHECK_THROWS_AS((void)parse_complex("1+2i"), MatrixFormatError);
    CHECK_THROWS_AS((void)parse_complex("abc"), MatrixFormatError);
}

TEST_CASE("round trip is exact") {
    const CMatrix m = testutil::random_complex(3, 4);
    std::stringstream ss;
    write_matrix(ss, m);
    const CMatrix back = read_matrix(ss);
    CHECK(back.rows() == 3);
    CHECK(back.cols() == 4);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("comments and blank lines are skipped") {
    std::istringstream in("# H_B\n\n0 0\n0 1+0j\n");
    const CMatrix m = read_matrix(in);
    CHECK(m.rows() == 2);
    CHECK(m(1, 1) == cplx(1.0, 0.0));
}

TEST_CASE("ragged rows are rejected with the line number") {
    std::istringstream in("1 0\n0\n");
    CHECK_THROWS_WITH_AS((void)read_matrix(in), doctest::Contains("line 2"), MatrixFormatError);
}

}
