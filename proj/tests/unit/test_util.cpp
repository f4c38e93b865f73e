#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "moralvig/csv.hpp"
#include "moralvig/error.hpp"
#include "moralvig/hash.hpp"
#include "moralvig/matrix.hpp"
#include "moralvig/rng.hpp"

using namespace moralvig;

TEST_SUITE("util") {
  TEST_CASE("csv reader handles quoting, embedded newlines, CRLF and BOM") {
    std::istringstream in(
        "\xEF\xBB\xBF"
        "a,b\r\n"
        "\"x, y\",\"say \"\"hi\"\"\"\r\n"
        "\r\n"
        "\"two\nlines\",z\n");
    const auto rows = csv::read(in);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].fields == std::vector<std::string>{"a", "b"});
    CHECK(rows[1].fields == std::vector<std::string>{"x, y", "say \"hi\""});
    CHECK(rows[1].line == 2);
    CHECK(rows[2].fields == std::vector<std::string>{"two\nlines", "z"});
    CHECK(rows[2].line == 4);
  }

  TEST_CASE("csv rejects an unterminated quote") {
    std::istringstream in("a,\"open\n");
    CHECK_THROWS_AS(csv::read(in), Error);
  }

  TEST_CASE("csv write round-trips awkward fields") {
    const std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\"", "multi\nline", ""};
    std::ostringstream out;
    csv::write_row(out, fields);
    std::istringstream in(out.str());
    const auto rows = csv::read(in);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].fields == fields);
  }

  TEST_CASE("splitmix64 reference stream") {
    Rng rng(0);
    CHECK(rng.next_u64() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next_u64() == 0x6E789E6AA1B965F4ULL);
  }

  TEST_CASE("bounded draws stay in range and cover it") {
    Rng rng(7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
      const auto v = rng.below(6);
      CHECK(v < 6);
      seen.insert(v);
    }
    CHECK(seen.size() == 6);
    CHECK(rng.below(1) == 0);
  }

  TEST_CASE("normal draws have roughly unit moments") {
    Rng rng(11);
    double sum = 0.0;
    double sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double v = rng.normal();
      sum += v;
      sq += v * v;
    }
    CHECK(sum / n == doctest::Approx(0.0).epsilon(0.03));
    CHECK(sq / n == doctest::Approx(1.0).epsilon(0.03));
  }

  TEST_CASE("shuffle is a seeded permutation") {
    std::vector<int> a = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<int> b = a;
    Rng(3).shuffle(std::span<int>(a));
    Rng(3).shuffle(std::span<int>(b));
    CHECK(a == b);
    std::multiset<int> items(a.begin(), a.end());
    CHECK(items == std::multiset<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  }

  TEST_CASE("derived seeds depend on base and label") {
    CHECK(derive_seed(0, "fold0") == derive_seed(0, "fold0"));
    CHECK(derive_seed(0, "fold0") != derive_seed(0, "fold1"));
    CHECK(derive_seed(0, "fold0") != derive_seed(1, "fold0"));
  }

  TEST_CASE("sha256 known answers") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("errors carry code and line") {
    const Error e(ErrorCode::malformed_row, "bad", 4);
    CHECK(e.code() == ErrorCode::malformed_row);
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    CHECK(to_string(ErrorCode::dim_mismatch) == "dim_mismatch");
  }

  TEST_CASE("matrix row selection keeps the requested order") {
    Matrix m(3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
      m(i, 0) = static_cast<double>(i);
      m(i, 1) = 10.0 * static_cast<double>(i);
    }
    const std::vector<std::size_t> idx = {2, 0};
    const Matrix s = m.select_rows(idx);
    CHECK(s.rows() == 2);
    CHECK(s(0, 1) == 20.0);
    CHECK(s(1, 0) == 0.0);
  }
}
