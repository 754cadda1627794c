#include <filesystem>

#include "doctest.h"
#include "modwhittle/io.hpp"

using namespace modwhittle;

TEST_SUITE("io") {
  TEST_CASE("csv parse and format") {
    auto t = io::parse_csv("# comment\na,b\n1,2\n\n3.5,-4e-3\n");
    REQUIRE(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][1] == -4e-3);
    CHECK(t.column("b") == 1);
    CHECK(t.column("z") == std::string::npos);
    CHECK(io::parse_csv(io::format_csv(t)).rows == t.rows);
    CHECK_THROWS(io::parse_csv("a,b\n1\n"));
    CHECK_THROWS(io::parse_csv("a\nx\n"));
  }

  TEST_CASE("series round trip") {
    auto s = Series::complex({{1.0, 2.0}, {0.1, -3.0}, {1e-17, 0.0}}, 0.5);
    auto back = io::series_from_csv(io::series_csv(s), 0.5);
    CHECK(back.values() == s.values());
    CHECK(back.is_complex());
    auto r = io::series_from_csv("re\n1\n2\n");
    CHECK_FALSE(r.is_complex());
    CHECK(r.size() == 2);
  }

  TEST_CASE("atomic write") {
    const auto dir = std::filesystem::temp_directory_path() / "modwhittle_io_test";
    std::filesystem::remove_all(dir);
    const auto path = (dir / "sub" / "x.txt").string();
    io::write_file_atomic(path, "hello");
    CHECK(io::read_file(path) == "hello");
    io::write_file_atomic(path, "again");
    CHECK(io::read_file(path) == "again");
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "sub")) files += e.is_regular_file();
    CHECK(files == 1);
    std::filesystem::remove_all(dir);
    CHECK_THROWS(io::read_file(path));
  }

  TEST_CASE("hash") {
    CHECK(io::fnv1a_hex("") == "cbf29ce484222325");
    CHECK(io::fnv1a_hex("a") == "af63dc4c8601ec8c");
  }
}
