#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>

#include "lifschitz/io.hpp"

using namespace lifschitz;

TEST_CASE("number formatting round trips") {
  for (double x : {0.0, 1.0, 0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numbers::pi}) {
    const auto s = io::fmt(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(io::fmt(0.5) == "0.5");
  CHECK(io::fmt(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("csv table") {
  io::CsvTable t({"a", "b"});
  t.row({"1", "2"}).row({"3", "4"});
  CHECK(t.rows() == 2);
  CHECK(t.str() == "a,b\n1,2\n3,4\n");
  CHECK_THROWS(t.row({"only one"}));
}

TEST_CASE("disorder json round trip") {
  const auto dist = CouplingDistribution::bernoulli(0.3, 2.0);
  const auto field = sample_disorder(dist, LatticeBox::cube(2, -1, 3), 99);
  for (bool values : {false, true}) {
    const auto back = io::disorder_from_json(io::disorder_to_json(field, values));
    CHECK(back.seed() == 99);
    CHECK(std::equal(back.values().begin(), back.values().end(), field.values().begin(), field.values().end()));
  }
  const auto d2 = io::distribution_from_json(io::distribution_to_json(dist));
  CHECK(d2.atom_at_zero() == doctest::Approx(0.3));
}

TEST_CASE("sha256 of a file") {
  const auto path = std::filesystem::temp_directory_path() / "lifschitz_io_test.txt";
  io::write_text(path, "abc");
  CHECK(io::read_text(path) == "abc");
  CHECK(io::sha256_file(path) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  std::filesystem::remove(path);
}
