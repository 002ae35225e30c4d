#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "swl/io.hpp"

using namespace swl::io;

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("numbers round-trip") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(number(x)) == x);
}

TEST_CASE("csv table") {
  CsvTable t({"a", "b"});
  t.row({"1", "x,y"});
  t.row({"2", "say \"hi\""});
  CHECK(t.str() == "a,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
  CHECK_THROWS(t.row({"only one"}));
}

TEST_CASE("write_output records file hashes") {
  const auto dir = std::filesystem::temp_directory_path() / "swl_test_io";
  std::filesystem::remove_all(dir);
  Manifest m;
  write_output(dir, "sub/a.txt", "abc", m);
  REQUIRE(m.files.size() == 1);
  CHECK(m.files[0].name == "sub/a.txt");
  CHECK(m.files[0].bytes == 3);
  CHECK(m.files[0].sha256 == sha256_file(dir / "sub/a.txt"));
  CHECK(m.files[0].sha256 == sha256_hex("abc"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest json") {
  Manifest m;
  m.kind = "blowup";
  m.seed = 7;
  m.checks.push_back({"x", true, true, "ok"});
  m.files.push_back({"f.csv", "00", 2});
  const auto j = nlohmann::json::parse(m.to_json());
  CHECK(j["kind"] == "blowup");
  CHECK(j["seed"] == 7);
  CHECK(j["checks"][0]["hard"] == true);
  CHECK(j["files"][0]["name"] == "f.csv");
}
