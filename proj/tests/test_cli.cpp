#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

std::string bin() { return TBRKIT_BIN; }

std::string work_dir() {
  static std::string dir = [] {
    auto d = fs::temp_directory_path() / "tbrkit_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d.string();
  }();
  return dir;
}

int run(const std::string& args, const std::string& log_name = "out.txt") {
  std::string cmd = bin() + " " + args + " > " + work_dir() + "/" + log_name + " 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("family + verify round trip exits zero") {
  std::string dir = work_dir() + "/sc2";
  CHECK(run("family sc --k 2 --out " + dir) == 0);
  CHECK(fs::exists(dir + "/s.nwk"));
  CHECK(fs::exists(dir + "/witness.unet"));
  CHECK(fs::exists(dir + "/certificate.txt"));
  CHECK(run("verify " + dir) == 0);
}

TEST_CASE("verify on a tampered directory exits nonzero") {
  std::string dir = work_dir() + "/scc4";
  REQUIRE(run("family scc --k 4 --out " + dir) == 0);
  std::string s = slurp(dir + "/s.nwk");
  // Swap the first two taxa occurrences crudely but consistently.
  auto pos1 = s.find("(1,");
  if (pos1 != std::string::npos) s.replace(pos1, 3, "(2,");
  write(dir + "/s.nwk", s);
  int code = run("verify " + dir);
  CHECK(code != 0);
}

TEST_CASE("tbr distance and kernelize on family files") {
  std::string dir = work_dir() + "/sc2b";
  REQUIRE(run("family sc --k 2 --out " + dir) == 0);
  CHECK(run("tbr " + dir + "/s.nwk " + dir + "/s_prime.nwk") == 0);
  CHECK(slurp(work_dir() + "/out.txt").find("distance 2") != std::string::npos);
  CHECK(run("kernelize " + dir + "/s.nwk " + dir + "/s_prime.nwk --solve") == 0);
  CHECK(slurp(work_dir() + "/out.txt").find("already reduced") != std::string::npos);
  CHECK(run("display " + dir + "/witness.unet " + dir + "/s.nwk") == 0);
  CHECK(run("mp " + dir + "/s.nwk " + dir + "/s_prime.nwk") == 0);
}

TEST_CASE("parse errors exit with code 2") {
  std::string bad = work_dir() + "/bad.nwk";
  write(bad, "((a,b),(c,d)\n");
  CHECK(run("tbr " + bad + " " + bad) == 2);
  std::string dup = work_dir() + "/dup.nwk";
  write(dup, "((a,a),(c,d));\n");
  CHECK(run("tbr " + dup + " " + dup) == 2);
}

TEST_CASE("reports are byte-stable across runs") {
  std::string dir = work_dir() + "/sc3";
  REQUIRE(run("family sc --k 3 --out " + dir) == 0);
  std::string r1 = work_dir() + "/rep1.json";
  std::string r2 = work_dir() + "/rep2.json";
  REQUIRE(run("tbr " + dir + "/s.nwk " + dir + "/s_prime.nwk --report " + r1) == 0);
  REQUIRE(run("tbr " + dir + "/s.nwk " + dir + "/s_prime.nwk --report " + r2) == 0);
  std::string a = slurp(r1), b = slurp(r2);
  // The command echo differs only in the report path; compare the rest.
  a = a.substr(a.find("\"exit\""));
  b = b.substr(b.find("\"exit\""));
  CHECK(a == b);
  CHECK(slurp(r1).find("\"digest\"") != std::string::npos);
}

TEST_CASE("rooted candidate emit and verify") {
  std::string dir = work_dir() + "/rc";
  CHECK(run("rooted-candidate --seed 5 --out " + dir) == 0);
  CHECK(run("rooted-verify " + dir) == 0);
  // Tamper: claim the cluster-reduced bound.
  write(dir + "/certificate.txt", "k 1\ncluster_reduced 1\n");
  CHECK(run("rooted-verify " + dir) != 0);
}

TEST_CASE("generator enumeration command") {
  CHECK(run("generators --k 1") == 0);
  CHECK(slurp(work_dir() + "/out.txt").find("1 generator(s)") != std::string::npos);
  CHECK(run("generators --k 2") == 0);
  CHECK(slurp(work_dir() + "/out.txt").find("2 generator(s)") != std::string::npos);
}
