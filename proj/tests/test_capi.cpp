#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ffec/ffec.h"

namespace {
std::string take(char* s) {
  std::string r = s ? s : "";
  ffec_string_free(s);
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI on a config written to a fresh directory; returns the exit code.
int run_lab(const std::string& name, const std::string& cfg, const std::string& extra = "") {
  const auto dir = std::filesystem::temp_directory_path() / ("ffec-unit-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "run.cfg") << cfg;
  const std::string cmd = std::string("\"") + FFEC_LAB_PATH + "\" \"" + (dir / "run.cfg").string() + "\" --out \"" +
                          (dir / "out").string() + "\" " + extra + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
std::filesystem::path lab_out(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ffec-unit-" + name) / "out";
}
}  // namespace

TEST_CASE("C API: field and curve handles") {
  ffec_field* F = nullptr;
  REQUIRE(ffec_field_new(7, 1, &F) == FFEC_OK);
  ffec_field_info fi;
  REQUIRE(ffec_field_get_info(F, &fi) == FFEC_OK);
  CHECK(fi.q == 7);
  CHECK(fi.g == 3);
  CHECK(fi.omega == 2);
  CHECK(fi.has_mu3 == 1);

  ffec_curve* Et = nullptr;
  REQUIRE(ffec_curve_new(F, "0", "1,0,1", &Et) == FFEC_OK);
  ffec_curve_info ci;
  REQUIRE(ffec_curve_get_info(Et, &ci) == FFEC_OK);
  CHECK(ci.n_frak == 2);
  CHECK(ci.is_mordell == 1);
  CHECK(ffec_curve_bad_place_count(Et) == 2);
  ffec_place pl;
  REQUIRE(ffec_curve_bad_place(Et, 1, &pl) == FFEC_OK);
  CHECK(std::string(pl.P) == "inf");
  CHECK(pl.type == 2);
  CHECK(ffec_curve_bad_place(Et, 2, &pl) == FFEC_INVALID_ARGUMENT);

  ffec_lpoly* L = nullptr;
  REQUIRE(ffec_lpoly_new(Et, 8, &L) == FFEC_OK);
  ffec_lpoly_info li;
  REQUIRE(ffec_lpoly_get_info(L, &li) == FFEC_OK);
  CHECK(li.degree == 2);
  CHECK(li.rh == 1);
  char* c = nullptr;
  REQUIRE(ffec_lpoly_coeff(L, 1, &c) == FFEC_OK);
  CHECK(take(c) == "-14");
  double re[4], im[4];
  size_t n = 0;
  REQUIRE(ffec_lpoly_zeros(L, re, im, 4, &n) == FFEC_OK);
  CHECK(n == 2);
  CHECK(re[0] == doctest::Approx(1.0 / 7));
  ffec_lpoly_free(L);

  ffec_lpoly* S = nullptr;
  CHECK(ffec_sym_lpoly_new(Et, 2, nullptr, 6, &S) == FFEC_DEGREE_DETECTION_FAILED);
  CHECK(std::string(ffec_last_error()).size() > 0);
  ffec_curve_free(Et);
  ffec_field_free(F);
}

TEST_CASE("C API: error codes") {
  ffec_field* F = nullptr;
  CHECK(ffec_field_new(9, 1, &F) == FFEC_NOT_PRIME);
  CHECK(ffec_field_new(2, 1, &F) == FFEC_FORBIDDEN_CHARACTERISTIC);
  CHECK(F == nullptr);
  REQUIRE(ffec_field_new(11, 1, &F) == FFEC_OK);
  ffec_curve* E = nullptr;
  CHECK(ffec_curve_new(F, "1,x", "1", &E) == FFEC_BAD_POLYNOMIAL_LITERAL);
  CHECK(ffec_curve_new(F, "0", "0", &E) == FFEC_INVALID_ARGUMENT);  // singular
  REQUIRE(ffec_curve_new(F, "0", "1,0,1", &E) == FFEC_OK);
  ffec_family* fam = nullptr;
  CHECK(ffec_cubic_family_new(E, 3, "F", 1, &fam) == FFEC_UNSUPPORTED_FEATURE);
  CHECK(ffec_quad_family_new(E, 2, "sideways", 1, &fam) == FFEC_PARSE_ERROR);
  ffec_policy* pol = nullptr;
  CHECK(ffec_policy_new("Wild", &pol) == FFEC_PARSE_ERROR);
  REQUIRE(ffec_policy_new("UserSupplied", &pol) == FFEC_OK);
  const int64_t f[2] = {1, -7};
  CHECK(ffec_policy_set_factor(pol, "inf", f, 2) == FFEC_OK);
  CHECK(std::string(ffec_policy_kind(pol)) == "UserSupplied");
  ffec_policy_free(pol);
  CHECK(std::string(ffec_status_name(FFEC_EMPTY_FAMILY)) == "EmptyFamily");
  ffec_curve_free(E);
  ffec_field_free(F);
}

TEST_CASE("C API: families") {
  ffec_field* F = nullptr;
  REQUIRE(ffec_field_new(7, 1, &F) == FFEC_OK);
  ffec_curve* E = nullptr;
  REQUIRE(ffec_curve_new(F, "4", "0,0,0,1", &E) == FFEC_OK);
  ffec_family* fam = nullptr;
  REQUIRE(ffec_quad_family_new(E, 2, "all", 2, &fam) == FFEC_OK);
  ffec_family_info info;
  REQUIRE(ffec_family_get_info(fam, &info) == FFEC_OK);
  ffec_size_report sr;
  REQUIRE(ffec_family_size_report(fam, &sr) == FFEC_OK);
  CHECK(sr.exact == info.size);
  CHECK(sr.has_series == 1);
  CHECK(sr.series == sr.exact);
  ffec_member m;
  REQUIRE(ffec_family_member(fam, 0, &m) == FFEC_OK);
  CHECK(m.deg_D == 2);
  CHECK(ffec_family_member(fam, info.size, &m) == FFEC_INVALID_ARGUMENT);
  ffec_trace_avg ta;
  REQUIRE(ffec_trace_average(fam, 2, "both", nullptr, &ta) == FFEC_OK);
  CHECK(ta.has_lpoly == 1);
  CHECK(ta.has_primesum == 1);
  CHECK(std::string(ta.lpoly.num) == ta.primesum.num);
  CHECK(ffec_trace_average(fam, 2, "guess", nullptr, &ta) == FFEC_PARSE_ERROR);
  ffec_test_function tf{FFEC_FEJER, 0.9, 1.0};
  ffec_one_level_report ol;
  REQUIRE(ffec_one_level_density(fam, &tf, 10, 0, 6, nullptr, &ol) == FFEC_OK);
  CHECK(ol.eigen_members == 10);
  CHECK(ol.max_gap < 1e-8);
  ffec_family_free(fam);
  ffec_curve_free(E);
  ffec_field_free(F);
}

TEST_CASE("CLI: dump-lpoly writes the coefficients") {
  REQUIRE(run_lab("dump", "p = 7\nB = \"1,0,1\"\nexperiment = dump-lpoly\n") == 0);
  const std::string csv = slurp(lab_out("dump") / "dump-lpoly.csv");
  CHECK(csv.find("-14") != std::string::npos);
  CHECK(std::filesystem::exists(lab_out("dump") / "manifest.json"));
}

TEST_CASE("CLI: exit codes") {
  CHECK(run_lab("p2", "p = 2\nB = \"1\"\nexperiment = dump-lpoly\n") == 2);
  CHECK(std::filesystem::exists(lab_out("p2") / "error.json"));
  CHECK(run_lab("unknown", "p = 7\nB = \"1\"\nexperiment = dump-lpoly\ncolour = red\n") == 2);
  CHECK(run_lab("dup", "p = 7\np = 7\nB = \"1\"\nexperiment = dump-lpoly\n") == 2);
  CHECK(run_lab("q11", "p = 11\nB = \"1,0,1\"\nexperiment = sizes\nfamily = cubic\nN = 3\n") == 2);
  CHECK(run_lab("notmordell", "p = 7\nA = \"1\"\nB = \"1,0,1\"\nexperiment = sizes\nfamily = cubic\nN = 3\n") == 2);
}

TEST_CASE("CLI: sizes are independent of jobs") {
  const std::string cfg = "p = 7\nB = \"1,0,1\"\nexperiment = sizes\nfamily = cubic\nN = 1..3\n";
  REQUIRE(run_lab("sz1", cfg, "--jobs 1") == 0);
  REQUIRE(run_lab("sz3", cfg, "--jobs 3") == 0);
  CHECK(slurp(lab_out("sz1") / "sizes.csv") == slurp(lab_out("sz3") / "sizes.csv"));
}
