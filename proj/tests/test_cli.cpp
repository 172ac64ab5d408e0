#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#ifndef QMCAP_CLI
#error "QMCAP_CLI must name the CLI binary"
#endif

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  auto errf = std::filesystem::temp_directory_path() / "qmcap_cli_err.txt";
  std::string cmd = std::string(QMCAP_CLI) + " " + args + " 2>" + errf.string();
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int status = pclose(p);
  std::ifstream ef(errf);
  std::string err((std::istreambuf_iterator<char>(ef)), {});
  return {WEXITSTATUS(status), out, err};
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST(Cli, SpectrumCsvFormat) {
  auto r = run("spectrum --protocol unbroadened --d 10");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "k,sigma,efficiency");
  EXPECT_EQ(r.out.substr(r.out.find('\n') + 1, 2), "1,");
}

TEST(Cli, InvalidToothCountIsValidationError) {
  auto r = run("spectrum --protocol afc --M 0 --d 20 --finesse 40");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("M >= 1"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_EQ(run("spectrum --protocol unbroadened --d -3").code, 2);
  EXPECT_EQ(run("spectrum --protocol nonsense --d 3").code, 2);
  EXPECT_EQ(run("spectrum --protocol unbroadened --d 3 --bogus").code, 2);
  EXPECT_EQ(run("capacity --protocol unbroadened --d 3 --theta 1.5").code, 2);
}

TEST(Cli, NineHundredDepthSpectrum) {
  auto r = run("spectrum --protocol unbroadened --d 900 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  auto c = run("capacity --protocol unbroadened --d 900");
  ASSERT_EQ(c.code, 0);
  auto pos = c.out.find("\"N\": ");
  int N = std::stoi(c.out.substr(pos + 5));
  EXPECT_GE(N, 8);
  EXPECT_LE(N, 12);
  auto e = r.out.find("\"efficiencies\": [");
  double e1 = std::stod(r.out.substr(r.out.find_first_of("0123456789", e)));
  EXPECT_GT(e1, 0.7);
}

TEST(Cli, HighThresholdGivesZero) {
  auto r = run("capacity --protocol unbroadened --d 5 --theta 0.999999");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"N\": 0"), std::string::npos);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  std::string cache = tmp("qmcap_cli_cache");
  std::filesystem::remove_all(cache);
  auto a = run("capacity --protocol tcrib --d 40 --delta0 70 --grid-nw 201 --cache-dir " + cache);
  auto b = run("capacity --protocol tcrib --d 40 --delta0 70 --grid-nw 201 --cache-dir " + cache);
  auto c = run("capacity --protocol tcrib --d 40 --delta0 70 --grid-nw 201");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(Cli, SweepFitAndPlot) {
  std::string csv = tmp("qmcap_sweep.csv");
  auto s = run("sweep --protocol unbroadened --d 100,225,400 -o " + csv);
  ASSERT_EQ(s.code, 0) << s.err;
  auto f = run("fit --input " + csv + " --model sqrt");
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_NE(f.out.find("\"model\": \"sqrt\""), std::string::npos);
  EXPECT_NE(f.out.find("\"r_squared\""), std::string::npos);
  auto p = run("plot --input " + csv);
  EXPECT_EQ(p.code, 0);
  EXPECT_NE(p.out.find("<svg"), std::string::npos);
  auto v = run("sweep --protocol unbroadened --d-range 50:150:3 --format svg");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("<polyline"), std::string::npos);
  auto j = run("sweep --protocol unbroadened --d-range 50:150:3 --format json");
  EXPECT_NE(j.out.find("\"points\""), std::string::npos);
}

TEST(Cli, FitNeedsThreePoints) {
  std::string csv = tmp("qmcap_one.csv");
  ASSERT_EQ(run("sweep --protocol unbroadened --d 50 -o " + csv).code, 0);
  auto f = run("fit --input " + csv + " --model linear");
  EXPECT_EQ(f.code, 2);
  EXPECT_NE(f.err.find("insufficient points"), std::string::npos);
}

TEST(Cli, MalformedCsvNamesRow) {
  std::string csv = tmp("qmcap_bad.csv");
  std::ofstream(csv) << "d,N\n100,3\n225,5\noops,6\n";
  auto f = run("fit --input " + csv);
  EXPECT_EQ(f.code, 2);
  EXPECT_NE(f.err.find("row 4"), std::string::npos);
}

TEST(Cli, SweepCsvGolden) {
  auto s = run("sweep --protocol unbroadened --d 30,60 --grid-nz 64");
  ASSERT_EQ(s.code, 0);
  std::string golden =
      "protocol,d,delta0,N,lambda1,sigma1,nz,nt,nw,checked,flagged,error\n"
      "unbroadened,30,0,";
  EXPECT_EQ(s.out.substr(0, golden.size()), golden);
  EXPECT_EQ(std::count(s.out.begin(), s.out.end(), '\n'), 3);
}

TEST(Cli, SeedCheckReportsStability) {
  auto r = run("capacity --protocol unbroadened --d 100 --seed-check");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"stable\": true"), std::string::npos);
}
