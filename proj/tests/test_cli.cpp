#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "poa/cli.hpp"
#include "poa/instances.hpp"
#include "poa/equilibrium.hpp"
#include "poa/optimum.hpp"

namespace fs = std::filesystem;
using namespace poa;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "poa_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("poa_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, SolvePigouFromFile) {
  TempDir dir;
  const auto file = dir.write("pigou.json", named_instance("pigou").net.to_json().dump(2));
  const auto r = invoke({"solve", "--network", file.string(), "--demand", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["flows"][0], 1.0);
  EXPECT_EQ(j["flows"][1], 0.0);
  EXPECT_EQ(j["lambda"], 1.0);
}

TEST(Cli, OptAndPoa) {
  const auto o = invoke({"opt", "--instance", "pigou", "--demand", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(nlohmann::json::parse(o.out)["cost"], 0.75);
  const auto b = invoke({"opt", "--instance", "step:2", "--demand", "7", "--method", "brute"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_NEAR(nlohmann::json::parse(b.out)["cost"].get<double>(), 25.0, 1e-6);
  const auto p = invoke({"poa", "--instance", "pigou", "--demand", "1"});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_NEAR(nlohmann::json::parse(p.out)["poa"].get<double>(), 4.0 / 3.0, 1e-15);
}

TEST(Cli, SweepIsDeterministicAndFeedsExtremes) {
  TempDir dir;
  const std::vector<std::string> args = {"sweep", "--instance", "step:2", "--from", "4",
                                         "--to", "256", "--per-decade", "128"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "M,weq,opt,poa,method,flag");
  const auto curve = dir.write("curve.csv", a.out);
  const auto e = invoke({"extremes", "--curve", curve.string(), "--period-base", "2"});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto j = nlohmann::json::parse(e.out);
  EXPECT_NEAR(j["limsup"].get<double>(), 1.2, 1e-3);
  EXPECT_NEAR(j["liminf"].get<double>(), 1.0, 1e-9);
}

TEST(Cli, SweepJsonAndLogDomain) {
  const auto j = invoke({"sweep", "--instance", "pigou", "--from", "1", "--to", "10",
                         "--per-decade", "4", "--format", "json"});
  ASSERT_EQ(j.code, 0) << j.err;
  EXPECT_TRUE(nlohmann::json::parse(j.out).is_object() || nlohmann::json::parse(j.out).is_array());
  const auto l = invoke({"sweep", "--instance", "exp:factorial", "--from", "10", "--to", "1e6",
                         "--per-decade", "4"});
  ASSERT_EQ(l.code, 0) << l.err;
  EXPECT_EQ(l.out.substr(0, l.out.find('\n')), "M,log_weq,log_opt,poa,method,flag");
}

TEST(Cli, RoundTripNetwork) {
  TempDir dir;
  for (const char* name : {"pigou", "step:3", "pwl:2", "exp:factorial"}) {
    const auto inst = named_instance(name);
    const auto file = dir.write("net.json", inst.net.to_json().dump());
    const auto back = load_network_file(file.string());
    EXPECT_EQ(back.to_json(), inst.net.to_json()) << name;
    if (std::string(name) != "exp:factorial") {
      for (double M : {0.3, 1.0, 7.5, 40.0}) {
        EXPECT_EQ(wardrop(back, M).cost, wardrop(inst.net, M).cost) << name;
        EXPECT_EQ(optimum(back, M).cost, optimum(inst.net, M).cost) << name;
      }
    }
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({"sweep", "--instance", "pigou", "--from", "10", "--to", "1"}).code, cli::kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(invoke({"solve", "--demand", "1"}).code, cli::kUsage);
  EXPECT_EQ(invoke({"solve", "--instance", "nope", "--demand", "1"}).code, cli::kInput);
  EXPECT_EQ(invoke({"solve", "--instance", "pigou", "--demand", "-1"}).code, cli::kUsage);
  EXPECT_EQ(invoke({"solve", "--network", "/nonexistent/net.json", "--demand", "1"}).code, cli::kInput);
  // Past the last representable alpha breakpoint.
  EXPECT_EQ(invoke({"solve", "--instance", "exp:factorial", "--demand", "1e308", "--log-domain"}).code,
            cli::kNumeric);
  EXPECT_EQ(invoke({"--help"}).code, cli::kOk);
}

TEST(Cli, MalformedJsonReportsPosition) {
  TempDir dir;
  const auto file = dir.write("bad.json", "{\n  \"nodes\": [\"s\", \"t\"],\n  \"edges\": [ oops ]\n}\n");
  const auto r = invoke({"solve", "--network", file.string(), "--demand", "1"});
  EXPECT_EQ(r.code, cli::kInput);
  // file:line:column of the offending token
  EXPECT_NE(r.err.find("bad.json:3:14"), std::string::npos) << r.err;
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  TempDir dir;
  ::setenv("POA_OUTPUT_DIR", dir.path().c_str(), 1);
  const auto r = invoke({"poa", "--instance", "pigou", "--demand", "1", "--out", "poa.json"});
  ::unsetenv("POA_OUTPUT_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto j = nlohmann::json::parse(slurp(dir.path() / "poa.json"));
  EXPECT_NEAR(j["poa"].get<double>(), 4.0 / 3.0, 1e-15);
}

TEST(Cli, ReproAndRv) {
  const auto r = invoke({"repro", "thm5", "--a", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  const auto rv = invoke({"rv", "--cost", R"({"family":"monomial","coef":1,"degree":2})"});
  ASSERT_EQ(rv.code, 0) << rv.err;
  EXPECT_FALSE(rv.out.empty());
}
