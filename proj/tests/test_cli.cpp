#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#ifndef RINGBIF_CLI
#error "RINGBIF_CLI must name the ringbif executable"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(RINGBIF_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ringbif_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') quoted = !quoted;
      else if (c == ',' && !quoted) {
        row.push_back(cell);
        cell.clear();
      } else cell += c;
    }
    row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

} // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("spectrum --family vortex --n 4 --mu -0.5"), 0);
  EXPECT_EQ(run("spectrum --family nonsense --n 4 --mu 0"), 2);
  EXPECT_EQ(run("spectrum --family vortex --n 4"), 2);
  EXPECT_EQ(run("spectrum --family dnls-cubic --n 2 --mu 1"), 2);
  EXPECT_EQ(run("bifpoints --family alpha --n 5"), 2);
  EXPECT_EQ(run("continue --family vortex --n 4 --k 9"), 2);
  EXPECT_EQ(run("continue --family vortex --n 7 --k 3 --mu 0"), 1);
}

TEST(Cli, MalformedFlagsWriteNothing) {
  const fs::path out = scratch("malformed.json");
  fs::remove(out);
  EXPECT_EQ(run("spectrum --family vortex --n 4 --mu abc -o " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, SpectrumReportsZeroSign) {
  const fs::path out = scratch("spectrum.json");
  ASSERT_EQ(run("spectrum --family vortex --n 4 --mu -0.5 -o " + out.string()), 0);
  const json j = json::parse(slurp(out));
  EXPECT_EQ(j["schema_version"], 1);
  bool found = false;
  for (const auto& b : j["blocks"]) {
    if (b["k"] == 2) {
      EXPECT_EQ(b["sigma"], 0);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Cli, JsonIsByteIdentical) {
  const fs::path a = scratch("a.json"), b = scratch("b.json");
  ASSERT_EQ(run("continue --family vortex --n 6 --k 2 --max-steps 20 -o " + a.string()), 0);
  ASSERT_EQ(run("continue --family vortex --n 6 --k 2 --max-steps 20 -o " + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const json j = json::parse(slurp(a));
  for (const char* key : {"schema_version", "spec", "origin", "points", "termination", "verification"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Cli, CsvAndJsonAgree) {
  const fs::path js = scratch("bif.json"), cs = scratch("bif.csv");
  ASSERT_EQ(run("bifpoints --family body --n 7 -o " + js.string()), 0);
  ASSERT_EQ(run("bifpoints --family body --n 7 --format csv -o " + cs.string()), 0);
  const json j = json::parse(slurp(js));
  const auto rows = parse_csv(slurp(cs));
  ASSERT_EQ(rows.front(), (std::vector<std::string>{"k", "h", "mu", "eta", "provenance", "physical", "note"}));
  ASSERT_EQ(rows.size(), j["points"].size() + 1);
  for (std::size_t i = 0; i < j["points"].size(); ++i) {
    const auto& p = j["points"][i];
    const auto& r = rows[i + 1];
    EXPECT_EQ(std::stoi(r[0]), p["k"].get<int>());
    EXPECT_EQ(std::stoi(r[1]), p["h"].get<int>());
    EXPECT_EQ(std::strtod(r[2].c_str(), nullptr), p["mu"].get<double>());
    EXPECT_EQ(std::stoi(r[3]), p["eta"].get<int>());
    EXPECT_EQ(r[4], p["provenance"].get<std::string>());
    EXPECT_EQ(r[5], p["physical"].get<bool>() ? "true" : "false");
    EXPECT_EQ(r[6], p["note"].get<std::string>());
  }
}

TEST(Cli, BranchCsvMatchesJson) {
  const fs::path js = scratch("br.json"), cs = scratch("br.csv");
  ASSERT_EQ(run("continue --family dnls-cubic --n 6 --k 3 --mu 1 --max-steps 15 -o " + js.string() + " --plot-csv " +
                cs.string()),
            0);
  const json j = json::parse(slurp(js));
  const auto rows = parse_csv(slurp(cs));
  ASSERT_EQ(rows.front(), (std::vector<std::string>{"step", "mu", "norm", "min_distance"}));
  ASSERT_EQ(rows.size(), j["points"].size() + 1);
  for (std::size_t i = 0; i < j["points"].size(); ++i) {
    EXPECT_EQ(std::strtod(rows[i + 1][1].c_str(), nullptr), j["points"][i]["mu"].get<double>());
  }
}

TEST(Cli, ClassifiesBranchFile) {
  const fs::path br = scratch("v4.json"), cl = scratch("v4_class.json");
  ASSERT_EQ(run("continue --family vortex --n 4 --k 2 --max-steps 10 -o " + br.string()), 0);
  ASSERT_EQ(run("classify --input " + br.string() + " --h 2 -o " + cl.string()), 0);
  const json j = json::parse(slurp(cl));
  ASSERT_TRUE(j.is_array());
  for (const auto& c : j) {
    EXPECT_TRUE(c["center_ok"].get<bool>());
    EXPECT_TRUE(c["parity_ok"].get<bool>());
  }
  EXPECT_EQ(run("classify --input " + br.string() + " --h 3"), 2);
}

TEST(Cli, CheckSuite) {
  EXPECT_EQ(run("check --n 2"), 0);
  EXPECT_EQ(run("check --n 5 --perturb-blocks 1e-6"), 1);
}

TEST(Cli, EnvironmentOverrideValidated) {
  EXPECT_EQ(std::system((std::string("RINGBIF_NEWTON_TOL=bogus ") + RINGBIF_CLI +
                         " bifpoints --family vortex --n 4 >/dev/null 2>&1")
                            .c_str()) >> 8,
            2);
}
