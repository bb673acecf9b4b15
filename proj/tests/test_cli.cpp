#include "summon/task_io.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

// Runs the summon binary through the shell; stderr is discarded unless `env`
// or `args` redirect it themselves.
Result summon_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + SUMMON_BIN + "\" " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string scenario(const std::string& name) {
  return "\"" + (fs::path(SUMMON_SOURCE_DIR) / "scenarios" / (name + ".json")).string() + "\"";
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "summon_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("check exit codes") {
  const auto g1 = summon_cli("check " + scenario("g1"));
  CHECK(g1.code == 0);
  const auto j = summon::Json::parse(g1.out);
  CHECK(j["verdict"]["possible"] == true);
  for (const auto& s : j["screens"]) CHECK(s["passed"] == true);

  const auto ns = summon_cli("check " + scenario("no_summoning"));
  CHECK(ns.code == 0);
  const auto nj = summon::Json::parse(ns.out);
  CHECK(nj["verdict"]["possible"] == true);
  CHECK(nj["variant"]["inputs"] == "constrained");
  CHECK(nj["note"].get<std::string>().find("constrained") != std::string::npos);

  const auto bad = scratch("bad.json");
  std::ofstream(bad) << "{\"dimension\": 1,";
  CHECK(summon_cli("check \"" + bad.string() + "\"").code == 2);
  CHECK(summon_cli("check /nonexistent/task.json").code == 2);
  CHECK(summon_cli("validate " + scenario("t3")).code == 0);
}

TEST_CASE("check reports impossibility with exit 3") {
  // G1 geometry with Q_1 only half a unit after the inputs: it cannot learn m_2.
  const auto path = scratch("impossible.json");
  auto task = summon::task_from_json(summon::Json::parse(slurp(fs::path(SUMMON_SOURCE_DIR) / "scenarios" / "g1.json")));
  task.returns[0] = summon::point_from_json(summon::Json::parse(R"({"t": "3/2", "x": [-1]})"), "test");
  std::ofstream(path) << summon::dump_task(task);
  const auto r = summon_cli("check \"" + path.string() + "\"");
  CHECK(r.code == 3);
  CHECK(summon::Json::parse(r.out)["verdict"]["possible"] == false);
  CHECK(summon_cli("run \"" + path.string() + "\" --exhaustive").code == 4);
}

TEST_CASE("run: refusal, exhaustive, classical modes") {
  const auto ns = summon_cli("run " + scenario("no_summoning") + " --exhaustive");
  CHECK(ns.code == 4);
  const auto nj = summon::Json::parse(ns.out);
  CHECK(nj["refused"] == true);
  CHECK(nj["reason"].get<std::string>().find("S_12") != std::string::npos);
  CHECK(summon_cli("run " + scenario("hayden_may") + " --exhaustive").code == 4);

  const auto g1 = summon_cli("run " + scenario("g1") + " --exhaustive --seed 5");
  REQUIRE(g1.code == 0);
  const auto j = summon::Json::parse(g1.out);
  CHECK(j["rows"] == 4);
  CHECK(j["mismatches"] == 0);
  CHECK(j["min_fidelity"].get<double>() >= 1.0 - 1e-9);

  const auto one = summon_cli("run " + scenario("g1") + " --assignment 0,1");
  CHECK(one.code == 0);
  CHECK(summon::Json::parse(one.out)["table"][0]["returned"] == 2);
  CHECK(summon_cli("run " + scenario("g1") + " --assignment 0,7").code == 2);

  const auto sim = summon_cli("run " + scenario("g1") + " --exhaustive --classical simulate");
  CHECK(sim.code == 0);
  const auto token = summon_cli("run " + scenario("no_summoning") + " --exhaustive --classical token");
  CHECK(token.code == 0);
  CHECK(summon_cli("run " + scenario("g1") + " --exhaustive --classical bogus").code == 2);
}

TEST_CASE("run writes a JSON-lines trace") {
  const auto path = scratch("trace.jsonl");
  fs::remove(path);
  REQUIRE(summon_cli("run " + scenario("t3") + " --assignment 1,2 --trace \"" + path.string() + "\"").code == 0);
  std::ifstream in(path);
  std::string line;
  std::size_t lines = 0;
  std::size_t reconstruct = 0;
  while (std::getline(in, line)) {
    const auto e = summon::Json::parse(line);
    CHECK(e["seq"] == lines);
    if (e["kind"] == "reconstruct") ++reconstruct;
    ++lines;
  }
  CHECK(lines > 0);
  CHECK(reconstruct == 1);
}

TEST_CASE("gen is deterministic and matches the checked-in files") {
  const auto a = summon_cli("gen random_possible --seed 7");
  const auto b = summon_cli("gen random_possible --seed 7");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == slurp(fs::path(SUMMON_SOURCE_DIR) / "scenarios" / "random_possible.json"));
  CHECK(summon_cli("gen random_possible", "SUMMON_SEED=7").out == a.out);
  CHECK(summon_cli("gen random_possible --seed 8").out != a.out);
  CHECK(summon_cli("gen nonsense").code == 2);

  const auto path = scratch("t3.json");
  REQUIRE(summon_cli("gen t3 --out \"" + path.string() + "\"").code == 0);
  CHECK(summon_cli("check \"" + path.string() + "\"").code == 0);
}

TEST_CASE("reports are byte-identical for a seed, whatever the job count") {
  const std::string base = "run " + scenario("t3") + " --exhaustive --seed 21";
  const auto one = summon_cli(base + " --jobs 1");
  const auto four = summon_cli(base + " --jobs 4");
  const auto env = summon_cli("run " + scenario("t3") + " --exhaustive --jobs 2", "SUMMON_SEED=21");
  CHECK(one.code == 0);
  CHECK(one.out == four.out);
  CHECK(one.out == env.out);
  CHECK(one.out != summon_cli("run " + scenario("t3") + " --exhaustive --seed 22").out);
}

TEST_CASE("synth and demo") {
  const auto synth = summon_cli("synth " + scenario("t3"));
  CHECK(synth.code == 0);
  CHECK(summon::Json::parse(synth.out)["scheme"]["construction"] == "qutrit-2-of-3");
  CHECK(summon_cli("synth " + scenario("no_summoning")).code == 4);
  CHECK(summon_cli("demo").code == 0);
  CHECK(summon_cli("").code != 0);
}
