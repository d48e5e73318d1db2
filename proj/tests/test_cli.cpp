#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(UBA_CHECK_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf;
  while (auto n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch() {
  auto dir = fs::temp_directory_path() / ("uba-check-test-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

std::size_t states_in(const std::string& hoa) { return ubacheck::automata::parse_hoa(hoa).num_states(); }

}  // namespace

TEST_CASE("gen") {
  CHECK(states_in(run("gen complete 5").out) == 193);
  CHECK(states_in(run("gen complete 6").out) == 449);
  auto right = ubacheck::automata::parse_hoa(run("gen fig1-right").out);
  CHECK(right.num_states() == 2);
  CHECK(right.num_transitions() == 4);
  CHECK(run("gen nosuch 2").code == 3);
  CHECK(run("gen complete 0").code == 3);

  auto dir = scratch();
  auto prefix = (dir / "blw").string();
  CHECK(run("gen blw13 -o " + prefix).code == 0);
  CHECK(fs::exists(prefix + ".hoa"));
  CHECK(fs::exists(prefix + ".dtmc"));
  auto both = run("gen blw13").out;
  CHECK(both.find("--END--") != std::string::npos);
  CHECK(both.find("dtmc 4 4") != std::string::npos);
}

TEST_CASE("generated fixtures are unambiguous") {
  for (const char* args : {"complete 3", "nearly-complete 3", "fig1-left 3", "fig1-right", "blw13"}) {
    auto dir = scratch();
    auto path = write(dir / "g.hoa", run(std::string("gen ") + args).out);
    auto r = run("check " + path);
    CHECK(r.code == 0);
    CHECK(r.out == "unambiguous\n");
  }
}

TEST_CASE("measure") {
  auto dir = scratch();
  auto right = write(dir / "right.hoa", run("gen fig1-right").out);
  CHECK(run("gen blw13 -o " + (dir / "blw13").string()).code == 0);
  auto r = run("measure " + right + " --uniform");
  CHECK(r.code == 0);
  CHECK(r.out == "1.000000000000\n");
  r = run("measure " + (dir / "blw13.hoa").string() + " " + (dir / "blw13.dtmc").string());
  CHECK(r.out == "1.000000000000\n");
  CHECK(run("measure " + right + " --uniform --method rank").out == "1.000000000000\n");

  CHECK(run("gen fig1-left 2 -o " + (dir / "left").string()).code == 0);
  r = run("measure " + (dir / "left.hoa").string() + " " + (dir / "left.dtmc").string());
  CHECK(r.out == "0.222222222222\n");

  for (unsigned k = 2; k <= 8; ++k) {
    auto ca = write(dir / "ca.hoa", run("gen complete " + std::to_string(k)).out);
    CHECK(states_in(run("gen complete " + std::to_string(k)).out) == ubacheck::families::benchmark_states(k));
    auto j = nlohmann::json::parse(run("measure " + ca + " --uniform --json").out);
    CHECK(std::abs(j["probability"].get<double>() - 1.0) <= 1e-9);
    std::size_t cut = 0;
    for (const auto& s : j["sccs"]) cut = std::max(cut, s["cut_size"].get<std::size_t>());
    CHECK(cut == (std::size_t{1} << k));
  }
}

TEST_CASE("measure diagnostics") {
  auto dir = scratch();
  auto right = write(dir / "right.hoa", run("gen fig1-right").out);
  auto dot = (dir / "p.dot").string();
  CHECK(run("measure " + right + " --uniform --product-dot " + dot).code == 0);
  std::ifstream in(dot);
  std::string first;
  std::getline(in, first);
  CHECK(first == "digraph product {");

  std::string cmd = std::string(UBA_CHECK_PATH) + " measure " + right + " --uniform --emit-cut 2>&1 >/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string err;
  std::array<char, 4096> buf;
  while (auto n = fread(buf.data(), 1, buf.size(), pipe)) err.append(buf.data(), n);
  pclose(pipe);
  CHECK(err.find("anchor") != std::string::npos);
  CHECK(err.find("members") != std::string::npos);
}

TEST_CASE("exit codes") {
  auto dir = scratch();
  auto ambiguous = write(dir / "amb.hoa", R"(HOA: v1
States: 2
Start: 0
Start: 1
AP: 1 "a"
Acceptance: 1 Inf(0)
--BODY--
State: 0 {0}
[t] 0
State: 1 {0}
[t] 1
--END--
)");
  CHECK(run("measure " + ambiguous + " --uniform").code == 2);
  CHECK(run("measure " + ambiguous + " --uniform --trust-unambiguous").code == 0);
  CHECK(run("check " + ambiguous).code == 2);
  auto broken = write(dir / "broken.hoa", "HOA: v1\nStates: x\n");
  CHECK(run("measure " + broken + " --uniform").code == 3);
  CHECK(run("measure " + (dir / "missing.hoa").string() + " --uniform").code == 3);
  auto right = write(dir / "right.hoa", run("gen fig1-right").out);
  CHECK(run("measure " + right + " --uniform --epsilon 0.5").code == 1);
  CHECK(run("measure " + right + " --uniform --epsilon 0").code == 1);
  CHECK(run("measure " + right + " --uniform --max-iter 0").code == 1);
  CHECK(run("measure " + right).code == 3);
  CHECK(run("frobnicate").code == 1);
}

TEST_CASE("oracle") {
  auto dir = scratch();
  auto right = write(dir / "right.hoa", run("gen fig1-right").out);
  CHECK(run("oracle " + right + " --uniform").out == "1 (= 1.000000000000)\n");
  std::string qa_text = run("gen fig1-right").out;
  auto pos = qa_text.find("Start: 1\n");
  REQUIRE(pos != std::string::npos);
  qa_text.erase(pos, 9);
  auto qa = write(dir / "qa.hoa", qa_text);
  CHECK(run("oracle " + qa + " --uniform").out == "1/2 (= 0.500000000000)\n");
  CHECK(run("gen fig1-left 1 -o " + (dir / "left").string()).code == 0);
  CHECK(run("oracle " + (dir / "left.hoa").string() + " " + (dir / "left.dtmc").string()).code == 1);
}

TEST_CASE("sample") {
  auto dir = scratch();
  CHECK(run("gen fig1-left 1 -o " + (dir / "left").string()).code == 0);
  auto r = run("sample " + (dir / "left.hoa").string() + " " + (dir / "left.dtmc").string() +
               " --samples 20000 --horizon 100 --seed 3");
  CHECK(r.code == 0);
  CHECK(std::abs(std::stod(r.out) - 1.0 / 3.0) < 0.03);
}
