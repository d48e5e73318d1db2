// uba-check: measure, check and generate unambiguous Büchi automata.
//
// Exit codes: 0 success, 1 usage or precondition failure, 2 ambiguous
// automaton, 3 parse/IO/validation error, 4 numeric failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ubacheck/engine.hpp"
#include "ubacheck/families.hpp"

using namespace ubacheck;

namespace {

enum Exit { kOk = 0, kUsage = 1, kAmbiguous = 2, kInput = 3, kNumeric = 4 };

struct InputArgs {
  std::string hoa;
  std::string dtmc;
  bool uniform = false;
};

void add_input(CLI::App* cmd, InputArgs& in) {
  cmd->add_option("automaton", in.hoa, "HOA file ('-' for stdin)")->required();
  cmd->add_option("chain", in.dtmc, "Markov chain file");
  cmd->add_flag("--uniform", in.uniform, "measure against the uniform distribution on the alphabet");
}

automata::Nba load_nba(const std::string& path) {
  if (path == "-") return automata::parse_hoa(std::cin);
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open '" + path + "'");
  try {
    return automata::parse_hoa(f);
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + e.what());
  }
}

markov::Dtmc load_chain(const InputArgs& in, const automata::Nba& nba) {
  if (in.uniform) {
    if (!in.dtmc.empty()) throw ValidationError("give either a chain file or --uniform, not both");
    return markov::uniform_chain(nba.alphabet());
  }
  if (in.dtmc.empty()) throw ValidationError("missing chain file (or --uniform)");
  std::ifstream f(in.dtmc);
  if (!f) throw ValidationError("cannot open '" + in.dtmc + "'");
  try {
    return markov::parse_dtmc(f);
  } catch (const ParseError& e) {
    throw ParseError(in.dtmc + ":" + e.what());
  }
}

std::string fixed12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

void emit_cut(const engine::MeasureResult& r, const markov::Dtmc& dtmc, const automata::Nba& nba) {
  auto node = [&](NodeId n) {
    const auto& [s, q] = r.product.node(n);
    return "<" + dtmc.state_name(s) + "," + nba.state_name(q) + ">";
  };
  for (const auto& cc : r.cuts) {
    std::cerr << "cut in component " << cc.component << (cc.cut.shortcut ? " (separated shortcut)" : "") << "\n";
    std::cerr << "  anchor  " << node(cc.cut.anchor) << "\n  word   ";
    if (cc.cut.word.empty()) std::cerr << " ε";
    for (auto t : cc.cut.word) std::cerr << ' ' << dtmc.state_name(t);
    std::cerr << "\n  members";
    for (auto n : cc.cut.members) std::cerr << ' ' << node(n);
    std::cerr << "\n";
  }
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("uba-check");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("UBA_CHECK_LOG")) spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Probabilistic model checking of Markov chains against unambiguous Büchi automata"};
  app.require_subcommand(1);

  InputArgs in;
  engine::MeasureOptions opts;
  std::string method = "power";
  bool emit_cuts = false, json = false, no_shortcuts = false;
  std::string dot_path;

  auto* measure = app.add_subcommand("measure", "compute Pr(L(U)) for a chain and a UBA");
  add_input(measure, in);
  measure->add_option("--method", method, "positivity method")->check(CLI::IsMember({"power", "rank"}));
  measure->add_option("--epsilon", opts.epsilon, "power-iteration threshold")
      ->check([](const std::string& s) { return std::stod(s) > 0 && std::stod(s) < 1e-2 ? "" : "must be in (0, 0.01)"; });
  measure->add_option("--max-iter", opts.max_iter, "power-iteration limit")->check(CLI::PositiveNumber);
  measure->add_option("--rank-tol", opts.rank_tol, "pivot tolerance of the rank test")->check(CLI::PositiveNumber);
  measure->add_flag("--trust-unambiguous", opts.trust_unambiguous, "skip the unambiguity check");
  measure->add_option("--workers", opts.workers, "threads for independent components")->check(CLI::PositiveNumber);
  measure->add_flag("--emit-cut", emit_cuts, "print generated cuts to stderr");
  measure->add_flag("--json", json, "print a JSON report instead of the bare probability");
  measure->add_option("--product-dot", dot_path, "write the product graph in DOT format");
  measure->add_flag("--no-shortcuts", no_shortcuts, "disable the co-safety and separated-automaton fast paths");

  std::string family;
  unsigned k = 1;
  std::string out_prefix;
  auto* gen = app.add_subcommand("gen", "print a benchmark automaton as HOA");
  gen->add_option("family", family, "complete, nearly-complete, fig1-left, fig1-right or blw13")->required();
  gen->add_option("k", k, "family parameter");
  gen->add_option("-o,--output", out_prefix, "write <prefix>.hoa and, if the family has one, <prefix>.dtmc");

  auto* oracle = app.add_subcommand("oracle", "powerset-absorption probability for strongly connected inputs");
  add_input(oracle, in);

  auto* check = app.add_subcommand("check", "verify that an automaton is unambiguous");
  check->add_option("automaton", in.hoa, "HOA file ('-' for stdin)")->required();

  std::size_t samples = 100000, horizon = 1000;
  std::uint64_t seed = 1;
  auto* sample = app.add_subcommand("sample", "Monte-Carlo estimate of the non-blocking probability");
  add_input(sample, in);
  sample->add_option("--samples", samples, "number of paths")->check(CLI::PositiveNumber);
  sample->add_option("--horizon", horizon, "path length");
  sample->add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*measure) {
      opts.method = engine::parse_method(method);
      opts.shortcuts = !no_shortcuts;
      auto nba = load_nba(in.hoa);
      auto dtmc = load_chain(in, nba);
      opts.uniform = in.uniform;
      auto r = engine::measure(dtmc, nba, opts);
      if (!dot_path.empty()) {
        std::ofstream f(dot_path);
        if (!f) throw ValidationError("cannot write '" + dot_path + "'");
        product::write_dot(r.product, dtmc, nba, f);
      }
      if (emit_cuts) emit_cut(r, dtmc, nba);
      if (json) {
        std::cout << engine::report_json(r) << "\n";
      } else {
        std::cout << fixed12(r.probability) << "\n";
      }
    } else if (*gen) {
      auto fam = families::generate(family, k);
      if (out_prefix.empty()) {
        automata::write_hoa(fam.nba, std::cout);
        if (fam.dtmc) markov::write_dtmc(*fam.dtmc, std::cout);
      } else {
        std::ofstream hoa(out_prefix + ".hoa");
        if (!hoa) throw ValidationError("cannot write '" + out_prefix + ".hoa'");
        automata::write_hoa(fam.nba, hoa);
        if (fam.dtmc) {
          std::ofstream dtmc(out_prefix + ".dtmc");
          if (!dtmc) throw ValidationError("cannot write '" + out_prefix + ".dtmc'");
          markov::write_dtmc(*fam.dtmc, dtmc);
        }
      }
    } else if (*oracle) {
      auto nba = load_nba(in.hoa);
      auto dtmc = load_chain(in, nba);
      auto res = engine::powerset_absorption_oracle(nba, dtmc);
      if (res.exact) {
        std::cout << res.exact->get_str() << " (= " << fixed12(res.value) << ")\n";
      } else {
        std::cout << fixed12(res.value) << "\n";
      }
    } else if (*check) {
      auto nba = load_nba(in.hoa);
      auto report = automata::verify_unambiguous(nba);
      if (!report.unambiguous) {
        std::cout << "ambiguous\n";
        std::cerr << automata::describe(nba, *report.witness);
        return kAmbiguous;
      }
      std::cout << "unambiguous\n";
    } else if (*sample) {
      auto nba = load_nba(in.hoa);
      auto dtmc = load_chain(in, nba);
      auto res = engine::sample_alive(nba, dtmc, samples, horizon, seed);
      std::cout << fixed12(res.estimate) << " +- " << fixed12(res.std_error) << "\n";
    }
  } catch (const engine::AmbiguityError& e) {
    std::cerr << "error: " << e.what();
    return kAmbiguous;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInput;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInput;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}
