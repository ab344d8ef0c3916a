#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "adcl/driver.hpp"

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ADCL solver for linear constrained Horn clauses"};
  app.require_subcommand(1);

  std::string input, witness_out, log_path, smt_mode = "builtin", smt_cmd = "z3 -in";
  adcl::EngineConfig cfg;
  cfg.timeout_s = 300;
  bool no_restarts = false, no_sat = false;
  auto* solve = app.add_subcommand("solve", "decide satisfiability of a CHC problem");
  solve->add_option("file", input, "SMT-LIB 2 input")->required()->check(CLI::ExistingFile);
  solve->add_option("--timeout", cfg.timeout_s, "wall-clock limit in seconds")->envname("ADCL_TIMEOUT")->check(CLI::NonNegativeNumber);
  solve->add_option("--seed", cfg.seed)->envname("ADCL_SEED");
  solve->add_option("--restart-scale", cfg.restart_scale, "Luby unit u")->envname("ADCL_RESTART_SCALE")->check(CLI::PositiveNumber);
  solve->add_flag("--no-restarts", no_restarts)->envname("ADCL_NO_RESTARTS");
  solve->add_option("--smt", smt_mode)->envname("ADCL_SMT")->check(CLI::IsMember({"builtin", "external"}));
  solve->add_option("--smt-cmd", smt_cmd, "external solver command line")->envname("ADCL_SMT_CMD");
  solve->add_option("--witness", witness_out, "write the refutation witness here")->envname("ADCL_WITNESS");
  solve->add_option("--log", log_path, "JSON lines transition log")->envname("ADCL_LOG");
  solve->add_flag("--no-sat", no_sat, "answer unknown instead of sat")->envname("ADCL_NO_SAT");

  std::string inst_in, inst_out;
  auto* instrument = app.add_subcommand("instrument", "add a resolution step counter to every predicate");
  instrument->add_option("in", inst_in)->required()->check(CLI::ExistingFile);
  instrument->add_option("out", inst_out)->required();

  std::string problem, witness, expand_out;
  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("check-witness", "validate a refutation witness");
  check->add_option("problem", problem)->required()->check(CLI::ExistingFile);
  check->add_option("witness", witness)->required()->check(CLI::ExistingFile);
  check->add_option("--seed", check_seed)->envname("ADCL_SEED");
  auto* expand = app.add_subcommand("expand-witness", "expand learned clauses into ground resolution steps");
  expand->add_option("problem", problem)->required()->check(CLI::ExistingFile);
  expand->add_option("witness", witness)->required()->check(CLI::ExistingFile);
  expand->add_option("out", expand_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      cfg.restarts = !no_restarts;
      cfg.claim_sat = !no_sat;
      if (smt_mode == "external") cfg.smt_cmd = smt_cmd;
      std::ofstream log;
      if (!log_path.empty()) {
        log.open(log_path);
        if (!log) throw std::runtime_error("cannot write " + log_path);
        cfg.log = &log;
      }
      auto out = adcl::solve_text(adcl::read_file(input), cfg);
      std::cout << adcl::answer_name(out.answer) << std::endl;
      if (!out.reason.empty()) std::cerr << out.reason << "\n";
      if (out.answer == adcl::Answer::Unsat && !witness_out.empty()) write_file(witness_out, out.witness);
    } else if (*instrument) {
      write_file(inst_out, adcl::instrument_text(adcl::read_file(inst_in)));
    } else if (*check) {
      auto rep = adcl::check_witness_text(adcl::read_file(problem), adcl::read_file(witness), check_seed);
      if (!rep.ok) {
        std::cout << "invalid: " << rep.reason << std::endl;
        return 1;
      }
      std::cout << "valid (" << rep.ground_steps << " ground steps)" << std::endl;
    } else if (*expand) {
      write_file(expand_out, adcl::expand_witness_text(adcl::read_file(problem), adcl::read_file(witness)));
    }
  } catch (const adcl::Error& e) {
    std::cerr << adcl::error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
