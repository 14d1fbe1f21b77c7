// bisons: command line harness.
//
//   bisons run --algo bisons --d 3 --T 1000 --adversary iid-dirichlet --seed 1 --out runs/a
//   bisons adversary gen-lbftrl --d 3 --T 10000 --alpha 0.5 --out plan.txt
//   bisons adversary gen --name single-asset-crash --d 2 --T 1000 --seed 4 --out crash.csv
//   bisons check --suite lemmas
//   bisons best-crp --data returns.csv

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "bisons/adversary.hpp"
#include "bisons/comparators.hpp"
#include "bisons/config.hpp"
#include "bisons/data_io.hpp"
#include "bisons/error.hpp"
#include "bisons/lbftrl.hpp"
#include "bisons_acceptance/acceptance.hpp"
#include "bisons_tools/experiment.hpp"

namespace {

using namespace bisons;

// Exit statuses for library errors.
int exit_code(Errc c) {
  switch (c) {
    case Errc::kParse:
    case Errc::kIo:
    case Errc::kInvalidReturns:
      return 3;
    case Errc::kInvalidArgument:
    case Errc::kParameter:
    case Errc::kDimensionMismatch:
      return 4;
    default:
      return 5;
  }
}

struct RunArgs {
  std::string config_path;
  std::optional<std::string> algo, adversary, data, out;
  std::optional<int> d;
  std::optional<long long> T;
  std::optional<long long> seed;
  std::vector<std::string> sets;
};

int do_run(const RunArgs& a) {
  Config cfg = a.config_path.empty() ? Config{} : Config::load(a.config_path);
  for (const std::string& s : a.sets) cfg.assign(s);
  if (a.algo) cfg.set("algo", *a.algo);
  if (a.d) cfg.set("d", std::to_string(*a.d));
  if (a.T) cfg.set("T", std::to_string(*a.T));
  if (a.seed) cfg.set("seed", std::to_string(*a.seed));
  if (a.adversary) cfg.set("adversary", *a.adversary);
  if (a.data) cfg.set("data", *a.data);
  if (a.out) cfg.set("out", *a.out);
  const tools::ExperimentConfig e = tools::experiment_from_config(cfg);
  require(!e.out_dir.empty(), Errc::kInvalidArgument, "--out is required");
  const tools::ExperimentResult res = tools::run_experiment(e);
  tools::write_experiment(res, e.out_dir);
  std::cout << "rounds " << res.trace.size() << ", final regret "
            << format_double(res.summary["final_regret"].get<double>()) << ", written to "
            << e.out_dir << '\n';
  return 0;
}

int do_gen_lbftrl(int d, long long T, double alpha, const std::string& out) {
  const AdversaryPlan plan = make_plan(d, T, alpha);
  std::ofstream f(out, std::ios::binary);
  require(static_cast<bool>(f), Errc::kIo, "cannot open " + out + " for writing");
  write_plan(f, plan);
  std::cout << plan.targets.size() << " target pairs, " << plan.layer_count << " layers, "
            << plan.repetitions << " repetitions per layer";
  if (alpha != 0.125) std::cout << " (alpha " << alpha << " differs from the default 1/8)";
  std::cout << '\n';
  return 0;
}

int do_gen(const AdversarySpec& spec, const std::string& out) {
  if (is_measurement_adversary(spec.name)) {
    save_measurements(out, measurement_sequence(spec));
  } else {
    require(is_returns_adversary(spec.name), Errc::kInvalidArgument,
            "unknown adversary '" + spec.name + "'");
    save_returns(out, adversary_sequence(spec));
  }
  return 0;
}

int do_check(const std::string& suite) {
  acceptance::Session session;
  bool all = true;
  for (int id : acceptance::suite_criteria(suite)) {
    const acceptance::CriterionResult& r = session.run(id);
    std::cout << acceptance::format_result(r) << std::endl;
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

int do_best_crp(const std::string& path, double tol) {
  const CrpResult r = best_crp(load_returns(path), tol);
  std::cout << "portfolio = ";
  for (int i = 0; i < r.portfolio.dim(); ++i) {
    std::cout << (i ? "," : "") << format_double(r.portfolio[i]);
  }
  std::cout << "\nloss = " << format_double(r.loss) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online portfolio selection and quantum state learning with BISONS"};
  app.require_subcommand(1);

  RunArgs ra;
  CLI::App* run = app.add_subcommand("run", "Play an algorithm over a data file or adversary");
  run->add_option("--config", ra.config_path, "Flat key = value file")->check(CLI::ExistingFile);
  run->add_option("--algo", ra.algo, "bisons, qbisons, lbftrl or ons");
  run->add_option("--d", ra.d, "Dimension");
  run->add_option("--T", ra.T, "Horizon");
  auto* data_opt = run->add_option("--data", ra.data, "Returns or measurement file");
  auto* adv_opt = run->add_option("--adversary", ra.adversary,
                                  "iid-dirichlet, single-asset-crash, alternating-basis, "
                                  "random-measurement or lbftrl-bad");
  data_opt->excludes(adv_opt);
  run->add_option("--seed", ra.seed, "Root seed");
  run->add_option("--set", ra.sets, "Parameter override key=value (repeatable)");
  run->add_option("--out", ra.out, "Output directory");

  CLI::App* adv = app.add_subcommand("adversary", "Generate adversarial inputs");
  adv->require_subcommand(1);
  int gd = 2;
  long long gT = 0;
  double galpha = 0.125;
  std::string gout;
  CLI::App* gl = adv->add_subcommand("gen-lbftrl", "Write the LB-FTRL target/outcome plan");
  gl->add_option("--d", gd, "Dimension")->required();
  gl->add_option("--T", gT, "Horizon")->required();
  gl->add_option("--alpha", galpha, "Layer exponent (default 1/8)");
  gl->add_option("--out", gout, "Output file")->required();

  AdversarySpec gspec;
  long long gseed = 0;
  std::string gout2;
  CLI::App* gg = adv->add_subcommand("gen", "Write a built-in adversary stream to a file");
  gg->add_option("--name", gspec.name, "Adversary name")->required();
  gg->add_option("--d", gspec.d, "Dimension")->required();
  gg->add_option("--T", gspec.T, "Rounds")->required();
  gg->add_option("--seed", gseed, "Root seed");
  gg->add_option("--crash-fraction", gspec.crash_fraction, "single-asset-crash switch point");
  gg->add_option("--out", gout2, "Output file")->required();

  std::string suite;
  CLI::App* check = app.add_subcommand("check", "Run an acceptance suite");
  check->add_option("--suite", suite, "lemmas, bisons, qbisons, lbftrl or all")->required();

  std::string crp_path;
  double crp_tol = 1e-10;
  CLI::App* crp = app.add_subcommand("best-crp", "Best constant rebalanced portfolio of a file");
  crp->add_option("--data", crp_path, "Returns file")->required();
  crp->add_option("--tol", crp_tol, "Solver tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(ra);
    if (gl->parsed()) return do_gen_lbftrl(gd, gT, galpha, gout);
    if (gg->parsed()) {
      gspec.seed = static_cast<std::uint64_t>(gseed);
      return do_gen(gspec, gout2);
    }
    if (check->parsed()) return do_check(suite);
    if (crp->parsed()) return do_best_crp(crp_path, crp_tol);
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 5;
  }
  return 0;
}
