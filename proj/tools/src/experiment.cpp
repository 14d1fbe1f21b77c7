#include "bisons_tools/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

#include "bisons/adversary.hpp"
#include "bisons/bisons.hpp"
#include "bisons/comparators.hpp"
#include "bisons/data_io.hpp"
#include "bisons/error.hpp"
#include "bisons/lbftrl.hpp"
#include "bisons/qbisons.hpp"

namespace bisons::tools {

using nlohmann::json;

namespace {

const std::set<std::string> kRunKeys = {"algo", "d", "T", "seed", "adversary", "data", "out"};

std::set<std::string> allowed_overrides(const std::string& algo) {
  std::set<std::string> keys = {"tol", "comparator_tol", "pad", "crash_fraction"};
  if (algo == "bisons" || algo == "qbisons") keys.insert({"B", "eta", "beta", "monitor"});
  if (algo == "lbftrl") keys.insert({"eta", "alpha"});
  if (algo == "ons") keys.insert({"eta_ons", "epsilon", "mixing"});
  return keys;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_json(const HermitianMatrix& m) {
  // rows of [re, im] pairs
  json rows = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.dim(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

std::string source_label(const ExperimentConfig& cfg) {
  return cfg.data_path.empty() ? "adversary:" + cfg.adversary : "data:" + cfg.data_path;
}

AdversarySpec adversary_spec(const ExperimentConfig& cfg) {
  AdversarySpec spec;
  spec.name = cfg.adversary;
  spec.d = cfg.d;
  spec.T = cfg.T;
  spec.seed = cfg.seed;
  spec.crash_fraction = cfg.params.get_double("crash_fraction", 0.5);
  return spec;
}

// Applies the horizon: longer inputs are rejected, shorter ones are padded
// only when asked to.
template <typename T, typename Pad>
void fit_to_horizon(std::vector<T>& items, const ExperimentConfig& cfg, Pad pad) {
  const auto n = static_cast<long long>(items.size());
  require(n <= cfg.T, Errc::kInvalidArgument,
          "input has " + std::to_string(n) + " rounds, more than T = " + std::to_string(cfg.T));
  require(n > 0, Errc::kInvalidArgument, "input has no rounds");
  if (cfg.params.get_bool("pad", false)) {
    while (static_cast<long long>(items.size()) < cfg.T) items.push_back(pad());
  }
}

std::vector<ReturnsVec> returns_stream(const ExperimentConfig& cfg) {
  std::vector<ReturnsVec> rs;
  if (!cfg.data_path.empty()) {
    rs = load_returns(cfg.data_path);
    for (const ReturnsVec& r : rs) {
      require(r.dim() == cfg.d, Errc::kDimensionMismatch,
              "data has " + std::to_string(r.dim()) + " columns but d = " + std::to_string(cfg.d));
    }
  } else {
    rs = adversary_sequence(adversary_spec(cfg));
  }
  fit_to_horizon(rs, cfg, [&] { return normalize_returns(Vec::Constant(cfg.d, 1.0)); });
  return rs;
}

void finish_trace(ExperimentResult& res) {
  double cum = 0.0, comp = 0.0;
  for (TraceRow& row : res.trace) {
    cum += row.loss;
    comp += row.comparator_cum_loss;  // holds the per-round comparator loss until here
    row.cum_loss = cum;
    row.comparator_cum_loss = comp;
    row.regret = cum - comp;
  }
  json& s = res.summary;
  s["rounds"] = res.trace.size();
  s["cum_loss"] = res.trace.empty() ? 0.0 : res.trace.back().cum_loss;
  s["comparator_cum_loss"] = res.trace.empty() ? 0.0 : res.trace.back().comparator_cum_loss;
  s["final_regret"] = res.trace.empty() ? 0.0 : res.trace.back().regret;
}

json bisons_params_json(double B, double eta, double beta) {
  return json{{"B", B}, {"eta", eta}, {"beta", beta}};
}

void run_bisons_experiment(const ExperimentConfig& cfg, ExperimentResult& res) {
  BisonsParams p = default_params(cfg.d, cfg.T);
  p.B = cfg.params.get_double("B", p.B);
  p.eta = cfg.params.get_double("eta", p.eta);
  p.beta = cfg.params.get_double("beta", p.beta);
  validate_params(p);
  const double tol = cfg.params.get_double("tol", default_tolerance(cfg.T));
  const std::vector<ReturnsVec> rs = returns_stream(cfg);

  const bool monitor_on = cfg.params.get_bool("monitor", true);
  BisonsMonitor monitor(p);
  BisonsObserver obs;
  if (monitor_on) obs = [&](const RoundRecord& r, const BisonsRoundDetail& dt) { monitor.observe(r, dt); };
  const BisonsTrajectory traj = run_bisons(rs, p, tol, obs);
  if (monitor_on) monitor.finish();

  const CrpResult crp = best_crp(rs, cfg.params.get_double("comparator_tol", 1e-10));
  for (std::size_t i = 0; i < traj.rounds.size(); ++i) {
    const RoundRecord& r = traj.rounds[i];
    res.trace.push_back({r.t, r.epoch, r.tau, r.loss, 0.0, log_loss(crp.portfolio, rs[i]), 0.0,
                         r.reset_triggered});
  }
  json& s = res.summary;
  s["params"] = bisons_params_json(p.B, p.eta, p.beta);
  s["tolerance"] = tol;
  s["comparator"] = vec_json(crp.portfolio.weights());
  s["reset_times"] = traj.reset_times;
  s["completed_epochs"] = traj.completed_epochs;
  const double lt = std::log(static_cast<double>(cfg.T));
  s["regret_bound"] = 740.0 * cfg.d * cfg.d * lt * lt;
  if (monitor_on) {
    s["monitor"] = json{{"stability", monitor.stability_violations},
                        {"bias_growth", monitor.bias_growth_violations},
                        {"doubling", monitor.doubling_violations},
                        {"range", monitor.range_violations},
                        {"dominance", monitor.dominance_violations},
                        {"cost", monitor.cost_violations},
                        {"total", monitor.total_violations()}};
  }
}

void run_qbisons_experiment(const ExperimentConfig& cfg, ExperimentResult& res) {
  QBisonsParams p = q_default_params(cfg.d, cfg.T);
  p.B = cfg.params.get_double("B", p.B);
  p.eta = cfg.params.get_double("eta", p.eta);
  p.beta = cfg.params.get_double("beta", p.beta);
  q_validate_params(p);
  const double tol = cfg.params.get_double("tol", default_tolerance(cfg.T));

  const bool monitor_on = cfg.params.get_bool("monitor", true);
  QBisonsMonitor monitor(p);
  QBisonsObserver obs;
  if (monitor_on) obs = [&](const QRoundRecord& r, const QBisonsRoundDetail& dt) { monitor.observe(r, dt); };

  QBisonsTrajectory traj;
  const bool returns_source = cfg.data_path.empty() && is_returns_adversary(cfg.adversary);
  if (returns_source) {
    // Diagonal embedding of a returns stream.
    std::vector<HermitianMatrix> ms;
    for (const ReturnsVec& r : returns_stream(cfg)) ms.push_back(HermitianMatrix::diagonal(r.values()));
    traj = run_qbisons(std::span<const HermitianMatrix>(ms), p, tol, obs);
  } else {
    std::vector<MeasurementEvent> evs;
    if (!cfg.data_path.empty()) {
      evs = load_measurements(cfg.data_path);
      for (const MeasurementEvent& e : evs) {
        require(e.effect.dim() == cfg.d, Errc::kDimensionMismatch,
                "measurement dimension differs from d = " + std::to_string(cfg.d));
      }
    } else {
      evs = measurement_sequence(adversary_spec(cfg));
    }
    fit_to_horizon(evs, cfg, [&] {
      return MeasurementEvent(HermitianMatrix::identity(cfg.d) * 0.5, 1.0);
    });
    traj = run_qbisons(std::span<const MeasurementEvent>(evs), p, cfg.seed, tol, obs);
  }

  const QuantumComparatorResult best =
      best_quantum_state(traj.losses, cfg.params.get_double("comparator_tol", 1e-10));
  for (std::size_t i = 0; i < traj.rounds.size(); ++i) {
    const QRoundRecord& r = traj.rounds[i];
    const double comp = -std::log(trace_inner(best.state.matrix(), traj.losses[i]));
    res.trace.push_back({r.t, r.epoch, r.tau, r.loss, 0.0, comp, 0.0, r.reset_triggered});
  }
  json& s = res.summary;
  s["params"] = bisons_params_json(p.B, p.eta, p.beta);
  s["tolerance"] = tol;
  s["comparator"] = matrix_json(best.state.matrix());
  s["reset_times"] = traj.reset_times;
  s["completed_epochs"] = traj.completed_epochs;
  const double lt = std::log(static_cast<double>(cfg.T));
  s["regret_bound"] = 740.0 * cfg.d * cfg.d * cfg.d * lt * lt;
  if (monitor_on) {
    s["monitor"] = json{{"stability", monitor.stability_violations},
                        {"bias_growth", monitor.bias_growth_violations},
                        {"doubling", monitor.doubling_violations},
                        {"range", monitor.range_violations},
                        {"dominance", monitor.dominance_violations},
                        {"increment", monitor.increment_violations},
                        {"comparator", monitor.comparator_violations},
                        {"total", monitor.total_violations()}};
  }
}

const char* kind_name(ReturnKind k) {
  switch (k) {
    case ReturnKind::kMovement: return "movement";
    case ReturnKind::kOutcome: return "outcome";
    case ReturnKind::kExternal: return "external";
  }
  return "external";
}

void run_lbftrl_experiment(const ExperimentConfig& cfg, ExperimentResult& res) {
  const double eta = cfg.params.get_double("eta", 1.0);
  require(eta > 0.0, Errc::kParameter, "eta must be positive");
  const double tol = cfg.params.get_double("tol", default_tolerance(cfg.T));
  const bool generated = cfg.data_path.empty() && cfg.adversary == "lbftrl-bad";
  const double alpha = cfg.params.get_double("alpha", 0.125);

  LbftrlRun run;
  std::vector<ReturnsVec> rs;
  if (generated) {
    const AdversaryPlan plan = make_plan(cfg.d, cfg.T, alpha);
    require(plan.layer_count >= 1, Errc::kParameter,
            "lbftrl-bad schedule is empty: need alpha log2(T) >= 3, got alpha = " +
                format_double(alpha) + ", T = " + std::to_string(cfg.T));
    run = generate_and_run(plan, eta, tol);
    for (const LbftrlRound& r : run.rounds) rs.push_back(normalize_returns(r.r));
  } else {
    rs = returns_stream(cfg);
    run = run_lbftrl(rs, eta, cfg.T, tol);
  }
  const CrpResult crp = best_crp(rs, cfg.params.get_double("comparator_tol", 1e-10));
  for (std::size_t i = 0; i < run.rounds.size(); ++i) {
    const LbftrlRound& r = run.rounds[i];
    res.trace.push_back({r.t, 1, r.t, r.loss, 0.0, log_loss(crp.portfolio, rs[i]), 0.0, false});
    const StabilityRecord& st = run.stability[i];
    res.stability.push_back({st.t, kind_name(r.kind), r.target, r.layer, r.repetition, st.term,
                             r.hessian_trace});
  }
  const double c2 = 1.0 / ((1.0 + eta) * (1.0 + eta));
  json& s = res.summary;
  s["params"] = json{{"eta", eta}};
  s["tolerance"] = tol;
  s["comparator"] = vec_json(crp.portfolio.weights());
  s["final_iterate"] = vec_json(run.final_x.weights());
  s["regret_vs_final_iterate"] = run.regret;
  s["stability_sum"] = run.stability_sum;
  s["stability_lower_bound"] = 0.5 * c2 * run.stability_sum;
  if (generated) {
    s["alpha"] = alpha;
    s["alpha_default"] = 0.125;
    s["alpha_deviates"] = alpha != 0.125;
    s["movement_steps"] = run.movement_steps;
    s["outcome_steps"] = run.outcome_steps;
    s["truncated"] = run.truncated;
    s["longest_move"] = run.longest_move;
    s["move_bound_violations"] = run.move_bound_violations;
  }
}

void run_ons_experiment(const ExperimentConfig& cfg, ExperimentResult& res) {
  const double eta = cfg.params.get_double("eta_ons", 1.0);
  const double eps = cfg.params.get_double("epsilon", 1.0);
  const double mixing = cfg.params.get_double("mixing", 1e-3);
  const std::vector<ReturnsVec> rs = returns_stream(cfg);
  const OnsTrajectory traj = ons_baseline(rs, eta, eps, mixing);
  const CrpResult crp = best_crp(rs, cfg.params.get_double("comparator_tol", 1e-10));
  for (std::size_t i = 0; i < traj.losses.size(); ++i) {
    const auto t = static_cast<long long>(i + 1);
    res.trace.push_back({t, 1, t, traj.losses[i], 0.0, log_loss(crp.portfolio, rs[i]), 0.0, false});
  }
  res.summary["params"] = json{{"eta_ons", eta}, {"epsilon", eps}, {"mixing", mixing}};
  res.summary["comparator"] = vec_json(crp.portfolio.weights());
}

}  // namespace

ExperimentConfig experiment_from_config(const Config& cfg) {
  ExperimentConfig e;
  e.algo = cfg.get_string("algo", "");
  e.d = static_cast<int>(cfg.get_int("d", 0));
  e.T = cfg.get_int("T", 0);
  const long long seed = cfg.get_int("seed", 0);
  require(seed >= 0, Errc::kInvalidArgument, "seed must be nonnegative");
  e.seed = static_cast<std::uint64_t>(seed);
  e.adversary = cfg.get_string("adversary", "");
  e.data_path = cfg.get_string("data", "");
  e.out_dir = cfg.get_string("out", "");
  for (const auto& [k, v] : cfg.values()) {
    if (kRunKeys.count(k) == 0) e.params.set(k, v);
  }
  return e;
}

void validate_experiment(const ExperimentConfig& cfg) {
  const std::set<std::string> algos = {"bisons", "qbisons", "lbftrl", "ons"};
  require(algos.count(cfg.algo) != 0, Errc::kInvalidArgument,
          "unknown algo '" + cfg.algo + "' (expected bisons, qbisons, lbftrl or ons)");
  require(cfg.d >= 1, Errc::kInvalidArgument, "d must be positive");
  require(cfg.algo == "qbisons" || cfg.d >= 2, Errc::kInvalidArgument,
          "d must be at least 2 for portfolio algorithms");
  require(cfg.T >= 1, Errc::kInvalidArgument, "T must be positive");
  require(cfg.data_path.empty() != cfg.adversary.empty(), Errc::kInvalidArgument,
          "exactly one of data or adversary must be given");
  if (!cfg.adversary.empty()) {
    const std::string& a = cfg.adversary;
    bool ok = is_returns_adversary(a);
    if (cfg.algo == "qbisons") ok = ok || is_measurement_adversary(a);
    if (cfg.algo == "lbftrl") ok = ok || a == "lbftrl-bad";
    require(ok, Errc::kInvalidArgument,
            "adversary '" + a + "' is not available for algo " + cfg.algo);
  }
  const std::set<std::string> allowed = allowed_overrides(cfg.algo);
  for (const auto& [k, v] : cfg.params.values()) {
    require(allowed.count(k) != 0, Errc::kInvalidArgument,
            "unknown parameter '" + k + "' for algo " + cfg.algo);
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  ExperimentResult res;
  json& s = res.summary;
  s["algo"] = cfg.algo;
  s["d"] = cfg.d;
  s["T"] = cfg.T;
  s["seed"] = cfg.seed;
  s["source"] = source_label(cfg);
  s["overrides"] = cfg.params.values();
  if (cfg.algo == "bisons") run_bisons_experiment(cfg, res);
  if (cfg.algo == "qbisons") run_qbisons_experiment(cfg, res);
  if (cfg.algo == "lbftrl") run_lbftrl_experiment(cfg, res);
  if (cfg.algo == "ons") run_ons_experiment(cfg, res);
  finish_trace(res);
  return res;
}

void write_trace(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "t,epoch,internal_time,loss,cum_loss,comparator_cum_loss,regret,reset_flag\n";
  for (const TraceRow& r : rows) {
    out << r.t << ',' << r.epoch << ',' << r.internal_time << ',' << format_double(r.loss) << ','
        << format_double(r.cum_loss) << ',' << format_double(r.comparator_cum_loss) << ','
        << format_double(r.regret) << ',' << (r.reset ? 1 : 0) << '\n';
  }
}

void write_stability(std::ostream& out, const std::vector<StabilityRow>& rows) {
  out << "t,kind,target,layer,repetition,stability_term,hessian_trace\n";
  for (const StabilityRow& r : rows) {
    out << r.t << ',' << r.kind << ',' << r.target << ',' << r.layer << ',' << r.repetition << ','
        << format_double(r.term) << ',' << format_double(r.hessian_trace) << '\n';
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  require(static_cast<bool>(f), Errc::kIo, "cannot open " + p.string() + " for writing");
  return f;
}

}  // namespace

void write_experiment(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, Errc::kIo, "cannot create directory " + dir + ": " + ec.message());
  const fs::path base(dir);
  {
    std::ofstream f = open_out(base / "trace.csv");
    write_trace(f, result.trace);
  }
  {
    std::ofstream f = open_out(base / "summary.json");
    f << result.summary.dump(2) << '\n';
  }
  if (!result.stability.empty()) {
    std::ofstream f = open_out(base / "stability.csv");
    write_stability(f, result.stability);
  }
}

}  // namespace bisons::tools
