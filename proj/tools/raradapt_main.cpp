// raradapt: simulation and analysis of familywise-error-controlling adaptive
// tests for multi-arm response-adaptive trials.
//
// Subcommands: simulate | reproduce | weights | analyze.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "raradapt/config.hpp"
#include "raradapt/csv.hpp"
#include "raradapt/experiment.hpp"
#include "raradapt/presets.hpp"
#include "raradapt/report.hpp"
#include "raradapt/testing.hpp"

namespace {

using namespace raradapt;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int default_workers() {
  if (const char* env = std::getenv("RARADAPT_WORKERS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<int>(value);
  }
  return 0;  // hardware concurrency
}

struct GlobalFlags {
  std::optional<long> sims;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> alpha;
  std::string out_dir = ".";
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  return out;
}

std::string percent(double fraction) { return format_double(100.0 * fraction); }

void write_results_csv(std::ostream& out, const std::string& table,
                       const std::vector<ScenarioRowResult>& rows,
                       const std::vector<Strategy>& strategies) {
  out << "table,scenario,strategy,metric,estimate,se,n_sims,seed\n";
  for (std::size_t row = 0; row < rows.size(); ++row) {
    const ExperimentResult& result = rows[row].result;
    for (Strategy s : strategies) {
      const double fwer = result.fwer(s);
      const double power = result.power(s);
      if (result.has_true_null) {
        out << table << ',' << rows[row].label << ',' << strategy_name(s) << ",fwer,"
            << percent(fwer) << ','
            << percent(ExperimentResult::standard_error(fwer, result.num_sims)) << ','
            << result.num_sims << ',' << result.seed << '\n';
      }
      if (result.has_false_null) {
        out << table << ',' << rows[row].label << ',' << strategy_name(s) << ",power,"
            << percent(power) << ','
            << percent(ExperimentResult::standard_error(power, result.num_sims)) << ','
            << result.num_sims << ',' << result.seed << '\n';
      }
    }
  }
}

int cmd_simulate(const std::string& config_path, const GlobalFlags& flags,
                 const std::string& dump_trial_prefix) {
  Experiment experiment = load_experiment_config_file(config_path);
  if (flags.sims) experiment.num_sims = *flags.sims;
  if (flags.seed) experiment.seed = *flags.seed;
  if (flags.alpha) experiment.design.alpha = *flags.alpha;
  experiment.workers = flags.workers.value_or(default_workers());

  if (!dump_trial_prefix.empty()) {
    // Write replicate 0's trial data and report for round-trip checks with
    // `analyze`.
    auto rule = make_rule(experiment.rule_name, experiment.rule_params,
                          experiment.design.num_treatments);
    RngStream rng = RngStream::keyed(experiment.seed, 0, StreamKind::Trial);
    TrialData trial = run_trial(experiment.design, *rule, experiment.scenario, rng);
    TestOptions options;
    options.alpha = experiment.design.alpha;
    options.variance_mode = experiment.variance_mode;
    options.known_sigma = experiment.scenario.outcome_sd;
    options.aux_policy = experiment.aux_policy;
    TestReport report =
        analyze_trial(trial, replicate_aux_seed(experiment.seed, 0), options);
    auto trial_out = open_out(dump_trial_prefix + "_trial.csv");
    trial.write_csv(trial_out);
    auto report_out = open_out(dump_trial_prefix + "_report.csv");
    write_test_report_csv(report_out, report, experiment.design.num_treatments);
  }

  ExperimentResult result = run_experiment(experiment);

  const std::filesystem::path dir(flags.out_dir);
  std::filesystem::create_directories(dir);
  auto csv = open_out(dir / "results.csv");
  ScenarioRowResult row{"scenario", experiment.scenario.effects, result};
  write_results_csv(csv, "simulate", {row}, experiment.strategies);
  auto manifest = open_out(dir / "manifest.json");
  manifest << experiment_to_json(experiment);
  std::cout << "wrote " << (dir / "results.csv").string() << " and "
            << (dir / "manifest.json").string() << " (" << result.num_sims
            << " sims, " << format_double(result.wall_seconds) << " s)\n";
  return kExitOk;
}

void write_weight_table(std::ostream& out, const TrialData& trial,
                        const std::vector<AuxiliaryDesign>& auxes,
                        const std::vector<WeightSchedule>& schedules) {
  out << "hypothesis,index,kind,actual_arm,auxiliary_arm,weight\n";
  const TrialDesign& design = trial.design;
  const int r = design.burn_in_total();
  for (std::size_t s = 0; s < schedules.size(); ++s) {
    const WeightSchedule& schedule = schedules[s];
    const std::string label = schedule.hypothesis.label();
    for (int k = 0; k < design.num_experimental; ++k) {
      const int aux_arm = k < r ? trial.arms[k] : auxes[s].arm_at(design, k);
      out << label << ',' << k + 1 << ",treatment," << trial.arms[k] << ',' << aux_arm
          << ',';
      const bool last_unused = k + 1 == design.num_experimental &&
                               !schedule.hypothesis.contains(trial.arms[k]);
      if (!schedule.valid()) {
        out << (schedule.status == ScheduleStatus::ImaginaryWeights ? "imaginary"
                                                                    : "failed");
      } else if (!last_unused) {
        out << format_double(schedule.treatment_weights[k]);
      }
      out << '\n';
    }
    for (int j = 0; j < design.num_control; ++j) {
      out << label << ',' << j + 1 << ",control,,,";
      if (schedule.valid()) {
        const double w = j < schedule.split_n1 ? schedule.split_w1 : schedule.split_w2;
        out << format_double(w);
      }
      out << '\n';
    }
  }
}

int cmd_weights(const std::string& alloc_path, const std::string& preset,
                int n0_flag, std::pair<int, int> split, bool has_split,
                const GlobalFlags& flags) {
  // Assemble (actual, auxiliary) allocation sequences either from an
  // Appendix-style preset or from a CSV with columns
  // index,actual_arm,auxiliary_arm. The final auxiliary allocation is
  // overridden per hypothesis (it must lie in the hypothesis set), so the
  // file's last auxiliary entry may be 0 as a placeholder.
  std::vector<int> actual;
  std::vector<int> aux_arms;
  int n0 = n0_flag;
  if (!preset.empty()) {
    for (const AppendixBCase& c : appendix_b_cases()) {
      if (c.id == preset) {
        actual = c.actual;
        aux_arms = c.aux;
        aux_arms.push_back(0);  // per-hypothesis
        n0 = 10;
        if (!has_split) split = {9, 1};
        has_split = true;
        break;
      }
    }
    if (actual.empty()) throw ConfigError("unknown weights preset '" + preset + "'");
  } else {
    std::ifstream in(alloc_path);
    if (!in) throw ConfigError("cannot open allocation file " + alloc_path);
    CsvReader reader(in);
    reader.expect_header({"index", "actual_arm", "auxiliary_arm"});
    std::vector<std::string> row;
    while (reader.next_row(row)) {
      actual.push_back(parse_int(row[1], "actual_arm"));
      aux_arms.push_back(parse_int(row[2], "auxiliary_arm"));
    }
    if (actual.empty()) throw ConfigError("allocation file has no rows");
    if (n0 <= 0) throw ConfigError("weights: pass --n0");
  }

  const int n = static_cast<int>(actual.size());
  int h = 0;
  for (int arm : actual) h = std::max(h, arm);
  for (int arm : aux_arms) h = std::max(h, arm);

  // Burn-in: the longest prefix on which actual and auxiliary agree must cover
  // at least one allocation per arm; we take the design burn-in as the first
  // h allocations of the common prefix per arm (one each suffices for the
  // recursion; the weight math only needs b_k = a_k there).
  std::vector<int> burn_counts(h, 0);
  int r = 0;
  while (r < n - 1 && actual[r] == aux_arms[r]) {
    ++burn_counts[actual[r] - 1];
    ++r;
    bool all = true;
    for (int c : burn_counts) all &= c > 0;
    if (all) break;
  }
  for (int c : burn_counts) {
    if (c == 0) {
      throw ConfigError(
          "weights: actual and auxiliary sequences must share a burn-in prefix covering "
          "every arm");
    }
  }

  TrialDesign design;
  design.regime = Regime::FullySequentialFixedControl;
  design.num_treatments = h;
  design.num_experimental = n;
  design.num_control = n0;
  design.burn_in = burn_counts;
  design.validate();

  TrialData trial;
  trial.design = design;
  trial.arms = actual;
  trial.outcomes.assign(n, 0.0);  // weights never look at outcomes
  trial.control_outcomes.assign(n0, 0.0);

  if (!has_split) split = {n0 - 1, 1};

  std::vector<AuxiliaryDesign> auxes;
  std::vector<WeightSchedule> schedules;
  for (int i = 1; i <= h; ++i) {
    AuxiliaryDesign aux;
    aux.hypothesis = HypothesisSet::single(i);
    aux.post_burn_in.assign(aux_arms.begin() + r, aux_arms.end());
    aux.post_burn_in.back() = i;  // b_n must lie in the hypothesis set
    schedules.push_back(weights_sequential(trial, aux, split));
    auxes.push_back(std::move(aux));
  }

  const std::filesystem::path dir(flags.out_dir);
  std::filesystem::create_directories(dir);
  auto out = open_out(dir / "weights.csv");
  write_weight_table(out, trial, auxes, schedules);
  write_weight_table(std::cout, trial, auxes, schedules);
  return kExitOk;
}

int cmd_reproduce(const std::string& id, const GlobalFlags& flags) {
  RunOverrides overrides{flags.sims, flags.seed,
                         flags.workers.value_or(default_workers())};
  const std::filesystem::path dir(flags.out_dir);
  std::filesystem::create_directories(dir);

  if (id == "section2_3") {
    const long sims = flags.sims.value_or(10000);
    const double error =
        section23_naive_error(sims, flags.seed.value_or(20200828),
                              flags.workers.value_or(default_workers()));
    auto out = open_out(dir / (id + ".csv"));
    out << "table,scenario,strategy,metric,estimate,se,n_sims,seed,paper,diff\n";
    const double se = ExperimentResult::standard_error(error, sims);
    out << "section2_3,delta=(0;1),naive_z_h1,fwer," << percent(error) << ','
        << percent(se) << ',' << sims << ',' << flags.seed.value_or(20200828)
        << ",10.4," << format_double(100.0 * error - 10.4) << '\n';
    std::cout << "naive z-test type I error for H1: " << percent(error)
              << "% (published: 10.4%)\n";
    return kExitOk;
  }

  if (id == "table5") {
    CaseStudyReport report = run_case_study(flags.seed.value_or(20200828));
    auto out = open_out(dir / "table5.csv");
    write_case_study_csv(out, report);
    write_case_study_csv(std::cout, report);
    return kExitOk;
  }

  if (is_figure_preset(id)) {
    FigureRun run = reproduce_figure(id, overrides);
    auto out = open_out(dir / (id + ".csv"));
    out << "p2";
    for (Strategy s : run.strategies) {
      out << ',' << strategy_name(s) << "_power," << strategy_name(s) << "_se";
    }
    out << '\n';
    for (const PowerCurvePoint& point : run.points) {
      out << format_double(point.p2);
      for (Strategy s : run.strategies) {
        out << ',' << percent(point.power.at(s)) << ',' << percent(point.se.at(s));
      }
      out << '\n';
    }
    std::cout << "wrote " << (dir / (id + ".csv")).string() << '\n';
    return kExitOk;
  }

  TableRun run = reproduce_table(id, overrides);
  auto out = open_out(dir / (id + ".csv"));
  if (run.anomaly_table) {
    out << "table,scenario,family,class,estimate,n_sims,seed,paper,diff\n";
    for (std::size_t row = 0; row < run.rows.size(); ++row) {
      const ExperimentResult& result = run.rows[row].result;
      for (int family = 0; family < 2; ++family) {
        const AnomalyCounts& counts =
            family == 0 ? result.closed_anomalies : result.elementary_anomalies;
        const char* family_name = family == 0 ? "adaptive_closed" : "holm_adaptive";
        for (int cls = 0; cls < 2; ++cls) {
          const long count = cls == 0 ? counts.imaginary : counts.negative_treatment;
          const double estimate = static_cast<double>(count) / result.num_sims;
          const double paper =
              run.anomaly_reference.at({static_cast<int>(row), family, cls});
          out << run.id << ',' << run.rows[row].label << ',' << family_name << ','
              << (cls == 0 ? "imaginary" : "negative") << ',' << percent(estimate) << ','
              << result.num_sims << ',' << result.seed << ',' << format_double(paper)
              << ',' << format_double(100.0 * estimate - paper) << '\n';
        }
      }
    }
  } else {
    out << "table,scenario,strategy,metric,estimate,se,n_sims,seed,paper,diff\n";
    for (std::size_t row = 0; row < run.rows.size(); ++row) {
      const ExperimentResult& result = run.rows[row].result;
      for (Strategy s : run.strategies) {
        for (int metric = 0; metric < 2; ++metric) {
          const bool applicable =
              metric == 0 ? result.has_true_null : result.has_false_null;
          if (!applicable) continue;
          const double estimate = metric == 0 ? result.fwer(s) : result.power(s);
          out << run.id << ',' << run.rows[row].label << ',' << strategy_name(s) << ','
              << (metric == 0 ? "fwer" : "power") << ',' << percent(estimate) << ','
              << percent(ExperimentResult::standard_error(estimate, result.num_sims))
              << ',' << result.num_sims << ',' << result.seed;
          const auto ref = run.reference.find({static_cast<int>(row), s, metric});
          if (ref != run.reference.end()) {
            out << ',' << format_double(ref->second) << ','
                << format_double(100.0 * estimate - ref->second);
          } else {
            out << ",,";
          }
          out << '\n';
        }
      }
    }
  }
  std::cout << "wrote " << (dir / (id + ".csv")).string() << '\n';
  return kExitOk;
}

int cmd_analyze(const std::string& data_path, const std::string& config_path,
                const std::string& variance, std::uint64_t aux_seed,
                const GlobalFlags& flags) {
  Experiment experiment = load_experiment_config_file(config_path);
  if (flags.alpha) experiment.design.alpha = *flags.alpha;
  std::ifstream in(data_path);
  if (!in) throw ConfigError("cannot open trial data " + data_path);
  TrialData trial = TrialData::read_csv(in, experiment.design);

  TestOptions options;
  options.alpha = experiment.design.alpha;
  options.variance_mode =
      variance == "pooled" ? VarianceMode::PooledEstimate : VarianceMode::Known;
  options.known_sigma = experiment.scenario.outcome_sd;
  options.aux_policy = experiment.aux_policy;
  TestReport report = analyze_trial(trial, aux_seed, options);

  const std::filesystem::path dir(flags.out_dir);
  std::filesystem::create_directories(dir);
  auto csv = open_out(dir / "report.csv");
  write_test_report_csv(csv, report, experiment.design.num_treatments);
  auto summary = open_out(dir / "report.json");
  write_test_report_json(summary, report, trial);
  std::cout << "wrote " << (dir / "report.csv").string() << " and "
            << (dir / "report.json").string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive tests with familywise error control for multi-arm "
               "response-adaptive trials"};
  app.require_subcommand(1);

  GlobalFlags flags;
  long sims_flag = -1;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  int workers_flag = -1;
  double alpha_flag = -1.0;
  app.add_option("--sims", sims_flag, "Monte Carlo replicates");
  app.add_option("--seed", seed_flag, "base seed")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--workers", workers_flag,
                 "worker threads (default: RARADAPT_WORKERS or all cores)");
  app.add_option("--alpha", alpha_flag, "significance level");
  app.add_option("--out", flags.out_dir, "output directory (default: .)");

  auto* simulate = app.add_subcommand("simulate", "run an experiment from a config file");
  std::string config_path;
  std::string dump_prefix;
  simulate->add_option("config", config_path, "experiment config (JSON)")->required();
  simulate->add_option("--dump-trial", dump_prefix,
                       "write replicate 0's trial + report CSVs with this prefix");

  auto* reproduce = app.add_subcommand("reproduce", "rerun a published preset");
  std::string preset_id;
  reproduce->add_option("id", preset_id, "preset id (table1..tableE10, figure1..figure3, table5, section2_3)")
      ->required();

  auto* weights = app.add_subcommand("weights", "print an adaptive weight table");
  std::string alloc_path, weights_preset, split_text;
  int n0_flag = 0;
  weights->add_option("--alloc", alloc_path, "CSV with index,actual_arm,auxiliary_arm");
  weights->add_option("--preset", weights_preset, "appendixB1..appendixB4");
  weights->add_option("--n0", n0_flag, "number of control patients");
  weights->add_option("--split", split_text, "control split m01,m02 (default n0-1,1)");

  auto* analyze = app.add_subcommand("analyze", "end-of-trial analysis of a data CSV");
  std::string data_path, analyze_config, variance = "known";
  std::uint64_t aux_seed = 1;
  analyze->add_option("data", data_path, "trial data CSV")->required();
  analyze->add_option("--config", analyze_config, "design config (JSON)")->required();
  analyze->add_option("--variance", variance, "known | pooled")
      ->check(CLI::IsMember({"known", "pooled"}));
  analyze->add_option("--aux-seed", aux_seed,
                      "auxiliary-design base seed (pre-specified before the trial)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (sims_flag >= 0) flags.sims = sims_flag;
  if (seed_set) flags.seed = seed_flag;
  if (workers_flag >= 0) flags.workers = workers_flag;
  if (alpha_flag >= 0) flags.alpha = alpha_flag;

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, flags, dump_prefix);
    if (reproduce->parsed()) return cmd_reproduce(preset_id, flags);
    if (weights->parsed()) {
      std::pair<int, int> split{0, 0};
      bool has_split = false;
      if (!split_text.empty()) {
        const auto comma = split_text.find(',');
        if (comma == std::string::npos) throw ConfigError("--split expects m01,m02");
        split = {parse_int(split_text.substr(0, comma), "split"),
                 parse_int(split_text.substr(comma + 1), "split")};
        has_split = true;
      }
      if (alloc_path.empty() == weights_preset.empty()) {
        throw ConfigError("weights: pass exactly one of --alloc or --preset");
      }
      return cmd_weights(alloc_path, weights_preset, n0_flag, split, has_split, flags);
    }
    if (analyze->parsed()) {
      return cmd_analyze(data_path, analyze_config, variance, aux_seed, flags);
    }
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
