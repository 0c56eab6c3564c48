#pragma once

#include <map>
#include <tuple>
#include <optional>
#include <string>
#include <vector>

#include "raradapt/experiment.hpp"

namespace raradapt {

// One scenario row of a results table.
struct ScenarioRowResult {
  std::string label;
  std::vector<double> deltas;
  ExperimentResult result;
};

struct TableRun {
  std::string id;
  std::vector<Strategy> strategies;
  std::vector<ScenarioRowResult> rows;
  // Reference values (percent) per (row, strategy, metric); metric 0 = error,
  // 1 = power. Absent where the source table prints a dash.
  std::map<std::tuple<int, Strategy, int>, double> reference;
  // Anomaly tables: reference percent per (row, family, class);
  // family 0 = closed, 1 = elementary; class 0 = imaginary, 1 = negative.
  std::map<std::tuple<int, int, int>, double> anomaly_reference;
  bool anomaly_table = false;
};

struct RunOverrides {
  std::optional<long> sims;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

// Known preset ids: table1..table4, tableE1..tableE10, figure1..figure3,
// table5, section2_3, appendixB1..appendixB4.
bool is_table_preset(const std::string& id);
std::vector<std::string> preset_ids();

TableRun reproduce_table(const std::string& id, const RunOverrides& overrides);

// Power-vs-p2 sweeps (figure1..figure3).
struct FigureRun {
  std::string id;
  std::vector<Strategy> strategies;
  std::vector<PowerCurvePoint> points;
};
bool is_figure_preset(const std::string& id);
FigureRun reproduce_figure(const std::string& id, const RunOverrides& overrides);

// Experiment builders used by the presets and the acceptance suite.
Experiment sequential_inflator_experiment(int h);          // Table 1 rows
Experiment sequential_bar_experiment(int h);               // Table 2 rows
Experiment block_inflator_experiment(int h);               // Table 3 rows
Experiment block_bar_experiment(int h);                    // Table 4 rows
Experiment adaptive_control_inflator_experiment(int h);    // Table E.1 rows
Experiment adaptive_control_bar_experiment(int h);         // Table E.2 rows
Experiment section23_experiment();                         // the FWER inflation demo
Experiment figure_experiment(int figure);                  // E.2 sweeps
Experiment case_study_experiment();                        // Table 5 trial

// Fraction of trials on which the plain (unadjusted) z-test rejects H_1 in
// the inflation demo; the headline 10.4% number.
double section23_naive_error(long sims, std::uint64_t seed, int workers);

// Appendix B worked examples: actual/auxiliary sequences plus printed weights.
struct AppendixBCase {
  std::string id;           // appendixB1..appendixB4
  std::vector<int> actual;  // a_1..a_11
  std::vector<int> aux;     // b_1..b_10 (b_11 is forced per hypothesis)
  // Printed per-patient treatment weights for I={1} and I={2}; NaN where the
  // table leaves the entry blank.
  std::vector<double> w1, w2;
  double w1_control_first, w1_control_last;
  double w2_control_first, w2_control_last;
};
const std::vector<AppendixBCase>& appendix_b_cases();

// Single simulated case-study trial in the published report layout.
struct CaseStudyReport {
  TrialData trial;
  TestReport report;
  std::vector<int> aux_counts;  // n_i' per dose
};
CaseStudyReport run_case_study(std::uint64_t seed);

}  // namespace raradapt
