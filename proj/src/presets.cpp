#include "raradapt/presets.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "raradapt/csv.hpp"
#include "raradapt/normal.hpp"

namespace raradapt {

namespace {

constexpr double NA = std::numeric_limits<double>::quiet_NaN();

const std::vector<Strategy> kTableStrategies = {
    Strategy::AdaptiveClosed, Strategy::HolmAdaptive, Strategy::ClosedZ,
    Strategy::HolmZ, Strategy::BonferroniZ};

struct ScenarioRow {
  std::string label;
  std::vector<double> deltas;
};

std::string delta_label(const std::vector<double>& deltas) {
  std::string out = "delta=(";
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (i) out += ",";
    out += format_double(deltas[i]);
  }
  return out + ")";
}

std::vector<ScenarioRow> rows_from(const std::vector<std::vector<double>>& deltas) {
  std::vector<ScenarioRow> rows;
  for (const auto& d : deltas) rows.push_back({delta_label(d), d});
  return rows;
}

// Scenario grids. Rows 1-3 use two treatments, rows 4-8 three.
std::vector<ScenarioRow> inflator_rows() {
  return rows_from({{0, 0}, {0, 1}, {0.5, 0.5}, {0, 0, 0}, {0, 0, 1},
                    {0, 1, 1}, {0, 0.5, 1}, {0.5, 0.5, 0.5}});
}
std::vector<ScenarioRow> bar_sequential_rows() {
  return rows_from({{0, 0}, {0, 0.5}, {0.5, 0.5}, {0, 0, 0}, {0, 0, 1},
                    {0, 1, 1}, {0, 0.5, 1}, {0.5, 0.5, 0.5}});
}
std::vector<ScenarioRow> bar_block_rows() {
  return rows_from({{0, 0}, {0, 0.5}, {0.5, 0.5}, {0, 0, 0}, {0, 0, 0.5},
                    {0, 0.5, 0.5}, {0, 0.25, 0.5}, {0.5, 0.5, 0.5}});
}

// Printed values, percent: [row][strategy][error, power]; NA = dash.
using PrintedTable = std::array<std::array<std::array<double, 2>, 5>, 8>;

constexpr PrintedTable kTable1 = {{
    {{{3.3, NA}, {4.7, NA}, {4.7, NA}, {7.0, NA}, {7.0, NA}}},
    {{{4.8, 21.7}, {3.7, 27.5}, {10.3, 26.5}, {9.9, 63.6}, {5.0, 63.5}}},
    {{{NA, 62.4}, {NA, 52.4}, {NA, 69.9}, {NA, 61.6}, {NA, 61.6}}},
    {{{2.8, NA}, {3.8, NA}, {4.1, NA}, {5.9, NA}, {5.9, NA}}},
    {{{3.2, 13.1}, {4.2, 24.2}, {5.1, 17.2}, {6.4, 54.2}, {4.5, 54.1}}},
    {{{4.6, 22.2}, {3.2, 28.0}, {9.7, 27.0}, {9.0, 75.4}, {3.2, 75.4}}},
    {{{4.0, 19.1}, {2.6, 24.5}, {9.1, 23.9}, {7.4, 58.5}, {3.2, 58.4}}},
    {{{NA, 51.3}, {NA, 41.7}, {NA, 57.8}, {NA, 49.7}, {NA, 49.7}}},
}};

constexpr PrintedTable kTable2 = {{
    {{{4.7, NA}, {4.5, NA}, {4.8, NA}, {4.1, NA}, {4.1, NA}}},
    {{{4.6, 46.4}, {4.4, 52.4}, {3.9, 46.7}, {3.6, 53.6}, {1.9, 53.5}}},
    {{{NA, 70.8}, {NA, 66.4}, {NA, 71.2}, {NA, 65.9}, {NA, 65.9}}},
    {{{3.8, NA}, {4.1, NA}, {4.0, NA}, {3.8, NA}, {3.8, NA}}},
    {{{4.4, 59.9}, {4.2, 88.7}, {4.3, 60.1}, {3.8, 90.6}, {2.6, 90.6}}},
    {{{4.8, 89.8}, {4.7, 95.1}, {4.0, 90.1}, {3.9, 96.0}, {1.3, 96.0}}},
    {{{4.3, 74.8}, {3.9, 88.2}, {3.9, 75.7}, {3.4, 90.0}, {1.4, 90.0}}},
    {{{NA, 56.5}, {NA, 51.8}, {NA, 57.9}, {NA, 52.7}, {NA, 52.7}}},
}};

constexpr PrintedTable kTable3 = {{
    {{{3.8, NA}, {4.8, NA}, {4.6, NA}, {6.5, NA}, {6.5, NA}}},
    {{{4.8, 22.0}, {3.6, 26.9}, {8.3, 25.6}, {7.8, 61.1}, {4.3, 61.0}}},
    {{{NA, 92.7}, {NA, 87.9}, {NA, 94.6}, {NA, 91.7}, {NA, 91.7}}},
    {{{3.2, NA}, {4.1, NA}, {4.1, NA}, {6.1, NA}, {6.1, NA}}},
    {{{3.7, 14.2}, {4.4, 23.4}, {4.7, 18.1}, {6.2, 61.2}, {4.5, 61.1}}},
    {{{4.9, 20.1}, {3.2, 26.1}, {8.1, 23.0}, {7.3, 78.5}, {3.2, 78.4}}},
    {{{4.7, 17.7}, {3.0, 23.8}, {8.0, 21.1}, {6.7, 66.2}, {2.8, 66.2}}},
    {{{NA, 91.3}, {NA, 83.4}, {NA, 94.0}, {NA, 89.7}, {NA, 89.7}}},
}};

constexpr PrintedTable kTable4 = {{
    {{{4.8, NA}, {4.6, NA}, {4.8, NA}, {4.5, NA}, {4.5, NA}}},
    {{{5.0, 61.2}, {4.9, 82.7}, {4.9, 61.2}, {4.8, 82.9}, {2.5, 82.8}}},
    {{{NA, 94.5}, {NA, 92.3}, {NA, 94.5}, {NA, 92.2}, {NA, 92.2}}},
    {{{3.7, NA}, {4.5, NA}, {3.7, NA}, {4.2, NA}, {4.2, NA}}},
    {{{4.4, 36.1}, {4.6, 71.8}, {4.3, 36.0}, {4.4, 71.8}, {3.0, 71.7}}},
    {{{5.0, 67.3}, {4.6, 85.6}, {4.8, 66.8}, {4.4, 85.4}, {1.6, 85.4}}},
    {{{4.6, 51.1}, {3.7, 73.0}, {4.4, 50.9}, {3.5, 72.6}, {1.6, 72.6}}},
    {{{NA, 93.5}, {NA, 90.7}, {NA, 93.4}, {NA, 90.4}, {NA, 90.4}}},
}};

constexpr PrintedTable kTableE1 = {{
    {{{3.8, NA}, {4.9, NA}, {4.4, NA}, {6.7, NA}, {6.7, NA}}},
    {{{4.8, 19.1}, {3.7, 25.1}, {8.2, 25.4}, {7.8, 67.2}, {4.3, 67.1}}},
    {{{NA, 90.1}, {NA, 84.4}, {NA, 93.3}, {NA, 89.9}, {NA, 89.9}}},
    {{{3.2, NA}, {4.1, NA}, {3.9, NA}, {6.2, NA}, {6.2, NA}}},
    {{{3.8, 14.0}, {4.4, 21.9}, {4.8, 20.0}, {6.5, 61.7}, {4.8, 61.6}}},
    {{{4.8, 19.1}, {3.4, 24.6}, {8.4, 26.4}, {7.5, 80.6}, {3.2, 80.6}}},
    {{{4.5, 17.0}, {3.0, 22.6}, {8.0, 23.7}, {6.6, 66.9}, {2.9, 66.8}}},
    {{{NA, 87.5}, {NA, 78.4}, {NA, 91.8}, {NA, 86.9}, {NA, 86.9}}},
}};

constexpr PrintedTable kTableE2 = {{
    {{{4.6, NA}, {4.5, NA}, {4.6, NA}, {4.4, NA}, {4.4, NA}}},
    {{{5.0, 54.4}, {4.9, 76.4}, {4.8, 56.1}, {4.7, 78.0}, {2.4, 78.0}}},
    {{{NA, 90.6}, {NA, 87.4}, {NA, 91.5}, {NA, 88.3}, {NA, 88.3}}},
    {{{4.0, NA}, {4.3, NA}, {3.9, NA}, {4.2, NA}, {4.2, NA}}},
    {{{4.6, 29.0}, {4.5, 61.4}, {4.6, 29.9}, {4.4, 62.9}, {3.1, 62.9}}},
    {{{4.9, 56.4}, {4.5, 76.1}, {4.7, 57.4}, {4.4, 77.3}, {1.6, 77.3}}},
    {{{4.5, 41.7}, {3.6, 62.9}, {4.3, 42.7}, {3.5, 63.7}, {1.7, 63.7}}},
    {{{NA, 85.9}, {NA, 82.0}, {NA, 86.9}, {NA, 83.0}, {NA, 83.0}}},
}};

// Pooled-variance reruns (Appendix E.3, 10^6 simulations in the source).
constexpr PrintedTable kTableE5 = {{
    {{{3.4, NA}, {4.9, NA}, {4.9, NA}, {7.5, NA}, {7.5, NA}}},
    {{{5.0, 21.8}, {3.8, 27.6}, {10.5, 26.8}, {10.1, 63.9}, {5.3, 63.8}}},
    {{{NA, 62.4}, {NA, 52.7}, {NA, 69.9}, {NA, 61.6}, {NA, 61.6}}},
    {{{3.0, NA}, {4.3, NA}, {4.3, NA}, {6.4, NA}, {6.4, NA}}},
    {{{3.6, 13.2}, {4.6, 24.9}, {5.4, 17.3}, {7.0, 54.6}, {5.1, 54.5}}},
    {{{5.1, 22.6}, {3.6, 28.8}, {10.3, 27.5}, {9.6, 72.8}, {3.6, 72.8}}},
    {{{4.5, 19.5}, {3.0, 25.5}, {9.6, 24.4}, {7.9, 59.0}, {3.7, 58.9}}},
    {{{NA, 51.6}, {NA, 43.0}, {NA, 57.8}, {NA, 50.0}, {NA, 50.0}}},
}};

constexpr PrintedTable kTableE6 = {{
    {{{4.8, NA}, {4.7, NA}, {4.9, NA}, {4.2, NA}, {4.2, NA}}},
    {{{4.7, 46.7}, {4.4, 52.6}, {4.0, 46.9}, {3.7, 53.6}, {2.0, 53.5}}},
    {{{NA, 70.9}, {NA, 66.7}, {NA, 71.1}, {NA, 65.8}, {NA, 65.8}}},
    {{{4.2, NA}, {4.6, NA}, {4.3, NA}, {4.2, NA}, {4.2, NA}}},
    {{{4.7, 59.9}, {4.8, 88.8}, {4.6, 60.1}, {4.2, 90.2}, {2.9, 90.2}}},
    {{{5.0, 89.9}, {5.0, 95.3}, {4.2, 89.9}, {4.2, 95.8}, {1.4, 95.8}}},
    {{{4.7, 75.1}, {4.2, 88.6}, {4.1, 75.6}, {3.6, 89.7}, {1.5, 89.7}}},
    {{{NA, 57.2}, {NA, 53.2}, {NA, 58.0}, {NA, 52.8}, {NA, 52.8}}},
}};

constexpr PrintedTable kTableE7 = {{
    {{{3.9, NA}, {4.9, NA}, {4.7, NA}, {6.9, NA}, {6.9, NA}}},
    {{{4.9, 22.0}, {3.7, 27.0}, {8.4, 25.6}, {7.9, 61.1}, {4.4, 61.0}}},
    {{{NA, 92.6}, {NA, 87.7}, {NA, 94.6}, {NA, 91.6}, {NA, 91.6}}},
    {{{3.2, NA}, {4.1, NA}, {4.1, NA}, {6.3, NA}, {6.3, NA}}},
    {{{3.8, 14.2}, {4.4, 23.4}, {4.8, 18.3}, {6.4, 61.4}, {4.7, 61.2}}},
    {{{5.0, 20.1}, {3.3, 26.1}, {8.3, 23.1}, {7.5, 79.8}, {3.0, 79.8}}},
    {{{4.8, 17.7}, {3.0, 23.9}, {8.1, 21.3}, {6.8, 66.3}, {3.0, 66.3}}},
    {{{NA, 91.2}, {NA, 83.1}, {NA, 93.9}, {NA, 89.5}, {NA, 89.5}}},
}};

constexpr PrintedTable kTableE8 = {{
    {{{4.7, NA}, {4.6, NA}, {4.7, NA}, {4.5, NA}, {4.5, NA}}},
    {{{5.0, 61.3}, {5.0, 82.6}, {4.9, 61.3}, {4.9, 82.9}, {2.5, 82.8}}},
    {{{NA, 94.5}, {NA, 92.2}, {NA, 94.5}, {NA, 92.2}, {NA, 92.2}}},
    {{{3.9, NA}, {4.6, NA}, {3.8, NA}, {4.4, NA}, {4.4, NA}}},
    {{{4.5, 36.0}, {4.6, 71.7}, {4.5, 36.0}, {4.4, 71.7}, {3.1, 71.7}}},
    {{{5.0, 67.3}, {4.7, 85.4}, {4.8, 66.8}, {4.5, 85.2}, {1.6, 85.2}}},
    {{{4.6, 51.1}, {3.8, 72.9}, {4.4, 50.9}, {3.6, 72.6}, {1.6, 72.6}}},
    {{{NA, 93.3}, {NA, 90.4}, {NA, 93.2}, {NA, 90.2}, {NA, 90.2}}},
}};

constexpr PrintedTable kTableE9 = {{
    {{{3.9, NA}, {5.0, NA}, {4.6, NA}, {7.0, NA}, {7.0, NA}}},
    {{{5.0, 19.1}, {3.8, 25.1}, {8.4, 25.7}, {7.9, 67.4}, {4.5, 67.3}}},
    {{{NA, 90.0}, {NA, 84.4}, {NA, 93.2}, {NA, 89.8}, {NA, 89.8}}},
    {{{3.3, NA}, {4.1, NA}, {4.0, NA}, {6.6, NA}, {6.6, NA}}},
    {{{3.8, 14.0}, {4.5, 22.1}, {4.9, 20.0}, {6.6, 62.0}, {4.9, 61.9}}},
    {{{5.0, 19.2}, {3.5, 24.7}, {8.5, 26.5}, {7.7, 80.6}, {3.2, 80.6}}},
    {{{4.7, 17.1}, {3.1, 22.6}, {8.2, 24.0}, {6.8, 67.1}, {3.2, 67.0}}},
    {{{NA, 87.4}, {NA, 78.3}, {NA, 91.7}, {NA, 86.8}, {NA, 86.8}}},
}};

constexpr PrintedTable kTableE10 = {{
    {{{4.7, NA}, {4.7, NA}, {4.7, NA}, {4.6, NA}, {4.6, NA}}},
    {{{5.1, 54.6}, {5.0, 76.5}, {5.0, 56.2}, {4.9, 78.1}, {2.5, 78.1}}},
    {{{NA, 90.5}, {NA, 87.3}, {NA, 91.4}, {NA, 88.3}, {NA, 88.3}}},
    {{{4.0, NA}, {4.5, NA}, {4.0, NA}, {4.4, NA}, {4.4, NA}}},
    {{{4.7, 29.2}, {4.6, 61.3}, {4.6, 30.1}, {4.4, 62.8}, {3.1, 62.8}}},
    {{{5.0, 56.5}, {4.7, 75.9}, {4.9, 57.5}, {4.5, 77.1}, {1.7, 77.1}}},
    {{{4.5, 41.8}, {3.7, 62.4}, {4.4, 42.8}, {3.5, 63.7}, {1.7, 63.6}}},
    {{{NA, 85.9}, {NA, 81.9}, {NA, 86.9}, {NA, 82.9}, {NA, 82.9}}},
}};

// Anomaly tables: [row][family closed=0/elementary=1][class imaginary=0/negative=1].
using PrintedAnomalies = std::array<std::array<std::array<double, 2>, 2>, 8>;

constexpr PrintedAnomalies kTableE3 = {{
    {{{{0.09, 0.00}}, {{0.09, 0.00}}}},
    {{{{0.09, 0.00}}, {{0.09, 0.00}}}},
    {{{{0.07, 0.00}}, {{0.07, 0.00}}}},
    {{{{6.81, 0.00}}, {{0.18, 0.00}}}},
    {{{{6.86, 0.00}}, {{0.17, 0.00}}}},
    {{{{6.84, 0.00}}, {{0.17, 0.00}}}},
    {{{{6.89, 0.00}}, {{0.17, 0.00}}}},
    {{{{2.67, 0.00}}, {{0.53, 0.00}}}},
}};

constexpr PrintedAnomalies kTableE4 = {{
    {{{{0.10, 0.09}}, {{0.10, 0.09}}}},
    {{{{0.14, 0.10}}, {{0.14, 0.10}}}},
    {{{{0.00, 0.08}}, {{0.00, 0.08}}}},
    {{{{0.29, 0.12}}, {{0.29, 0.12}}}},
    {{{{0.35, 0.07}}, {{0.34, 0.07}}}},
    {{{{0.25, 0.08}}, {{0.25, 0.08}}}},
    {{{{0.20, 0.11}}, {{0.19, 0.11}}}},
    {{{{0.01, 0.08}}, {{0.01, 0.08}}}},
}};

TrialDesign sequential_design(int h) {
  TrialDesign design;
  design.regime = Regime::FullySequentialFixedControl;
  design.num_treatments = h;
  design.burn_in.assign(h, 5);
  design.num_experimental = 50 + 5 * h;  // 50 adaptive patients after the burn-in
  design.num_control = 60 / h;
  design.alpha = 0.05;
  return design;
}

TrialDesign block_design(int h) {
  TrialDesign design;
  design.regime = Regime::BlockFixedControl;
  design.num_treatments = h;
  design.burn_in.assign(h, 5);
  design.burn_in_control = 5;
  design.blocks = {40, 40, 40};
  design.control_blocks = {20, 20, 20};
  design.num_experimental = 5 * h + 120;
  design.num_control = 65;
  design.alpha = 0.05;
  return design;
}

TrialDesign adaptive_control_design(int h) {
  TrialDesign design;
  design.regime = Regime::BlockAdaptiveControl;
  design.num_treatments = h;
  design.burn_in.assign(h, 5);
  design.burn_in_control = 5;
  design.blocks = {50, 50, 50};
  design.num_experimental = 5 * (h + 1) + 150;
  design.alpha = 0.05;
  return design;
}

struct TableSpec {
  std::string id;
  std::vector<ScenarioRow> rows;
  Experiment (*experiment)(int h);
  const PrintedTable* printed;
  const PrintedAnomalies* anomalies;  // anomaly table ids only
  bool pooled;
  long default_sims;
};

const std::vector<TableSpec>& table_specs() {
  static const std::vector<TableSpec> specs = {
      {"table1", inflator_rows(), &sequential_inflator_experiment, &kTable1, nullptr,
       false, 10000},
      {"table2", bar_sequential_rows(), &sequential_bar_experiment, &kTable2, nullptr,
       false, 10000},
      {"table3", inflator_rows(), &block_inflator_experiment, &kTable3, nullptr, false,
       10000},
      {"table4", bar_block_rows(), &block_bar_experiment, &kTable4, nullptr, false,
       10000},
      {"tableE1", inflator_rows(), &adaptive_control_inflator_experiment, &kTableE1,
       nullptr, false, 10000},
      {"tableE2", bar_block_rows(), &adaptive_control_bar_experiment, &kTableE2, nullptr,
       false, 10000},
      {"tableE3", inflator_rows(), &adaptive_control_inflator_experiment, nullptr,
       &kTableE3, false, 10000},
      {"tableE4", bar_block_rows(), &adaptive_control_bar_experiment, nullptr, &kTableE4,
       false, 10000},
      {"tableE5", inflator_rows(), &sequential_inflator_experiment, &kTableE5, nullptr,
       true, 10000},
      {"tableE6", bar_sequential_rows(), &sequential_bar_experiment, &kTableE6, nullptr,
       true, 10000},
      {"tableE7", inflator_rows(), &block_inflator_experiment, &kTableE7, nullptr, true,
       10000},
      {"tableE8", bar_block_rows(), &block_bar_experiment, &kTableE8, nullptr, true,
       10000},
      {"tableE9", inflator_rows(), &adaptive_control_inflator_experiment, &kTableE9,
       nullptr, true, 10000},
      {"tableE10", bar_block_rows(), &adaptive_control_bar_experiment, &kTableE10,
       nullptr, true, 10000},
  };
  return specs;
}

}  // namespace

Experiment sequential_inflator_experiment(int h) {
  Experiment experiment;
  experiment.design = sequential_design(h);
  experiment.rule_name = "inflator";
  return experiment;
}

Experiment sequential_bar_experiment(int h) {
  Experiment experiment;
  experiment.design = sequential_design(h);
  experiment.rule_name = "bar_yin";
  experiment.rule_params.tau = 0.5;
  experiment.rule_params.prior_mean = 0.0;
  experiment.rule_params.prior_var = 1.0;
  return experiment;
}

Experiment block_inflator_experiment(int h) {
  Experiment experiment;
  experiment.design = block_design(h);
  experiment.rule_name = "inflator";
  return experiment;
}

Experiment block_bar_experiment(int h) {
  Experiment experiment;
  experiment.design = block_design(h);
  experiment.rule_name = "bar_wason";
  experiment.rule_params.gamma = 0.5;
  return experiment;
}

Experiment adaptive_control_inflator_experiment(int h) {
  Experiment experiment;
  experiment.design = adaptive_control_design(h);
  experiment.rule_name = "inflator";
  return experiment;
}

Experiment adaptive_control_bar_experiment(int h) {
  Experiment experiment;
  experiment.design = adaptive_control_design(h);
  experiment.rule_name = "bar_adaptive_control";
  experiment.rule_params.gamma = 0.5;
  experiment.rule_params.nu = 0.1;
  return experiment;
}

Experiment section23_experiment() {
  Experiment experiment;
  experiment.design = sequential_design(2);
  experiment.design.num_control = 60;
  experiment.rule_name = "inflator";
  experiment.scenario.effects = {0.0, 1.0};
  return experiment;
}

Experiment figure_experiment(int figure) {
  Experiment experiment;
  switch (figure) {
    case 1:
      experiment.design = sequential_design(2);
      experiment.scenario.effects = {0.0, 0.7};
      break;
    case 2:
      experiment.design = block_design(2);
      experiment.scenario.effects = {0.0, 0.5};
      break;
    case 3:
      experiment.design = block_design(2);
      experiment.scenario.effects = {0.0, 1.0};
      break;
    default:
      throw ConfigError("figure presets are figure1, figure2, figure3");
  }
  experiment.rule_name = "fixed";
  experiment.strategies = {Strategy::HolmAdaptive, Strategy::HolmZ};
  return experiment;
}

Experiment case_study_experiment() {
  Experiment experiment;
  TrialDesign design;
  design.regime = Regime::BlockFixedControl;
  design.num_treatments = 2;
  design.burn_in = {8, 8};
  design.burn_in_control = 7;
  design.blocks = {15, 15, 15};
  design.control_blocks = {8, 8, 8};
  design.num_experimental = 61;
  design.num_control = 31;
  design.alpha = 0.05;
  experiment.design = design;
  experiment.rule_name = "bar_wason";
  experiment.rule_params.gamma = 0.5;
  experiment.rule_params.prior_mean = 5.0;
  experiment.rule_params.prior_var = 1.0;
  experiment.scenario.control_mean = 17.3 / 3.5;
  experiment.scenario.effects = {(66.2 - 17.3) / 3.5, (72.3 - 17.3) / 3.5};
  return experiment;
}

double section23_naive_error(long sims, std::uint64_t seed, int workers) {
  // The unadjusted z-test on H_1 alone, no multiplicity correction: run the
  // demo with alpha as the per-test level and count T_1 rejections.
  Experiment experiment = section23_experiment();
  experiment.num_sims = sims;
  experiment.seed = seed;
  experiment.workers = workers;
  experiment.validate();
  auto rule = make_rule(experiment.rule_name, experiment.rule_params, 2);
  const double z_alpha = upper_quantile(experiment.design.alpha);
  long rejections = 0;
  for (long rep = 0; rep < sims; ++rep) {
    RngStream rng = RngStream::keyed(seed, rep, StreamKind::Trial);
    TrialData trial = run_trial(experiment.design, *rule, experiment.scenario, rng);
    NaiveStat stat = naive_z_statistic(trial, HypothesisSet::single(1));
    if (stat.available && stat.value >= z_alpha * stat.scale) ++rejections;
  }
  return static_cast<double>(rejections) / static_cast<double>(sims);
}

bool is_table_preset(const std::string& id) {
  for (const TableSpec& spec : table_specs()) {
    if (spec.id == id) return true;
  }
  return id == "section2_3" || id == "table5";
}

bool is_figure_preset(const std::string& id) {
  return id == "figure1" || id == "figure2" || id == "figure3";
}

std::vector<std::string> preset_ids() {
  std::vector<std::string> ids;
  for (const TableSpec& spec : table_specs()) ids.push_back(spec.id);
  ids.insert(ids.end(), {"table5", "section2_3", "figure1", "figure2", "figure3",
                         "appendixB1", "appendixB2", "appendixB3", "appendixB4"});
  return ids;
}

TableRun reproduce_table(const std::string& id, const RunOverrides& overrides) {
  for (const TableSpec& spec : table_specs()) {
    if (spec.id != id) continue;
    TableRun run;
    run.id = id;
    run.strategies = kTableStrategies;
    run.anomaly_table = spec.anomalies != nullptr;
    for (int row = 0; row < static_cast<int>(spec.rows.size()); ++row) {
      const ScenarioRow& scenario_row = spec.rows[row];
      const int h = static_cast<int>(scenario_row.deltas.size());
      Experiment experiment = spec.experiment(h);
      experiment.scenario.effects = scenario_row.deltas;
      experiment.num_sims = overrides.sims.value_or(spec.default_sims);
      experiment.seed = overrides.seed.value_or(20200828 + row);
      experiment.workers = overrides.workers.value_or(0);
      if (spec.pooled) experiment.variance_mode = VarianceMode::PooledEstimate;
      ScenarioRowResult row_result;
      row_result.label = scenario_row.label;
      row_result.deltas = scenario_row.deltas;
      row_result.result = run_experiment(experiment);
      run.rows.push_back(std::move(row_result));
      if (spec.printed) {
        for (int s = 0; s < 5; ++s) {
          for (int metric = 0; metric < 2; ++metric) {
            const double value = (*spec.printed)[row][s][metric];
            if (!std::isnan(value)) {
              run.reference[{row, kTableStrategies[s], metric}] = value;
            }
          }
        }
      }
      if (spec.anomalies) {
        for (int family = 0; family < 2; ++family) {
          for (int cls = 0; cls < 2; ++cls) {
            run.anomaly_reference[{row, family, cls}] =
                (*spec.anomalies)[row][family][cls];
          }
        }
      }
    }
    return run;
  }
  throw ConfigError("unknown table preset '" + id + "'");
}

FigureRun reproduce_figure(const std::string& id, const RunOverrides& overrides) {
  int figure;
  if (id == "figure1") figure = 1;
  else if (id == "figure2") figure = 2;
  else if (id == "figure3") figure = 3;
  else throw ConfigError("unknown figure preset '" + id + "'");

  Experiment base = figure_experiment(figure);
  base.num_sims = overrides.sims.value_or(10000);
  base.seed = overrides.seed.value_or(20200828);
  base.workers = overrides.workers.value_or(0);

  std::vector<double> grid;
  if (figure == 3) {
    for (int i = 0; i <= 8; ++i) grid.push_back(0.025 * i);
  } else {
    for (int i = 0; i <= 10; ++i) grid.push_back(0.1 * i);
  }
  FigureRun run;
  run.id = id;
  run.strategies = base.strategies;
  run.points = power_curve(base, grid);
  return run;
}

const std::vector<AppendixBCase>& appendix_b_cases() {
  static const std::vector<AppendixBCase> cases = {
      {"appendixB1",
       {1, 2, 2, 2, 1, 2, 2, 1, 2, 1, 2},
       {1, 2, 2, 1, 2, 2, 1, 1, 2, 1},
       {6, 6, 6, 5.16, 6, 6, 4.94, 4.94, 4.94, 4.94, NA},
       {6, 6, 6, 7.01, 5.74, 5.74, 7.63, 7.63, 7.63, 7.63, 7.63},
       9.74, -5.38, 9.58, 9.58},
      {"appendixB2",
       {1, 2, 1, 2, 1, 1, 2, 2, 1, 2, 1},
       {1, 2, 2, 1, 2, 2, 1, 1, 2, 1},
       {6, 6, 6.81, 5.83, 6.81, 8, 6.51, 4.94, 6.51, 4.09, 4.09},
       {6, 6, 5.16, 6, 4.94, 3.81, 4.94, 6.51, 4.10, 6.51, NA},
       10.17, 10.17, 9.23, -7.59},
      {"appendixB3",
       {1, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1},
       {1, 2, 2, 1, 2, 2, 1, 1, 2, 1},
       {6, 6, 6.81, 6.81, 8.00, 9.45, 9.45, 9.45, 12.95, 12.95, 12.95},
       {6, 6, 5.16, 5.16, 4.28, 3.33, 3.33, 3.33, 2.23, 2.23, NA},
       8.82, 8.82, 14.73, -2.25},
      {"appendixB4",
       {1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2},
       {1, 2, 2, 1, 2, 2, 1, 1, 2, 1},
       {6, 6, 6, 5.16, 5.16, 5.16, 4.28, 3.33, 3.33, 2.23, NA},
       {6, 6, 6, 7.01, 7.01, 7.01, 9.44, 12.91, 12.91, 22.89, 22.89},
       14.73, -2.25, 9.01, 9.01},
  };
  return cases;
}

CaseStudyReport run_case_study(std::uint64_t seed) {
  Experiment experiment = case_study_experiment();
  experiment.seed = seed;
  auto rule = make_rule(experiment.rule_name, experiment.rule_params, 2);
  RngStream rng = RngStream::keyed(seed, 0, StreamKind::Trial);
  CaseStudyReport out;
  out.trial = run_trial(experiment.design, *rule, experiment.scenario, rng);
  TestOptions options;
  options.alpha = experiment.design.alpha;
  out.report = analyze_trial(out.trial, replicate_aux_seed(seed, 0), options);
  for (int dose = 1; dose <= 2; ++dose) {
    out.aux_counts.push_back(
        out.report.intersection(HypothesisSet::single(dose)).schedule.aux_treatment_count);
  }
  return out;
}

}  // namespace raradapt
