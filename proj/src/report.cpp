#include "raradapt/report.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "raradapt/csv.hpp"

namespace raradapt {

namespace {

const char* status_name(ScheduleStatus status) {
  switch (status) {
    case ScheduleStatus::Valid: return "valid";
    case ScheduleStatus::ImaginaryWeights: return "imaginary";
    case ScheduleStatus::Failed: return "failed";
  }
  return "?";
}

std::string reject_field(const TestReport& report, Strategy strategy, int hypothesis) {
  const auto it = report.rejections.find(strategy);
  if (it == report.rejections.end()) return "";
  return it->second.count(hypothesis) ? "1" : "0";
}

}  // namespace

void write_test_report_csv(std::ostream& out, const TestReport& report,
                           int num_treatments) {
  out << "hypothesis,t_naive,p_naive,t_adaptive,p_adaptive,schedule_status,"
         "reject_adaptive_closed,reject_holm_adaptive,reject_closed_z,reject_holm_z,"
         "reject_bonferroni_z,reject_dual_holm\n";
  for (int i = 1; i <= num_treatments; ++i) {
    const IntersectionResult& inter = report.intersection(HypothesisSet::single(i));
    out << i << ',';
    out << (inter.naive.available ? format_double(inter.naive.value) : "") << ','
        << format_double(report.naive_p[i - 1]) << ',';
    out << (inter.adaptive.available ? format_double(inter.adaptive.value) : "") << ','
        << format_double(report.adaptive_p[i - 1]) << ','
        << status_name(inter.schedule.status) << ',';
    out << reject_field(report, Strategy::AdaptiveClosed, i) << ','
        << reject_field(report, Strategy::HolmAdaptive, i) << ','
        << reject_field(report, Strategy::ClosedZ, i) << ','
        << reject_field(report, Strategy::HolmZ, i) << ','
        << reject_field(report, Strategy::BonferroniZ, i) << ','
        << reject_field(report, Strategy::DualHolm, i) << '\n';
  }
}

void write_test_report_json(std::ostream& out, const TestReport& report,
                            const TrialData& trial) {
  nlohmann::json root;
  root["alpha"] = report.alpha;
  root["variance_mode"] =
      report.variance_mode == VarianceMode::Known ? "known" : "pooled";
  root["sigma"] = report.sigma_hat;
  root["n_control"] = trial.realized_control_count();
  nlohmann::json intersections = nlohmann::json::array();
  for (const IntersectionResult& inter : report.intersections) {
    nlohmann::json entry;
    entry["hypothesis"] = inter.set.label();
    entry["n_actual"] = trial.realized_in_set(inter.set);
    entry["n_auxiliary"] = inter.schedule.aux_treatment_count;
    entry["status"] = status_name(inter.schedule.status);
    if (inter.naive.available) {
      entry["t_naive"] = inter.naive.value;
      entry["naive_rejected"] = inter.naive_rejected;
    }
    if (inter.adaptive.available) {
      entry["t_adaptive"] = inter.adaptive.value;
      entry["adaptive_rejected"] = inter.adaptive_rejected;
    }
    if (inter.schedule.valid()) {
      entry["treatment_weights"] = inter.schedule.treatment_weights;
      entry["control_weights"] = inter.schedule.control_weights;
      if (inter.schedule.final_split != FinalSplitKind::None) {
        entry["final_split"] = {
            {"kind", inter.schedule.final_split == FinalSplitKind::Control
                         ? "control"
                         : "treatment"},
            {"n1", inter.schedule.split_n1},
            {"n2", inter.schedule.split_n2},
            {"w1", inter.schedule.split_w1},
            {"w2", inter.schedule.split_w2},
        };
      }
      const AnomalyReport anomaly = detect_weight_anomalies(inter.schedule);
      entry["negative_treatment_weight"] = anomaly.negative_treatment;
      entry["negative_control_weight"] = anomaly.negative_control;
    }
    intersections.push_back(std::move(entry));
  }
  root["intersections"] = std::move(intersections);
  nlohmann::json rejected;
  for (const auto& [strategy, set] : report.rejections) {
    rejected[strategy_name(strategy)] = std::vector<int>(set.begin(), set.end());
  }
  root["rejections"] = std::move(rejected);
  out << root.dump(2) << '\n';
}

void write_case_study_csv(std::ostream& out, const CaseStudyReport& report) {
  out << "dose,n_actual,n_auxiliary,z_statistic,z_p,adaptive_statistic,adaptive_p,"
         "treatment_weights,control_weights\n";
  const char* names[] = {"low", "high"};
  for (int dose = 1; dose <= 2; ++dose) {
    const IntersectionResult& inter =
        report.report.intersection(HypothesisSet::single(dose));
    out << names[dose - 1] << ',' << report.trial.realized_count(dose) << ','
        << inter.schedule.aux_treatment_count << ','
        << format_double(inter.naive.value) << ','
        << format_double(report.report.naive_p[dose - 1]) << ','
        << format_double(inter.adaptive.value) << ','
        << format_double(report.report.adaptive_p[dose - 1]) << ',';
    std::string treat, ctrl;
    for (std::size_t block = 0; block < inter.schedule.treatment_weights.size(); ++block) {
      if (block) {
        treat += ' ';
        ctrl += ' ';
      }
      treat += format_double(inter.schedule.treatment_weights[block]);
      ctrl += format_double(inter.schedule.control_weights[block]);
    }
    out << treat << ',' << ctrl << '\n';
  }
}

}  // namespace raradapt
