#pragma once

#include <iosfwd>

#include "raradapt/presets.hpp"
#include "raradapt/testing.hpp"

namespace raradapt {

// Per-hypothesis statistics, p-values and per-strategy decisions.
void write_test_report_csv(std::ostream& out, const TestReport& report,
                           int num_treatments);

// Full per-intersection detail (statistics, thresholds, weights, anomalies).
void write_test_report_json(std::ostream& out, const TestReport& report,
                            const TrialData& trial);

// Single simulated case-study trial in the published report layout.
void write_case_study_csv(std::ostream& out, const CaseStudyReport& report);

}  // namespace raradapt
