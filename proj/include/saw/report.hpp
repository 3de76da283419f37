#pragma once

#include <iosfwd>
#include <string>

#include "saw/dgp_sim.hpp"
#include "saw/pipeline.hpp"

namespace saw::report {

// JSON documents as strings (pretty-printed, two-space indent).
std::string saw_fit_json(const PipelineResult& r);
std::string jumps_json(const PipelineResult& r);
std::string post_saw_json(const PipelineResult& r);

/// Segment table: regressor, segment, start and end labels, coefficient,
/// standard error, and the z / p-value against the previous segment.
void write_report_csv(std::ostream& out, const PipelineResult& r);

/// Two stacked panels: the SAW path γ̂_{t,p} and the post-SAW step function.
std::string regressor_svg(const PipelineResult& r, int p);

/// Writes saw_fit.json, jumps.json, post_saw.json, report.csv and, with
/// `plot`, one <name>.svg per regressor into `dir` (created if missing).
void write_fit_artifacts(const std::string& dir, const PipelineResult& r, bool plot);

/// One row per run with "mean" and "sd" columns per statistic, fixed precision.
void write_mc_table(std::ostream& out, const McResult& mc);
/// Table-style text: "S_1  2.00 (0.00)" etc.
void write_mc_summary(std::ostream& out, const McResult& mc);

}  // namespace saw::report
