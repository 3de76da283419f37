#pragma once

#include <optional>
#include <vector>

#include "saw/jump_detect.hpp"
#include "saw/panel_data.hpp"
#include "saw/post_saw.hpp"
#include "saw/saw_core.hpp"

namespace saw {

struct PipelineOptions {
  InstrumentMode instruments = InstrumentMode::self;
  std::vector<int> endogenous;  // 0-based; empty means every regressor
  TimeEffects time_effects = TimeEffects::unit_regressor;
  int variance_case = 4;
  bool common_jumps = false;
  SawOptions saw;
  /// Skip detection and refit on these locations (one list per regressor).
  std::optional<std::vector<std::vector<int>>> known_taus;
};

struct PipelineResult {
  PanelDataset panel;  // with instruments prepared
  DifferencedPanel differenced;
  SawFit saw;
  JumpReport jumps;
  SegmentDesign design;
  PostSawFit post;
  Eigen::MatrixXd beta_path;  // T × P from the post-SAW fit
  ModelComponents effects;
};

/// prepare_instruments → difference/pad → SAW → detect → post-SAW.
PipelineResult run_pipeline(const PanelDataset& panel, const PipelineOptions& opts = {});

}  // namespace saw
