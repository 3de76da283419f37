#include "saw/pipeline.hpp"

#include <string>

#include "saw/errors.hpp"
#include "saw/log.hpp"

namespace saw {

PipelineResult run_pipeline(const PanelDataset& panel, const PipelineOptions& opts) {
  PipelineResult r;
  r.panel = prepare_instruments(panel, opts.instruments, opts.endogenous);
  r.differenced = prepare_differenced(r.panel, opts.time_effects);
  r.saw = fit_saw(r.differenced, opts.saw);
  r.jumps = detect_jumps(r.saw, r.panel.P(), static_cast<int>(r.panel.T));
  log::debug("lambda " + std::to_string(r.saw.lambda) + ", V " + std::to_string(r.saw.v_hat));

  if (opts.known_taus) {
    r.design = build_design(r.panel, *opts.known_taus);
  } else {
    r.design = build_design(r.panel, r.jumps, opts.common_jumps);
  }
  r.post = fit_post_saw(r.design, opts.variance_case);
  r.beta_path = saw::beta_path(r.design, r.post.beta);
  r.effects = recover_effects(r.panel, r.beta_path);
  return r;
}

}  // namespace saw
