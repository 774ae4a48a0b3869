#pragma once

#include <string>
#include <vector>

#include "spdc/config.hpp"
#include "spdc/design.hpp"

namespace spdc {

// Target selection for the design command: one of the named Bell states, or
// an explicit 2x2 coefficient matrix (row-major over the first-order HG
// pair) when custom_coeffs is nonempty.
struct DesignRequest {
  BellState bell = BellState::PsiPlus;
  std::vector<complexd> custom_coeffs;
  double regularization = 1e-8;
  bool emit_hologram = false;
};

// Each command writes its artifacts into out_dir (created if needed) and
// returns the file names it produced, relative to out_dir.  Every JSON
// artifact embeds the fully resolved config, so a run can be reproduced from
// any one of its outputs.  All outputs are deterministic functions of
// (config, seed): identical inputs give byte-identical files.
std::vector<std::string> cmd_spectrum(const RunConfig& config,
                                      const std::string& out_dir);
std::vector<std::string> cmd_chsh(const RunConfig& config,
                                  const std::string& out_dir);
std::vector<std::string> cmd_design(const RunConfig& config,
                                    const DesignRequest& request,
                                    const std::string& out_dir);
std::vector<std::string> cmd_hologram(const RunConfig& config,
                                      const std::string& out_dir);
std::vector<std::string> cmd_convert(const RunConfig& config,
                                     const std::string& out_dir);

}  // namespace spdc
