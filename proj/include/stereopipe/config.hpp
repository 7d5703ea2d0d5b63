#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "stereopipe/pipeline.hpp"

namespace stereopipe {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Applies a flat key=value configuration to cfg. '#' starts a comment;
/// blank lines are ignored. Keys mirror the pipeline symbols (P1, P2, o_d,
/// n_i, p, q, t_c, t_t, w_s, l_max, ...); unknown keys are errors. See
/// config_keys_help() for the full list.
void apply_config_text(PipelineConfig& cfg, std::string_view text,
                       const std::string& source = "config");
void apply_config_file(PipelineConfig& cfg, const std::string& path);

/// One key=value assignment, as found in a config file line.
void apply_config_key(PipelineConfig& cfg, std::string_view key, std::string_view value,
                      const std::string& context = "config");

/// Human-readable list of recognized keys, one per line.
std::string config_keys_help();

}  // namespace stereopipe
