#pragma once

#include <string>
#include <vector>

#include "deal/config.hpp"

namespace deal {

// Subcommand entry points. Each writes its outputs plus an
// effective-config echo under the configured out directory and returns 0;
// failures are reported by exception (the CLI maps them to a nonzero exit).

int cmd_split(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_diagnose(const RunConfig& config);

/// Pair specs are "A,B" with each side either a node id or @path pointing
/// to a sparse attribute file ("attr_id<TAB>value" lines).
int cmd_predict(const RunConfig& config, const std::vector<std::string>& pair_specs);

}  // namespace deal
