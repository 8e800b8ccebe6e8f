#pragma once

#include <iosfwd>
#include <string>

#include "deal/grad.hpp"
#include "deal/loss.hpp"

namespace deal {

/// Model state persisted between commands: both encoders' tensors plus the
/// hyper-parameters the model was trained with.
struct Checkpoint {
  ModelParams params;
  HyperParams hp;
};

/// Versioned text format: header "deal-checkpoint v1", "hp <key> <value>"
/// echo lines, then named tensors as "tensor <name> <rows> <cols>" followed
/// by one row of decimal doubles per line. Values round-trip exactly.
void write_checkpoint(const Checkpoint& ckpt, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);

void write_checkpoint_file(const Checkpoint& ckpt, const std::string& path);
Checkpoint read_checkpoint_file(const std::string& path);

}  // namespace deal
