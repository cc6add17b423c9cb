#pragma once

#include <iosfwd>

namespace mind {

/// Fast invariant suite: oracle AUC equality, an encoder/decoder gradient
/// check and the softmax-attention collapse. Prints one line per check and
/// returns the number of failures.
int run_selfcheck(std::ostream& out, unsigned long long seed = 0);

}  // namespace mind
