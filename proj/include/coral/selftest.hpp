#pragma once

#include <iosfwd>

namespace coral {

/// Runs the cross-module invariant suites (flow conservation, value-occupancy
/// identity, conjugacy, oracle residuals, penalty invariance) and prints one
/// line per suite. Returns true when every suite passes.
bool run_selftest(std::ostream& out);

}  // namespace coral
