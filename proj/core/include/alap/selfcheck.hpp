#pragma once

#include <iosfwd>

namespace alap {

/// Pinned-seed invariant suite of the Stein machinery: characterisation,
/// solution regularity, plug-back residuals, discrepancy separation.
/// Prints one line per check; returns the number of failures.
int selfcheck_stein(std::ostream& os);

/// Pinned-seed invariant suite of the equilibrium transform: unit mass,
/// fixed point, support, moment identities, coupling marginals.
int selfcheck_equilibrium(std::ostream& os);

/// Both suites; returns the total failure count (0 = pass).
int run_selfcheck(std::ostream& os);

}  // namespace alap
