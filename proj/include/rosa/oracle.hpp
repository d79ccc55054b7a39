#pragma once

#include "rosa/hpl.hpp"
#include "rosa/monitor.hpp"
#include "rosa/trace.hpp"

namespace rosa {

/// Definitional verdict by explicit quantification over event indices. Meant
/// for small traces; cost is polynomial in the trace length.
Verdict oracle_verdict(const HplProperty& p, const Trace& t);

}  // namespace rosa
