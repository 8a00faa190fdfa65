#pragma once

#include "normcase/reasoner/state.hpp"

#include <string>
#include <vector>

namespace normcase::reasoner {

struct ExplanationEntry {
    std::uint64_t seq = 0;
    TraceKind kind = TraceKind::InitStatement;
    std::string summary;
    std::vector<std::string> details; // one line per fact change
};

/// Human-readable rendering of the trace, one entry per event, in seq order.
std::vector<ExplanationEntry> explain(const ReasonerState& state);

} // namespace normcase::reasoner
