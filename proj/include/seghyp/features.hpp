#pragma once

// Handcrafted sparse feature templates for the linear scorer. Every feature
// string is "FAMILY:name=value:type=k" with family prefixes TX:, TI:, IX:
// (mention-ending edges), IB: (end-and-continue edges), II: (continuation
// edges). Spine edges carry no features.

#include <string>
#include <vector>

#include "seghyp/types.hpp"

namespace seghyp {

/// Character-class shape: uppercase -> A, lowercase -> a, digit -> 0, other
/// -> -, with runs collapsed to a trailing '+' ("Seattle" -> "Aa+",
/// "ABC-123" -> "A+-0+").
std::string word_shape(const std::string& word);

std::string lowercase(const std::string& word);

/// Deterministic feature strings for one hyperedge. Spine edges yield none.
std::vector<std::string> extract_features(const HyperedgeId& edge, const Sentence& sentence);

}  // namespace seghyp
