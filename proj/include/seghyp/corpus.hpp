#pragma once

// Corpus I/O and synthetic data. Corpora are JSON-lines files, one record per
// line: {"id": string, "tokens": [string...], "pos": [string...] optional,
// "mentions": [{"start": int, "end": int, "type": string}...] optional},
// with 0-based inclusive token spans.

#include <cstdint>
#include <string>
#include <vector>

#include "seghyp/types.hpp"

namespace seghyp {

struct Annotated {
    Sentence sentence;
    MentionSet mentions;  // canonical
};

struct Corpus {
    std::vector<Annotated> items;

    std::size_t size() const { return items.size(); }
    long long token_count() const;
};

/// Reads a JSONL corpus; mention type strings are interned into `types`.
/// Malformed input raises DataError with a "line k: ..." diagnostic.
Corpus parse_corpus(const std::string& path, TypeVocab& types);

/// Writes a corpus in the same JSONL format (round-trips under parse_corpus).
void write_corpus(const Corpus& corpus, const TypeVocab& types, const std::string& path);

/// Synthetic-corpus shape. Generation is deterministic per config: trigger
/// words imply mentions, and with probability nesting_prob a sentence embeds
/// an overlapping mention pair (half of those nest two mentions of the same
/// type).
struct SynthConfig {
    int sentence_count = 500;
    int vocab = 200;  // filler-word inventory size
    double nesting_prob = 0.5;
    int max_sentence_len = 12;
    std::uint64_t seed = 1;
};

Corpus synth_corpus(const SynthConfig& config, TypeVocab& types);

}  // namespace seghyp
