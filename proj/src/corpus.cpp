#include "seghyp/corpus.hpp"

#include <array>
#include <fstream>
#include <utility>

#include <json.hpp>

#include "seghyp/random.hpp"

namespace seghyp {

namespace {

using nlohmann::json;

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    throw DataError("line " + std::to_string(line_no) + ": " + what);
}

Annotated parse_record(const json& rec, std::size_t line_no, TypeVocab& types) {
    if (!rec.is_object()) line_error(line_no, "record is not a JSON object");
    Annotated out;
    if (rec.contains("id")) {
        if (!rec.at("id").is_string()) line_error(line_no, "\"id\" must be a string");
        out.sentence.id = rec.at("id").get<std::string>();
    } else {
        out.sentence.id = "line-" + std::to_string(line_no);
    }
    if (!rec.contains("tokens") || !rec.at("tokens").is_array())
        line_error(line_no, "missing \"tokens\" array");
    for (const auto& tok : rec.at("tokens")) {
        if (!tok.is_string()) line_error(line_no, "tokens must be strings");
        out.sentence.tokens.push_back(tok.get<std::string>());
    }
    if (out.sentence.tokens.empty()) line_error(line_no, "token array is empty");
    const int n = out.sentence.length();
    if (rec.contains("pos")) {
        if (!rec.at("pos").is_array()) line_error(line_no, "\"pos\" must be an array");
        for (const auto& tag : rec.at("pos")) {
            if (!tag.is_string()) line_error(line_no, "pos tags must be strings");
            out.sentence.pos.push_back(tag.get<std::string>());
        }
        if (out.sentence.pos.size() != static_cast<std::size_t>(n))
            line_error(line_no, "pos length mismatch");
    }
    if (rec.contains("mentions")) {
        if (!rec.at("mentions").is_array()) line_error(line_no, "\"mentions\" must be an array");
        for (const auto& m : rec.at("mentions")) {
            if (!m.is_object() || !m.contains("start") || !m.contains("end") ||
                !m.contains("type"))
                line_error(line_no, "mention needs start, end, and type");
            if (!m.at("start").is_number_integer() || !m.at("end").is_number_integer())
                line_error(line_no, "mention span must be integer");
            if (!m.at("type").is_string()) line_error(line_no, "mention type must be a string");
            auto start = m.at("start").get<std::int64_t>();
            auto end = m.at("end").get<std::int64_t>();
            if (start < 0 || end < start || end >= n) line_error(line_no, "span out of range");
            int type = types.intern(m.at("type").get<std::string>());
            out.mentions.push_back({static_cast<std::int32_t>(start),
                                    static_cast<std::int32_t>(end),
                                    static_cast<std::int32_t>(type)});
        }
    }
    out.mentions = canonicalize(std::move(out.mentions));
    return out;
}

}  // namespace

long long Corpus::token_count() const {
    long long total = 0;
    for (const Annotated& a : items) total += a.sentence.length();
    return total;
}

Corpus parse_corpus(const std::string& path, TypeVocab& types) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read corpus file: " + path);
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            line_error(line_no, std::string("malformed JSON: ") + e.what());
        }
        corpus.items.push_back(parse_record(rec, line_no, types));
    }
    return corpus;
}

void write_corpus(const Corpus& corpus, const TypeVocab& types, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write corpus file: " + path);
    for (const Annotated& a : corpus.items) {
        json rec;
        rec["id"] = a.sentence.id;
        rec["tokens"] = a.sentence.tokens;
        if (a.sentence.has_pos()) rec["pos"] = a.sentence.pos;
        json mentions = json::array();
        for (const Mention& m : a.mentions)
            mentions.push_back(
                {{"start", m.start}, {"end", m.end}, {"type", types.name(m.type)}});
        rec["mentions"] = std::move(mentions);
        out << rec.dump() << '\n';
    }
    if (!out) throw DataError("failed while writing corpus file: " + path);
}

namespace {

// Word inventories for the generator. Trigger words deterministically imply
// mentions; plain fillers never do. "the" occurs only as the start of a
// facility wrapper, so span starts stay learnable from local context.
const std::array<const char*, 6> kFacilityNouns = {"zoo",     "park",    "museum",
                                                   "airport", "stadium", "library"};
const std::array<const char*, 3> kGlue = {"in", "at", "near"};
constexpr int kCityCount = 20;
constexpr int kNameCount = 12;

std::string city_word(std::uint64_t i) { return "city_" + std::to_string(i); }
std::string name_word(std::uint64_t i) { return "name_" + std::to_string(i); }

std::string pos_of(const std::string& tok) {
    if (tok == "the") return "DT";
    if (tok == "in" || tok == "at" || tok == "near") return "IN";
    if (tok.rfind("city_", 0) == 0 || tok.rfind("name_", 0) == 0 || tok == "jr") return "NNP";
    return "NN";
}

}  // namespace

Corpus synth_corpus(const SynthConfig& config, TypeVocab& types) {
    if (config.sentence_count < 0) throw DataError("sentence count must be non-negative");
    if (config.vocab < 1) throw DataError("vocab size must be positive");
    if (config.nesting_prob < 0.0 || config.nesting_prob > 1.0)
        throw DataError("nesting probability must lie in [0, 1]");
    if (config.max_sentence_len < 5) throw DataError("max sentence length must be at least 5");

    const int fac = types.intern("FAC");
    const int gpe = types.intern("GPE");
    const int per = types.intern("PER");

    Corpus corpus;
    corpus.items.reserve(static_cast<std::size_t>(config.sentence_count));
    for (int s = 0; s < config.sentence_count; ++s) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(s)));
        int target_len =
            5 + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.max_sentence_len - 4)));
        bool overlap = rng.bernoulli(config.nesting_prob);
        bool same_type = overlap && rng.bernoulli(0.5);

        // The overlapping chunk: a facility wrapper around a city, or a
        // same-type person pair ("name_k jr" is both the longer and, without
        // "jr", the shorter person mention).
        std::vector<std::string> special;
        std::vector<Mention> special_mentions;  // offsets relative to chunk
        if (overlap && !same_type) {
            special = {"the", city_word(rng.below(kCityCount)),
                       kFacilityNouns[rng.below(kFacilityNouns.size())]};
            special_mentions = {{0, 2, static_cast<std::int32_t>(fac)},
                                {1, 1, static_cast<std::int32_t>(gpe)}};
        } else if (overlap) {
            special = {name_word(rng.below(kNameCount)), "jr"};
            special_mentions = {{0, 0, static_cast<std::int32_t>(per)},
                                {0, 1, static_cast<std::int32_t>(per)}};
        }

        int unit_count = target_len - static_cast<int>(special.size());
        int special_at = overlap ? static_cast<int>(rng.below(
                                       static_cast<std::uint64_t>(unit_count + 1)))
                                 : -1;

        Annotated item;
        item.sentence.id = "synth-" + std::to_string(s);
        auto emit_special = [&]() {
            int base = item.sentence.length();
            for (const std::string& tok : special) item.sentence.tokens.push_back(tok);
            for (const Mention& m : special_mentions)
                item.mentions.push_back({m.start + base, m.end + base, m.type});
        };
        for (int u = 0; u < unit_count; ++u) {
            if (u == special_at) emit_special();
            double roll = rng.uniform();
            if (roll < 0.60) {
                item.sentence.tokens.push_back(
                    "w_" + std::to_string(rng.below(static_cast<std::uint64_t>(config.vocab))));
            } else if (roll < 0.70) {
                item.sentence.tokens.push_back(kGlue[rng.below(kGlue.size())]);
            } else if (roll < 0.85) {
                int at = item.sentence.length();
                item.sentence.tokens.push_back(city_word(rng.below(kCityCount)));
                item.mentions.push_back({at, at, static_cast<std::int32_t>(gpe)});
            } else {
                int at = item.sentence.length();
                item.sentence.tokens.push_back(name_word(rng.below(kNameCount)));
                item.mentions.push_back({at, at, static_cast<std::int32_t>(per)});
            }
        }
        if (special_at == unit_count) emit_special();

        for (const std::string& tok : item.sentence.tokens)
            item.sentence.pos.push_back(pos_of(tok));
        item.mentions = canonicalize(std::move(item.mentions));
        corpus.items.push_back(std::move(item));
    }
    return corpus;
}

}  // namespace seghyp
