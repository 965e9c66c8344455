#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "seghyp/scorer.hpp"

namespace seghyp {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "seghyp-model";
constexpr int kVersion = 1;

json tensor_to_json(const TensorRef& ref) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < ref.rows; ++r) {
        json row = json::array();
        // Eigen matrices are column-major: element (r, c) sits at c*rows + r.
        for (Eigen::Index c = 0; c < ref.cols; ++c) row.push_back(ref.data[c * ref.rows + r]);
        rows.push_back(std::move(row));
    }
    return json{{"rows", ref.rows}, {"cols", ref.cols}, {"data", std::move(rows)}};
}

void tensor_from_json(const json& j, const TensorRef& ref, const std::string& name) {
    if (j.at("rows").get<Eigen::Index>() != ref.rows ||
        j.at("cols").get<Eigen::Index>() != ref.cols)
        throw DataError("model tensor '" + name + "' has unexpected shape");
    const json& rows = j.at("data");
    for (Eigen::Index r = 0; r < ref.rows; ++r) {
        const json& row = rows.at(static_cast<std::size_t>(r));
        for (Eigen::Index c = 0; c < ref.cols; ++c)
            ref.data[c * ref.rows + r] = row.at(static_cast<std::size_t>(c)).get<double>();
    }
}

json config_to_json(const NeuralConfig& c) {
    return json{{"wordDim", c.word_dim},     {"posDim", c.pos_dim},
                {"usePos", c.use_pos},       {"useChar", c.use_char},
                {"charDim", c.char_dim},     {"charHidden", c.char_hidden},
                {"wordHidden", c.word_hidden}, {"spanHidden", c.span_hidden},
                {"dropout", c.dropout}};
}

NeuralConfig config_from_json(const json& j) {
    NeuralConfig c;
    c.word_dim = j.at("wordDim").get<int>();
    c.pos_dim = j.at("posDim").get<int>();
    c.use_pos = j.at("usePos").get<bool>();
    c.use_char = j.at("useChar").get<bool>();
    c.char_dim = j.at("charDim").get<int>();
    c.char_hidden = j.at("charHidden").get<int>();
    c.word_hidden = j.at("wordHidden").get<int>();
    c.span_hidden = j.at("spanHidden").get<int>();
    c.dropout = j.at("dropout").get<double>();
    return c;
}

StringVocab vocab_from_json(const json& j, const std::string& what) {
    auto items = j.get<std::vector<std::string>>();
    if (items.empty() || items.front() != StringVocab::unk())
        throw DataError("model " + what + " vocabulary must start with the unknown symbol");
    StringVocab v;  // index 0 is already the unknown symbol
    for (std::size_t i = 1; i < items.size(); ++i)
        if (v.add(items[i]) != static_cast<int>(i))
            throw DataError("model " + what + " vocabulary contains duplicates");
    return v;
}

}  // namespace

ScoredSentence Model::score(const Sentence& sentence, const SegmentalHypergraph& g) {
    ScoredSentence s = is_linear() ? linear().score(sentence, g)
                                   : neural().score(sentence, g, false, 0);
    s.backward = nullptr;
    return s;
}

MentionSet Model::predict(const Sentence& sentence, GraphCache& cache) {
    int n = sentence.length();
    auto g = cache.get(n, types.size(), cap_for(n));
    ScoredSentence s = score(sentence, *g);
    auto [path, best] = map_decode(*g, s.scores);
    (void)best;
    return decode(path, *g);
}

void save_model(const Model& model, const std::string& path) {
    json doc;
    doc["format"] = kFormat;
    doc["version"] = kVersion;
    doc["maxLen"] = model.max_len;
    doc["types"] = model.types.names();
    if (model.is_linear()) {
        doc["scorer"] = "linear";
        const LinearScorer& lin = model.linear();
        json weights = json::object();  // object keys serialize sorted
        for (std::size_t i = 0; i < lin.feature_count(); ++i)
            weights[lin.names()[i]] = lin.weights()[i];
        doc["weights"] = std::move(weights);
    } else {
        doc["scorer"] = "neural";
        // Tensor data is only read here; refs need a mutable params object.
        auto& scorer = const_cast<NeuralScorer&>(model.neural());
        doc["config"] = config_to_json(scorer.config());
        doc["words"] = scorer.words().items();
        doc["posTags"] = scorer.pos_tags().items();
        doc["chars"] = scorer.chars().items();
        doc["rareWords"] = scorer.rare_words();
        json tensors = json::object();
        for (const TensorRef& ref : tensor_refs(scorer.params()))
            tensors[ref.name] = tensor_to_json(ref);
        doc["tensors"] = std::move(tensors);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    out << doc.dump() << '\n';
    if (!out) throw DataError("failed while writing model file: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read model file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("model file " + path + " is not valid JSON: " + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != kFormat)
            throw DataError("not a model file: " + path);
        if (doc.at("version").get<int>() != kVersion)
            throw DataError("unsupported model version in " + path);
        Model model;
        model.max_len = doc.at("maxLen").get<int>();
        for (const auto& name : doc.at("types").get<std::vector<std::string>>())
            model.types.intern(name);
        std::string kind = doc.at("scorer").get<std::string>();
        if (kind == "linear") {
            LinearScorer lin;
            for (const auto& [name, value] : doc.at("weights").items()) {
                std::uint32_t id = lin.intern(name);
                lin.weights()[id] = value.get<double>();
            }
            model.scorer = std::move(lin);
        } else if (kind == "neural") {
            NeuralConfig config = config_from_json(doc.at("config"));
            StringVocab words = vocab_from_json(doc.at("words"), "word");
            StringVocab pos = vocab_from_json(doc.at("posTags"), "POS");
            StringVocab chars = vocab_from_json(doc.at("chars"), "char");
            auto rare = doc.at("rareWords").get<std::vector<std::uint8_t>>();
            NeuralScorer scorer(config, std::move(words), std::move(pos), std::move(chars),
                                std::move(rare), model.types.size(), 0);
            const json& tensors = doc.at("tensors");
            for (const TensorRef& ref : tensor_refs(scorer.params()))
                tensor_from_json(tensors.at(ref.name), ref, ref.name);
            model.scorer = std::move(scorer);
        } else {
            throw DataError("unknown scorer kind in model file: " + kind);
        }
        return model;
    } catch (const json::exception& e) {
        throw DataError("model file " + path + " is malformed: " + e.what());
    }
}

int load_pretrained_embeddings(const std::string& path, const StringVocab& words,
                               Eigen::MatrixXd& word_emb) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read embedding file: " + path);
    int matched = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string token;
        ss >> token;
        int id = words.lookup(token);
        if (id == 0 && token != StringVocab::unk()) {
            continue;  // token outside the vocabulary; skip the line
        }
        Eigen::VectorXd vec(word_emb.rows());
        for (Eigen::Index d = 0; d < vec.size(); ++d) {
            if (!(ss >> vec(d)))
                throw DataError("embedding file line " + std::to_string(line_no) +
                                ": expected " + std::to_string(word_emb.rows()) + " values");
        }
        double extra;
        if (ss >> extra)
            throw DataError("embedding file line " + std::to_string(line_no) +
                            ": too many values");
        word_emb.col(id) = vec;
        ++matched;
    }
    return matched;
}

}  // namespace seghyp
