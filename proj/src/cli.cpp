#include "seghyp/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seghyp/corpus.hpp"
#include "seghyp/evaluation.hpp"
#include "seghyp/oracle.hpp"
#include "seghyp/scorer.hpp"
#include "seghyp/training.hpp"

namespace seghyp {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerifyFailed = 3;

struct TrainArgs {
    std::string train_path, dev_path, model_path, log_path;
    TrainConfig config;
};

int cmd_train(const TrainArgs& args) {
    TypeVocab types;
    Corpus train_corpus = parse_corpus(args.train_path, types);
    Corpus dev_corpus = parse_corpus(args.dev_path, types);
    TrainResult result = train(train_corpus, dev_corpus, types, args.config);
    save_model(result.model, args.model_path);
    std::string log_path =
        args.log_path.empty() ? args.model_path + ".log.jsonl" : args.log_path;
    write_training_log(result.log, log_path);
    for (const EpochLog& e : result.log) {
        nlohmann::json rec{{"epoch", e.epoch},
                           {"loss", e.loss},
                           {"dev_p", e.dev_p},
                           {"dev_r", e.dev_r},
                           {"dev_f1", e.dev_f1}};
        std::printf("%s\n", rec.dump().c_str());
    }
    std::fprintf(stderr, "best epoch %d; model written to %s; log written to %s\n",
                 result.best_epoch, args.model_path.c_str(), log_path.c_str());
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& input_path,
                const std::string& output_path) {
    Model model = load_model(model_path);
    TypeVocab types = model.types;
    Corpus corpus = parse_corpus(input_path, types);
    GraphCache cache;
    for (Annotated& item : corpus.items)
        item.mentions = model.predict(item.sentence, cache);
    write_corpus(corpus, types, output_path);
    return kExitOk;
}

int cmd_eval(const std::string& gold_path, const std::string& pred_path, bool as_json) {
    TypeVocab types;
    Corpus gold = parse_corpus(gold_path, types);
    Corpus pred = parse_corpus(pred_path, types);
    if (gold.size() != pred.size())
        throw DataError("gold and prediction files differ in sentence count (" +
                        std::to_string(gold.size()) + " vs " + std::to_string(pred.size()) +
                        ")");
    std::vector<MentionSet> gold_sets, pred_sets;
    for (const Annotated& item : gold.items) gold_sets.push_back(item.mentions);
    for (const Annotated& item : pred.items) pred_sets.push_back(item.mentions);
    EvalReport report = evaluate(gold_sets, pred_sets);
    if (as_json)
        std::printf("%s\n", report_to_json(report, /*include_throughput=*/false).c_str());
    else
        std::printf("%s", report_to_table(report).c_str());
    return kExitOk;
}

int cmd_verify(int max_n, int max_m, int seeds) {
    oracle::EnumerationReport report = oracle::verify(max_n, max_m, {2, 0}, seeds);
    std::printf("%s\n", oracle::report_to_json(report).c_str());
    return report.all_ok ? kExitOk : kExitVerifyFailed;
}

int cmd_bench(const std::string& model_path, const std::string& input_path, int repeat) {
    Model model = load_model(model_path);
    TypeVocab types = model.types;
    Corpus corpus = parse_corpus(input_path, types);
    double rate = benchmark_decode(model, corpus, repeat);
    nlohmann::json doc{{"wordsPerSecond", rate},
                       {"tokens", corpus.token_count()},
                       {"sentences", corpus.size()},
                       {"repeat", repeat}};
    std::printf("%s\n", doc.dump(2).c_str());
    return kExitOk;
}

int cmd_synth(const SynthConfig& config, const std::string& out_path) {
    TypeVocab types;
    Corpus corpus = synth_corpus(config, types);
    write_corpus(corpus, types, out_path);
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Exact inference and training for overlapping mention recognition"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train a model");
    train_cmd->add_option("--train", train_args.train_path, "Training corpus (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--dev", train_args.dev_path, "Development corpus (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--model", train_args.model_path, "Output model file")->required();
    train_cmd->add_option("--scorer", train_args.config.scorer, "Scorer kind")
        ->required()
        ->check(CLI::IsMember({"linear", "neural"}));
    train_cmd->add_option("--embeddings", train_args.config.embeddings,
                          "Pretrained word-vector file")
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--max-len", train_args.config.max_len,
                          "Mention-length cap (0 = unrestricted)")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--beta", train_args.config.beta, "False-negative cost (>= 1)")
        ->check(CLI::Range(1.0, 1e9));
    train_cmd->add_option("--epochs", train_args.config.epochs, "Maximum epochs")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", train_args.config.seed, "Random seed");
    train_cmd->add_option("--lr", train_args.config.learning_rate, "Learning rate")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--l2", train_args.config.l2, "L2 strength")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--dropout", train_args.config.dropout, "Dropout rate on inputs")
        ->check(CLI::Range(0.0, 0.999));
    train_cmd->add_option("--patience", train_args.config.patience,
                          "Epochs without dev improvement before stopping")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--clip-norm", train_args.config.clip_norm, "Gradient norm cap")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--log", train_args.log_path,
                          "Training-log path (default: <model>.log.jsonl)");
    train_cmd->add_option("--word-dim", train_args.config.neural.word_dim,
                          "Word embedding size (neural)")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--word-hidden", train_args.config.neural.word_hidden,
                          "Word encoder size, both directions (neural)")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--span-hidden", train_args.config.neural.span_hidden,
                          "Span encoder size, both directions (neural)")
        ->check(CLI::PositiveNumber);
    train_cmd->add_flag("--no-pos", [&](std::int64_t) { train_args.config.neural.use_pos = false; },
                        "Disable POS embeddings (neural)");
    train_cmd->add_flag("--use-char", train_args.config.neural.use_char,
                        "Enable the character encoder (neural)");
    train_cmd->add_option("--char-dim", train_args.config.neural.char_dim,
                          "Character embedding size (neural)")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--char-hidden", train_args.config.neural.char_hidden,
                          "Character encoder size, both directions (neural)")
        ->check(CLI::PositiveNumber);

    std::string model_path, input_path, output_path;
    auto* predict_cmd = app.add_subcommand("predict", "Decode mentions for a corpus");
    predict_cmd->add_option("--model", model_path, "Model file")
        ->required()
        ->check(CLI::ExistingFile);
    predict_cmd->add_option("--input", input_path, "Input corpus (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    predict_cmd->add_option("--output", output_path, "Output corpus (JSONL)")->required();

    std::string gold_path, pred_path;
    bool eval_json = false;
    auto* eval_cmd = app.add_subcommand("eval", "Score predictions against gold");
    eval_cmd->add_option("--gold", gold_path, "Gold corpus (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--pred", pred_path, "Predicted corpus (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_flag("--json", eval_json, "Emit the report as JSON");

    int max_n = 4, max_m = 2, seeds = 10;
    auto* verify_cmd =
        app.add_subcommand("verify", "Cross-check inference against brute-force enumeration");
    verify_cmd->add_option("--max-n", max_n, "Largest sentence length")
        ->check(CLI::Range(1, 6));
    verify_cmd->add_option("--max-m", max_m, "Largest type count")->check(CLI::Range(1, 3));
    verify_cmd->add_option("--seeds", seeds, "Random score draws per cell")
        ->check(CLI::PositiveNumber);

    std::string bench_model, bench_input;
    int repeat = 5;
    auto* bench_cmd = app.add_subcommand("bench", "Measure decoding throughput");
    bench_cmd->add_option("--model", bench_model, "Model file")
        ->required()
        ->check(CLI::ExistingFile);
    bench_cmd->add_option("--input", bench_input, "Input corpus (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    bench_cmd->add_option("--repeat", repeat, "Timing repetitions (median is reported)")
        ->check(CLI::PositiveNumber);

    SynthConfig synth_config;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
    synth_cmd->add_option("--out", synth_out, "Output corpus (JSONL)")->required();
    synth_cmd->add_option("--sentences", synth_config.sentence_count, "Sentence count")
        ->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--vocab", synth_config.vocab, "Filler vocabulary size")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--nesting-prob", synth_config.nesting_prob,
                          "Probability of an overlapping mention pair per sentence")
        ->check(CLI::Range(0.0, 1.0));
    synth_cmd->add_option("--max-sentence-len", synth_config.max_sentence_len,
                          "Largest sentence length (>= 5)")
        ->check(CLI::Range(5, 1000));
    synth_cmd->add_option("--seed", synth_config.seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_args);
        if (predict_cmd->parsed()) return cmd_predict(model_path, input_path, output_path);
        if (eval_cmd->parsed()) return cmd_eval(gold_path, pred_path, eval_json);
        if (verify_cmd->parsed()) return cmd_verify(max_n, max_m, seeds);
        if (bench_cmd->parsed()) return cmd_bench(bench_model, bench_input, repeat);
        if (synth_cmd->parsed()) return cmd_synth(synth_config, synth_out);
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const GoldViolatesCapError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace seghyp
