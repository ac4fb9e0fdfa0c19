// Command-line driver: batch evaluation, reward scoring, perturbation,
// dataset QC, prompt rendering, and the scoring service.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sodam/perturb.hpp"
#include "sodam/prompts.hpp"
#include "sodam/qc.hpp"
#include "sodam/runner.hpp"
#include "sodam/server.hpp"

namespace {

using namespace sodam;

struct AppOptions {
    std::string config_path;
    std::string judge = "offline";
    std::vector<double> thresholds{kDefaultThresholds.begin(), kDefaultThresholds.end()};
    std::uint64_t seed = 0;
    unsigned parallelism = 1;

    RewardWeights weights;
    LengthPolicy length_policy;
    JudgeEndpointConfig endpoint;
    bool pooled_average = false;
};

/// Config file values sit under the flags: a flag given on the command line
/// wins, everything else falls back to the file, then to defaults.
void layer_config_file(AppOptions& options, const CLI::App& app) {
    if (options.config_path.empty()) return;
    std::ifstream in(options.config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + options.config_path);
    nlohmann::json cfg = nlohmann::json::parse(in, nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object())
        throw CLI::ValidationError("--config", options.config_path + " is not a JSON object");

    auto given = [&](const std::string& flag) {
        auto* opt = app.get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    };
    if (!given("--judge") && cfg.contains("judge")) options.judge = cfg["judge"];
    if (!given("--thresholds") && cfg.contains("thresholds"))
        options.thresholds = cfg["thresholds"].get<std::vector<double>>();
    if (!given("--parallelism") && cfg.contains("parallelism"))
        options.parallelism = cfg["parallelism"];
    if (cfg.contains("pooled_average")) options.pooled_average = cfg["pooled_average"];
    if (cfg.contains("weights")) {
        const auto& w = cfg["weights"];
        options.weights.alpha_format = w.value("alpha_format", options.weights.alpha_format);
        options.weights.alpha_length = w.value("alpha_length", options.weights.alpha_length);
        options.weights.alpha_timestamp =
            w.value("alpha_timestamp", options.weights.alpha_timestamp);
        options.weights.alpha_caption =
            w.value("alpha_caption", options.weights.alpha_caption);
    }
    if (cfg.contains("length_policy")) {
        const auto& l = cfg["length_policy"];
        options.length_policy.min_words = l.value("min_words", options.length_policy.min_words);
        options.length_policy.max_words = l.value("max_words", options.length_policy.max_words);
        options.length_policy.decay_span =
            l.value("decay_span", options.length_policy.decay_span);
    }
    if (cfg.contains("endpoint")) {
        const auto& e = cfg["endpoint"];
        options.endpoint.base_url = e.value("base_url", options.endpoint.base_url);
        options.endpoint.path = e.value("path", options.endpoint.path);
        options.endpoint.auth_header = e.value("auth_header", options.endpoint.auth_header);
        options.endpoint.token_env = e.value("token_env", options.endpoint.token_env);
        options.endpoint.model = e.value("model", options.endpoint.model);
        options.endpoint.timeout_seconds =
            e.value("timeout_seconds", options.endpoint.timeout_seconds);
        options.endpoint.retries = e.value("retries", options.endpoint.retries);
        options.endpoint.parallelism = e.value("parallelism", options.endpoint.parallelism);
        options.endpoint.cache_dir = e.value("cache_dir", options.endpoint.cache_dir);
    }
}

std::shared_ptr<Judge> make_judge(const AppOptions& options) {
    if (options.judge == "offline") return std::make_shared<DeterministicJudge>();
    if (options.judge == "http") {
        if (options.endpoint.base_url.empty())
            throw CLI::ValidationError("--judge", "http judge needs endpoint.base_url in --config");
        return std::make_shared<HttpJudge>(options.endpoint);
    }
    throw CLI::ValidationError("--judge", "must be 'offline' or 'http'");
}

ScoreConfig make_score_config(const AppOptions& options) {
    ScoreConfig score;
    score.thresholds = options.thresholds;
    score.pooled_average = options.pooled_average;
    for (std::size_t i = 0; i < score.thresholds.size(); ++i) {
        const double t = score.thresholds[i];
        if (!(t > 0.0 && t <= 1.0) || (i > 0 && t <= score.thresholds[i - 1]))
            throw CLI::ValidationError("--thresholds", "must be ascending in (0, 1]");
    }
    return score;
}

int run_qc(const AppOptions&, const std::string& in_path, const std::string& out_path,
           const std::string& rejects_path, const QcPolicy& policy, bool stats) {
    std::ifstream in(in_path);
    if (!in) {
        std::cerr << "qc: cannot open " << in_path << "\n";
        return 2;
    }
    std::ofstream kept(out_path);
    std::ofstream rejects;
    if (!rejects_path.empty()) rejects.open(rejects_path);

    std::vector<QcRecord> kept_records;
    std::size_t kept_count = 0, reject_count = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        QcDecision decision = qc_filter(line, policy);
        if (decision.keep) {
            kept << line << "\n";
            ++kept_count;
            if (stats) {
                auto record = nlohmann::json::parse(line);
                ParseOutcome outcome =
                    parse_prediction(record["prediction"].dump(), ParseMode::Lenient,
                                     record.value("video_id", ""));
                if (outcome.document)
                    kept_records.push_back({*outcome.document, record.value("has_audio", false)});
            }
        } else {
            ++reject_count;
            if (rejects.is_open()) {
                nlohmann::ordered_json entry;
                auto record = nlohmann::json::parse(line, nullptr, false);
                if (!record.is_discarded() && record.is_object() && record.contains("video_id"))
                    entry["video_id"] = record["video_id"];
                auto reasons = nlohmann::ordered_json::array();
                for (QcReason reason : decision.reasons)
                    reasons.push_back(std::string(to_string(reason)));
                entry["reasons"] = std::move(reasons);
                entry["details"] = decision.details;
                rejects << entry.dump() << "\n";
            }
        }
    }
    std::cerr << "qc: kept " << kept_count << ", rejected " << reject_count << "\n";
    if (stats) std::cout << corpus_stats(kept_records).dump(2) << "\n";
    return 0;
}

int run_perturb(const AppOptions& options, const std::string& in_path,
                const std::string& out_path, const std::string& mode_name,
                double magnitude) {
    PerturbMode mode;
    if (mode_name == "oversplit") mode = PerturbMode::Oversplit;
    else if (mode_name == "jitter") mode = PerturbMode::Jitter;
    else if (mode_name == "drop") mode = PerturbMode::Drop;
    else {
        std::cerr << "perturb: unknown mode '" << mode_name << "'\n";
        return 2;
    }

    std::ifstream in(in_path);
    if (!in) {
        std::cerr << "perturb: cannot open " << in_path << "\n";
        return 2;
    }
    std::mt19937_64 rng(options.seed);
    std::ostringstream body;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ReferenceRecord record = parse_reference(line);
        ScriptDocument doc;
        doc.video_id = record.video_id;
        doc.video_duration = record.video_duration;
        for (const ReferenceScene& scene : record.scenes) doc.scenes.push_back(scene.entry);
        ScriptDocument perturbed = perturb_document(doc, mode, magnitude, rng);
        body << document_to_wire(perturbed).dump() << "\n";
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << "perturb: cannot write " << out_path << "\n";
        return 2;
    }
    out << body.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Timestamped multi-dimension video caption evaluation and rewards"};
    app.require_subcommand(1);

    AppOptions options;
    app.add_option("--config", options.config_path, "JSON config file (layered under flags)");
    app.add_option("--judge", options.judge, "Judge backend: offline|http");
    app.add_option("--thresholds", options.thresholds, "IoU thresholds")->delimiter(',');
    app.add_option("--seed", options.seed, "RNG seed for perturbations");
    app.add_option("--parallelism", options.parallelism, "Worker threads per batch");

    auto* eval = app.add_subcommand("eval", "Evaluate predictions against references");
    std::string pred_path, ref_path, out_path;
    bool strict_parse = false;
    eval->add_option("--predictions", pred_path, "Prediction JSONL")->required();
    eval->add_option("--references", ref_path, "Reference JSONL")->required();
    eval->add_option("--out", out_path, "Report JSON output path")->required();
    eval->add_flag("--strict-parse", strict_parse, "Disable lenient prediction salvage");

    auto* reward = app.add_subcommand("reward", "Score predictions with the reward stack");
    reward->add_option("--predictions", pred_path, "Prediction JSONL")->required();
    reward->add_option("--references", ref_path, "Reference JSONL")->required();
    reward->add_option("--out", out_path, "Rewards JSONL output path")->required();

    auto* perturb = app.add_subcommand("perturb", "Derive perturbed predictions from references");
    std::string perturb_mode = "oversplit";
    double magnitude = 0.0;
    perturb->add_option("--in", ref_path, "Reference JSONL")->required();
    perturb->add_option("--out", out_path, "Prediction JSONL output path")->required();
    perturb->add_option("--mode", perturb_mode, "oversplit|jitter|drop")->required();
    perturb->add_option("--magnitude", magnitude, "Seconds (jitter) or probability (drop)");

    auto* qc = app.add_subcommand("qc", "Filter training records by quality rules");
    std::string rejects_path;
    QcPolicy policy;
    bool qc_stats = false;
    bool no_audio_check = false;
    qc->add_option("--in", pred_path, "Input JSONL")->required();
    qc->add_option("--out", out_path, "Kept records JSONL")->required();
    qc->add_option("--rejects", rejects_path, "Rejected records + reasons JSONL");
    qc->add_option("--min-scenes", policy.min_scenes, "Minimum scene count");
    qc->add_option("--min-seg-dur", policy.min_segment_duration, "Minimum segment seconds");
    qc->add_flag("--no-audio-check", no_audio_check, "Skip the has_audio requirement");
    qc->add_flag("--stats", qc_stats, "Print corpus statistics for kept records");

    auto* prompts_cmd = app.add_subcommand("prompts", "Prompt template assets");
    auto* render = prompts_cmd->add_subcommand("render", "Print a prompt template");
    std::string which = "stage1";
    render->add_option("name", which, "stage1|stage2|judge")->required();

    auto* serve = app.add_subcommand("serve", "Run the batch reward-scoring service");
    int port = 8080;
    serve->add_option("--port", port, "Listen port");

    // global flags may follow the subcommand
    for (CLI::App* sub : {eval, reward, perturb, qc, prompts_cmd, serve}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        layer_config_file(options, app);
        ScoreConfig score = make_score_config(options);

        if (eval->parsed()) {
            EvalRunConfig config;
            config.prediction_path = pred_path;
            config.reference_path = ref_path;
            config.output_path = out_path;
            config.judge_mode = options.judge == "http" ? JudgeMode::Http : JudgeMode::Offline;
            config.endpoint = options.endpoint;
            config.score = score;
            config.parse_mode = strict_parse ? ParseMode::Strict : ParseMode::Lenient;
            config.parallelism = options.parallelism;
            auto judge = make_judge(options);
            eval_run(config, *judge);
            return 0;
        }
        if (reward->parsed()) {
            RewardRunConfig config;
            config.prediction_path = pred_path;
            config.reference_path = ref_path;
            config.output_path = out_path;
            config.weights = options.weights;
            config.length_policy = options.length_policy;
            config.score = score;
            config.parallelism = options.parallelism;
            auto judge = make_judge(options);
            reward_run(config, *judge);
            return 0;
        }
        if (perturb->parsed())
            return run_perturb(options, ref_path, out_path, perturb_mode, magnitude);
        if (qc->parsed()) {
            policy.require_audio = !no_audio_check;
            return run_qc(options, pred_path, out_path, rejects_path, policy, qc_stats);
        }
        if (render->parsed()) {
            if (which == "stage1") std::cout << prompts::stage1();
            else if (which == "stage2") std::cout << prompts::stage2();
            else if (which == "judge") std::cout << prompts::judge_template();
            else {
                std::cerr << "prompts render: unknown template '" << which << "'\n";
                return 2;
            }
            return 0;
        }
        if (serve->parsed()) {
            ServerConfig config;
            config.port = port;
            config.weights = options.weights;
            config.length_policy = options.length_policy;
            config.score = score;
            config.parallelism = options.parallelism;
            ScoreServer server(config, make_judge(options));
            std::cerr << "serving on port " << port << "\n";
            return server.listen() ? 0 : 1;
        }
    } catch (const JudgeUnavailable& e) {
        std::cerr << "judge unavailable: " << e.what() << "\n";
        return 3;
    } catch (const MissingReference& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
