/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

// mle: batch driver over a corpus of session bundles.
//
//   mle [--config F] [--workers N] [--seed N] <command> ...
//
// Exit status: 0 ok, 2 unusable data, 3 I/O failure, 4 bad arguments.
// Failures print one JSON object on stderr.

#include <mle/config.hpp>
#include <mle/corpus.hpp>
#include <mle/emotion_space.hpp>
#include <mle/error.hpp>
#include <mle/impact_metrics.hpp>
#include <mle/predictor.hpp>
#include <mle/session_store.hpp>
#include <mle/stats_report.hpp>
#include <mle/text_util.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace mle;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;
constexpr int kExitArgs = 4;

int exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::IoFailure: return kExitIo;
        case ErrorCode::BadArgument: return kExitArgs;
        default: return kExitData;
    }
}

void print_error(std::string_view code, const std::string& message, const MalformedStream* ms = nullptr) {
    ojson e;
    e["error"] = code;
    e["message"] = message;
    if (ms) {
        e["file"] = ms->file();
        e["line"] = ms->line();
    }
    std::cerr << e.dump() << "\n";
}

// Writes to `path`, or to stdout when it is empty or "-".
void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    text::write_file_atomic(path, content);
}

struct Globals {
    std::string config_path;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
};

Config resolve_config(const Globals& g) {
    Config cfg = g.config_path.empty() ? Config{} : load_config(g.config_path);
    if (g.workers) {
        if (*g.workers < 1) throw Error(ErrorCode::BadArgument, "--workers must be at least 1");
        cfg.workers = *g.workers;
    }
    if (g.seed) cfg.seed = *g.seed;
    return cfg;
}

std::string_view severity_name(store::Severity s) {
    return s == store::Severity::Fatal ? "fatal" : "warning";
}

ojson entry_json(const corpus::Entry& e) {
    ojson j;
    j["session_id"] = e.session_id;
    j["path"] = e.path.filename().string();
    j["usable"] = e.usable;
    auto& issues = j["issues"] = ojson::array();
    for (const auto& i : e.issues) {
        issues.push_back({{"severity", severity_name(i.severity)}, {"code", i.code}, {"message", i.message}});
    }
    return j;
}

std::size_t count_usable(const std::vector<corpus::Entry>& entries) {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.usable; }));
}

int cmd_ingest(const Config& cfg, const std::string& root, const std::string& out) {
    const auto entries = corpus::load(root, cfg.workers);
    ojson doc;
    doc["root"] = fs::path(root).lexically_normal().generic_string();
    doc["config"] = to_json(cfg);
    auto& list = doc["sessions"] = ojson::array();
    for (const auto& e : entries) list.push_back(entry_json(e));
    emit(out, doc.dump(2) + "\n");
    return kExitOk;
}

int cmd_validate(const Config& cfg, const std::string& root, const std::string& out) {
    const auto entries = corpus::load(root, cfg.workers);
    const auto usable = count_usable(entries);
    ojson doc;
    doc["config"] = to_json(cfg);
    doc["sessions"] = entries.size();
    doc["usable"] = usable;
    doc["unusable"] = entries.size() - usable;
    ojson bad = ojson::array();
    ojson warn = ojson::array();
    for (const auto& e : entries) {
        if (!e.usable) {
            bad.push_back(entry_json(e));
        } else if (!e.issues.empty()) {
            warn.push_back(entry_json(e));
        }
    }
    doc["unusable_sessions"] = std::move(bad);
    doc["warnings"] = std::move(warn);
    emit(out, doc.dump(2) + "\n");
    if (usable == 0) {
        print_error("EmptyCohort", "no usable sessions under " + root);
        return kExitData;
    }
    return kExitOk;
}

int cmd_features(const Config& cfg, const std::string& root, const std::string& mode_name, const std::string& out,
                 const std::string& labels_out) {
    const auto mode = corpus::parse_feature_mode(mode_name);
    if (!mode) throw Error(ErrorCode::BadArgument, "unknown --mode " + mode_name);
    const auto entries = corpus::load(root, cfg.workers);
    if (count_usable(entries) == 0) throw Error(ErrorCode::EmptyDataset, "no usable sessions under " + root);
    emit(out, predict::format_feature_table(corpus::feature_table(entries, *mode, cfg, cfg.workers)));
    if (!labels_out.empty()) text::write_file_atomic(labels_out, predict::format_labels(corpus::success_labels(entries)));
    return kExitOk;
}

// Table restricted to `names`; missing columns raise BadArgument.
predict::FeatureTable project(const predict::FeatureTable& t, const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    for (const auto& n : names) {
        const auto it = std::find(t.feature_names.begin(), t.feature_names.end(), n);
        if (it == t.feature_names.end()) throw Error(ErrorCode::BadArgument, "features file lacks column " + n);
        idx.push_back(static_cast<std::size_t>(it - t.feature_names.begin()));
    }
    predict::FeatureTable out;
    out.feature_names = names;
    out.session_ids = t.session_ids;
    for (const auto& row : t.values) {
        std::vector<std::optional<double>> r;
        for (auto i : idx) r.push_back(row[i]);
        out.values.push_back(std::move(r));
    }
    return out;
}

std::vector<std::string> mode_columns(predict::EvalMode m) {
    switch (m) {
        case predict::EvalMode::VideoOnly: return corpus::feature_columns(corpus::FeatureMode::VideoOnly);
        case predict::EvalMode::Full: return corpus::feature_columns(corpus::FeatureMode::Full);
        default: return corpus::feature_columns(corpus::FeatureMode::AudioOnly);
    }
}

bool has_columns(const predict::FeatureTable& t, const std::vector<std::string>& names) {
    const std::set<std::string> have(t.feature_names.begin(), t.feature_names.end());
    return std::all_of(names.begin(), names.end(), [&](const auto& n) { return have.contains(n); });
}

ojson drop_json(const predict::DropLog& log) {
    return {{"absent_features", log.absent_features}, {"unlabeled", log.unlabeled}};
}

void require_both_classes(const predict::Dataset& d) {
    if (d.rows.empty()) throw Error(ErrorCode::EmptyDataset, "no labelled rows with complete features");
    if (d.positives() == 0 || d.negatives() == 0) throw Error(ErrorCode::SingleClass, "training data has one class");
}

int cmd_train(const Config& cfg, const std::string& features, const std::string& labels, const std::string& out) {
    const auto table = predict::read_feature_table(features);
    predict::DropLog log;
    const auto d = predict::build_dataset(table, predict::read_labels(labels), &log);
    require_both_classes(d);
    const auto model = predict::train_linear_svm(d, cfg.svm);
    ojson doc;
    doc["config"] = to_json(cfg);
    doc["feature_names"] = model.feature_names;
    doc["w"] = model.w;
    doc["b"] = model.b;
    doc["C"] = model.C;
    doc["scaler"] = {{"mean", model.scaler.mean}, {"scale", model.scaler.scale}};
    doc["iterations"] = model.iterations;
    doc["rows"] = d.rows.size();
    doc["positives"] = d.positives();
    doc["dropped"] = drop_json(log);
    emit(out, doc.dump(2) + "\n");
    return kExitOk;
}

ojson mode_json(const predict::ModeReport& r, const predict::Dataset& d, const predict::DropLog& log) {
    ojson j;
    j["mode"] = predict::to_string(r.mode);
    j["rows"] = d.rows.size();
    j["positives"] = d.positives();
    j["dropped"] = drop_json(log);
    j["features"] = r.feature_names;
    j["auc"] = r.roc.auc;
    j["accuracy"] = r.cv.accuracy;
    const auto& c = r.cv.confusion;
    j["confusion"] = {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
    j["skipped_folds"] = r.cv.skipped;
    if (r.selection) {
        ojson sel;
        sel["selected"] = r.selection->selected;
        auto& rank = sel["ranking"] = ojson::array();
        for (const auto& f : r.selection->ranking) rank.push_back({{"name", f.name}, {"rank", f.rank}, {"abs_weight", f.abs_weight}});
        auto& pruned = sel["pruned"] = ojson::array();
        for (const auto& p : r.selection->pruned) pruned.push_back({{"name", p.name}, {"partner", p.partner}, {"corr", p.corr}});
        j["selection"] = sel;
    }
    auto& roc = j["roc"] = ojson::array();
    for (const auto& p : r.roc.points) roc.push_back({p.fpr, p.tpr});
    auto& preds = j["predictions"] = ojson::array();
    for (const auto& p : r.cv.predictions) {
        preds.push_back({{"session_id", p.session_id},
                         {"truth", metrics::to_string(p.truth)},
                         {"score", p.score},
                         {"predicted", metrics::to_string(p.predicted)}});
    }
    return j;
}

int cmd_evaluate(const Config& cfg, const std::string& features, const std::string& labels,
                 const std::vector<std::string>& mode_names, const std::string& out, const std::string& roc_dir,
                 bool timing) {
    const auto table = predict::read_feature_table(features);
    const auto y = predict::read_labels(labels);
    std::vector<predict::EvalMode> modes;
    for (const auto& n : mode_names) {
        const auto m = predict::parse_eval_mode(n);
        if (!m) throw Error(ErrorCode::BadArgument, "unknown mode " + n);
        modes.push_back(*m);
    }
    if (modes.empty()) {
        for (auto m : predict::kAllModes) {
            if (has_columns(table, mode_columns(m))) modes.push_back(m);
        }
        if (modes.empty()) throw Error(ErrorCode::BadArgument, "features file matches no evaluation mode");
    }
    ojson doc;
    doc["config"] = to_json(cfg);
    auto& list = doc["modes"] = ojson::array();
    for (auto m : modes) {
        const auto cols = mode_columns(m);
        predict::DropLog log;
        const auto d = predict::build_dataset(project(table, cols), y, &log);
        require_both_classes(d);
        const auto r = predict::evaluate_mode(d, m, cfg.svm, cfg.selection, cfg.workers, timing);
        auto j = mode_json(r, d, log);
        if (r.prep_seconds) j["prep_seconds"] = *r.prep_seconds;
        list.push_back(std::move(j));
        if (!roc_dir.empty()) {
            std::string csv = "fpr,tpr\n";
            for (const auto& p : r.roc.points) csv += text::format_double(p.fpr) + "," + text::format_double(p.tpr) + "\n";
            std::error_code ec;
            std::filesystem::create_directories(roc_dir, ec);
            if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + roc_dir + ": " + ec.message());
            text::write_file_atomic(std::filesystem::path(roc_dir) / ("roc_" + std::string(predict::to_string(m)) + ".csv"), csv);
        }
    }
    emit(out, doc.dump(2) + "\n");
    return kExitOk;
}

int cmd_report(const Config& cfg, const std::string& root, const std::string& out_dir) {
    const auto entries = corpus::load(root, cfg.workers);
    std::vector<metrics::SessionMetrics> sessions;
    std::map<std::string, emotion::Trajectory> trajectories;
    for (const auto& e : entries) {
        if (!e.usable || !e.session) continue;
        sessions.push_back(metrics::session_metrics(*e.session, cfg.grid_rate_hz));
        if (e.session->emotion_frames && !e.session->emotion_frames->empty()) {
            trajectories.emplace(e.session_id, emotion::session_trajectory(*e.session->emotion_frames));
        }
    }
    const bool empty = sessions.empty();
    // An empty cohort still gets a report, with every section empty.
    stats::emit_report(stats::build_report(std::move(sessions)), trajectories, to_json(cfg), out_dir);
    if (empty) throw Error(ErrorCode::EmptyDataset, "no usable sessions under " + root);
    return kExitOk;
}

// Bundle directory of every session id found under `root`.
std::map<std::string, fs::path> bundle_dirs(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw Error(ErrorCode::IoFailure, root.string() + " is not a directory");
    std::map<std::string, fs::path> out;
    for (const auto& d : fs::directory_iterator(root, ec)) {
        const auto manifest = d.path() / store::kManifestFile;
        if (!d.is_directory() || !fs::is_regular_file(manifest)) continue;
        try {
            const auto m = nlohmann::json::parse(text::read_file(manifest));
            out.emplace(m.at("session_id").get<std::string>(), d.path());
        } catch (const nlohmann::json::exception&) {
            // unreadable manifests cannot be targeted
        }
    }
    if (ec) throw Error(ErrorCode::IoFailure, "cannot list " + root.string() + ": " + ec.message());
    return out;
}

int cmd_merge(const std::string& root, const std::vector<std::string>& specs, const std::string& out) {
    const auto dirs = bundle_dirs(root);
    struct Job {
        std::string session_id;
        fs::path dir;
        std::string file;
        std::string text;
    };
    std::vector<Job> jobs;
    std::set<std::string> targeted;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
            throw Error(ErrorCode::BadArgument, "--annotation expects SESSION_ID=FILE, got " + s);
        }
        Job j{s.substr(0, eq), {}, s.substr(eq + 1), {}};
        const auto it = dirs.find(j.session_id);
        if (it == dirs.end()) throw Error(ErrorCode::BadArgument, "no bundle for session " + j.session_id);
        if (!targeted.insert(j.session_id).second) throw Error(ErrorCode::BadArgument, "session " + j.session_id + " given twice");
        j.dir = it->second;
        j.text = text::read_file(j.file);
        jobs.push_back(std::move(j));
    }
    // Every annotation is checked before any bundle is touched.
    for (const auto& j : jobs) {
        const auto session = store::ingest_bundle(j.dir);
        store::parse_rating_stream(j.text, j.file, session.duration);
    }
    ojson doc;
    auto& merged = doc["merged"] = ojson::array();
    for (const auto& j : jobs) {
        const auto stream = store::merge_self_stream(j.dir, j.text, j.file);
        const auto rep = store::validate_session(store::ingest_bundle(j.dir));
        std::vector<std::string> codes;
        for (const auto& i : rep.issues) codes.push_back(i.code);
        merged.push_back({{"session_id", j.session_id}, {"events", stream.events.size()}, {"usable", rep.usable}, {"issues", codes}});
    }
    emit(out, doc.dump(2) + "\n");
    return kExitOk;
}

}// namespace

int main(int argc, char** argv) {
    CLI::App app{"Session analytics: ingest, validate, featurize, train, evaluate and report."};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--workers", g.workers, "worker threads for per-session work");
    app.add_option("--seed", g.seed, "seed for synthetic-data generators");

    std::string root, out, mode = "full", labels_out, features, labels, out_dir;
    std::vector<std::string> modes, annotations;
    std::optional<double> c_flag;
    bool timing = false;

    auto* ingest = app.add_subcommand("ingest", "index the bundles under a corpus root");
    ingest->add_option("--root", root, "corpus root")->required();
    ingest->add_option("--out", out, "index JSON (default stdout)");

    auto* validate = app.add_subcommand("validate", "summarize validation issues");
    validate->add_option("--root", root, "corpus root")->required();
    validate->add_option("--out", out, "summary JSON (default stdout)");

    auto* feat = app.add_subcommand("features", "per-session feature CSV");
    feat->add_option("--root", root, "corpus root")->required();
    feat->add_option("--mode", mode, "full | audio_only | video_only");
    feat->add_option("--out", out, "features CSV (default stdout)");
    feat->add_option("--labels-out", labels_out, "also write session_id,success labels");

    auto* train = app.add_subcommand("train", "fit the linear SVM on all labelled rows");
    train->add_option("--features", features, "features CSV")->required();
    train->add_option("--labels", labels, "labels CSV")->required();
    train->add_option("--C", c_flag, "soft-margin penalty");
    train->add_option("--out", out, "model JSON (default stdout)");

    auto* eval = app.add_subcommand("evaluate", "leave-one-out evaluation per feature mode");
    eval->add_option("--features", features, "features CSV")->required();
    eval->add_option("--labels", labels, "labels CSV")->required();
    eval->add_option("--mode", modes, "full | audio_only | video_only | top_selected (repeatable)");
    eval->add_option("--C", c_flag, "soft-margin penalty");
    eval->add_option("--out", out, "evaluation JSON (default stdout)");
    eval->add_option("--roc-dir", out_dir, "also write roc_<mode>.csv per mode");
    eval->add_flag("--timing", timing, "report wall time of column preparation and selection");

    auto* report = app.add_subcommand("report", "statistics report bundle");
    report->add_option("--root", root, "corpus root")->required();
    report->add_option("--out-dir", out_dir, "output directory")->required();

    auto* merge = app.add_subcommand("merge-annotations", "install exported self-rating streams");
    merge->add_option("--root", root, "corpus root")->required();
    merge->add_option("--annotation", annotations, "SESSION_ID=FILE (repeatable)")->required();
    merge->add_option("--out", out, "summary JSON (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("BadArgument", e.what());
        return kExitArgs;
    }

    try {
        Config cfg = resolve_config(g);
        if (c_flag) {
            if (!(*c_flag > 0.0)) throw Error(ErrorCode::BadArgument, "--C must be positive");
            cfg.svm.C = *c_flag;
        }
        if (*ingest) return cmd_ingest(cfg, root, out);
        if (*validate) return cmd_validate(cfg, root, out);
        if (*feat) return cmd_features(cfg, root, mode, out, labels_out);
        if (*train) return cmd_train(cfg, features, labels, out);
        if (*eval) return cmd_evaluate(cfg, features, labels, modes, out, out_dir, timing);
        if (*report) return cmd_report(cfg, root, out_dir);
        if (*merge) return cmd_merge(root, annotations, out);
    } catch (const MalformedStream& e) {
        print_error(to_string(e.code()), e.what(), &e);
        return exit_code(e.code());
    } catch (const Error& e) {
        print_error(to_string(e.code()), e.what());
        return exit_code(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        print_error("IoFailure", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        print_error("InternalError", e.what());
        return kExitData;
    }
    return kExitArgs;
}
