#include "qcnn/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <sstream>

#include "qcnn/ansatz.hpp"
#include "qcnn/classical.hpp"
#include "qcnn/errors.hpp"
#include "qcnn/fetch.hpp"
#include "qcnn/sha256.hpp"
#include "qcnn/training.hpp"

namespace qcnn {

namespace {

namespace fs = std::filesystem;

// Prefer an uncompressed copy, fall back to the .gz name.
fs::path locate_split_file(const fs::path& dir, const std::string& gz_name, bool* found) {
    const std::string plain = gz_name.substr(0, gz_name.size() - 3);
    if (fs::exists(dir / plain)) {
        *found = true;
        return dir / plain;
    }
    if (fs::exists(dir / gz_name)) {
        *found = true;
        return dir / gz_name;
    }
    *found = false;
    return dir / gz_name;
}

TrainableModel build_trainable(const ExperimentConfig& cfg) {
    switch (cfg.model) {
    case ModelKind::QCNN:
        return make_trainable(make_model(build_qcnn(8), cfg.feature_map), cfg.training);
    case ModelKind::QNN:
        return make_trainable(make_model(build_qnn(8, cfg.qnn_depth), cfg.feature_map),
                              cfg.training);
    case ModelKind::CNN:
        return make_trainable(CnnModel(), cfg.training.threads);
    case ModelKind::NN:
        return make_trainable(NnModel(), cfg.training.threads);
    }
    throw config_error("unreachable model kind");
}

} // namespace

Dataset load_dataset(const ExperimentConfig& cfg) {
    const fs::path dir = cfg.dataset.data_dir;
    std::array<fs::path, 4> files;
    bool all_present = true;
    for (std::size_t i = 0; i < kMnistFileNames.size(); ++i) {
        bool found = false;
        files[i] = locate_split_file(dir, kMnistFileNames[i], &found);
        all_present = all_present && found;
    }
    if (!all_present) {
        FetchOptions fo;
        fo.base_url = cfg.dataset.mirror;
        fo.dest_dir = dir;
        const auto fetched = fetch(fo);
        files = fetched;
    }

    const RawMnist train_raw = load_raw_split(files[0], files[1]);
    const RawMnist test_raw = load_raw_split(files[2], files[3]);

    PreprocessOptions po;
    po.train_size = cfg.dataset.train_size;
    po.test_size = cfg.dataset.test_size;
    po.digit_label0 = cfg.dataset.digit_label0;
    po.digit_label1 = cfg.dataset.digit_label1;
    po.seed = cfg.dataset.seed;
    Dataset ds = preprocess(train_raw, test_raw, po);
    for (const fs::path& f : files) {
        ds.provenance.file_digests[f.filename().string()] = sha256_hex(read_binary_file(f));
    }
    return ds;
}

std::string summary_to_json_line(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["run_id"] = s.run_id;
    j["model"] = s.model;
    j["epochs"] = s.epochs;
    j["final_train_loss"] = s.final_train_loss;
    j["final_train_accuracy"] = s.final_train_accuracy;
    j["final_test_loss"] = s.final_test_loss;
    j["final_test_accuracy"] = s.final_test_accuracy;
    j["initial_train_loss"] = s.initial_train_loss;
    j["initial_test_loss"] = s.initial_test_loss;
    j["wall_time_ms"] = s.wall_time_ms;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.config) cfg[k] = v;
    j["config"] = cfg;
    return j.dump();
}

namespace {

RunSummary summary_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("summary parse error: ") + e.what());
    }
    RunSummary s;
    try {
        s.run_id = j.at("run_id").get<std::string>();
        s.model = j.at("model").get<std::string>();
        s.epochs = j.at("epochs").get<int>();
        s.final_train_loss = j.at("final_train_loss").get<double>();
        s.final_train_accuracy = j.at("final_train_accuracy").get<double>();
        s.final_test_loss = j.at("final_test_loss").get<double>();
        s.final_test_accuracy = j.at("final_test_accuracy").get<double>();
        s.initial_train_loss = j.at("initial_train_loss").get<double>();
        s.initial_test_loss = j.at("initial_test_loss").get<double>();
        s.wall_time_ms = j.at("wall_time_ms").get<std::int64_t>();
        for (const auto& [k, v] : j.at("config").items()) s.config[k] = v.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("summary field error: ") + e.what());
    }
    return s;
}

} // namespace

RunSummary run(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset ds = load_dataset(cfg);
    const TrainableModel model = build_trainable(cfg);
    const TrainResult result = train(model, ds, cfg.training);

    RunSummary s;
    s.run_id = cfg.run_id;
    s.model = to_string(cfg.model);
    s.epochs = cfg.training.epochs;
    const RunMetrics& last = result.trail.back();
    s.final_train_loss = last.train_loss;
    s.final_train_accuracy = last.train_accuracy;
    s.final_test_loss = last.test_loss;
    s.final_test_accuracy = last.test_accuracy;
    s.initial_train_loss = result.initial_train.loss;
    s.initial_test_loss = result.initial_test.loss;
    s.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    s.config = config_to_kv(cfg);

    const fs::path dir = cfg.output_dir / cfg.run_id;
    fs::create_directories(dir);
    write_text_atomic(dir / "metrics.csv", metrics_to_csv(result.trail));
    write_text_atomic(dir / "summary.txt", summary_to_json_line(s) + "\n");
    return s;
}

RunSummary read_summary(const fs::path& output_dir, const std::string& run_id) {
    const fs::path path = output_dir / run_id / "summary.txt";
    if (!fs::exists(path)) {
        throw data_error("missing run id: " + run_id + " (no summary at " + path.string() + ")");
    }
    return summary_from_json(read_text_file(path));
}

SweepOutcome sweep(const ExperimentConfig& base, const std::string& axis,
                   const std::vector<int>& values) {
    if (axis != "batch_size" && axis != "train_size") {
        throw config_error("sweep axis must be batch_size or train_size, got " + axis);
    }
    if (values.empty()) throw config_error("sweep: empty values list");

    SweepOutcome outcome;
    for (int v : values) {
        if (v < 1) throw config_error("sweep: axis values must be >= 1, got " + std::to_string(v));
        ExperimentConfig cfg = base;
        cfg.run_id = base.run_id + "-" + axis + std::to_string(v);
        if (axis == "batch_size") {
            cfg.training.batch_size = v;
        } else {
            cfg.dataset.train_size = v;
        }
        SweepRow row;
        row.axis = axis;
        row.value = v;
        try {
            row.summary = run(cfg);
            row.ok = true;
        } catch (const error& e) {
            row.ok = false;
            row.error = e.what();
            outcome.any_failed = true;
        }
        outcome.rows.push_back(std::move(row));
    }

    std::ostringstream csv;
    csv << "axis,value,final_test_accuracy,final_test_loss,wall_time_ms,status\n";
    for (const SweepRow& row : outcome.rows) {
        csv << row.axis << ',' << row.value << ',';
        if (row.ok) {
            csv << format_double(row.summary.final_test_accuracy) << ','
                << format_double(row.summary.final_test_loss) << ',' << row.summary.wall_time_ms
                << ",ok\n";
        } else {
            csv << ",,,failed\n";
        }
    }
    outcome.csv_path = base.output_dir / (base.run_id + "-sweep-" + axis + ".csv");
    write_text_atomic(outcome.csv_path, csv.str());
    return outcome;
}

CompareResult compare(const fs::path& output_dir, const std::vector<std::string>& run_ids) {
    if (run_ids.empty()) throw config_error("compare: no run ids given");

    CompareResult result;
    std::vector<std::string> unique;
    for (const std::string& id : run_ids) {
        if (std::find(unique.begin(), unique.end(), id) != unique.end()) {
            result.warnings.push_back("duplicate run id ignored: " + id);
            continue;
        }
        unique.push_back(id);
    }

    std::vector<RunSummary> rows;
    rows.reserve(unique.size());
    for (const std::string& id : unique) rows.push_back(read_summary(output_dir, id));
    std::stable_sort(rows.begin(), rows.end(), [](const RunSummary& a, const RunSummary& b) {
        return a.final_test_accuracy > b.final_test_accuracy;
    });

    std::ostringstream text;
    std::ostringstream csv;
    csv << "model,run_id,final_test_accuracy,final_test_loss,wall_time_ms,epochs\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-6s %-24s %10s %12s %14s %8s\n", "model", "run_id",
                  "accuracy", "loss", "wall_time_ms", "epochs");
    text << line;
    for (const RunSummary& s : rows) {
        std::snprintf(line, sizeof(line), "%-6s %-24s %10.4f %12.6f %14lld %8d\n",
                      s.model.c_str(), s.run_id.c_str(), s.final_test_accuracy, s.final_test_loss,
                      static_cast<long long>(s.wall_time_ms), s.epochs);
        text << line;
        csv << s.model << ',' << s.run_id << ',' << format_double(s.final_test_accuracy) << ','
            << format_double(s.final_test_loss) << ',' << s.wall_time_ms << ',' << s.epochs
            << "\n";
    }
    result.text = text.str();
    result.csv_path = output_dir / "compare.csv";
    write_text_atomic(result.csv_path, csv.str());
    return result;
}

std::filesystem::path plot_run(const fs::path& output_dir, const std::string& run_id) {
    const fs::path csv = output_dir / run_id / "metrics.csv";
    if (!fs::exists(csv)) {
        throw data_error("missing run id: " + run_id + " (no metrics at " + csv.string() + ")");
    }
    const std::vector<RunMetrics> rows = parse_metrics_csv(read_text_file(csv));
    const fs::path out = output_dir / run_id / "curves.svg";
    write_text_atomic(out, metrics_svg(rows, run_id));
    return out;
}

} // namespace qcnn
