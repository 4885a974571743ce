#include "qcnn/config.hpp"

#include <algorithm>
#include <sstream>

#include "qcnn/errors.hpp"
#include "qcnn/metrics.hpp"

namespace qcnn {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("config key " + key + ": not an integer: '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size() || value.front() == '-') throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("config key " + key + ": not an unsigned integer: '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("config key " + key + ": not a number: '" + value + "'");
    }
}

} // namespace

ModelKind model_kind_from_string(const std::string& s) {
    std::string u = s;
    std::transform(u.begin(), u.end(), u.begin(), ::toupper);
    if (u == "QCNN") return ModelKind::QCNN;
    if (u == "QNN") return ModelKind::QNN;
    if (u == "CNN") return ModelKind::CNN;
    if (u == "NN") return ModelKind::NN;
    throw config_error("unknown model: " + s + " (expected QCNN, QNN, CNN or NN)");
}

std::string to_string(ModelKind m) {
    switch (m) {
    case ModelKind::QCNN: return "QCNN";
    case ModelKind::QNN: return "QNN";
    case ModelKind::CNN: return "CNN";
    case ModelKind::NN: return "NN";
    }
    return "?";
}

KvMap parse_config_text(const std::string& text) {
    KvMap kv;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw config_error("config line " + std::to_string(line_no) + ": empty key");
        }
        if (kv.count(key)) {
            throw config_error("config line " + std::to_string(line_no) + ": duplicate key " + key);
        }
        kv[key] = value;
    }
    return kv;
}

ExperimentConfig config_from_kv(const KvMap& kv) {
    ExperimentConfig cfg;

    const auto get = [&](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    if (const auto* v = get("model")) cfg.model = model_kind_from_string(*v);
    if (const auto* v = get("seed")) cfg.seed = parse_u64("seed", *v);
    cfg.dataset.seed = cfg.seed;
    cfg.training.seed = cfg.seed;
    cfg.run_id = to_string(cfg.model) + "-s" + std::to_string(cfg.seed);
    std::transform(cfg.run_id.begin(), cfg.run_id.end(), cfg.run_id.begin(), ::tolower);

    // Per-model training defaults; any explicit key below overrides them.
    switch (cfg.model) {
    case ModelKind::QCNN:
    case ModelKind::QNN:
        cfg.training.learning_rate = 0.1;
        cfg.training.epochs = 20;
        break;
    case ModelKind::CNN:
        cfg.training.learning_rate = 0.1;
        cfg.training.epochs = 10;
        break;
    case ModelKind::NN:
        cfg.training.learning_rate = 0.3;
        cfg.training.epochs = 20;
        break;
    }
    cfg.training.batch_size = 16;

    for (const auto& [key, value] : kv) {
        if (key == "model" || key == "seed") {
            continue; // handled above
        } else if (key == "run_id") {
            if (value.empty() || value.find('/') != std::string::npos ||
                value.find('\\') != std::string::npos) {
                throw config_error("run_id must be a non-empty name without path separators");
            }
            cfg.run_id = value;
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "dataset.train_size") {
            cfg.dataset.train_size = static_cast<int>(parse_int(key, value));
        } else if (key == "dataset.test_size") {
            cfg.dataset.test_size = static_cast<int>(parse_int(key, value));
        } else if (key == "dataset.digit0") {
            cfg.dataset.digit_label0 = static_cast<int>(parse_int(key, value));
        } else if (key == "dataset.digit1") {
            cfg.dataset.digit_label1 = static_cast<int>(parse_int(key, value));
        } else if (key == "dataset.seed") {
            cfg.dataset.seed = parse_u64(key, value);
        } else if (key == "dataset.data_dir") {
            cfg.dataset.data_dir = value;
        } else if (key == "dataset.mirror") {
            cfg.dataset.mirror = value;
        } else if (key == "feature_map.kind") {
            cfg.feature_map.kind = feature_map_kind_from_string(value);
        } else if (key == "feature_map.repetitions") {
            cfg.feature_map.repetitions = static_cast<int>(parse_int(key, value));
        } else if (key == "training.learning_rate") {
            cfg.training.learning_rate = parse_double(key, value);
        } else if (key == "training.epochs") {
            cfg.training.epochs = static_cast<int>(parse_int(key, value));
        } else if (key == "training.batch_size") {
            cfg.training.batch_size = static_cast<int>(parse_int(key, value));
        } else if (key == "training.gradient_method") {
            cfg.training.gradient_method = gradient_method_from_string(value);
        } else if (key == "training.fd_epsilon") {
            cfg.training.fd_epsilon = parse_double(key, value);
        } else if (key == "training.seed") {
            cfg.training.seed = parse_u64(key, value);
        } else if (key == "training.threads") {
            cfg.training.threads = static_cast<int>(parse_int(key, value));
        } else if (key == "qnn.depth") {
            cfg.qnn_depth = static_cast<int>(parse_int(key, value));
        } else {
            throw config_error("unknown config key: " + key);
        }
    }

    if (cfg.dataset.train_size < 1 || cfg.dataset.test_size < 1) {
        throw config_error("dataset sizes must be >= 1");
    }
    if (cfg.feature_map.repetitions < 1 || cfg.feature_map.repetitions > 4) {
        throw config_error("feature_map.repetitions must be in [1, 4]");
    }
    if (cfg.qnn_depth < 1) throw config_error("qnn.depth must be >= 1");
    validate(cfg.training, static_cast<std::size_t>(cfg.dataset.train_size));
    return cfg;
}

KvMap config_to_kv(const ExperimentConfig& cfg) {
    KvMap kv;
    kv["model"] = to_string(cfg.model);
    kv["run_id"] = cfg.run_id;
    kv["output_dir"] = cfg.output_dir.string();
    kv["seed"] = std::to_string(cfg.seed);
    kv["dataset.train_size"] = std::to_string(cfg.dataset.train_size);
    kv["dataset.test_size"] = std::to_string(cfg.dataset.test_size);
    kv["dataset.digit0"] = std::to_string(cfg.dataset.digit_label0);
    kv["dataset.digit1"] = std::to_string(cfg.dataset.digit_label1);
    kv["dataset.seed"] = std::to_string(cfg.dataset.seed);
    kv["dataset.data_dir"] = cfg.dataset.data_dir.string();
    kv["dataset.mirror"] = cfg.dataset.mirror;
    kv["feature_map.kind"] = to_string(cfg.feature_map.kind);
    kv["feature_map.repetitions"] = std::to_string(cfg.feature_map.repetitions);
    kv["training.learning_rate"] = format_double(cfg.training.learning_rate);
    kv["training.epochs"] = std::to_string(cfg.training.epochs);
    kv["training.batch_size"] = std::to_string(cfg.training.batch_size);
    kv["training.gradient_method"] = to_string(cfg.training.gradient_method);
    kv["training.fd_epsilon"] = format_double(cfg.training.fd_epsilon);
    kv["training.seed"] = std::to_string(cfg.training.seed);
    kv["training.threads"] = std::to_string(cfg.training.threads);
    kv["qnn.depth"] = std::to_string(cfg.qnn_depth);
    return kv;
}

} // namespace qcnn
