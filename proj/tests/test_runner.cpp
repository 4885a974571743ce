#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "qcnn/errors.hpp"
#include "qcnn/runner.hpp"

using namespace qcnn;
namespace fs = std::filesystem;

namespace {

// Shared fixture data + output dir for every runner test.
struct RunnerEnv {
    fs::path data_dir;
    fs::path out_dir;

    RunnerEnv() {
        data_dir = testing::fresh_temp_dir("runner_data");
        out_dir = testing::fresh_temp_dir("runner_out");
        testing::write_synthetic_mnist_dir(data_dir, 300, 120, 5);
    }
    ~RunnerEnv() {
        fs::remove_all(data_dir);
        fs::remove_all(out_dir);
    }

    ExperimentConfig config(const std::string& model, int train_n, int test_n, int epochs) const {
        KvMap kv;
        kv["model"] = model;
        kv["dataset.data_dir"] = data_dir.string();
        kv["dataset.train_size"] = std::to_string(train_n);
        kv["dataset.test_size"] = std::to_string(test_n);
        kv["output_dir"] = out_dir.string();
        kv["training.epochs"] = std::to_string(epochs);
        kv["training.batch_size"] = "8";
        kv["training.threads"] = "2";
        return config_from_kv(kv);
    }
};

std::string strip_wall_column(const std::string& csv) {
    std::istringstream is(csv);
    std::ostringstream os;
    std::string line;
    while (std::getline(is, line)) {
        const auto pos = line.rfind(',');
        os << line.substr(0, pos) << "\n";
    }
    return os.str();
}

} // namespace

TEST_CASE("load_dataset builds both feature views from cached files") {
    RunnerEnv env;
    const ExperimentConfig cfg = env.config("QCNN", 24, 12, 1);
    const Dataset ds = load_dataset(cfg);
    CHECK(ds.train.size() == 24);
    CHECK(ds.test.size() == 12);
    CHECK(ds.provenance.file_digests.size() == 4);
    for (const auto& [name, digest] : ds.provenance.file_digests) CHECK(digest.size() == 64);
}

TEST_CASE("run writes metrics.csv and summary.txt with the pinned schema") {
    RunnerEnv env;
    const ExperimentConfig cfg = env.config("QCNN", 24, 12, 2);
    const RunSummary summary = run(cfg);

    const fs::path dir = env.out_dir / cfg.run_id;
    REQUIRE(fs::exists(dir / "metrics.csv"));
    REQUIRE(fs::exists(dir / "summary.txt"));

    const std::string csv = read_text_file(dir / "metrics.csv");
    CHECK(csv.rfind("epoch,train_loss,train_accuracy,test_loss,test_accuracy,wall_time_ms\n", 0) ==
          0);
    const auto rows = parse_metrics_csv(csv);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].epoch == 1);
    CHECK(rows[1].epoch == 2);
    for (const auto& r : rows) {
        CHECK(r.train_accuracy >= 0.0);
        CHECK(r.train_accuracy <= 1.0);
        CHECK(r.test_loss >= 0.0);
        CHECK(r.wall_time_ms >= 0);
    }

    const RunSummary parsed = read_summary(env.out_dir, cfg.run_id);
    CHECK(parsed.run_id == summary.run_id);
    CHECK(parsed.model == "QCNN");
    CHECK(parsed.final_test_accuracy == summary.final_test_accuracy);
    CHECK(parsed.config == config_to_kv(cfg));
}

TEST_CASE("a run is re-executable from its own resolved config echo") {
    RunnerEnv env;
    const ExperimentConfig cfg = env.config("QNN", 16, 8, 2);
    run(cfg);
    const RunSummary first = read_summary(env.out_dir, cfg.run_id);
    const std::string csv_first = read_text_file(env.out_dir / cfg.run_id / "metrics.csv");

    // rebuild the config purely from the summary echo and rerun
    const ExperimentConfig rebuilt = config_from_kv(first.config);
    run(rebuilt);
    const std::string csv_second = read_text_file(env.out_dir / cfg.run_id / "metrics.csv");
    CHECK(strip_wall_column(csv_first) == strip_wall_column(csv_second));
}

TEST_CASE("reruns are byte-identical modulo the wall-time column") {
    RunnerEnv env;
    const ExperimentConfig cfg = env.config("QCNN", 20, 10, 2);
    run(cfg);
    const std::string first = read_text_file(env.out_dir / cfg.run_id / "metrics.csv");
    run(cfg);
    const std::string second = read_text_file(env.out_dir / cfg.run_id / "metrics.csv");
    CHECK(strip_wall_column(first) == strip_wall_column(second));
}

TEST_CASE("classical models run through the same pipeline") {
    RunnerEnv env;
    for (const char* model : {"CNN", "NN"}) {
        const ExperimentConfig cfg = env.config(model, 16, 8, 1);
        const RunSummary s = run(cfg);
        CHECK(s.model == model);
        CHECK(s.final_test_accuracy >= 0.0);
        CHECK(s.final_test_accuracy <= 1.0);
    }
}

TEST_CASE("sweep: per-value runs, csv, and wall-time growth with train size") {
    RunnerEnv env;
    ExperimentConfig base = env.config("QCNN", 20, 8, 1);
    base.run_id = "sweepbase";

    const SweepOutcome bs = sweep(base, "batch_size", {4, 8, 16});
    CHECK(!bs.any_failed);
    REQUIRE(bs.rows.size() == 3);
    for (const auto& row : bs.rows) CHECK(row.ok);
    REQUIRE(fs::exists(bs.csv_path));
    const std::string csv = read_text_file(bs.csv_path);
    CHECK(csv.rfind("axis,value,final_test_accuracy,final_test_loss,wall_time_ms,status\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    // three runs exist under distinct ids
    CHECK(fs::exists(env.out_dir / "sweepbase-batch_size4" / "summary.txt"));
    CHECK(fs::exists(env.out_dir / "sweepbase-batch_size16" / "summary.txt"));

    // train_size sweep: finite-difference cost scales with the sample count
    const SweepOutcome ts = sweep(base, "train_size", {12, 24, 48});
    CHECK(!ts.any_failed);
    REQUIRE(ts.rows.size() == 3);
    CHECK(ts.rows[0].summary.wall_time_ms < ts.rows[1].summary.wall_time_ms);
    CHECK(ts.rows[1].summary.wall_time_ms < ts.rows[2].summary.wall_time_ms);
}

TEST_CASE("sweep records row failures and keeps going") {
    RunnerEnv env;
    ExperimentConfig base = env.config("QCNN", 20, 8, 1);
    base.run_id = "sweepfail";
    // train_size 2000 exceeds the fixture's available digits: data error row
    const SweepOutcome out = sweep(base, "train_size", {12, 2000});
    CHECK(out.any_failed);
    REQUIRE(out.rows.size() == 2);
    CHECK(out.rows[0].ok);
    CHECK(!out.rows[1].ok);
    CHECK(!out.rows[1].error.empty());
    const std::string csv = read_text_file(out.csv_path);
    CHECK(csv.find("failed") != std::string::npos);
}

TEST_CASE("sweep rejects bad axes and empty value lists") {
    RunnerEnv env;
    ExperimentConfig base = env.config("QCNN", 16, 8, 1);
    CHECK_THROWS_AS(sweep(base, "learning_rate", {1}), config_error);
    CHECK_THROWS_AS(sweep(base, "batch_size", {}), config_error);
    CHECK_THROWS_AS(sweep(base, "batch_size", {0}), config_error);
}

TEST_CASE("compare: sorted table, dedup warning, missing id error") {
    RunnerEnv env;
    std::vector<std::string> ids;
    for (const char* model : {"QCNN", "QNN", "CNN", "NN"}) {
        ExperimentConfig cfg = env.config(model, 16, 8, 1);
        run(cfg);
        ids.push_back(cfg.run_id);
    }

    const CompareResult four = compare(env.out_dir, ids);
    CHECK(four.warnings.empty());
    std::istringstream table(four.text);
    std::string line;
    std::getline(table, line); // header
    CHECK(line.find("model") != std::string::npos);
    int rows = 0;
    double prev_acc = 2.0;
    while (std::getline(table, line)) {
        if (line.empty()) continue;
        ++rows;
    }
    CHECK(rows == 4);
    const std::string csv = read_text_file(four.csv_path);
    CHECK(csv.rfind("model,run_id,final_test_accuracy,final_test_loss,wall_time_ms,epochs\n", 0) ==
          0);
    // accuracy column is non-increasing
    std::istringstream csv_rows(csv);
    std::getline(csv_rows, line);
    while (std::getline(csv_rows, line)) {
        std::istringstream ls(line);
        std::string field;
        std::getline(ls, field, ','); // model
        std::getline(ls, field, ','); // run_id
        std::getline(ls, field, ','); // accuracy
        const double acc = std::stod(field);
        CHECK(acc <= prev_acc + 1e-15);
        prev_acc = acc;
    }

    const CompareResult one = compare(env.out_dir, {ids[0]});
    CHECK(one.text.find(ids[0]) != std::string::npos);

    const CompareResult dup = compare(env.out_dir, {ids[0], ids[0], ids[1]});
    CHECK(dup.warnings.size() == 1);

    CHECK_THROWS_WITH_AS(compare(env.out_dir, {"ghost-run"}), doctest::Contains("ghost-run"),
                         data_error);
}

TEST_CASE("plot writes an svg with four series") {
    RunnerEnv env;
    const ExperimentConfig cfg = env.config("NN", 16, 8, 3);
    run(cfg);
    const fs::path svg_path = plot_run(env.out_dir, cfg.run_id);
    REQUIRE(fs::exists(svg_path));
    const std::string svg = read_text_file(svg_path);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 5);
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        pos += 9;
    }
    CHECK(polylines == 4);
    CHECK_THROWS_AS(plot_run(env.out_dir, "ghost-run"), data_error);
}

TEST_CASE("cli subprocess: exit codes and outputs") {
    const char* bin = std::getenv("QCNN_BENCH_BIN");
    if (bin == nullptr) {
        MESSAGE("QCNN_BENCH_BIN not set; skipping CLI subprocess checks");
        return;
    }
    RunnerEnv env;
    const auto shell = [&](const std::string& command) {
        const int status = std::system(command.c_str());
        return WEXITSTATUS(status);
    };
    const std::string base = std::string(bin);
    const std::string common = " --dataset.data_dir " + env.data_dir.string() + " --output-dir " +
                               env.out_dir.string() +
                               " --dataset.train_size 16 --dataset.test_size 8" +
                               " --training.epochs 1 --training.batch_size 8 > /dev/null 2>&1";

    CHECK(shell(base + " > /dev/null 2>&1") == 2);                      // usage
    CHECK(shell(base + " frobnicate > /dev/null 2>&1") == 2);           // unknown command
    CHECK(shell(base + " run --model QCNN" + common) == 0);             // happy path
    CHECK(shell(base + " run --seed notanum" + common) == 2);
    CHECK(shell(base + " sweep --axis batch_size --values '' " + common) == 2);
    CHECK(shell(base + " compare --runs nothere" + common) == 3);
    // unreachable mirror and empty cache: data error
    const auto empty_dir = testing::fresh_temp_dir("cli_nodata");
    CHECK(shell(base + " run --dataset.data_dir " + empty_dir.string() +
                " --dataset.mirror http://127.0.0.1:9/mnist/ --output-dir " + env.out_dir.string() +
                " > /dev/null 2>&1") == 3);
    fs::remove_all(empty_dir);

    // config file + dotted override
    const auto cfg_path = env.out_dir / "exp.conf";
    write_text_atomic(cfg_path, "model = QNN\ntraining.epochs = 1\n");
    CHECK(shell(base + " run --config " + cfg_path.string() + " --training.batch_size 8" +
                " --dataset.data_dir " + env.data_dir.string() + " --output-dir " +
                env.out_dir.string() +
                " --dataset.train_size 16 --dataset.test_size 8 > /dev/null 2>&1") == 0);
    CHECK(fs::exists(env.out_dir / "qnn-s42" / "summary.txt"));

    // prepare prints dataset stats; plot renders the earlier QCNN run
    CHECK(shell(base + " prepare" + common) == 0);
    CHECK(shell(base + " plot --run qcnn-s42 --output-dir " + env.out_dir.string() +
                " > /dev/null 2>&1") == 0);
    CHECK(fs::exists(env.out_dir / "qcnn-s42" / "curves.svg"));
    CHECK(shell(base + " plot --run ghost --output-dir " + env.out_dir.string() +
                " > /dev/null 2>&1") == 3);
    CHECK(shell(base + " --help > /dev/null 2>&1") == 0);
}
