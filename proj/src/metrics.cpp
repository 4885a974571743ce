#include "qcnn/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qcnn/errors.hpp"

namespace qcnn {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string metrics_to_csv(std::span<const RunMetrics> rows) {
    std::ostringstream os;
    os << kMetricsCsvHeader << "\n";
    for (const RunMetrics& r : rows) {
        os << r.epoch << ',' << format_double(r.train_loss) << ',' << format_double(r.train_accuracy)
           << ',' << format_double(r.test_loss) << ',' << format_double(r.test_accuracy) << ','
           << r.wall_time_ms << "\n";
    }
    return os.str();
}

std::vector<RunMetrics> parse_metrics_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kMetricsCsvHeader) {
        throw data_error("metrics CSV: missing or unexpected header: '" + line + "'");
    }
    std::vector<RunMetrics> rows;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        RunMetrics r;
        std::istringstream ls(line);
        std::string field;
        const auto next = [&]() {
            if (!std::getline(ls, field, ',')) {
                throw data_error("metrics CSV: short row at line " + std::to_string(line_no));
            }
            return field;
        };
        r.epoch = std::stoi(next());
        r.train_loss = std::stod(next());
        r.train_accuracy = std::stod(next());
        r.test_loss = std::stod(next());
        r.test_accuracy = std::stod(next());
        r.wall_time_ms = std::stoll(next());
        rows.push_back(r);
    }
    return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open file: " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open file: " + path.string());
    std::vector<std::uint8_t> bytes;
    f.seekg(0, std::ios::end);
    bytes.resize(static_cast<std::size_t>(f.tellg()));
    f.seekg(0);
    f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw data_error("short read: " + path.string());
    return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw data_error("cannot open for writing: " + tmp.string());
        f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw data_error("short write: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, std::span<const std::uint8_t>(
                                reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

} // namespace qcnn
