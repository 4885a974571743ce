#include "qcnn/fetch.hpp"

#include <httplib.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "qcnn/errors.hpp"
#include "qcnn/metrics.hpp"
#include "qcnn/sha256.hpp"

namespace qcnn {

namespace {

struct ParsedUrl {
    std::string origin; // scheme://host[:port]
    std::string path;   // leading slash, trailing slash preserved
};

ParsedUrl parse_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw config_error("mirror URL missing scheme: " + url);
    }
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw config_error("mirror URL scheme must be http or https: " + url);
    }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme == "https") {
        throw data_error("this build has no TLS support; use an http:// mirror");
    }
#endif
    const auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.origin = url;
        out.path = "/";
    } else {
        out.origin = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    if (out.path.back() != '/') out.path += '/';
    return out;
}

std::vector<std::uint8_t> download(const ParsedUrl& base, const std::string& filename,
                                   const FetchOptions& opts) {
    std::string last_error;
    for (int attempt = 0; attempt < opts.attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(opts.backoff_initial_ms << (attempt - 1)));
        }
        httplib::Client cli(base.origin);
        cli.set_follow_location(true);
        cli.set_connection_timeout(std::chrono::milliseconds(opts.timeout_ms));
        cli.set_read_timeout(std::chrono::milliseconds(opts.timeout_ms));
        auto res = cli.Get(base.path + filename);
        if (res && res->status == 200) {
            const auto* p = reinterpret_cast<const std::uint8_t*>(res->body.data());
            return std::vector<std::uint8_t>(p, p + res->body.size());
        }
        if (res) {
            last_error = "HTTP status " + std::to_string(res->status);
        } else {
            last_error = httplib::to_string(res.error());
        }
    }
    throw data_error("fetch: " + base.origin + base.path + filename + " failed after " +
                     std::to_string(opts.attempts) + " attempts: " + last_error);
}

} // namespace

std::map<std::string, std::string> read_digest_manifest(const std::filesystem::path& path) {
    std::map<std::string, std::string> out;
    if (!std::filesystem::exists(path)) return out;
    std::istringstream is(read_text_file(path));
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string digest, filename;
        if (!(ls >> digest >> filename) || digest.size() != 64) {
            throw data_error("digest manifest " + path.string() + ": malformed line " +
                             std::to_string(line_no));
        }
        out[filename] = digest;
    }
    return out;
}

void write_digest_manifest(const std::filesystem::path& path,
                           const std::map<std::string, std::string>& entries) {
    std::ostringstream os;
    for (const auto& [filename, digest] : entries) {
        os << digest << "  " << filename << "\n";
    }
    write_text_atomic(path, os.str());
}

std::array<std::filesystem::path, 4> fetch(const FetchOptions& opts) {
    namespace fs = std::filesystem;
    const ParsedUrl base = parse_base_url(opts.base_url);
    fs::create_directories(opts.dest_dir);
    const fs::path manifest_path = opts.dest_dir / "SHA256SUMS";
    std::map<std::string, std::string> manifest = read_digest_manifest(manifest_path);
    const bool had_manifest = !manifest.empty();

    std::array<fs::path, 4> paths;
    bool manifest_dirty = false;

    for (std::size_t i = 0; i < kMnistFileNames.size(); ++i) {
        const std::string name = kMnistFileNames[i];
        const fs::path dest = opts.dest_dir / name;
        paths[i] = dest;
        const auto it = manifest.find(name);
        const std::string expected = it == manifest.end() ? "" : it->second;

        if (fs::exists(dest)) {
            const std::string digest = sha256_hex(read_binary_file(dest));
            if (expected.empty()) {
                manifest[name] = digest;
                manifest_dirty = true;
                continue;
            }
            if (digest == expected) continue;
            // corrupted cache: fall through to a fresh download
        }

        bool ok = false;
        for (int verified_try = 0; verified_try < 2 && !ok; ++verified_try) {
            const std::vector<std::uint8_t> bytes = download(base, name, opts);
            const std::string digest = sha256_hex(bytes);
            if (!expected.empty() && digest != expected) {
                if (verified_try == 1) {
                    throw data_error("fetch: integrity error for " + name + ": expected sha256 " +
                                     expected + ", got " + digest);
                }
                continue; // redownload once
            }
            write_file_atomic(dest, bytes);
            if (expected.empty()) {
                manifest[name] = digest;
                manifest_dirty = true;
            }
            ok = true;
        }
    }

    if (manifest_dirty) {
        write_digest_manifest(manifest_path, manifest);
        if (!had_manifest) {
            std::fprintf(stderr,
                         "fetch: no digest manifest was present; recorded downloaded digests to %s\n",
                         manifest_path.string().c_str());
        }
    }
    return paths;
}

} // namespace qcnn
