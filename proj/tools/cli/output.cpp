#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "prepay/errors.hpp"

namespace prepay::cli {

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalError("sha256: OpenSSL digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) return "0";
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw NumericalError("csv: row width does not match header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw InputError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void OutputDir::write(const std::string& name, const std::string& contents) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << contents;
    if (!out) throw InputError("write failed: " + path.string());
    files_.push_back(name);
    file_digests_.push_back(sha256_hex(contents));
}

void OutputDir::adopt(const std::string& name) {
    files_.push_back(name);
    file_digests_.push_back(sha256_file(dir_ / name));
}

void OutputDir::write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

void OutputDir::add_input(const std::string& path) {
    for (const auto& [p, d] : inputs_)
        if (p == path) return;
    inputs_.emplace_back(path, sha256_file(path));
}

void OutputDir::finish(const std::string& subcommand, const Json& config) {
    Json m;
    m["tool"] = "prepay";
    m["version"] = PREPAY_VERSION;
    m["subcommand"] = subcommand;
    m["config"] = config;
    Json inputs = Json::array();
    std::string digest_src = config.dump();
    for (const auto& [p, d] : inputs_) {
        inputs.push_back({{"path", p}, {"sha256", d}});
        digest_src += "\n" + p + ":" + d;
    }
    m["inputs"] = inputs;
    m["inputs_digest"] = sha256_hex(digest_src);
    Json outputs = Json::array();
    for (std::size_t i = 0; i < files_.size(); ++i)
        outputs.push_back({{"file", files_[i]}, {"sha256", file_digests_[i]}});
    m["outputs"] = outputs;
    const auto path = dir_ / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << m.dump(2) << "\n";
}

}  // namespace prepay::cli
