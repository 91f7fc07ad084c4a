#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace prepay::cli {

using Json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// Shortest text that round-trips the double ("%.17g" trimmed).
std::string num(double v);

// Plain CSV writer; every column name carries its unit suffix.
class CsvTable {
   public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add(std::vector<std::string> row);
    std::string str() const;

   private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Collects the files of one subcommand run and writes them plus
// manifest.json. Nothing in the manifest depends on time or thread count.
class OutputDir {
   public:
    explicit OutputDir(std::filesystem::path dir);

    void write(const std::string& name, const std::string& contents);
    void write_json(const std::string& name, const Json& j);
    void write_csv(const std::string& name, const CsvTable& t) { write(name, t.str()); }

    // Registers a file that was written into the directory by other means.
    void adopt(const std::string& name);

    void add_input(const std::string& path);
    // Writes manifest.json; `config` is the resolved configuration.
    void finish(const std::string& subcommand, const Json& config);

    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<std::string>& files() const { return files_; }

   private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
    std::vector<std::string> file_digests_;
    std::vector<std::pair<std::string, std::string>> inputs_;
};

}  // namespace prepay::cli
