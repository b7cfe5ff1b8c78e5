#pragma once

// Run manifest: records every artifact a command wrote, with content hashes,
// so runs can be diffed and reproducibility checked without re-opening files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "compkit/common.hpp"
#include "compkit/csv.hpp"

namespace compkit {

struct ManifestEntry {
    std::string path;        // relative to the output directory
    std::uint64_t bytes = 0;
    std::uint64_t hash = 0;  // FNV-1a 64 of the file content
};

class Manifest {
  public:
    explicit Manifest(std::filesystem::path out_dir) : out_dir_(std::move(out_dir)) {}

    // Registers a file already written under the output directory.
    void record(const std::filesystem::path& file) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw ConfigError("manifest: cannot reopen " + file.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string content = buf.str();
        ManifestEntry e;
        e.path = std::filesystem::relative(file, out_dir_).generic_string();
        e.bytes = content.size();
        e.hash = fnv1a64(content);
        entries_.push_back(std::move(e));
    }

    // Convenience: write `content` to out_dir/name and record it.
    std::filesystem::path write_text(const std::string& name, const std::string& content) {
        const auto path = out_dir_ / name;
        std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
        out << content;
        out.close();
        record(path);
        return path;
    }

    std::filesystem::path write_csv(const std::string& name, const CsvTable& table) {
        return write_text(name, table.to_string());
    }

    // Writes manifest.csv itself (not self-referential). Call once, last.
    std::filesystem::path finalize(const std::string& command_line) const {
        CsvTable t;
        t.header = {"path", "bytes", "fnv1a64"};
        for (const auto& e : entries_) {
            char hex[17];
            std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(e.hash));
            t.rows.push_back({e.path, std::to_string(e.bytes), std::string(hex)});
        }
        std::string body = "# " + command_line + "\n" + t.to_string();
        const auto path = out_dir_ / "manifest.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
        out << body;
        return path;
    }

    const std::vector<ManifestEntry>& entries() const { return entries_; }
    const std::filesystem::path& out_dir() const { return out_dir_; }

  private:
    std::filesystem::path out_dir_;
    std::vector<ManifestEntry> entries_;
};

}  // namespace compkit
