#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "task_space.hpp"

namespace compkit {

// All numeric CSV output is rounded to 12 significant digits so content
// hashes stay portable across math libraries.
inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out += ",";
            out += header[i];
        }
        out += "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ",";
                out += row[i];
            }
            out += "\n";
        }
        return out;
    }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f << content;
    if (!f) throw ConfigError("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline CsvTable parse_csv(const std::string& content) {
    CsvTable t;
    std::istringstream ss(content);
    std::string line;
    bool first = true;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (first) {
            t.header = cells;
            first = false;
        } else {
            t.rows.push_back(cells);
        }
    }
    if (first) throw ConfigError("CSV has no header row");
    return t;
}

// Dataset CSV: z_0..z_{C-1}, target, split. Deterministic row order: train
// rows first, then test, each in generation order.
inline CsvTable dataset_to_csv(const CompositionalDataset& ds) {
    CsvTable t;
    for (int c = 0; c < ds.space.num_components; ++c) t.header.push_back("z_" + std::to_string(c));
    t.header.push_back("target");
    t.header.push_back("split");
    auto add = [&](const Example& e, const char* split) {
        std::vector<std::string> row;
        for (int v : e.z) row.push_back(std::to_string(v));
        row.push_back(format_real(e.target));
        row.push_back(split);
        t.rows.push_back(std::move(row));
    };
    for (const auto& e : ds.train) add(e, "train");
    for (const auto& e : ds.test) add(e, "test");
    return t;
}

inline CompositionalDataset dataset_from_csv(const CsvTable& t) {
    if (t.header.size() < 3 || t.header.back() != "split" ||
        t.header[t.header.size() - 2] != "target")
        throw ConfigError("dataset CSV must end with target,split columns");
    const int C = static_cast<int>(t.header.size()) - 2;
    for (int c = 0; c < C; ++c)
        if (t.header[static_cast<std::size_t>(c)] != "z_" + std::to_string(c))
            throw ConfigError("dataset CSV component columns must be z_0..z_{C-1}");
    CompositionalDataset ds;
    ds.name = "from_csv";
    std::vector<int> maxv(static_cast<std::size_t>(C), 0);
    bool classification = true;
    for (const auto& row : t.rows) {
        if (static_cast<int>(row.size()) != C + 2)
            throw ConfigError("dataset CSV row has the wrong number of cells");
        Example e;
        for (int c = 0; c < C; ++c) {
            int v = std::stoi(row[static_cast<std::size_t>(c)]);
            if (v < 0) throw ConfigError("component indices must be non-negative");
            e.z.push_back(v);
            maxv[static_cast<std::size_t>(c)] = std::max(maxv[static_cast<std::size_t>(c)], v);
        }
        e.target = std::stod(row[static_cast<std::size_t>(C)]);
        if (e.target != 1.0 && e.target != -1.0) classification = false;
        const std::string& split = row[static_cast<std::size_t>(C) + 1];
        if (split == "train")
            ds.train.push_back(std::move(e));
        else if (split == "test")
            ds.test.push_back(std::move(e));
        else
            throw ConfigError("dataset CSV split must be train or test");
    }
    std::vector<int> cards;
    for (int m : maxv) cards.push_back(m + 1);
    ds.space = make_space(cards);
    ds.kind = classification ? TaskKind::Classification : TaskKind::Regression;
    return ds;
}

}  // namespace compkit
