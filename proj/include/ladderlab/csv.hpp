#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ladderlab/model.hpp"

namespace ladderlab {

// shortest round-trip decimal form; keeps reruns byte-identical
inline std::string csv_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::string& dir, const std::string& name) {
        std::filesystem::create_directories(dir);
        path_ = dir + "/" + name;
        out_.open(path_);
        if (!out_) throw Error("io.open_failed", "cannot write " + path_);
    }
    void header(const std::vector<std::string>& cols) { row(cols); }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
};

}  // namespace ladderlab
