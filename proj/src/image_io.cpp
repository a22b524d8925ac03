#include "hir/image_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hir/error.hpp"
#include "hir/format.hpp"

namespace fs = std::filesystem;

namespace hir {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(std::string_view text, const fs::path& path, std::size_t line) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw IoError(path.string() + ":" + std::to_string(line) + ": not a number '" + std::string(text) + "'");
    }
    return v;
}

// Next whitespace-delimited PGM header token, skipping comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string rest;
            std::getline(in, rest);
            if (!tok.empty()) return tok;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) return tok;
        } else {
            tok += c;
        }
    }
    return tok;
}

std::size_t header_number(std::istream& in, const fs::path& path) {
    const std::string tok = pgm_token(in);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw IoError(path.string() + ": malformed PGM header");
    }
    return v;
}

}  // namespace

Grid<double> read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    if (pgm_token(in) != "P5") throw IoError(path.string() + ": not a binary PGM (P5)");
    const std::size_t cols = header_number(in, path);
    const std::size_t rows = header_number(in, path);
    const std::size_t maxval = header_number(in, path);
    if (rows == 0 || cols == 0) throw IoError(path.string() + ": empty image");
    if (maxval == 0 || maxval > 255) throw IoError(path.string() + ": only 8-bit PGM is supported");

    std::vector<unsigned char> raw(rows * cols);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw IoError(path.string() + ": truncated pixel data");
    Grid<double> out(rows, cols);
    std::copy(raw.begin(), raw.end(), out.data());
    return out;
}

void write_pgm(const fs::path& path, const Grid<double>& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    for (double v : image.values()) {
        out.put(static_cast<char>(static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L))));
    }
}

Grid<double> read_csv_grid(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<double> values;
    std::size_t cols = 0, rows = 0, lineno = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line, ',');
        if (rows == 0) cols = cells.size();
        if (cells.size() != cols) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                          " values, found " + std::to_string(cells.size()));
        }
        for (const auto& cell : cells) values.push_back(parse_double(cell, path, lineno));
        ++rows;
    }
    if (rows == 0) throw IoError(path.string() + ": empty image");
    return Grid<double>(rows, cols, std::move(values));
}

void write_csv_grid(const fs::path& path, const Grid<double>& image) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < image.rows(); ++i) {
        for (std::size_t j = 0; j < image.cols(); ++j) {
            if (j) out << ',';
            out << format_double(image(i, j));
        }
        out << '\n';
    }
}

Grid<double> read_image(const fs::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".pgm") return read_pgm(path);
    if (ext == ".csv") return read_csv_grid(path);
    throw IoError(path.string() + ": unsupported image format (expected .pgm or .csv)");
}

std::string class_of_id(const std::string& id) {
    const auto slash = id.find('/');
    return slash == std::string::npos ? std::string() : id.substr(0, slash);
}

Dataset load_dataset(const fs::path& root) {
    if (!fs::is_directory(root)) throw IoError(root.string() + ": not a directory");
    std::vector<std::pair<std::string, fs::path>> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext != ".pgm" && ext != ".csv") continue;
        files.emplace_back(fs::relative(entry.path(), root).generic_string(), entry.path());
    }
    if (files.empty()) throw IoError(root.string() + ": no .pgm or .csv images found");
    std::sort(files.begin(), files.end());

    Dataset out;
    std::map<std::string, int> class_index;
    for (const auto& [id, path] : files) class_index.emplace(class_of_id(id), 0);
    for (auto& [name, index] : class_index) {
        index = static_cast<int>(out.class_names.size());
        out.class_names.push_back(name);
    }
    for (const auto& [id, path] : files) {
        Grid<double> image = read_image(path);
        if (!out.images.empty() && !image.same_shape(out.images.front())) {
            throw IoError(path.string() + ": size " + std::to_string(image.rows()) + "x" +
                          std::to_string(image.cols()) + " differs from " +
                          std::to_string(out.images.front().rows()) + "x" +
                          std::to_string(out.images.front().cols()));
        }
        out.images.push_back(std::move(image));
        out.ids.push_back(id);
        out.labels.push_back(class_index.at(class_of_id(id)));
    }
    return out;
}

void write_features_csv(const fs::path& path, const FeatureMatrix& features) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "id";
    for (const auto& col : features.columns) out << ",n" << col.node_id << "_b" << col.band;
    out << '\n';
    for (std::size_t r = 0; r < features.samples(); ++r) {
        out << (features.ids.empty() ? std::to_string(r) : features.ids[r]);
        for (std::size_t c = 0; c < features.features(); ++c) out << ',' << format_double(features.values(r, c));
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

FeatureMatrix read_features_csv(const fs::path& path, std::vector<std::string>* class_names) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty features file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line, ',');
    if (header.empty() || header.front() != "id") throw IoError(path.string() + ": header must start with 'id'");

    FeatureMatrix out;
    for (std::size_t c = 1; c < header.size(); ++c) {
        InvariantVector::Entry e;
        if (std::sscanf(header[c].c_str(), "n%d_b%d", &e.node_id, &e.band) != 2) {
            throw IoError(path.string() + ": bad column name '" + header[c] + "'");
        }
        out.columns.push_back(e);
    }
    const std::size_t width = out.columns.size();
    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != width + 1) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(width + 1) + " fields");
        }
        out.ids.push_back(cells[0]);
        for (std::size_t c = 1; c < cells.size(); ++c) values.push_back(parse_double(cells[c], path, lineno));
    }
    out.values = Grid<double>(out.ids.size(), width, std::move(values));

    std::map<std::string, int> index;
    for (const auto& id : out.ids) index.emplace(class_of_id(id), 0);
    std::vector<std::string> names;
    for (auto& [name, i] : index) {
        i = static_cast<int>(names.size());
        names.push_back(name);
    }
    for (const auto& id : out.ids) out.labels.push_back(index.at(class_of_id(id)));
    if (class_names) *class_names = std::move(names);
    return out;
}

Dataset read_labeled_rows(const fs::path& path, std::size_t side) {
    const Grid<double> table = read_csv_grid(path);
    if (table.cols() != side * side + 1) {
        throw IoError(path.string() + ": expected " + std::to_string(side * side + 1) + " columns");
    }
    Dataset out;
    std::map<int, int> index;
    for (std::size_t r = 0; r < table.rows(); ++r) index.emplace(static_cast<int>(table(r, 0)), 0);
    for (auto& [label, i] : index) {
        i = static_cast<int>(out.class_names.size());
        out.class_names.push_back(std::to_string(label));
    }
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const int label = static_cast<int>(table(r, 0));
        out.labels.push_back(index.at(label));
        out.ids.push_back(std::to_string(label) + "/" + std::to_string(r));
        Grid<double> image(side, side);
        std::copy_n(&table(r, 1), side * side, image.data());
        out.images.push_back(std::move(image));
    }
    return out;
}

}  // namespace hir
