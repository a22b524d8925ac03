#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hir/features.hpp"
#include "hir/grid.hpp"

namespace hir {

/// 8-bit binary graymap (P5). Pixel values are kept as read, 0..maxval.
Grid<double> read_pgm(const std::filesystem::path& path);
/// Values are rounded and clamped to 0..255.
void write_pgm(const std::filesystem::path& path, const Grid<double>& image);

/// Numeric grid, one image row per line, comma separated.
Grid<double> read_csv_grid(const std::filesystem::path& path);
void write_csv_grid(const std::filesystem::path& path, const Grid<double>& image);

/// Dispatches on the extension: .pgm or .csv.
Grid<double> read_image(const std::filesystem::path& path);

struct Dataset {
    std::vector<Grid<double>> images;
    std::vector<std::string> ids;      // path relative to the root, '/' separated
    std::vector<int> labels;           // index into class_names
    std::vector<std::string> class_names;
};

/// Loads every .pgm/.csv below `root`. The first path component below the
/// root names the class; files directly in the root get the class "".
/// Files are visited in sorted id order. All images must share one size.
Dataset load_dataset(const std::filesystem::path& root);

/// Class of an image id: the part before the first '/', "" if there is none.
std::string class_of_id(const std::string& id);

/// Header "id,n{node}_b{band},...", one row per image.
void write_features_csv(const std::filesystem::path& path, const FeatureMatrix& features);
/// Labels are derived from the ids with class_of_id; `class_names` receives
/// the sorted distinct classes.
FeatureMatrix read_features_csv(const std::filesystem::path& path, std::vector<std::string>* class_names = nullptr);

/// Rows "label,v0,v1,..." holding square images of side `side`.
Dataset read_labeled_rows(const std::filesystem::path& path, std::size_t side);

}  // namespace hir
