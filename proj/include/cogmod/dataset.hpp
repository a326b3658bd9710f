#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cogmod/classifier.hpp"
#include "cogmod/errors.hpp"
#include "cogmod/image_io.hpp"

namespace cogmod {

enum class scale_mode { off, bounding_box_fit };

/// A labelled image collection plus the preprocessing knobs: classifier
/// grid size, binarization cutoff for graymaps, and whether images are
/// rescaled to fill the grid or placed on it as-is.
struct dataset_manifest {
    std::vector<std::pair<std::string, std::vector<std::filesystem::path>>> classes;
    int grid_width = 32;
    int grid_height = 32;
    int binarize_cutoff = 128;
    scale_mode scaling = scale_mode::off;
};

namespace detail {

inline bool glob_match(const std::string& pattern, const std::string& text) {
    // '*' and '?' wildcards, no character classes
    std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

/// Expand one manifest entry: wildcards match against file names inside the
/// entry's literal directory part, sorted for determinism.
inline std::vector<std::filesystem::path> expand_entry(const std::filesystem::path& base,
                                                       const std::string& entry) {
    std::filesystem::path pattern(entry);
    std::filesystem::path resolved = pattern.is_absolute() ? pattern : base / pattern;
    const std::string name = resolved.filename().string();
    if (name.find('*') == std::string::npos && name.find('?') == std::string::npos)
        return {resolved};

    const std::filesystem::path dir = resolved.parent_path();
    std::vector<std::filesystem::path> matches;
    if (std::filesystem::is_directory(dir))
        for (const auto& e : std::filesystem::directory_iterator(dir))
            if (e.is_regular_file() && glob_match(name, e.path().filename().string()))
                matches.push_back(e.path());
    std::sort(matches.begin(), matches.end());
    return matches;
}

} // namespace detail

/// Parse the manifest format. Lines, in any order:
///   grid = <width>x<height>
///   cutoff = <0..255>
///   scale = off|fit
///   class <label>: <file or glob> [<file or glob> ...]
/// Relative paths resolve against the manifest's own directory. Blank lines
/// and '#' comments are ignored.
inline dataset_manifest parse_manifest(std::istream& in, const std::string& name,
                                       const std::filesystem::path& base_dir) {
    dataset_manifest manifest;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = line.substr(0, line.find('#'));
        std::istringstream fields(stripped);
        std::string first;
        if (!(fields >> first)) continue;

        if (first == "class") {
            std::string label;
            if (!(fields >> label) || label.size() < 2 || label.back() != ':')
                throw parse_error(name, lineno, "expected 'class <label>: <files>'");
            label.pop_back();
            std::vector<std::filesystem::path> files;
            std::string entry;
            while (fields >> entry) {
                auto expanded = detail::expand_entry(base_dir, entry);
                if (expanded.empty())
                    throw parse_error(name, lineno,
                                      "pattern '" + entry + "' matches no files");
                files.insert(files.end(), expanded.begin(), expanded.end());
            }
            if (files.empty())
                throw parse_error(name, lineno, "class '" + label + "' lists no files");
            for (const auto& [existing, unused] : manifest.classes)
                if (existing == label)
                    throw parse_error(name, lineno, "duplicate class '" + label + "'");
            manifest.classes.emplace_back(label, std::move(files));
        } else {
            std::string eq, value;
            if (!(fields >> eq >> value) || eq != "=")
                throw parse_error(name, lineno, "unrecognised manifest line: '" + line + "'");
            if (first == "grid") {
                int w = 0, h = 0;
                char x = 0;
                std::istringstream dims(value);
                if (!(dims >> w >> x >> h) || x != 'x' || w <= 0 || h <= 0)
                    throw parse_error(name, lineno, "grid must be <width>x<height>");
                manifest.grid_width = w;
                manifest.grid_height = h;
            } else if (first == "cutoff") {
                try {
                    manifest.binarize_cutoff = std::stoi(value);
                } catch (const std::exception&) {
                    throw parse_error(name, lineno, "cutoff must be an integer");
                }
                if (manifest.binarize_cutoff < 0 || manifest.binarize_cutoff > 255)
                    throw parse_error(name, lineno, "cutoff must be in [0,255]");
            } else if (first == "scale") {
                if (value == "off") manifest.scaling = scale_mode::off;
                else if (value == "fit") manifest.scaling = scale_mode::bounding_box_fit;
                else throw parse_error(name, lineno, "scale must be off or fit");
            } else {
                throw parse_error(name, lineno, "unknown manifest key '" + first + "'");
            }
        }
    }
    if (manifest.classes.empty())
        throw parse_error(name + ": manifest defines no classes");
    return manifest;
}

inline dataset_manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open manifest file " + path.string());
    return parse_manifest(in, path.string(), path.parent_path());
}

/// Load one dataset image: graymaps (P2/P5, detected by magic) are
/// binarized at the manifest cutoff, anything else parses as a text grid.
/// The result is fitted to the manifest grid: rescaled when scaling is on,
/// otherwise placed at the grid's top-left unchanged.
inline grid_image load_dataset_image(const std::filesystem::path& path,
                                     const dataset_manifest& manifest) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open image file " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    in.seekg(0);
    grid_image image = (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5'))
                           ? binarize(parse_pgm(in, path.string()), manifest.binarize_cutoff)
                           : parse_grid_text(in, path.string());
    if (manifest.scaling == scale_mode::bounding_box_fit) {
        if (image.empty())
            throw error("image " + path.string() + " has no active cells to scale");
        return normalize_scale(image, manifest.grid_width, manifest.grid_height);
    }
    try {
        return embed_top_left(image, manifest.grid_width, manifest.grid_height);
    } catch (const error& e) {
        throw error(path.string() + ": " + e.what());
    }
}

/// Recognition quality over a dataset: accuracy per class, their mean, and
/// the full confusion matrix.
struct evaluation_report {
    std::map<std::string, double> per_class_accuracy;
    double average_accuracy = 0.0;
    std::map<std::pair<std::string, std::string>, int> confusion; // (true, predicted) -> count
};

/// Train one classifier per class on all of that class's images, then run
/// every image through the whole bank and score the competition. The same
/// data is used for training and recognition; a held-out split is just a
/// second manifest.
inline evaluation_report evaluate(const dataset_manifest& manifest, double threshold,
                                  std::vector<cooccurrence_classifier>* bank_out = nullptr) {
    std::vector<cooccurrence_classifier> bank;
    std::vector<std::pair<std::string, std::vector<grid_image>>> images;
    for (const auto& [label, files] : manifest.classes) {
        cooccurrence_classifier clf(label, manifest.grid_width, manifest.grid_height);
        std::vector<grid_image> loaded;
        for (const std::filesystem::path& file : files) {
            grid_image image = load_dataset_image(file, manifest);
            try {
                clf.train(image);
            } catch (const error& e) {
                throw error(file.string() + ": " + e.what());
            }
            loaded.push_back(std::move(image));
        }
        bank.push_back(std::move(clf));
        images.emplace_back(label, std::move(loaded));
    }

    evaluation_report report;
    for (const auto& [label, loaded] : images) {
        int correct = 0;
        for (const grid_image& image : loaded) {
            const auto ranked = classify(bank, image, threshold);
            const std::string& winner = ranked.front().first;
            report.confusion[{label, winner}] += 1;
            if (winner == label) ++correct;
        }
        report.per_class_accuracy[label] =
            static_cast<double>(correct) / static_cast<double>(loaded.size());
    }
    for (const auto& [label, acc] : report.per_class_accuracy)
        report.average_accuracy += acc;
    report.average_accuracy /= static_cast<double>(report.per_class_accuracy.size());

    if (bank_out) *bank_out = std::move(bank);
    return report;
}

namespace detail {

inline std::string format_accuracy(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace detail

/// Human-readable report: per-class accuracies, the average, and a
/// confusion table.
inline std::string report_to_text(const evaluation_report& report,
                                  const dataset_manifest& manifest) {
    std::string out;
    for (const auto& [label, acc] : report.per_class_accuracy)
        out += "class " + label + " accuracy " + detail::format_accuracy(acc) + '\n';
    out += "average_accuracy " + detail::format_accuracy(report.average_accuracy) + '\n';
    out += "confusion (rows true, columns predicted):\n";
    out += "true\\pred";
    for (const auto& [label, files] : manifest.classes) out += ' ' + label;
    out += '\n';
    for (const auto& [truth, files] : manifest.classes) {
        out += truth;
        for (const auto& [pred, unused] : manifest.classes) {
            auto it = report.confusion.find({truth, pred});
            out += ' ' + std::to_string(it == report.confusion.end() ? 0 : it->second);
        }
        out += '\n';
    }
    return out;
}

/// Machine-readable comma-separated confusion matrix, labels sorted as in
/// the manifest.
inline std::string confusion_to_csv(const evaluation_report& report,
                                    const dataset_manifest& manifest) {
    std::string out = "true\\predicted";
    for (const auto& [label, files] : manifest.classes) out += ',' + label;
    out += '\n';
    for (const auto& [truth, files] : manifest.classes) {
        out += truth;
        for (const auto& [pred, unused] : manifest.classes) {
            auto it = report.confusion.find({truth, pred});
            out += ',' + std::to_string(it == report.confusion.end() ? 0 : it->second);
        }
        out += '\n';
    }
    return out;
}

} // namespace cogmod
