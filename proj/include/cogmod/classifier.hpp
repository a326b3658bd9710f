#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cogmod/errors.hpp"
#include "cogmod/grid.hpp"

namespace cogmod {

/// Retrieval quality of one classifier against one input image.
/// in_count / out_count split the retrieved cells by membership in the
/// input; ratio is in/out, +infinity when nothing fell outside, and 0 for
/// an empty retrieval.
struct score {
    std::int64_t in_count = 0;
    std::int64_t out_count = 0;
    double ratio = 0.0;

    bool infinite() const { return std::isinf(ratio); }
};

inline score success_score(const std::set<cell_index>& retrieved, const grid_image& image) {
    score s;
    for (const cell_index& c : retrieved)
        (image.contains(c) ? s.in_count : s.out_count)++;
    if (s.out_count > 0)
        s.ratio = static_cast<double>(s.in_count) / static_cast<double>(s.out_count);
    else if (s.in_count > 0)
        s.ratio = std::numeric_limits<double>::infinity();
    return s;
}

/// Grid classifier trained by full linking: every active cell of a training
/// image records one co-occurrence count against every other active cell.
/// Counts averaged over the number of trained images give link weights in
/// [0,1]; retrieval follows links from the input cells and admits associated
/// cells whose mean weight clears a threshold.
class cooccurrence_classifier {
public:
    cooccurrence_classifier(std::string label, int width, int height)
        : label_(std::move(label)), width_(width), height_(height) {
        if (width <= 0 || height <= 0)
            throw error("classifier dimensions must be positive, got " +
                        std::to_string(width) + "x" + std::to_string(height));
        validate_label(label_);
        links_.resize(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_));
    }

    const std::string& label() const { return label_; }
    int width() const { return width_; }
    int height() const { return height_; }
    std::uint32_t images_trained() const { return images_trained_; }
    bool trained() const { return images_trained_ > 0; }

    /// Record one training image: +1 on both ordered directions of every
    /// pair of distinct active cells. Images with fewer than two active
    /// cells carry no pair and are rejected.
    void train(const grid_image& image) {
        check_dimensions(image);
        if (image.active().size() < 2)
            throw error("classifier '" + label_ +
                        "': training image has no cell pair to associate");
        std::vector<int> ids;
        ids.reserve(image.active().size());
        for (const cell_index& c : image.active()) ids.push_back(cell_id(c));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                links_[ids[i]][ids[j]] += 1;
                links_[ids[j]][ids[i]] += 1;
            }
        }
        images_trained_ += 1;
    }

    /// Raw co-occurrence count for an ordered cell pair; 0 when never stored.
    std::uint32_t count(cell_index c, cell_index d) const {
        check_cell(c);
        check_cell(d);
        const auto& row = links_[cell_id(c)];
        auto it = row.find(cell_id(d));
        return it == row.end() ? 0u : it->second;
    }

    /// Link weight: the pair count averaged over the trained images.
    double weight(cell_index c, cell_index d) const {
        if (c == d)
            throw error("link weight undefined for a cell paired with itself (" +
                        to_string(c) + ")");
        if (!trained())
            throw error("classifier '" + label_ + "' is untrained");
        return static_cast<double>(count(c, d)) / static_cast<double>(images_trained_);
    }

    /// Mean link weight from a set of source cells to a candidate cell.
    /// Averages over every source cell; absent pairs contribute 0. Usable on
    /// an untrained classifier, where all mass is 0.
    double mean_link_weight(const std::set<cell_index>& sources, cell_index d) const {
        check_cell(d);
        if (sources.empty() || !trained()) return 0.0;
        std::uint64_t mass = 0;
        const int target = cell_id(d);
        for (const cell_index& c : sources) {
            check_cell(c);
            const auto& row = links_[cell_id(c)];
            auto it = row.find(target);
            if (it != row.end()) mass += it->second;
        }
        return static_cast<double>(mass) /
               (static_cast<double>(images_trained_) * static_cast<double>(sources.size()));
    }

    /// Retrieve the classifier's impression of the input: input cells it
    /// knows (cells with at least one stored pair) plus every associated
    /// cell whose mean link weight from the input reaches the threshold.
    /// Cells with no link mass at all are never admitted.
    std::set<cell_index> retrieve(const grid_image& image, double threshold) const {
        check_dimensions(image);
        check_threshold(threshold);
        if (!trained())
            throw error("classifier '" + label_ + "' is untrained");

        std::set<cell_index> result;
        if (image.active().empty()) return result;

        for (const cell_index& c : image.active())
            if (!links_[cell_id(c)].empty()) result.insert(c);

        // accumulate link mass from all input cells in one pass
        std::vector<std::uint64_t> mass(links_.size(), 0);
        for (const cell_index& c : image.active())
            for (auto [d, n] : links_[cell_id(c)]) mass[d] += n;

        const double denom =
            static_cast<double>(images_trained_) * static_cast<double>(image.active().size());
        for (std::size_t id = 0; id < mass.size(); ++id) {
            if (mass[id] == 0) continue;
            cell_index d = cell_at(static_cast<int>(id));
            if (image.contains(d)) continue;
            if (static_cast<double>(mass[id]) / denom >= threshold) result.insert(d);
        }
        return result;
    }

    /// Every cell that was active in at least one training image.
    std::set<cell_index> known_cells() const {
        std::set<cell_index> out;
        for (std::size_t id = 0; id < links_.size(); ++id)
            if (!links_[id].empty()) out.insert(cell_at(static_cast<int>(id)));
        return out;
    }

    /// Line-oriented persistence: header `label width height images_trained`,
    /// then one `row1 col1 row2 col2 count` line per stored ordered pair in
    /// lexicographic order. Round-trips bit-exact.
    std::string serialize() const {
        std::ostringstream out;
        out << label_ << ' ' << width_ << ' ' << height_ << ' ' << images_trained_ << '\n';
        for (std::size_t id = 0; id < links_.size(); ++id) {
            cell_index c = cell_at(static_cast<int>(id));
            for (auto [did, n] : links_[id]) {
                cell_index d = cell_at(did);
                out << c.row << ' ' << c.col << ' ' << d.row << ' ' << d.col << ' ' << n << '\n';
            }
        }
        return out.str();
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw error("cannot write classifier file " + path.string());
        out << serialize();
        if (!out) throw error("failed writing classifier file " + path.string());
    }

    static cooccurrence_classifier load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw error("cannot open classifier file " + path.string());
        return parse(in, path.string());
    }

    static cooccurrence_classifier parse(std::istream& in, const std::string& name) {
        std::string line;
        if (!std::getline(in, line))
            throw parse_error(name, 1, "empty classifier file");
        std::istringstream header(line);
        std::string label;
        int width = 0, height = 0;
        long long images = -1;
        if (!(header >> label >> width >> height >> images) || images < 0 || !drained(header))
            throw parse_error(name, 1, "bad classifier header: '" + line + "'");
        if (width <= 0 || height <= 0)
            throw parse_error(name, 1, "bad classifier dimensions");

        cooccurrence_classifier clf(label, width, height);
        clf.images_trained_ = static_cast<std::uint32_t>(images);
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) throw parse_error(name, lineno, "blank pair line");
            std::istringstream fields(line);
            cell_index c, d;
            long long n = 0;
            if (!(fields >> c.row >> c.col >> d.row >> d.col >> n) || !drained(fields))
                throw parse_error(name, lineno, "bad pair line: '" + line + "'");
            if (!clf.valid_cell(c) || !clf.valid_cell(d))
                throw parse_error(name, lineno, "cell outside classifier grid");
            if (c == d)
                throw parse_error(name, lineno, "self pair " + to_string(c));
            if (n < 1 || n > images)
                throw parse_error(name, lineno,
                                  "pair count must be in [1, images_trained], got " +
                                      std::to_string(n));
            auto [it, inserted] =
                clf.links_[clf.cell_id(c)].emplace(clf.cell_id(d), static_cast<std::uint32_t>(n));
            if (!inserted) throw parse_error(name, lineno, "duplicate pair " + to_string(c) +
                                                               " -> " + to_string(d));
        }
        // the stored relation must be symmetric
        for (std::size_t id = 0; id < clf.links_.size(); ++id)
            for (auto [did, n] : clf.links_[id]) {
                auto& back = clf.links_[did];
                auto it = back.find(static_cast<int>(id));
                if (it == back.end() || it->second != n)
                    throw parse_error(name + ": asymmetric pair counts in classifier file");
            }
        return clf;
    }

    int cell_id(cell_index c) const { return c.row * width_ + c.col; }
    cell_index cell_at(int id) const { return {id / width_, id % width_}; }

private:
    static void validate_label(const std::string& label) {
        if (label.empty()) throw error("classifier label must not be empty");
        for (char ch : label)
            if (std::isspace(static_cast<unsigned char>(ch)))
                throw error("classifier label must not contain whitespace: '" + label + "'");
    }

    static void check_threshold(double threshold) {
        if (!(threshold >= 0.0 && threshold <= 1.0))
            throw error("threshold must be in [0,1], got " + std::to_string(threshold));
    }

    static bool drained(std::istringstream& s) {
        std::string rest;
        return !(s >> rest);
    }

    bool valid_cell(cell_index c) const {
        return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
    }

    void check_cell(cell_index c) const {
        if (!valid_cell(c))
            throw error("cell " + to_string(c) + " outside classifier grid " +
                        std::to_string(width_) + "x" + std::to_string(height_));
    }

    void check_dimensions(const grid_image& image) const {
        if (image.width() != width_ || image.height() != height_)
            throw error("classifier '" + label_ + "' is " + std::to_string(width_) + "x" +
                        std::to_string(height_) + " but image is " +
                        std::to_string(image.width()) + "x" + std::to_string(image.height()));
    }

    std::string label_;
    int width_;
    int height_;
    std::uint32_t images_trained_ = 0;
    // links_[cell id] maps associated cell id -> co-occurrence count,
    // symmetric by construction
    std::vector<std::map<int, std::uint32_t>> links_;
};

/// Run every classifier in the bank against the image and rank by score:
/// higher ratio first (infinite beats finite), then larger in_count, then
/// label ascending. The first entry is the winning class.
inline std::vector<std::pair<std::string, score>>
classify(const std::vector<cooccurrence_classifier>& bank, const grid_image& image,
         double threshold) {
    if (bank.empty()) throw error("classifier bank is empty");
    std::vector<std::pair<std::string, score>> ranked;
    ranked.reserve(bank.size());
    for (const cooccurrence_classifier& clf : bank)
        ranked.emplace_back(clf.label(), success_score(clf.retrieve(image, threshold), image));
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.ratio != b.second.ratio) return a.second.ratio > b.second.ratio;
        if (a.second.in_count != b.second.in_count) return a.second.in_count > b.second.in_count;
        return a.first < b.first;
    });
    return ranked;
}

} // namespace cogmod
