#pragma once

/// Brute-force reference computations for the test suite. Everything here
/// recomputes results directly from raw inputs (training images, event
/// lists, edge maps) without touching the library's stored state, so a test
/// comparing library output against these functions is a genuine
/// cross-check, not a tautology.

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cogmod/behaviour.hpp"
#include "cogmod/grid.hpp"

namespace oracle {

using cogmod::cell_index;
using cogmod::grid_image;

using pair_counts = std::map<std::pair<cell_index, cell_index>, int>;

/// Pair frequencies by direct double loop over every image's active set.
inline pair_counts count_pairs(const std::vector<grid_image>& images) {
    pair_counts counts;
    for (const grid_image& image : images) {
        std::vector<cell_index> cells(image.active().begin(), image.active().end());
        for (std::size_t i = 0; i < cells.size(); ++i)
            for (std::size_t j = 0; j < cells.size(); ++j)
                if (i != j) counts[{cells[i], cells[j]}] += 1;
    }
    return counts;
}

inline double pair_weight(const pair_counts& counts, std::size_t images_trained, cell_index c,
                          cell_index d) {
    auto it = counts.find({c, d});
    if (it == counts.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(images_trained);
}

/// Admission rule recomputed from scratch: a cell outside the input joins
/// the retrieved set when the mean link weight from the input cells reaches
/// the threshold and at least one of those links actually exists.
inline bool admits(const pair_counts& counts, std::size_t images_trained,
                   const std::set<cell_index>& sources, cell_index d, double threshold) {
    if (sources.empty()) return false;
    long long mass = 0; // integer count sum, divided once: exact mean
    for (const cell_index& c : sources) {
        auto it = counts.find({c, d});
        if (it != counts.end()) mass += it->second;
    }
    const double mean = static_cast<double>(mass) /
                        (static_cast<double>(images_trained) *
                         static_cast<double>(sources.size()));
    return mass > 0 && mean >= threshold;
}

/// Full retrieval recomputation over every grid cell.
inline std::set<cell_index> retrieve(const std::vector<grid_image>& training,
                                     const grid_image& input, double threshold) {
    const pair_counts counts = count_pairs(training);
    std::set<cell_index> result;
    for (const cell_index& c : input.active())
        for (const auto& [pair, n] : counts)
            if (pair.first == c && n > 0) {
                result.insert(c);
                break;
            }
    const std::set<cell_index>& sources = input.active();
    for (int r = 0; r < input.height(); ++r)
        for (int c = 0; c < input.width(); ++c) {
            const cell_index d{r, c};
            if (sources.count(d)) continue;
            if (admits(counts, training.size(), sources, d, threshold)) result.insert(d);
        }
    return result;
}

struct score {
    int in_count = 0;
    int out_count = 0;
    bool infinite = false;
    double ratio = 0.0;
};

inline score success_score(const std::set<cell_index>& retrieved, const grid_image& input) {
    score s;
    for (const cell_index& c : retrieved)
        (input.contains(c) ? s.in_count : s.out_count) += 1;
    if (s.out_count > 0)
        s.ratio = static_cast<double>(s.in_count) / static_cast<double>(s.out_count);
    else
        s.infinite = s.in_count > 0;
    return s;
}

/// Winner of a classifier competition, recomputed end to end. Ranking:
/// infinite ratio first, then ratio descending, then in_count descending,
/// then label ascending.
inline std::string classify_winner(
    const std::vector<std::pair<std::string, std::vector<grid_image>>>& classes,
    const grid_image& input, double threshold) {
    std::string best_label;
    score best;
    bool have = false;
    for (const auto& [label, training] : classes) {
        const score s = oracle::success_score(retrieve(training, input, threshold), input);
        bool better = false;
        if (!have) {
            better = true;
        } else if (s.infinite != best.infinite) {
            better = s.infinite;
        } else if (s.infinite) {
            better = s.in_count > best.in_count ||
                     (s.in_count == best.in_count && label < best_label);
        } else if (s.ratio != best.ratio) {
            better = s.ratio > best.ratio;
        } else if (s.in_count != best.in_count) {
            better = s.in_count > best.in_count;
        } else {
            better = label < best_label;
        }
        if (better) {
            best_label = label;
            best = s;
            have = true;
        }
    }
    return best_label;
}

/// Binding closure by repeated scan: absorb every admissible stored-only
/// cell until none qualifies. Also verifies that cells rejected in some
/// round never appear in the final set (they can only be rescued by a
/// later, larger source set admitting them, which the scan allows).
struct closure_result {
    std::set<cell_index> active;
    int rounds = 0; // scans until no change, counting the final no-change scan
};

inline closure_result binding_closure(const std::vector<grid_image>& training,
                                      const std::set<cell_index>& start,
                                      const std::set<cell_index>& pattern, double threshold) {
    const pair_counts counts = count_pairs(training);
    closure_result result;
    result.active = start;
    for (;;) {
        result.rounds += 1;
        std::set<cell_index> added;
        for (const cell_index& d : pattern)
            if (!result.active.count(d) &&
                admits(counts, training.size(), result.active, d, threshold))
                added.insert(d);
        if (added.empty()) break;
        result.active.insert(added.begin(), added.end());
    }
    return result;
}

/// Connected components by breadth-first traversal over the qualifying
/// edges, restricted to the queried concepts.
inline std::vector<std::set<std::string>> components(
    const std::map<std::pair<std::string, std::string>, int>& edges,
    const std::set<std::string>& active, int min_count) {
    auto connected = [&](const std::string& a, const std::string& b) {
        auto it = edges.find(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
        return it != edges.end() && it->second >= min_count;
    };
    std::set<std::string> seen;
    std::vector<std::set<std::string>> groups;
    for (const std::string& root : active) {
        if (seen.count(root)) continue;
        std::set<std::string> group;
        std::queue<std::string> frontier;
        frontier.push(root);
        seen.insert(root);
        while (!frontier.empty()) {
            const std::string cur = frontier.front();
            frontier.pop();
            group.insert(cur);
            for (const std::string& other : active)
                if (!seen.count(other) && connected(cur, other)) {
                    seen.insert(other);
                    frontier.push(other);
                }
        }
        if (group.size() >= 2) groups.push_back(std::move(group));
    }
    std::sort(groups.begin(), groups.end());
    return groups;
}

/// Direct transcription of the prediction formula, kept deliberately
/// separate from the library's implementation.
inline double predict(double current_ec, const std::vector<cogmod::memory_event>& events,
                      cogmod::prediction_mode mode, cogmod::feedback_form form) {
    double sum = 0.0;
    for (const cogmod::memory_event& e : events) {
        const double n = static_cast<double>(e.occurrences);
        const double t = static_cast<double>(e.age);
        sum += form == cogmod::feedback_form::additive ? n * (e.ec + e.response) / t
                                                       : n * e.ec * e.response / t;
    }
    if (mode == cogmod::prediction_mode::worked_example) return current_ec + sum;
    if (events.empty()) return current_ec;
    return (current_ec + sum / static_cast<double>(events.size())) / 2.0;
}

/// Deterministic random instances for the property suites.
inline grid_image random_grid(std::mt19937& rng, int width, int height, double density,
                              int min_active) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    grid_image image(width, height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            if (coin(rng) < density) image.add({r, c});
    std::uniform_int_distribution<int> rr(0, height - 1), cc(0, width - 1);
    while (static_cast<int>(image.active().size()) < min_active) image.add({rr(rng), cc(rng)});
    return image;
}

} // namespace oracle
