#pragma once

#include <set>
#include <string>
#include <utility>

#include "cogmod/classifier.hpp"
#include "cogmod/errors.hpp"
#include "cogmod/grid.hpp"

namespace cogmod {

/// The base layer: currently firing cells plus the learned association mass
/// between them. The links classifier may be untrained, in which case no
/// cell can be pulled in through associations.
struct ensemble_state {
    grid_image active;
    cooccurrence_classifier links;

    ensemble_state(grid_image active_cells, cooccurrence_classifier link_mass)
        : active(std::move(active_cells)), links(std::move(link_mass)) {
        if (links.width() != active.width() || links.height() != active.height())
            throw error("ensemble links are " + std::to_string(links.width()) + "x" +
                        std::to_string(links.height()) + " but the grid is " +
                        std::to_string(active.width()) + "x" + std::to_string(active.height()));
    }
};

/// The stored pattern paired one-to-one with the ensemble cells.
struct hierarchy_pattern {
    std::set<cell_index> pattern;
};

/// Reconciliation of one ensemble activation against one stored pattern.
/// Every cell of either side lands in exactly one set: matched cells agree
/// on both sides; to_learn cells fire in the ensemble but are missing from
/// the pattern; pattern-only cells split into link_activated (enough
/// association mass from the firing cells to join in) and to_remove
/// (unsupported, dropped as error).
struct binding_report {
    std::set<cell_index> matched;
    std::set<cell_index> to_learn;
    std::set<cell_index> to_remove;
    std::set<cell_index> link_activated;
};

inline binding_report bind_report(const ensemble_state& ensemble,
                                  const hierarchy_pattern& hierarchy, double link_threshold) {
    for (const cell_index& c : hierarchy.pattern)
        if (!ensemble.active.in_bounds(c))
            throw error("hierarchy cell " + to_string(c) + " outside the " +
                        std::to_string(ensemble.active.width()) + "x" +
                        std::to_string(ensemble.active.height()) + " ensemble grid");

    binding_report report;
    for (const cell_index& c : ensemble.active.active())
        (hierarchy.pattern.count(c) ? report.matched : report.to_learn).insert(c);
    for (const cell_index& d : hierarchy.pattern) {
        if (ensemble.active.contains(d)) continue;
        const double mass = ensemble.links.mean_link_weight(ensemble.active.active(), d);
        if (mass > 0.0 && mass >= link_threshold)
            report.link_activated.insert(d);
        else
            report.to_remove.insert(d);
    }
    return report;
}

/// Result of iterating the binding to a fixed point.
struct resonance_result {
    grid_image active;
    binding_report report;
    int iterations = 0;
    bool stable = false;
};

/// Iterate the binding: each pass absorbs the link-activated cells into the
/// active set and reconciles again, until the active set stops changing.
/// The active set only grows, so a stable state is reached within
/// width x height passes; max_iter caps the loop and an exhausted cap is
/// reported as unstable rather than an error.
inline resonance_result resonate(const ensemble_state& ensemble,
                                 const hierarchy_pattern& hierarchy, double link_threshold,
                                 int max_iter) {
    if (max_iter < 1) throw error("max_iter must be >= 1");

    ensemble_state current = ensemble;
    resonance_result result{current.active, {}, 0, false};
    for (int iter = 1; iter <= max_iter; ++iter) {
        result.report = bind_report(current, hierarchy, link_threshold);
        result.iterations = iter;
        if (result.report.link_activated.empty()) {
            result.stable = true;
            break;
        }
        for (const cell_index& d : result.report.link_activated) current.active.add(d);
    }
    result.active = current.active;
    return result;
}

/// Text form of a report: one line per set, count then cells in order.
inline std::string report_to_text(const binding_report& report) {
    auto row = [](const char* name, const std::set<cell_index>& cells) {
        std::string out = std::string(name) + ' ' + std::to_string(cells.size()) + ':';
        for (const cell_index& c : cells) out += " (" + to_string(c) + ")";
        return out + '\n';
    };
    return row("matched", report.matched) + row("to_learn", report.to_learn) +
           row("to_remove", report.to_remove) + row("link_activated", report.link_activated);
}

} // namespace cogmod
