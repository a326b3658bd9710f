#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <iterator>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cogmod/errors.hpp"

namespace cogmod {

/// Flat store of concepts with cross-reference counts: every time two
/// concepts occur together their shared count goes up. The counts are the
/// learned links that let co-active concepts complete circuits.
class concept_base {
public:
    const std::set<std::string>& concepts() const { return concepts_; }

    std::uint32_t cross_ref_count(const std::string& a, const std::string& b) const {
        auto it = cross_refs_.find(ordered(a, b));
        return it == cross_refs_.end() ? 0u : it->second;
    }

    const std::map<std::pair<std::string, std::string>, std::uint32_t>& cross_refs() const {
        return cross_refs_;
    }

    /// Record one co-occurrence session: every pair of distinct concepts in
    /// the active set gains one cross-reference count. New concepts are
    /// registered on first sight. Fewer than two concepts carry no pair and
    /// are rejected.
    void learn_occurrence(const std::set<std::string>& active) {
        if (active.size() < 2)
            throw error("a learning session needs at least two concepts, got " +
                        std::to_string(active.size()));
        for (const std::string& c : active) validate_concept(c);
        for (const std::string& c : active) concepts_.insert(c);
        for (auto a = active.begin(); a != active.end(); ++a)
            for (auto b = std::next(a); b != active.end(); ++b) cross_refs_[{*a, *b}] += 1;
    }

    /// Persistence: `pair <a> <b> <count>` lines, pairs ordered, sorted.
    std::string serialize() const {
        std::string out;
        for (const auto& [key, n] : cross_refs_)
            out += "pair " + key.first + ' ' + key.second + ' ' + std::to_string(n) + '\n';
        return out;
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw error("cannot write concept base file " + path.string());
        out << serialize();
        if (!out) throw error("failed writing concept base file " + path.string());
    }

    static concept_base parse(std::istream& in, const std::string& name) {
        concept_base base;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::istringstream fields(line);
            std::string keyword, a, b;
            long long n = 0;
            std::string rest;
            if (!(fields >> keyword >> a >> b >> n) || keyword != "pair" || (fields >> rest))
                throw parse_error(name, lineno, "bad concept pair line: '" + line + "'");
            if (a >= b)
                throw parse_error(name, lineno, "pair must be ordered with '" + a + "' < '" + b +
                                                    "'");
            if (n < 1) throw parse_error(name, lineno, "pair count must be >= 1");
            if (!base.cross_refs_.emplace(std::make_pair(a, b), static_cast<std::uint32_t>(n))
                     .second)
                throw parse_error(name, lineno, "duplicate pair " + a + " " + b);
            base.concepts_.insert(a);
            base.concepts_.insert(b);
        }
        return base;
    }

    static concept_base load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw error("cannot open concept base file " + path.string());
        return parse(in, path.string());
    }

private:
    static std::pair<std::string, std::string> ordered(const std::string& a,
                                                       const std::string& b) {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    }

    static void validate_concept(const std::string& c) {
        if (c.empty()) throw error("concept identifier must not be empty");
        for (char ch : c)
            if (std::isspace(static_cast<unsigned char>(ch)))
                throw error("concept identifier must not contain whitespace: '" + c + "'");
    }

    std::set<std::string> concepts_;
    std::map<std::pair<std::string, std::string>, std::uint32_t> cross_refs_;
};

/// Outcome of resolving a set of co-active concepts: bound groups are the
/// completed circuits, everything else is reported unbound.
struct binding_resolution {
    std::vector<std::set<std::string>> groups; // each of size >= 2, ordered by first member
    std::set<std::string> unbound;
};

/// Answer the feature-binding question for a set of co-active concepts:
/// concepts whose cross-reference count reaches min_count are linked, and
/// each connected component of two or more linked concepts forms a bound
/// group. Active concepts with no qualifying link, including ones the base
/// has never seen, come back unbound.
inline binding_resolution resolve_bindings(const concept_base& base,
                                           const std::set<std::string>& active,
                                           std::uint32_t min_count = 1) {
    if (min_count < 1) throw error("min_count must be >= 1");

    binding_resolution out;
    std::set<std::string> unvisited = active;
    while (!unvisited.empty()) {
        // flood from the first unvisited concept
        std::set<std::string> component;
        std::vector<std::string> stack{*unvisited.begin()};
        unvisited.erase(unvisited.begin());
        while (!stack.empty()) {
            std::string current = std::move(stack.back());
            stack.pop_back();
            component.insert(current);
            for (auto it = unvisited.begin(); it != unvisited.end();) {
                if (base.cross_ref_count(current, *it) >= min_count) {
                    stack.push_back(*it);
                    it = unvisited.erase(it);
                } else {
                    ++it;
                }
            }
        }
        if (component.size() >= 2)
            out.groups.push_back(std::move(component));
        else
            out.unbound.insert(*component.begin());
    }
    // deterministic group order: by first (smallest) member
    std::sort(out.groups.begin(), out.groups.end(),
              [](const auto& a, const auto& b) { return *a.begin() < *b.begin(); });
    return out;
}

/// Text form: one `group <members...>` line per bound group, then one
/// `unbound <concept>` line per leftover.
inline std::string resolution_to_text(const binding_resolution& resolution) {
    std::string out;
    for (const auto& group : resolution.groups) {
        out += "group";
        for (const std::string& c : group) out += ' ' + c;
        out += '\n';
    }
    for (const std::string& c : resolution.unbound) out += "unbound " + c + '\n';
    return out;
}

} // namespace cogmod
