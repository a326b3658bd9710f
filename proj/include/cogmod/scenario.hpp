#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cogmod/behaviour.hpp"
#include "cogmod/errors.hpp"

namespace cogmod {

/// A scripted single-agent simulation: the world's behaviour set, the
/// subset the agent knows, per-situation memory to start from, and a fixed
/// response policy standing in for the environment.
struct scenario {
    std::vector<behaviour_spec> world;
    std::vector<std::string> agent_known;
    std::string situation;
    std::map<std::string, std::vector<memory_event>> memory;
    std::map<std::pair<std::string, std::string>, double> responses;
    predict_config prediction;
    psl_form psl = psl_form::division;
    int max_steps = 100;
};

enum class sim_status { stable, exhausted, unstable };

inline const char* to_string(sim_status s) {
    switch (s) {
        case sim_status::stable: return "STABLE";
        case sim_status::exhausted: return "EXHAUSTED";
        default: return "UNSTABLE";
    }
}

/// One simulation step: which behaviour was selected at what prediction,
/// what the agent expected, what came back, and whether the pair got
/// flagged as a bad choice.
struct sim_step {
    int step = 0;
    std::string situation;
    std::string selected;
    double pr_before = 0.0;
    double expected = 0.0;
    double response = 0.0;
    double pr_after = 0.0;
    bool flagged = false;
};

struct sim_trace {
    std::vector<sim_step> steps;
    sim_status status = sim_status::unstable;
    double final_pc = 0.0;  // dynamic problem complexity at the end
    double final_psl = 0.0; // prediction against it, per the scenario's psl form
};

namespace detail {

inline const behaviour_spec& find_behaviour(const std::vector<behaviour_spec>& world,
                                            const std::string& id) {
    for (const behaviour_spec& b : world)
        if (b.id == id) return b;
    throw error("behaviour '" + id + "' is not defined in the world behaviour set");
}

inline void validate_scenario(const scenario& sc) {
    if (sc.world.empty()) throw error("scenario defines no world behaviours");
    std::set<std::string> ids;
    for (const behaviour_spec& b : sc.world) {
        validate(b);
        if (!ids.insert(b.id).second) throw error("duplicate behaviour '" + b.id + "'");
    }
    if (sc.agent_known.empty()) throw error("agent knows no behaviours");
    std::set<std::string> known;
    for (const std::string& id : sc.agent_known) {
        find_behaviour(sc.world, id);
        if (!known.insert(id).second)
            throw error("behaviour '" + id + "' listed twice in the agent's known set");
    }
    if (sc.situation.empty()) throw error("scenario names no situation to simulate");
    for (const auto& [situation, events] : sc.memory)
        for (const memory_event& e : events) {
            validate(e);
            find_behaviour(sc.world, e.behaviour_id);
        }
    for (const auto& [key, r] : sc.responses)
        if (!(r >= -1.0 && r <= 1.0))
            throw error("response for (" + key.first + ", " + key.second +
                        ") must be in [-1,1], got " + std::to_string(r));
    if (sc.max_steps < 1) throw error("max_steps must be >= 1");
}

} // namespace detail

/// Run the feedback loop: select the best unflagged known behaviour by
/// prediction, take the environment's response, fold it back into memory
/// and re-predict. A response that leaves the prediction short of the
/// expected value (the selection's prediction plus the behaviour's own
/// complexity) flags the behaviour as bad for this situation, never to be
/// selected here again. The run ends when a step's prediction does not
/// decrease (stable), when no unflagged behaviour remains, or at max_steps
/// (unstable).
inline sim_trace simulate(const scenario& sc) {
    detail::validate_scenario(sc);

    std::map<std::string, std::vector<memory_event>> memory = sc.memory;
    std::set<std::pair<std::string, std::string>> flagged; // (situation, behaviour)
    sim_trace trace;

    for (int step = 1; step <= sc.max_steps; ++step) {
        // selection: highest prediction among unflagged known behaviours,
        // ties by id ascending
        const behaviour_spec* selected = nullptr;
        double best_pr = 0.0;
        for (const std::string& id : sc.agent_known) {
            if (flagged.count({sc.situation, id})) continue;
            const behaviour_spec& b = detail::find_behaviour(sc.world, id);
            const double pr = predict(b, memory[sc.situation], sc.prediction);
            if (!selected || pr > best_pr || (pr == best_pr && id < selected->id)) {
                selected = &b;
                best_pr = pr;
            }
        }
        if (!selected) {
            if (step == 1) throw error("no behaviour available to select in situation '" +
                                       sc.situation + "'");
            trace.status = sim_status::exhausted;
            break;
        }

        const double ec = entity_complexity(*selected);
        const double expected = best_pr + ec;

        auto rit = sc.responses.find({sc.situation, selected->id});
        if (rit == sc.responses.end())
            throw error("scenario defines no response for (" + sc.situation + ", " +
                        selected->id + ")");
        const double response = rit->second;

        // fold the event into memory: a repeat of the same behaviour with the
        // same response sign coalesces (occurrences up, age refreshed),
        // anything else is a fresh newest-slot event
        std::vector<memory_event>& events = memory[sc.situation];
        bool coalesced = false;
        for (memory_event& e : events) {
            if (e.behaviour_id == selected->id && (e.response < 0.0) == (response < 0.0)) {
                e.occurrences += 1;
                e.age = 1;
                e.response = response;
                e.ec = ec;
                coalesced = true;
                break;
            }
        }
        if (!coalesced) events.push_back({selected->id, ec, response, 1, 1});

        const double pr_after = predict(ec, events, sc.prediction);
        const bool flag = pr_after < expected;
        if (flag) flagged.insert({sc.situation, selected->id});

        trace.steps.push_back(
            {step, sc.situation, selected->id, best_pr, expected, response, pr_after, flag});

        if (pr_after >= best_pr) {
            trace.status = sim_status::stable;
            break;
        }

        // the step is over: everything remembered ages one slot
        for (auto& [situation, evs] : memory)
            for (memory_event& e : evs) e.age += 1;
    }

    // end-of-run summary: what the agent now knows against the full set
    std::vector<behaviour_spec> known;
    for (const std::string& id : sc.agent_known)
        known.push_back(detail::find_behaviour(sc.world, id));
    std::vector<double> responses;
    for (const auto& [situation, evs] : memory)
        for (const memory_event& e : evs) responses.push_back(e.response);
    trace.final_pc =
        problem_complexity_dynamic(known, responses, static_cast<int>(sc.world.size()));
    const double last_pr = trace.steps.empty() ? 0.0 : trace.steps.back().pr_after;
    trace.final_psl = psl_dynamic(last_pr, trace.final_pc, sc.psl);
    return trace;
}

// ---------------------------------------------------------------------------
// scenario script: key-value text format
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline double parse_real(const std::string& tok, const std::string& file, int line) {
    try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw parse_error(file, line, "expected a number, got '" + tok + "'");
    }
}

inline int parse_int(const std::string& tok, const std::string& file, int line) {
    try {
        std::size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw parse_error(file, line, "expected an integer, got '" + tok + "'");
    }
}

} // namespace detail

/// Parse the scenario script format. Lines, in any order:
///   behaviour <id> <ability> <flexibility> <coordination> <cooperation> <signal_in> <signal_out>
///   knows <id> [<id> ...]
///   situation = <id>
///   memory <situation> <behaviour> <R> <t> <n>
///   respond <situation> <behaviour> <value>
///   f = additive|multiplicative
///   psl = division|multiplication
///   eq6 = strict|worked_example
///   max_steps = <n>
/// Blank lines and '#' comments are ignored. When no situation line is
/// given, the first situation mentioned by a memory or respond line is
/// simulated.
inline scenario parse_scenario(std::istream& in, const std::string& name) {
    scenario sc;
    std::string first_mentioned;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = line.substr(0, line.find('#'));
        std::vector<std::string> tok = detail::split_ws(stripped);
        if (tok.empty()) continue;

        if (tok[0] == "behaviour" && tok.size() == 8) {
            behaviour_spec b;
            b.id = tok[1];
            b.ability = detail::parse_real(tok[2], name, lineno);
            b.flexibility = detail::parse_real(tok[3], name, lineno);
            b.coordination = detail::parse_real(tok[4], name, lineno);
            b.cooperation = detail::parse_real(tok[5], name, lineno);
            b.signal_in = detail::parse_real(tok[6], name, lineno);
            b.signal_out = detail::parse_real(tok[7], name, lineno);
            try {
                validate(b);
            } catch (const error& e) {
                throw parse_error(name, lineno, e.what());
            }
            sc.world.push_back(std::move(b));
        } else if (tok[0] == "knows" && tok.size() >= 2) {
            sc.agent_known.insert(sc.agent_known.end(), tok.begin() + 1, tok.end());
        } else if (tok[0] == "memory" && tok.size() == 6) {
            memory_event e;
            e.behaviour_id = tok[2];
            e.response = detail::parse_real(tok[3], name, lineno);
            e.age = detail::parse_int(tok[4], name, lineno);
            e.occurrences = detail::parse_int(tok[5], name, lineno);
            sc.memory[tok[1]].push_back(std::move(e));
            if (first_mentioned.empty()) first_mentioned = tok[1];
        } else if (tok[0] == "respond" && tok.size() == 4) {
            sc.responses[{tok[1], tok[2]}] = detail::parse_real(tok[3], name, lineno);
            if (first_mentioned.empty()) first_mentioned = tok[1];
        } else if (tok.size() == 3 && tok[1] == "=") {
            const std::string& key = tok[0];
            const std::string& value = tok[2];
            if (key == "situation") {
                sc.situation = value;
            } else if (key == "f") {
                if (value == "additive") sc.prediction.form = feedback_form::additive;
                else if (value == "multiplicative")
                    sc.prediction.form = feedback_form::multiplicative;
                else throw parse_error(name, lineno, "f must be additive or multiplicative");
            } else if (key == "psl") {
                if (value == "division") sc.psl = psl_form::division;
                else if (value == "multiplication") sc.psl = psl_form::multiplication;
                else throw parse_error(name, lineno, "psl must be division or multiplication");
            } else if (key == "eq6") {
                if (value == "strict") sc.prediction.mode = prediction_mode::averaged;
                else if (value == "worked_example")
                    sc.prediction.mode = prediction_mode::worked_example;
                else throw parse_error(name, lineno, "eq6 must be strict or worked_example");
            } else if (key == "max_steps") {
                sc.max_steps = detail::parse_int(value, name, lineno);
            } else {
                throw parse_error(name, lineno, "unknown scenario key '" + key + "'");
            }
        } else {
            throw parse_error(name, lineno, "unrecognised scenario line: '" + line + "'");
        }
    }
    if (sc.situation.empty()) sc.situation = first_mentioned;

    try {
        // initial memory events carry the complexity their behaviour has now
        for (auto& [situation, events] : sc.memory)
            for (memory_event& e : events)
                e.ec = entity_complexity(detail::find_behaviour(sc.world, e.behaviour_id));
        detail::validate_scenario(sc);
    } catch (const error& e) {
        throw parse_error(name + ": " + e.what());
    }
    return sc;
}

inline scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open scenario file " + path.string());
    return parse_scenario(in, path.string());
}

// ---------------------------------------------------------------------------
// trace rendering
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_real(double v, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

} // namespace detail

/// Comma-separated trace: one row per step, then a status row.
inline std::string trace_to_csv(const sim_trace& trace) {
    std::string out = "step,situation,selected,expected,response,pr_after,flagged\n";
    for (const sim_step& s : trace.steps) {
        out += std::to_string(s.step) + ',' + s.situation + ',' + s.selected + ',' +
               detail::format_real(s.expected) + ',' + detail::format_real(s.response) + ',' +
               detail::format_real(s.pr_after) + ',' + (s.flagged ? "yes" : "no") + '\n';
    }
    out += std::string("status,") + to_string(trace.status) + ',' +
           std::to_string(trace.steps.size()) + '\n';
    return out;
}

/// Human-readable trace. The final line reports the status and the number
/// of selections made.
inline std::string trace_to_text(const sim_trace& trace) {
    std::string out;
    for (const sim_step& s : trace.steps) {
        out += "step " + std::to_string(s.step) + ": situation " + s.situation + " selected " +
               s.selected + " pr " + detail::format_real(s.pr_before) + " expected " +
               detail::format_real(s.expected) + " response " + detail::format_real(s.response) +
               " pr_after " + detail::format_real(s.pr_after) +
               (s.flagged ? " FLAGGED" : "") + '\n';
    }
    out += "problem_complexity " + detail::format_real(trace.final_pc) + '\n';
    out += "psl " + detail::format_real(trace.final_psl) + '\n';
    out += std::string(to_string(trace.status)) + " after " + std::to_string(trace.steps.size()) +
           (trace.steps.size() == 1 ? " selection" : " selections") + '\n';
    return out;
}

} // namespace cogmod
