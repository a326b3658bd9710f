#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "cogmod/errors.hpp"

namespace cogmod {

/// Static attribute record for one behaviour type. All six attributes are
/// normalised to [0,1]: ability and flexibility describe the individual,
/// coordination/cooperation and the two signal attributes describe how the
/// behaviour works in a team.
struct behaviour_spec {
    std::string id;
    double ability = 0.0;
    double flexibility = 0.0;
    double coordination = 0.0;
    double cooperation = 0.0;
    double signal_in = 0.0;
    double signal_out = 0.0;
};

inline void validate(const behaviour_spec& b) {
    if (b.id.empty()) throw error("behaviour id must not be empty");
    auto check = [&](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0))
            throw error("behaviour '" + b.id + "': " + name + " must be in [0,1], got " +
                        std::to_string(v));
    };
    check(b.ability, "ability");
    check(b.flexibility, "flexibility");
    check(b.coordination, "coordination");
    check(b.cooperation, "cooperation");
    check(b.signal_in, "signal_in");
    check(b.signal_out, "signal_out");
}

/// Individual intelligence: mean of ability and flexibility.
inline double intelligence(const behaviour_spec& b) {
    return (b.ability + b.flexibility) / 2.0;
}

/// Communication capability: mean of the input and output signal attributes.
inline double communication(const behaviour_spec& b) {
    return (b.signal_in + b.signal_out) / 2.0;
}

/// Static collective capability: coordination, cooperation and
/// communication, normalised.
inline double collective_static(const behaviour_spec& b) {
    return (b.coordination + b.cooperation + communication(b)) / 3.0;
}

/// Entity complexity: mean of individual intelligence and collective
/// capability, the per-behaviour score everything else builds on.
inline double entity_complexity(const behaviour_spec& b) {
    return (intelligence(b) + collective_static(b)) / 2.0;
}

/// Dynamic collective capability: coordination drops out (it is carried by
/// the predictive side), leaving cooperation and communication.
inline double collective_dynamic(const behaviour_spec& b) {
    return (b.cooperation + communication(b)) / 2.0;
}

/// A problem modelled as the behaviour set needed to solve it plus a static
/// problem complexity in (0,1].
struct problem_spec {
    std::vector<behaviour_spec> behaviours;
    double problem_complexity = 1.0;
};

/// Static problem success likelihood: mean entity complexity over the
/// problem behaviour set, divided by the problem complexity.
inline double psl_static(const problem_spec& p) {
    if (!(p.problem_complexity > 0.0))
        throw error("problem complexity must be positive, got " +
                    std::to_string(p.problem_complexity));
    if (p.problem_complexity > 1.0)
        throw error("static problem complexity cannot exceed 1.0, got " +
                    std::to_string(p.problem_complexity));
    if (p.behaviours.empty()) throw error("problem behaviour set is empty");
    double sum = 0.0;
    for (const behaviour_spec& b : p.behaviours) sum += entity_complexity(b);
    return (sum / static_cast<double>(p.behaviours.size())) / p.problem_complexity;
}

/// One remembered behaviour/response event. `age` is the time divisor:
/// 1 is the newest slot and older events carry larger values, so their
/// influence decays. `occurrences` counts how often the same event repeated.
struct memory_event {
    std::string behaviour_id;
    double ec = 0.0;       // entity complexity the behaviour had when selected
    double response = 0.0; // in [-1,1]
    int age = 1;
    int occurrences = 1;
};

inline void validate(const memory_event& e) {
    if (e.behaviour_id.empty()) throw error("memory event behaviour id must not be empty");
    if (e.age < 1)
        throw error("memory event for '" + e.behaviour_id + "': age must be >= 1, got " +
                    std::to_string(e.age));
    if (e.occurrences < 1)
        throw error("memory event for '" + e.behaviour_id + "': occurrences must be >= 1");
    if (!(e.response >= -1.0 && e.response <= 1.0))
        throw error("memory event for '" + e.behaviour_id + "': response must be in [-1,1], got " +
                    std::to_string(e.response));
}

/// How a remembered event folds its response in: added to the complexity,
/// or multiplying it as a weight.
enum class feedback_form { additive, multiplicative };

/// Time-decayed contribution of one remembered event.
inline double event_factor(const memory_event& e, feedback_form form) {
    if (e.age < 1)
        throw error("memory event for '" + e.behaviour_id + "': age must be >= 1, got " +
                    std::to_string(e.age));
    const double n = static_cast<double>(e.occurrences);
    const double t = static_cast<double>(e.age);
    if (form == feedback_form::multiplicative) return n * e.ec * e.response / t;
    return n * (e.ec + e.response) / t;
}

/// Shape of the prediction: `averaged` balances the current complexity with
/// the mean of the event factors; `worked_example` adds the raw factor sum
/// to the current complexity without either normalisation.
enum class prediction_mode { averaged, worked_example };

struct predict_config {
    feedback_form form = feedback_form::additive;
    prediction_mode mode = prediction_mode::averaged;
};

/// Predicted evaluation of selecting a behaviour with complexity
/// `current_ec` given the situation's memory. With no memory the prediction
/// equals the knowledge-based score, i.e. current_ec itself.
inline double predict(double current_ec, const std::vector<memory_event>& memory,
                      predict_config config = {}) {
    double factor_sum = 0.0;
    for (const memory_event& e : memory) factor_sum += event_factor(e, config.form);

    if (config.mode == prediction_mode::worked_example) return current_ec + factor_sum;

    const double mem_term =
        memory.empty() ? current_ec : factor_sum / static_cast<double>(memory.size());
    return (current_ec + mem_term) / 2.0;
}

inline double predict(const behaviour_spec& b, const std::vector<memory_event>& memory,
                      predict_config config = {}) {
    return predict(entity_complexity(b), memory, config);
}

/// Divisor guard for the dynamic problem complexity.
inline constexpr double kProblemComplexityFloor = 0.05;

/// Dynamic problem complexity: what the agent knows (entity complexities of
/// known behaviours) plus the responses it has collected, as a fraction of
/// the full problem behaviour set. Floored so it stays usable as a divisor.
inline double problem_complexity_dynamic(const std::vector<behaviour_spec>& known,
                                         const std::vector<double>& responses, int pbs_size,
                                         double floor = kProblemComplexityFloor) {
    if (pbs_size < 1)
        throw error("problem behaviour set size must be >= 1, got " + std::to_string(pbs_size));
    double sum = 0.0;
    for (const behaviour_spec& b : known) sum += entity_complexity(b);
    for (double r : responses) sum += r;
    return std::max(floor, sum / static_cast<double>(pbs_size));
}

enum class psl_form { division, multiplication };

/// Dynamic problem success likelihood: the prediction against the dynamic
/// problem complexity. The caller must have applied the complexity floor.
inline double psl_dynamic(double pr, double pc, psl_form form = psl_form::division,
                          double floor = kProblemComplexityFloor) {
    if (pc < floor)
        throw error("dynamic problem complexity " + std::to_string(pc) +
                    " is below the floor " + std::to_string(floor));
    return form == psl_form::division ? pr / pc : pr * pc;
}

} // namespace cogmod
