#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cogmod/behaviour.hpp"
#include "oracle.hpp"

using namespace cogmod;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kTol = 1e-12;

behaviour_spec make(double ba, double bf, double cor, double cop, double si, double so) {
    return {"b", ba, bf, cor, cop, si, so};
}

behaviour_spec uniform(double v) { return make(v, v, v, v, v, v); }

behaviour_spec random_behaviour(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return make(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng));
}

} // namespace

TEST_CASE("intelligence is the mean of ability and flexibility") {
    CHECK_THAT(intelligence(make(1, 1, 0, 0, 0, 0)), WithinAbs(1.0, kTol));
    CHECK_THAT(intelligence(make(0, 0, 0, 0, 0, 0)), WithinAbs(0.0, kTol));
    CHECK_THAT(intelligence(make(0.6, 0.8, 0, 0, 0, 0)), WithinAbs(0.7, kTol));
}

TEST_CASE("communication is the mean of the two signal attributes") {
    CHECK_THAT(communication(make(0, 0, 0, 0, 1, 1)), WithinAbs(1.0, kTol));
    CHECK_THAT(communication(make(0, 0, 0, 0, 0, 1)), WithinAbs(0.5, kTol));
    CHECK_THAT(communication(make(0, 0, 0, 0, 0.4, 0.6)), WithinAbs(0.5, kTol));
}

TEST_CASE("static collective capability averages coordination, cooperation, communication") {
    CHECK_THAT(collective_static(uniform(1.0)), WithinAbs(1.0, kTol));
    CHECK_THAT(collective_static(uniform(0.0)), WithinAbs(0.0, kTol));
    CHECK_THAT(collective_static(make(0, 0, 0.9, 0.6, 0.4, 0.6)), WithinAbs(2.0 / 3.0, kTol));
}

TEST_CASE("entity complexity averages intelligence and collective capability") {
    CHECK_THAT(entity_complexity(uniform(1.0)), WithinAbs(1.0, kTol));
    CHECK_THAT(entity_complexity(uniform(0.0)), WithinAbs(0.0, kTol));
    // intelligence 0.7 and collective 2/3 combine to 41/60
    CHECK_THAT(entity_complexity(make(0.6, 0.8, 0.9, 0.6, 0.4, 0.6)),
               WithinAbs(41.0 / 60.0, kTol));
}

TEST_CASE("dynamic collective capability drops coordination") {
    CHECK_THAT(collective_dynamic(make(0, 0, 0, 1, 1, 1)), WithinAbs(1.0, kTol));
    CHECK_THAT(collective_dynamic(make(0, 0, 0, 0, 0, 0)), WithinAbs(0.0, kTol));
    CHECK_THAT(collective_dynamic(make(0, 0, 0.3, 0.6, 0.4, 0.6)), WithinAbs(0.55, kTol));
    // coordination must not influence the dynamic form
    CHECK(collective_dynamic(make(0, 0, 0.0, 0.6, 0.4, 0.6)) ==
          collective_dynamic(make(0, 0, 1.0, 0.6, 0.4, 0.6)));
}

TEST_CASE("static success likelihood normalises mean complexity by problem complexity") {
    SECTION("all-perfect behaviours on a unit problem score exactly 1") {
        CHECK_THAT(psl_static({{uniform(1.0), uniform(1.0)}, 1.0}), WithinAbs(1.0, kTol));
    }
    SECTION("single behaviour passes through") {
        CHECK_THAT(psl_static({{uniform(0.5)}, 1.0}), WithinAbs(0.5, kTol));
    }
    SECTION("mean of 0.6 and 0.8 over complexity 0.7 is 1") {
        CHECK_THAT(psl_static({{uniform(0.6), uniform(0.8)}, 0.7}), WithinAbs(1.0, kTol));
    }
    SECTION("degenerate problems are rejected") {
        CHECK_THROWS_AS(psl_static({{uniform(0.5)}, 0.0}), error);
        CHECK_THROWS_AS(psl_static({{uniform(0.5)}, -0.3}), error);
        CHECK_THROWS_AS(psl_static({{uniform(0.5)}, 1.5}), error);
        CHECK_THROWS_AS(psl_static({{}, 1.0}), error);
    }
}

TEST_CASE("behaviour attributes outside the unit interval are rejected") {
    CHECK_NOTHROW(validate(uniform(0.5)));
    behaviour_spec bad = uniform(0.5);
    bad.cooperation = 1.5;
    CHECK_THROWS_AS(validate(bad), error);
    bad = uniform(0.5);
    bad.signal_out = -0.1;
    CHECK_THROWS_AS(validate(bad), error);
    bad = uniform(0.5);
    bad.id.clear();
    CHECK_THROWS_AS(validate(bad), error);
}

TEST_CASE("memory event validation") {
    CHECK_NOTHROW(validate(memory_event{"b", 0.5, 0.3, 1, 1}));
    CHECK_THROWS_AS(validate(memory_event{"b", 0.5, 0.3, 0, 1}), error);
    CHECK_THROWS_AS(validate(memory_event{"b", 0.5, 0.3, 1, 0}), error);
    CHECK_THROWS_AS(validate(memory_event{"b", 0.5, 1.7, 1, 1}), error);
    CHECK_THROWS_AS(validate(memory_event{"", 0.5, 0.3, 1, 1}), error);
}

TEST_CASE("event factors fold responses additively or as weights") {
    const memory_event e{"b", 0.6, 0.15, 2, 1};
    CHECK_THAT(event_factor(e, feedback_form::additive), WithinAbs(0.375, kTol));
    CHECK_THAT(event_factor(e, feedback_form::multiplicative), WithinAbs(0.045, kTol));

    const memory_event thrice{"b", 0.5, -0.5, 4, 3};
    CHECK_THAT(event_factor(thrice, feedback_form::additive), WithinAbs(0.0, kTol));
    CHECK_THAT(event_factor(thrice, feedback_form::multiplicative),
               WithinAbs(3 * 0.5 * -0.5 / 4, kTol));

    CHECK_THROWS_AS(event_factor(memory_event{"b", 0.5, 0.1, 0, 1}, feedback_form::additive),
                    error);
}

TEST_CASE("prediction balances current complexity against remembered factors") {
    SECTION("empty memory returns the knowledge-based score") {
        CHECK_THAT(predict(0.7, {}), WithinAbs(0.7, kTol));
        CHECK_THAT(predict(uniform(0.7), {}), WithinAbs(0.7, kTol));
    }
    SECTION("one neutral event at the newest slot keeps the score") {
        const std::vector<memory_event> memory{{"b", 0.7, 0.0, 1, 1}};
        CHECK_THAT(predict(0.7, memory), WithinAbs(0.7, kTol));
    }
    SECTION("averaged mode halves the sum of score and mean factor") {
        const std::vector<memory_event> memory{{"b", 0.6, 0.2, 2, 1}, {"b", 0.4, -0.2, 1, 2}};
        // factors: 1*(0.6+0.2)/2 = 0.4 and 2*(0.4-0.2)/1 = 0.4; mean 0.4
        CHECK_THAT(predict(0.5, memory), WithinAbs((0.5 + 0.4) / 2.0, kTol));
    }
    SECTION("worked-example mode adds raw factors without normalisation") {
        const std::vector<memory_event> memory{{"b", 0.6, 0.15, 2, 1}, {"b", 0.4, 0.1, 3, 1}};
        predict_config cfg;
        cfg.mode = prediction_mode::worked_example;
        CHECK_THAT(predict(0.6, memory, cfg),
                   WithinAbs(0.6 + (0.6 + 0.15) / 2.0 + (0.4 + 0.1) / 3.0, kTol));
    }
    SECTION("prediction agrees with the direct formula transcription") {
        std::mt19937 rng(59);
        std::uniform_real_distribution<double> u(0.0, 1.0), r(-1.0, 1.0);
        for (int round = 0; round < 200; ++round) {
            std::vector<memory_event> memory;
            const int n = static_cast<int>(rng() % 4);
            for (int i = 0; i < n; ++i)
                memory.push_back({"b", u(rng), r(rng), 1 + static_cast<int>(rng() % 5),
                                  1 + static_cast<int>(rng() % 3)});
            const double ec = u(rng);
            for (auto form : {feedback_form::additive, feedback_form::multiplicative})
                for (auto mode : {prediction_mode::averaged, prediction_mode::worked_example}) {
                    predict_config cfg{form, mode};
                    CHECK_THAT(predict(ec, memory, cfg),
                               WithinAbs(oracle::predict(ec, memory, mode, form), kTol));
                }
        }
    }
}

TEST_CASE("dynamic problem complexity sums knowledge and responses over the set size") {
    SECTION("total ignorance floors at 0.05") {
        CHECK_THAT(problem_complexity_dynamic({}, {}, 10), WithinAbs(0.05, kTol));
    }
    SECTION("one known behaviour out of ten floors at 0.05") {
        CHECK_THAT(problem_complexity_dynamic({uniform(0.5)}, {}, 10), WithinAbs(0.05, kTol));
    }
    SECTION("three known behaviours and two responses over five") {
        CHECK_THAT(problem_complexity_dynamic({uniform(0.5), uniform(0.5), uniform(0.5)},
                                              {0.3, -0.1}, 5),
                   WithinAbs(0.34, kTol));
    }
    SECTION("set size must be positive") {
        CHECK_THROWS_AS(problem_complexity_dynamic({}, {}, 0), error);
    }
}

TEST_CASE("dynamic success likelihood supports division and multiplication forms") {
    CHECK_THAT(psl_dynamic(0.5, 1.0), WithinAbs(0.5, kTol));
    CHECK_THAT(psl_dynamic(0.5, 0.5, psl_form::division), WithinAbs(1.0, kTol));
    CHECK_THAT(psl_dynamic(0.5, 0.5, psl_form::multiplication), WithinAbs(0.25, kTol));
    CHECK_THAT(psl_dynamic(0.0, 0.7), WithinAbs(0.0, kTol));
    CHECK_THROWS_AS(psl_dynamic(0.5, 0.01), error);
}

TEST_CASE("all derived capability measures stay inside the unit interval") {
    std::mt19937 rng(61);
    for (int round = 0; round < 1000; ++round) {
        const behaviour_spec b = random_behaviour(rng);
        for (double v : {intelligence(b), communication(b), collective_static(b),
                         collective_dynamic(b), entity_complexity(b)}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("raising a remembered response never lowers the prediction") {
    std::mt19937 rng(67);
    std::uniform_real_distribution<double> u(0.0, 1.0), r(-1.0, 1.0);
    for (int round = 0; round < 1000; ++round) {
        std::vector<memory_event> memory;
        const int n = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i)
            memory.push_back({"b", u(rng), r(rng), 1 + static_cast<int>(rng() % 5),
                              1 + static_cast<int>(rng() % 3)});
        const double ec = u(rng);
        const std::size_t pick = rng() % memory.size();

        const double before = predict(ec, memory);
        memory[pick].response = std::min(1.0, memory[pick].response + u(rng));
        CHECK(predict(ec, memory) >= before - kTol);
    }
}

TEST_CASE("aging an event never strengthens its influence") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> u(0.0, 1.0), r(-1.0, 1.0);
    for (int round = 0; round < 1000; ++round) {
        memory_event e{"b", u(rng), r(rng), 1 + static_cast<int>(rng() % 5),
                       1 + static_cast<int>(rng() % 3)};
        for (auto form : {feedback_form::additive, feedback_form::multiplicative}) {
            const double young = std::abs(event_factor(e, form));
            memory_event older = e;
            older.age += 1 + static_cast<int>(rng() % 5);
            CHECK(std::abs(event_factor(older, form)) <= young + kTol);
        }
    }
}

TEST_CASE("memoryless prediction equals entity complexity for any behaviour") {
    std::mt19937 rng(73);
    for (int round = 0; round < 1000; ++round) {
        const behaviour_spec b = random_behaviour(rng);
        CHECK_THAT(predict(b, {}), WithinAbs(entity_complexity(b), kTol));
    }
}
