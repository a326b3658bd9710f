/// cogmod command-line front end. Human-readable summaries go to stdout,
/// machine-readable artifacts to the paths given by output flags. Exit
/// codes: 0 success, 1 usage error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cogmod/cogmod.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw cogmod::error("cannot write output file " + path.string());
}

std::string format_ratio(const cogmod::score& s) {
    return s.infinite() ? "INF" : cogmod::detail::format_real(s.ratio);
}

void apply_overrides(cogmod::dataset_manifest& manifest, const std::string& grid,
                     int cutoff, const std::string& scale) {
    if (!grid.empty()) {
        int w = 0, h = 0;
        char x = 0;
        std::istringstream dims(grid);
        if (!(dims >> w >> x >> h) || x != 'x' || w <= 0 || h <= 0)
            throw cogmod::error("--grid must be <width>x<height>, got '" + grid + "'");
        manifest.grid_width = w;
        manifest.grid_height = h;
    }
    if (cutoff >= 0) manifest.binarize_cutoff = cutoff;
    if (!scale.empty())
        manifest.scaling =
            scale == "fit" ? cogmod::scale_mode::bounding_box_fit : cogmod::scale_mode::off;
}

void save_bank(const std::vector<cogmod::cooccurrence_classifier>& bank, const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& clf : bank) {
        if (clf.label().find('/') != std::string::npos)
            throw cogmod::error("class label '" + clf.label() + "' cannot name a bank file");
        clf.save(dir / (clf.label() + ".cooc"));
    }
}

std::vector<cogmod::cooccurrence_classifier> load_bank(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw cogmod::error("bank directory " + dir.string() + " does not exist");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".cooc") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw cogmod::error("bank directory " + dir.string() + " holds no .cooc files");
    std::vector<cogmod::cooccurrence_classifier> bank;
    for (const fs::path& f : files) bank.push_back(cogmod::cooccurrence_classifier::load(f));
    for (const auto& clf : bank)
        if (clf.width() != bank.front().width() || clf.height() != bank.front().height())
            throw cogmod::error("bank classifiers disagree on grid size: " + bank.front().label() +
                                " vs " + clf.label());
    return bank;
}

/// Load an image for classification: graymaps binarize at the cutoff, text
/// grids load directly; the result is fitted to the bank's grid.
cogmod::grid_image load_query_image(const fs::path& path, int width, int height, int cutoff,
                                    const std::string& scale) {
    cogmod::dataset_manifest manifest;
    manifest.grid_width = width;
    manifest.grid_height = height;
    if (cutoff >= 0) manifest.binarize_cutoff = cutoff;
    manifest.scaling =
        scale == "fit" ? cogmod::scale_mode::bounding_box_fit : cogmod::scale_mode::off;
    return cogmod::load_dataset_image(path, manifest);
}

int run_train(const std::string& manifest_path, const std::string& out_dir,
              const std::string& grid, int cutoff, const std::string& scale) {
    cogmod::dataset_manifest manifest = cogmod::load_manifest(manifest_path);
    apply_overrides(manifest, grid, cutoff, scale);
    std::vector<cogmod::cooccurrence_classifier> bank;
    for (const auto& [label, files] : manifest.classes) {
        cogmod::cooccurrence_classifier clf(label, manifest.grid_width, manifest.grid_height);
        for (const fs::path& file : files) {
            try {
                clf.train(cogmod::load_dataset_image(file, manifest));
            } catch (const cogmod::error& e) {
                throw cogmod::error(file.string() + ": " + e.what());
            }
        }
        bank.push_back(std::move(clf));
    }
    save_bank(bank, out_dir);
    for (const auto& clf : bank)
        std::cout << "class " << clf.label() << ": trained " << clf.images_trained()
                  << " images\n";
    std::cout << "bank written to " << out_dir << "\n";
    return 0;
}

int run_classify(const std::string& bank_dir, const std::string& image_path, double threshold,
                 int cutoff, const std::string& scale, const std::string& out_path) {
    const auto bank = load_bank(bank_dir);
    const cogmod::grid_image image =
        load_query_image(image_path, bank.front().width(), bank.front().height(), cutoff, scale);
    const auto ranked = cogmod::classify(bank, image, threshold);
    std::string out;
    for (const auto& [label, s] : ranked)
        out += label + ' ' + format_ratio(s) + ' ' + std::to_string(s.in_count) + ' ' +
               std::to_string(s.out_count) + '\n';
    std::cout << out;
    if (!out_path.empty()) write_file(out_path, out);
    return 0;
}

int run_evaluate(const std::string& manifest_path, double threshold, const std::string& grid,
                 int cutoff, const std::string& scale, const std::string& bank_dir,
                 const std::string& out_path) {
    cogmod::dataset_manifest manifest = cogmod::load_manifest(manifest_path);
    apply_overrides(manifest, grid, cutoff, scale);
    std::vector<cogmod::cooccurrence_classifier> bank;
    const cogmod::evaluation_report report =
        cogmod::evaluate(manifest, threshold, bank_dir.empty() ? nullptr : &bank);
    std::cout << cogmod::report_to_text(report, manifest);
    if (!bank_dir.empty()) save_bank(bank, bank_dir);
    if (!out_path.empty()) write_file(out_path, cogmod::confusion_to_csv(report, manifest));
    return 0;
}

int run_simulate(const std::string& scenario_path, const std::string& out_path) {
    const cogmod::scenario sc = cogmod::load_scenario(scenario_path);
    const cogmod::sim_trace trace = cogmod::simulate(sc);
    std::cout << cogmod::trace_to_text(trace);
    if (!out_path.empty()) write_file(out_path, cogmod::trace_to_csv(trace));
    return 0;
}

int run_bind(const std::string& active_path, const std::string& pattern_path,
             const std::string& links_path, double threshold, bool do_resonate, int max_iter,
             const std::string& out_path) {
    const cogmod::grid_image active = cogmod::load_grid_text(active_path);
    const cogmod::grid_image pattern_grid = cogmod::load_grid_text(pattern_path);
    if (!active.same_dimensions(pattern_grid))
        throw cogmod::error("active and pattern grids disagree on size");
    cogmod::hierarchy_pattern hierarchy;
    for (const cogmod::cell_index& c : pattern_grid.active()) hierarchy.pattern.insert(c);

    // without a links file every stored-only cell is unsupported mass
    cogmod::cooccurrence_classifier links =
        links_path.empty()
            ? cogmod::cooccurrence_classifier("links", active.width(), active.height())
            : cogmod::cooccurrence_classifier::load(links_path);
    const cogmod::ensemble_state ensemble(active, std::move(links));

    std::string out;
    if (do_resonate) {
        const cogmod::resonance_result result =
            cogmod::resonate(ensemble, hierarchy, threshold, max_iter);
        out = cogmod::report_to_text(result.report);
        out += "iterations " + std::to_string(result.iterations) + '\n';
        out += std::string("stable ") + (result.stable ? "true" : "false") + '\n';
        std::cout << out;
        if (!out_path.empty()) write_file(out_path, cogmod::grid_to_text(result.active));
    } else {
        out = cogmod::report_to_text(cogmod::bind_report(ensemble, hierarchy, threshold));
        std::cout << out;
        if (!out_path.empty()) write_file(out_path, out);
    }
    return 0;
}

int run_concept_learn(const std::string& base_path, const std::vector<std::string>& sessions) {
    cogmod::concept_base base;
    if (fs::exists(base_path)) base = cogmod::concept_base::load(base_path);
    for (const std::string& session : sessions) {
        std::istringstream in(session);
        std::set<std::string> active;
        std::string tok;
        while (in >> tok) active.insert(tok);
        base.learn_occurrence(active);
    }
    base.save(base_path);
    std::cout << "concepts " << base.concepts().size() << "\n"
              << "pairs " << base.cross_refs().size() << "\n";
    return 0;
}

int run_concept_resolve(const std::string& base_path, const std::vector<std::string>& active,
                        int min_count, const std::string& out_path) {
    const cogmod::concept_base base = cogmod::concept_base::load(base_path);
    std::set<std::string> active_set(active.begin(), active.end());
    const cogmod::binding_resolution resolution =
        cogmod::resolve_bindings(base, active_set, min_count);
    const std::string out = cogmod::resolution_to_text(resolution);
    std::cout << out;
    if (!out_path.empty()) write_file(out_path, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"co-occurrence classifier, behaviour simulator, and binding toolkit"};
    app.require_subcommand(1);

    std::string manifest_path, out_dir, out_path, bank_dir, image_path, grid, scale;
    std::string scenario_path, active_path, pattern_path, links_path, base_path;
    std::vector<std::string> sessions, active_concepts;
    double threshold = 0.2;
    int cutoff = -1; // -1 keeps the manifest / module default
    int min_count = 1;
    int max_iter = 0;
    bool do_resonate = false;

    auto* train = app.add_subcommand("train", "train one classifier per manifest class");
    train->add_option("--manifest", manifest_path, "dataset manifest file")->required();
    train->add_option("--out", out_dir, "directory for the classifier bank")->required();
    train->add_option("--grid", grid, "override grid size, <width>x<height>");
    train->add_option("--cutoff", cutoff, "override binarization cutoff")->check(CLI::Range(0, 255));
    train->add_option("--scale", scale, "override scaling mode")
        ->check(CLI::IsMember({"off", "fit"}));

    auto* classify_cmd = app.add_subcommand("classify", "rank a bank against one image");
    classify_cmd->add_option("--bank", bank_dir, "classifier bank directory")->required();
    classify_cmd->add_option("--image", image_path, "image to classify")->required();
    classify_cmd->add_option("--threshold", threshold, "link admission threshold")
        ->check(CLI::Range(0.0, 1.0));
    classify_cmd->add_option("--cutoff", cutoff, "binarization cutoff for graymaps")
        ->check(CLI::Range(0, 255));
    classify_cmd->add_option("--scale", scale, "scaling mode")->check(CLI::IsMember({"off", "fit"}));
    classify_cmd->add_option("--out", out_path, "write the ranking to this file");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "self-test accuracy over a manifest");
    evaluate_cmd->add_option("--manifest", manifest_path, "dataset manifest file")->required();
    evaluate_cmd->add_option("--threshold", threshold, "link admission threshold")
        ->check(CLI::Range(0.0, 1.0));
    evaluate_cmd->add_option("--grid", grid, "override grid size, <width>x<height>");
    evaluate_cmd->add_option("--cutoff", cutoff, "override binarization cutoff")
        ->check(CLI::Range(0, 255));
    evaluate_cmd->add_option("--scale", scale, "override scaling mode")
        ->check(CLI::IsMember({"off", "fit"}));
    evaluate_cmd->add_option("--bank", bank_dir, "also write the trained bank here");
    evaluate_cmd->add_option("--out", out_path, "write the confusion matrix CSV here");

    auto* simulate_cmd = app.add_subcommand("simulate", "run a behaviour-selection scenario");
    simulate_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
    simulate_cmd->add_option("--out", out_path, "write the trace CSV here");

    auto* bind = app.add_subcommand("bind", "reconcile an activation against a stored pattern");
    bind->add_option("--active", active_path, "active cells, text grid")->required();
    bind->add_option("--pattern", pattern_path, "stored pattern, text grid")->required();
    bind->add_option("--links", links_path, "classifier file supplying link weights");
    bind->add_option("--threshold", threshold, "link admission threshold")
        ->check(CLI::Range(0.0, 1.0));
    bind->add_flag("--resonate", do_resonate, "iterate link activation to a stable state");
    bind->add_option("--max-iter", max_iter, "iteration cap, defaults to width*height")
        ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
    bind->add_option("--out", out_path, "write report (or resonated grid) here");

    auto* learn = app.add_subcommand("concept-learn", "record concept co-occurrence sessions");
    learn->add_option("--base", base_path, "concept base file, created if missing")->required();
    learn->add_option("--session", sessions, "space-separated concepts seen together")
        ->required();

    auto* resolve = app.add_subcommand("concept-resolve", "group active concepts by cross-links");
    resolve->add_option("--base", base_path, "concept base file")->required();
    resolve->add_option("--active", active_concepts, "active concept identifiers")->required();
    resolve->add_option("--min-count", min_count, "edge admission count")
        ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
    resolve->add_option("--out", out_path, "write the grouping here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*train) return run_train(manifest_path, out_dir, grid, cutoff, scale);
        if (*classify_cmd)
            return run_classify(bank_dir, image_path, threshold, cutoff, scale, out_path);
        if (*evaluate_cmd)
            return run_evaluate(manifest_path, threshold, grid, cutoff, scale, bank_dir, out_path);
        if (*simulate_cmd) return run_simulate(scenario_path, out_path);
        if (*bind) {
            if (max_iter == 0) {
                const cogmod::grid_image a = cogmod::load_grid_text(active_path);
                max_iter = a.width() * a.height();
            }
            return run_bind(active_path, pattern_path, links_path, threshold, do_resonate,
                            max_iter, out_path);
        }
        if (*learn) return run_concept_learn(base_path, sessions);
        if (*resolve) return run_concept_resolve(base_path, active_concepts, min_count, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
