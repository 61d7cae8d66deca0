// Command-line front end for the reconfiguration planner. One subcommand per
// pipeline step: gen writes instance files, solve writes plan and report
// files, evaluate re-scores a plan, export-lp emits the integer program,
// report turns solver reports into CSV tables. Results go to files;
// diagnostics go to stderr. Exit codes: 0 success, 1 bad input or infeasible,
// 2 internal failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mcrp/instance.hpp>
#include <mcrp/lp_export.hpp>
#include <mcrp/model.hpp>
#include <mcrp/scenario.hpp>
#include <mcrp/serialization.hpp>
#include <mcrp/solvers.hpp>

namespace {

constexpr int kReportSchemaVersion = 1;
constexpr double kInf = std::numeric_limits<double>::infinity();

mcrp::json_doc report_to_json(const mcrp::SolveReport& rep) {
    mcrp::json_doc doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["method"] = rep.method;
    doc["objective"] = rep.objective;
    doc["best_bound"] = rep.best_bound;
    if (rep.duality_gap)
        doc["duality_gap"] = *rep.duality_gap;
    else
        doc["duality_gap"] = nullptr;
    doc["runtime_seconds"] = rep.runtime_seconds;
    doc["nodes"] = rep.nodes;
    doc["subproblems"] = rep.subproblems;
    doc["completed"] = rep.completed;
    doc["stage_objectives"] = rep.stage_objectives;
    doc["assignment"] = rep.plan.assignment;
    return doc;
}

mcrp::SolveReport report_from_file(const std::string& path) {
    mcrp::json_doc doc;
    try {
        doc = mcrp::json_doc::parse(mcrp::read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw mcrp::ParseError(path + ": " + e.what());
    }
    if (!doc.is_object() || doc.value("schema_version", 0) != kReportSchemaVersion)
        throw mcrp::SchemaError("schema_version", path + " is not a solver report file");
    mcrp::SolveReport rep;
    try {
        rep.method = doc.at("method").get<std::string>();
        rep.objective = doc.at("objective").get<double>();
        rep.best_bound = doc.at("best_bound").get<double>();
        if (!doc.at("duality_gap").is_null())
            rep.duality_gap = doc.at("duality_gap").get<double>();
        rep.runtime_seconds = doc.at("runtime_seconds").get<double>();
        rep.nodes = doc.at("nodes").get<long long>();
        rep.subproblems = doc.at("subproblems").get<int>();
        rep.completed = doc.at("completed").get<bool>();
        rep.stage_objectives = doc.at("stage_objectives").get<std::vector<double>>();
        rep.plan.assignment = doc.at("assignment").get<std::vector<std::vector<int>>>();
    } catch (const nlohmann::json::exception& e) {
        throw mcrp::SchemaError("", path + ": " + e.what());
    }
    return rep;
}

struct GenOptions {
    std::string preset = "static";
    std::string out;
    std::uint64_t seed = 0;
    int slots = 50;
    int stages = -1; // preset-dependent default
    int satellites = 3;
    int targets = 10;
    int total_steps = 4320;
    double step_seconds = 100.0;
    std::string track_file = mcrp::harvey_track_path();
    std::string sats_file = mcrp::harvey_satellites_path();
    int phase_count = 24;
    int plane_steps = 4;
};

int run_gen(const GenOptions& opt) {
    mcrp::McrpInstance inst;
    if (opt.preset == "harvey") {
        mcrp::HarveyOptions h;
        h.stages = opt.stages < 0 ? 8 : opt.stages;
        h.step_seconds = opt.step_seconds;
        h.phase_count = opt.phase_count;
        h.plane_steps_per_side = opt.plane_steps;
        inst = mcrp::make_harvey_instance(opt.track_file, opt.sats_file, h);
    } else {
        mcrp::InstanceRecipe recipe;
        recipe.family = opt.preset == "dynamic" ? mcrp::InstanceFamily::Dynamic
                                                : mcrp::InstanceFamily::Static;
        recipe.seed = opt.seed;
        recipe.slots = opt.slots;
        recipe.stages = opt.stages < 0 ? 3 : opt.stages;
        recipe.satellites = opt.satellites;
        recipe.targets = opt.targets;
        recipe.total_steps = opt.total_steps;
        recipe.step_seconds = opt.step_seconds;
        inst = mcrp::generate_random_instance(recipe);
    }
    mcrp::validate_instance(inst);
    mcrp::save_instance(inst, opt.out);
    std::cerr << "wrote " << opt.out << ": " << inst.grid.stages() << " stages, "
              << inst.satellites.size() << " satellites, " << inst.targets.size()
              << " targets\n";
    return 0;
}

struct SolveOptions {
    std::string instance;
    std::string out;
    std::string report;
    std::string method;
    int lookahead = -1;
    double time_limit = kInf;
    double gap_tol = 0.0;
    int threads = 1;
};

int run_solve(const SolveOptions& opt) {
    mcrp::McrpInstance inst = mcrp::load_instance(opt.instance);
    mcrp::PreparedInstance pi = mcrp::prepare_instance(inst, opt.threads);

    if (opt.method == "ub") {
        mcrp::UpperBoundReport ub = mcrp::upper_bound(pi);
        mcrp::json_doc doc;
        doc["schema_version"] = kReportSchemaVersion;
        doc["method"] = "ub";
        doc["best_bound"] = ub.total;
        doc["per_stage"] = ub.per_stage;
        doc["per_satellite"] = ub.per_satellite;
        mcrp::write_text_file(opt.out, doc.dump(2) + "\n");
        if (!opt.report.empty()) mcrp::write_text_file(opt.report, doc.dump(2) + "\n");
        std::cerr << "upper bound " << ub.total << " -> " << opt.out << "\n";
        return 0;
    }

    mcrp::SolveReport rep;
    if (opt.method == "exact") {
        rep = mcrp::solve_exact_bnb(pi, opt.time_limit, opt.gap_tol);
    } else if (opt.method == "bruteforce") {
        rep = mcrp::solve_bruteforce(pi);
    } else if (opt.method == "mp") {
        rep = mcrp::solve_mp(pi, opt.time_limit);
    } else if (opt.method == "rhp") {
        if (opt.lookahead < 0)
            throw mcrp::InvalidInputError("solve: --method rhp requires --lookahead");
        rep = mcrp::solve_rhp(pi, opt.lookahead, opt.time_limit);
    } else if (opt.method == "baseline") {
        rep = mcrp::solve_baseline(pi);
    } else {
        throw mcrp::InvalidInputError("solve: unknown method '" + opt.method + "'");
    }

    mcrp::save_plan(mcrp::make_plan_record(rep.plan, pi), opt.out);
    if (!opt.report.empty())
        mcrp::write_text_file(opt.report, report_to_json(rep).dump(2) + "\n");
    std::cerr << rep.method << ": z=" << rep.objective << " bound=" << rep.best_bound
              << " nodes=" << rep.nodes << " time=" << rep.runtime_seconds << "s"
              << (rep.completed ? "" : " (time limit hit)") << " -> " << opt.out << "\n";
    return 0;
}

struct EvaluateOptions {
    std::string instance;
    std::string plan;
    std::string out;
    int threads = 1;
};

int run_evaluate(const EvaluateOptions& opt) {
    mcrp::McrpInstance inst = mcrp::load_instance(opt.instance);
    mcrp::PreparedInstance pi = mcrp::prepare_instance(inst, opt.threads);
    mcrp::PlanRecord rec = mcrp::load_plan(opt.plan);

    mcrp::validate_plan(rec.plan, pi.graph);
    std::vector<double> zs = mcrp::stage_objectives(rec.plan, pi);
    double z = 0.0;
    for (double v : zs) z += v;
    std::vector<mcrp::Violation> violations = mcrp::check_feasibility(rec.plan, pi);

    mcrp::json_doc doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["objective"] = z;
    doc["stage_objectives"] = zs;
    doc["per_satellite_delta_v"] = mcrp::per_satellite_delta_v(rec.plan, pi.graph);
    doc["file_objective"] = rec.objective;
    doc["matches_file"] = z == rec.objective;
    doc["feasible"] = violations.empty();
    std::vector<std::string> messages;
    for (const mcrp::Violation& v : violations) messages.push_back(v.message);
    doc["violations"] = messages;
    mcrp::write_text_file(opt.out, doc.dump(2) + "\n");

    for (const std::string& m : messages) std::cerr << "violation: " << m << "\n";
    if (z != rec.objective)
        std::cerr << "objective mismatch: plan file claims " << rec.objective
                  << ", evaluation gives " << z << "\n";
    std::cerr << "evaluate: z=" << z << " feasible=" << (violations.empty() ? "yes" : "no")
              << " -> " << opt.out << "\n";
    return violations.empty() && z == rec.objective ? 0 : 1;
}

struct ReportOptions {
    std::string instance;
    std::vector<std::string> solve_files;
    std::string out;
    std::string series;
    int intervals = 0; // 0 means one interval per stage
    int threads = 1;
};

int run_report(const ReportOptions& opt) {
    mcrp::McrpInstance inst = mcrp::load_instance(opt.instance);
    mcrp::PreparedInstance pi = mcrp::prepare_instance(inst, opt.threads);
    std::vector<mcrp::SolveReport> reports;
    reports.reserve(opt.solve_files.size());
    for (const std::string& path : opt.solve_files) reports.push_back(report_from_file(path));

    mcrp::write_text_file(opt.out, mcrp::method_summary_csv(reports, pi));
    std::cerr << "summary of " << reports.size() << " reports -> " << opt.out << "\n";
    if (!opt.series.empty()) {
        int intervals = opt.intervals > 0 ? opt.intervals : inst.grid.stages();
        mcrp::write_text_file(opt.series, mcrp::interval_series_csv(reports, pi, intervals));
        std::cerr << "interval series -> " << opt.series << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-stage constellation reconfiguration planner"};
    app.require_subcommand(1);

    GenOptions gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate an instance file");
    gen_cmd->add_option("--preset", gen.preset, "instance family")
        ->check(CLI::IsMember({"static", "dynamic", "harvey"}));
    gen_cmd->add_option("--out", gen.out, "instance file to write")->required();
    gen_cmd->add_option("--seed", gen.seed, "random seed (static/dynamic)");
    gen_cmd->add_option("--J,--slots", gen.slots, "phase slots per stage (static/dynamic)");
    gen_cmd->add_option("--N,--stages", gen.stages, "decision stages");
    gen_cmd->add_option("--K,--sats", gen.satellites, "satellites (static/dynamic)");
    gen_cmd->add_option("--targets", gen.targets, "targets (static/dynamic)");
    gen_cmd->add_option("--total-steps", gen.total_steps, "time steps (static/dynamic)");
    gen_cmd->add_option("--step-seconds", gen.step_seconds, "seconds per time step");
    gen_cmd->add_option("--track-file", gen.track_file, "storm track CSV (harvey)");
    gen_cmd->add_option("--sats-file", gen.sats_file, "satellite CSV (harvey)");
    gen_cmd->add_option("--phase-count", gen.phase_count, "phases per plane (harvey)");
    gen_cmd->add_option("--plane-steps", gen.plane_steps, "plane steps per side (harvey)");

    SolveOptions solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve an instance file");
    solve_cmd->add_option("--instance", solve.instance, "instance file")->required();
    solve_cmd->add_option("--out", solve.out, "plan file to write (report file for ub)")
        ->required();
    solve_cmd->add_option("--report", solve.report, "solver report file to write");
    solve_cmd->add_option("--method", solve.method, "solver")
        ->required()
        ->check(CLI::IsMember({"exact", "bruteforce", "mp", "rhp", "baseline", "ub"}));
    solve_cmd->add_option("--lookahead", solve.lookahead, "stages of lookahead (rhp)");
    solve_cmd->add_option("--time-limit", solve.time_limit,
                          "seconds per solve (exact) or per subproblem (mp/rhp)");
    solve_cmd->add_option("--gap-tol", solve.gap_tol, "relative gap accepted by exact");
    solve_cmd->add_option("--threads", solve.threads, "visibility precompute threads");

    EvaluateOptions eval;
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "re-score a plan file");
    eval_cmd->add_option("--instance", eval.instance, "instance file")->required();
    eval_cmd->add_option("--plan", eval.plan, "plan file")->required();
    eval_cmd->add_option("--out", eval.out, "evaluation file to write")->required();
    eval_cmd->add_option("--threads", eval.threads, "visibility precompute threads");

    std::string lp_instance, lp_out;
    int lp_threads = 1;
    CLI::App* lp_cmd = app.add_subcommand("export-lp", "write the integer program as LP text");
    lp_cmd->add_option("--instance", lp_instance, "instance file")->required();
    lp_cmd->add_option("--out", lp_out, "LP file to write")->required();
    lp_cmd->add_option("--threads", lp_threads, "visibility precompute threads");

    ReportOptions report;
    CLI::App* report_cmd = app.add_subcommand("report", "summarize solver reports as CSV");
    report_cmd->add_option("--instance", report.instance, "instance file")->required();
    report_cmd->add_option("--solve", report.solve_files, "solver report file (repeatable)")
        ->required();
    report_cmd->add_option("--out", report.out, "summary CSV to write")->required();
    report_cmd->add_option("--series", report.series, "interval reward CSV to write");
    report_cmd->add_option("--intervals", report.intervals,
                           "interval count for --series (default: one per stage)");
    report_cmd->add_option("--threads", report.threads, "visibility precompute threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (solve_cmd->parsed()) return run_solve(solve);
        if (eval_cmd->parsed()) return run_evaluate(eval);
        if (lp_cmd->parsed()) {
            mcrp::McrpInstance inst = mcrp::load_instance(lp_instance);
            mcrp::PreparedInstance pi = mcrp::prepare_instance(inst, lp_threads);
            // streamed row by row: full-resolution models run to gigabytes
            std::ofstream out(lp_out, std::ios::binary | std::ios::trunc);
            if (!out) throw mcrp::InvalidInputError("cannot open " + lp_out + " for writing");
            mcrp::export_lp(pi, out);
            out.flush();
            if (!out) throw mcrp::InvalidInputError("failed writing " + lp_out);
            std::cerr << "integer program -> " << lp_out << "\n";
            return 0;
        }
        if (report_cmd->parsed()) return run_report(report);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const mcrp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
