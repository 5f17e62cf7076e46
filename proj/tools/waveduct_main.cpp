#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "waveduct/compare.hpp"
#include "waveduct/config.hpp"
#include "waveduct/csv.hpp"
#include "waveduct/cylinder.hpp"
#include "waveduct/geometry.hpp"
#include "waveduct/node.hpp"
#include "waveduct/stepper.hpp"
#include "waveduct/verify.hpp"
#include "waveduct/webster.hpp"

namespace fs = std::filesystem;
using namespace waveduct;

namespace {

const char* kUsage =
    "usage: waveduct <command> [--config FILE]... [--out DIR] [--seed N] [--jobs N]\n"
    "\n"
    "commands:\n"
    "  simulate-webster   run the horn model, write timeseries and power ledger\n"
    "  simulate-cylinder  run the cylinder model, write ledger and averages\n"
    "  compare-averages   cross-check both models on a constant tube\n"
    "  verify-node        run the structural check battery on the horn node\n"
    "  geometry-report    sample a profile and write its derived fields\n"
    "\n"
    "flags:\n"
    "  --config FILE  run configuration (repeatable; one run per file)\n"
    "  --out DIR      override output.directory for every run\n"
    "  --seed N       override verify.seed\n"
    "  --jobs N       run the configured files on N worker threads\n";

struct CliArgs {
    std::string command;
    std::vector<std::string> configs;
    std::string out_override;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int jobs = 1;
    std::string fault;
};

int usage_error(const std::string& msg) {
    if (!msg.empty()) std::cerr << "error: " << msg << "\n";
    std::cerr << kUsage;
    return 2;
}

bool known_command(const std::string& cmd) {
    return cmd == "simulate-webster" || cmd == "simulate-cylinder" ||
           cmd == "compare-averages" || cmd == "verify-node" || cmd == "geometry-report";
}

int parse_args(int argc, char** argv, CliArgs& args) {
    if (argc < 2) return usage_error("a command is required");
    args.command = argv[1];
    if (args.command == "--help" || args.command == "-h") {
        std::cout << kUsage;
        return -1;
    }
    if (!known_command(args.command))
        return usage_error("unknown command '" + args.command + "'");

    for (int i = 2; i < argc; ++i) {
        std::string flag = argv[i];
        auto value = [&](const char* name) -> const char* {
            if (i + 1 >= argc) {
                usage_error(std::string(name) + " needs a value");
                return nullptr;
            }
            return argv[++i];
        };
        if (flag == "--config") {
            const char* v = value("--config");
            if (!v) return 2;
            args.configs.push_back(v);
        } else if (flag == "--out") {
            const char* v = value("--out");
            if (!v) return 2;
            args.out_override = v;
        } else if (flag == "--seed") {
            const char* v = value("--seed");
            if (!v) return 2;
            try {
                args.seed = std::stoull(v);
            } catch (const std::exception&) {
                return usage_error(std::string("--seed: not an integer: '") + v + "'");
            }
            args.seed_given = true;
        } else if (flag == "--jobs") {
            const char* v = value("--jobs");
            if (!v) return 2;
            try {
                args.jobs = std::stoi(v);
            } catch (const std::exception&) {
                return usage_error(std::string("--jobs: not an integer: '") + v + "'");
            }
            if (args.jobs < 1) return usage_error("--jobs must be >= 1");
        } else if (flag == "--inject-fault") {
            const char* v = value("--inject-fault");
            if (!v) return 2;
            args.fault = v;
        } else {
            return usage_error("unknown flag '" + flag + "'");
        }
    }
    if (args.configs.empty()) return usage_error("at least one --config is required");
    if (!args.fault.empty() && args.fault != "l-scale")
        return usage_error("unknown fault '" + args.fault + "'");
    return 0;
}

struct RunTask {
    std::string config_path;
    RunConfig rc;
    Signal input;
};

SimulationOptions sim_options(const RunConfig& rc) {
    SimulationOptions opt;
    opt.dt = rc.dt;
    opt.n_steps = static_cast<int>(std::lround(rc.t_final / rc.dt));
    opt.record_stride = rc.record_stride;
    return opt;
}

void write_meta(const RunConfig& rc) {
    fs::create_directories(rc.out_dir);
    std::ofstream out(fs::path(rc.out_dir) / "run.meta", std::ios::binary);
    out << run_config_to_config(rc).serialize();
    if (!out) throw std::runtime_error("cannot write run.meta in " + rc.out_dir);
}

std::string out_path(const RunConfig& rc, const std::string& suffix) {
    return (fs::path(rc.out_dir) / (rc.prefix + suffix)).string();
}

int run_simulate_webster(const RunTask& task, std::mutex& io) {
    const RunConfig& rc = task.rc;
    TubeGeometry geom = build_profile(rc.geometry, rc.n_elems + 1);
    WebsterSystem sys = assemble_webster(geom, rc.physics, rc.n_elems);
    auto handle = webster_handle(sys);
    SimulationOptions opt = sim_options(rc);
    SimulationResult res =
        run_simulation(*handle, Eigen::VectorXd::Zero(handle->dim()), {task.input}, opt);

    CsvWriter series({"t", "u", "y", "E"});
    for (std::size_t i = 0; i < res.t.size(); ++i)
        series.append({res.t[i], res.u[i], res.y_endpoint[i], res.energy[i]});
    series.write_file(out_path(rc, "_timeseries.csv"));

    CsvWriter ledger({"t", "u", "y_endpoint", "y_midpoint", "E", "p_in", "p_out", "p_diss",
                      "residual"});
    for (std::size_t k = 0; k < res.ledger.size(); ++k) {
        const LedgerRow& row = res.ledger[k];
        ledger.append({row.t_mid, task.input(row.t_mid), res.y_endpoint[k + 1],
                       res.y_midpoint[k], row.e_after, row.powers.p_in, row.powers.p_out,
                       row.powers.p_wall, row.residual});
    }
    ledger.write_file(out_path(rc, "_ledger.csv"));

    std::lock_guard<std::mutex> lock(io);
    std::printf("%s: final energy = %.17g, max ledger residual = %.3e\n",
                task.config_path.c_str(), res.energy.back(), res.max_rel_residual);
    return 0;
}

int run_simulate_cylinder(const RunTask& task, std::mutex& io) {
    const RunConfig& rc = task.rc;
    CylinderSystem sys = build_cylinder(rc.physics, rc.geometry.r0, rc.ns, rc.nr);
    sys.wall_alpha = rc.physics.alpha;
    SimulationOptions opt = sim_options(rc);
    CylinderRunResult run = run_cylinder(sys, task.input, zero_signal(), opt);

    CsvWriter ledger({"t", "E", "P_in", "P_out", "P_wall", "P_interior", "residual"});
    for (const LedgerRow& row : run.sim.ledger)
        ledger.append({row.t_mid, row.e_after, row.powers.p_in, row.powers.p_out,
                       row.powers.p_wall, row.powers.p_interior, row.residual});
    ledger.write_file(out_path(rc, "_ledger.csv"));

    CsvWriter avg({"t", "s", "phibar"});
    for (std::size_t rec = 0; rec < run.record_times.size(); ++rec)
        for (int i = 0; i < rc.ns; ++i)
            avg.append({run.record_times[rec], static_cast<double>(i) / rc.ns,
                        run.phibar_records[rec][i]});
    avg.write_file(out_path(rc, "_averages.csv"));

    std::lock_guard<std::mutex> lock(io);
    std::printf("%s: final energy = %.17g, max ledger residual = %.3e\n",
                task.config_path.c_str(), run.sim.energy.back(), run.sim.max_rel_residual);
    return 0;
}

int run_compare(const RunTask& task, std::mutex& io) {
    const RunConfig& rc = task.rc;
    CompareOptions opt;
    opt.radius = rc.geometry.r0;
    opt.physics = rc.physics;
    opt.ns = rc.ns;
    opt.nr = rc.nr;
    opt.dt = rc.dt;
    opt.t_final = rc.t_final;
    opt.record_stride = rc.record_stride;
    CompareResult res = compare_averages(opt, task.input);

    std::ofstream out(out_path(rc, "_compare.csv"), std::ios::binary);
    out << compare_csv(res);
    if (!out) throw std::runtime_error("cannot write " + out_path(rc, "_compare.csv"));

    std::lock_guard<std::mutex> lock(io);
    std::printf("%s: max relative L2(t) error = %.6g (reference norm %.6g)\n",
                task.config_path.c_str(), res.max_rel_err, res.ref_norm);
    if (res.max_rel_err > 0.02)
        std::printf("%s: warning: relative error exceeds the 0.02 consistency band\n",
                    task.config_path.c_str());
    return 0;
}

int run_verify(const RunTask& task, bool corrupt, std::mutex& io) {
    const RunConfig& rc = task.rc;
    TubeGeometry geom = build_profile(rc.geometry, rc.n_elems + 1);
    VerifyOptions opts;
    opts.n_samples = rc.n_defect_samples;
    opts.seed = rc.seed;
    opts.tol_identity = rc.tol_identity;
    opts.tol_passivity = rc.tol_passivity;
    opts.corrupt_interior = corrupt;
    std::vector<CheckResult> checks = verify_webster_node(geom, rc.physics, rc.n_elems, opts);

    DiscreteNode node = webster_node(assemble_webster(geom, rc.physics, rc.n_elems));
    if (corrupt) node.L *= 1.01;
    DefectReport rep =
        passivity_check(node, rc.n_defect_samples, rc.seed, rc.tol_passivity);
    std::ofstream defects(out_path(rc, "_defects.csv"), std::ios::binary);
    defects << defect_report_csv(rep);
    if (!defects) throw std::runtime_error("cannot write " + out_path(rc, "_defects.csv"));

    std::lock_guard<std::mutex> lock(io);
    for (const CheckResult& c : checks)
        std::printf("%s  %-22s measure = %10.3e  %s\n", c.pass ? " ok " : "FAIL",
                    c.name.c_str(), c.measure, c.detail.c_str());
    bool ok = all_passed(checks);
    std::printf("%s: %s\n", task.config_path.c_str(),
                ok ? "all checks passed" : "checks failed");
    return ok ? 0 : 1;
}

int run_geometry_report(const RunTask& task, std::mutex& io) {
    const RunConfig& rc = task.rc;
    int n = rc.n_samples > 0 ? rc.n_samples : rc.n_elems + 1;
    TubeGeometry geom = build_profile(rc.geometry, n);
    GeometryDiagnostic diag = validate_geometry(geom);
    if (!diag.ok) {
        std::lock_guard<std::mutex> lock(io);
        std::cerr << task.config_path << ": invalid geometry: " << diag.message << "\n";
        return 1;
    }
    std::ofstream out(out_path(rc, "_geometry.csv"), std::ios::binary);
    out << geometry_csv(geom);
    if (!out) throw std::runtime_error("cannot write " + out_path(rc, "_geometry.csv"));

    std::lock_guard<std::mutex> lock(io);
    std::printf("%s: wrote %d geometry samples\n", task.config_path.c_str(), n);
    return 0;
}

int run_task(const CliArgs& args, const RunTask& task, std::mutex& io) {
    try {
        write_meta(task.rc);
        if (args.command == "simulate-webster") return run_simulate_webster(task, io);
        if (args.command == "simulate-cylinder") return run_simulate_cylinder(task, io);
        if (args.command == "compare-averages") return run_compare(task, io);
        if (args.command == "verify-node")
            return run_verify(task, args.fault == "l-scale", io);
        return run_geometry_report(task, io);
    } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io);
        std::cerr << task.config_path << ": " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CliArgs args;
    int parse_rc = parse_args(argc, argv, args);
    if (parse_rc == -1) return 0;
    if (parse_rc != 0) return parse_rc;

    // resolve every config before any run so mistakes abort the whole batch
    std::vector<RunTask> tasks;
    for (const std::string& path : args.configs) {
        RunTask task;
        task.config_path = path;
        try {
            task.rc = resolve_config(Config::parse_file(path));
            if (!args.out_override.empty()) task.rc.out_dir = args.out_override;
            if (args.seed_given) task.rc.seed = args.seed;
            task.input = make_signal(task.rc.input);
            if (args.command == "compare-averages" &&
                (task.rc.geometry.kind != ProfileKind::Constant ||
                 task.rc.geometry.kappa != 0.0))
                throw ConfigError(
                    "compare-averages needs a constant straight tube "
                    "(geometry.kind = constant, geometry.kappa = 0)");
        } catch (const std::exception& e) {
            std::cerr << path << ": " << e.what() << "\n";
            return 2;
        }
        tasks.push_back(std::move(task));
    }

    std::mutex io;
    std::atomic<int> next{0};
    std::atomic<int> worst{0};
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= static_cast<int>(tasks.size())) return;
            int rc = run_task(args, tasks[i], io);
            int seen = worst.load();
            while (rc > seen && !worst.compare_exchange_weak(seen, rc)) {
            }
        }
    };

    int n_workers = std::min<int>(args.jobs, static_cast<int>(tasks.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    return worst.load();
}
