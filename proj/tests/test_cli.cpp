#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "waveduct/config.hpp"
#include "waveduct/csv.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace waveduct;

namespace {

struct CliRun {
    int exit_code = -1;
    std::string out;
    std::string err;
};

const fs::path& work_root() {
    static fs::path root = [] {
        std::string tmpl = (fs::temp_directory_path() / "waveduct_cli_XXXXXX").string();
        char* made = mkdtemp(tmpl.data());
        REQUIRE(made != nullptr);
        return fs::path(made);
    }();
    return root;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = work_root() / name;
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

CliRun cli(const std::string& args, const std::string& tag) {
    fs::path out = work_root() / (tag + ".out");
    fs::path err = work_root() / (tag + ".err");
    std::string cmd = std::string(WAVEDUCT_CLI_PATH) + " " + args + " >" +
                      out.string() + " 2>" + err.string();
    int raw = std::system(cmd.c_str());
    CliRun r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string webster_cfg(const fs::path& out_dir, const std::string& extra = "") {
    std::ostringstream ss;
    ss << "[geometry]\nkind = constant\nr0 = 0.01\n"
       << "[discretization]\nn_elems = 16\ndt = 1e-4\nt_final = 5e-3\n"
       << "[input]\nkind = gaussian\ncenter = 1e-3\nwidth = 2.5e-4\n"
       << "[output]\ndirectory = " << out_dir.string() << "\nprefix = run\n"
       << extra;
    return ss.str();
}

} // namespace

TEST_CASE("no arguments and unknown commands exit with usage status 2") {
    CliRun none = cli("", "noargs");
    CHECK(none.exit_code == 2);
    CHECK(none.err.find("usage") != std::string::npos);

    CliRun unknown = cli("frobnicate", "unknown");
    CHECK(unknown.exit_code == 2);

    CliRun nocfg = cli("simulate-webster --config /tmp/waveduct_none.cfg", "nocfg");
    CHECK(nocfg.exit_code == 2);
}

TEST_CASE("simulate-webster writes schema'd outputs and a meta echo") {
    fs::path dir = fresh_dir("web1");
    fs::path cfg = work_root() / "web1.cfg";
    spit(cfg, webster_cfg(dir));

    CliRun r = cli("simulate-webster --config " + cfg.string(), "web1");
    CAPTURE(r.err);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("final energy") != std::string::npos);

    std::string series = slurp(dir / "run_timeseries.csv");
    CHECK(series.rfind("#schema=1\nt,u,y,E\n", 0) == 0);
    std::string ledger = slurp(dir / "run_ledger.csv");
    CHECK(ledger.rfind("#schema=1\nt,u,y_endpoint,y_midpoint,E,p_in,p_out,p_diss,residual\n",
                       0) == 0);

    RunConfig meta = resolve_config(Config::parse_file((dir / "run.meta").string()));
    CHECK(meta.n_elems == 16);
    CHECK(meta.dt == 1e-4);
    CHECK(meta.out_dir == dir.string());

    CsvTable t = read_csv((dir / "run_timeseries.csv").string());
    CHECK(t.n_rows() == 51);
}

TEST_CASE("identical configs produce bit-identical outputs") {
    fs::path da = fresh_dir("det_a");
    fs::path db = fresh_dir("det_b");
    fs::path ca = work_root() / "det_a.cfg";
    fs::path cb = work_root() / "det_b.cfg";
    spit(ca, webster_cfg(da, "[physics]\nalpha = 1\n"));
    spit(cb, webster_cfg(db, "[physics]\nalpha = 1\n"));

    CHECK(cli("simulate-webster --config " + ca.string(), "det_a").exit_code == 0);
    CHECK(cli("simulate-webster --config " + cb.string(), "det_b").exit_code == 0);
    CHECK(slurp(da / "run_timeseries.csv") == slurp(db / "run_timeseries.csv"));
    CHECK(slurp(da / "run_ledger.csv") == slurp(db / "run_ledger.csv"));
}

TEST_CASE("the --out flag overrides the configured directory") {
    fs::path cfg_dir = fresh_dir("ovr_cfg");
    fs::path real_dir = fresh_dir("ovr_real");
    fs::path cfg = work_root() / "ovr.cfg";
    spit(cfg, webster_cfg(cfg_dir));

    CliRun r = cli("simulate-webster --config " + cfg.string() + " --out " +
                       real_dir.string(),
                   "ovr");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(real_dir / "run_timeseries.csv"));
    CHECK_FALSE(fs::exists(cfg_dir / "run_timeseries.csv"));
}

TEST_CASE("simulate-cylinder emits the split power ledger and averages") {
    fs::path dir = fresh_dir("cyl1");
    fs::path cfg = work_root() / "cyl1.cfg";
    spit(cfg,
         "[geometry]\nkind = constant\nr0 = 0.01\n"
         "[physics]\nalpha = 0.3\n"
         "[discretization]\nns = 16\nnr = 4\ndt = 1e-4\nt_final = 2e-3\nrecord_stride = 5\n"
         "[input]\nkind = gaussian\ncenter = 5e-4\nwidth = 2e-4\n"
         "[output]\ndirectory = " +
             dir.string() + "\nprefix = cyl\n");

    CliRun r = cli("simulate-cylinder --config " + cfg.string(), "cyl1");
    CAPTURE(r.err);
    CHECK(r.exit_code == 0);

    std::string ledger = slurp(dir / "cyl_ledger.csv");
    CHECK(ledger.rfind("#schema=1\nt,E,P_in,P_out,P_wall,P_interior,residual\n", 0) == 0);
    std::string avg = slurp(dir / "cyl_averages.csv");
    CHECK(avg.rfind("#schema=1\nt,s,phibar\n", 0) == 0);

    CsvTable table = read_csv((dir / "cyl_averages.csv").string());
    CHECK(table.n_rows() % 16 == 0); // ns rows per recorded time
    CHECK(fs::exists(dir / "run.meta"));
}

TEST_CASE("verify-node passes on sound assemblies and reports the verdict") {
    fs::path dir = fresh_dir("ver1");
    fs::path cfg = work_root() / "ver1.cfg";
    spit(cfg,
         "[geometry]\nkind = constant\nr0 = 0.01\n"
         "[discretization]\nn_elems = 24\n"
         "[verify]\nn_defect_samples = 40\nseed = 42\n"
         "[output]\ndirectory = " +
             dir.string() + "\n");

    CliRun r = cli("verify-node --config " + cfg.string(), "ver1");
    CAPTURE(r.err);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("gl-identity") != std::string::npos);
    CHECK(r.out.find("conservative") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(fs::exists(dir / "run_defects.csv"));

    // curved damped tube: passive verdict, still all checks green
    fs::path dir2 = fresh_dir("ver2");
    fs::path cfg2 = work_root() / "ver2.cfg";
    spit(cfg2,
         "[geometry]\nkind = constant\nr0 = 0.01\nkappa = 50\n"
         "[physics]\nalpha = 0.5\n"
         "[discretization]\nn_elems = 24\n"
         "[verify]\nn_defect_samples = 40\n"
         "[output]\ndirectory = " +
             dir2.string() + "\n");
    CliRun r2 = cli("verify-node --config " + cfg2.string(), "ver2");
    CAPTURE(r2.err);
    CHECK(r2.exit_code == 0);
    CHECK(r2.out.find("passive") != std::string::npos);
}

TEST_CASE("verify-node --seed is echoed and keeps runs reproducible") {
    fs::path dir = fresh_dir("seed1");
    fs::path cfg = work_root() / "seed1.cfg";
    spit(cfg,
         "[geometry]\nkind = constant\n[discretization]\nn_elems = 16\n"
         "[output]\ndirectory = " +
             dir.string() + "\n");

    CliRun a = cli("verify-node --config " + cfg.string() + " --seed 123", "seed_a");
    std::string defects_a = slurp(dir / "run_defects.csv");
    RunConfig meta = resolve_config(Config::parse_file((dir / "run.meta").string()));
    CHECK(meta.seed == 123);

    CliRun b = cli("verify-node --config " + cfg.string() + " --seed 123", "seed_b");
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(slurp(dir / "run_defects.csv") == defects_a);
}

TEST_CASE("injected interior fault trips the identity check with exit 1") {
    fs::path dir = fresh_dir("fault");
    fs::path cfg = work_root() / "fault.cfg";
    spit(cfg,
         "[geometry]\nkind = constant\n[discretization]\nn_elems = 16\n"
         "[output]\ndirectory = " +
             dir.string() + "\n");

    CliRun r = cli("verify-node --config " + cfg.string() + " --inject-fault l-scale",
                   "fault");
    CHECK(r.exit_code == 1);
    CHECK((r.out + r.err).find("gl-identity") != std::string::npos);
}

TEST_CASE("compare-averages runs the twin models and enforces constant tubes") {
    fs::path dir = fresh_dir("cmp1");
    fs::path cfg = work_root() / "cmp1.cfg";
    spit(cfg,
         "[geometry]\nkind = constant\nr0 = 0.01\n"
         "[discretization]\nns = 24\nnr = 4\ndt = 2e-5\nt_final = 1.5e-3\nrecord_stride = 5\n"
         "[input]\nkind = gaussian\ncenter = 5e-4\nwidth = 2e-4\n"
         "[output]\ndirectory = " +
             dir.string() + "\nprefix = cmp\n");

    CliRun r = cli("compare-averages --config " + cfg.string(), "cmp1");
    CAPTURE(r.err);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("max relative") != std::string::npos);
    std::string csv = slurp(dir / "cmp_compare.csv");
    CHECK(csv.rfind("#schema=1\ns,t,phibar_wave,psi_webster,abs_err\n", 0) == 0);

    fs::path cfg2 = work_root() / "cmp2.cfg";
    spit(cfg2,
         "[geometry]\nkind = cone\nr0 = 0.01\nr1 = 0.02\n"
         "[output]\ndirectory = " +
             dir.string() + "\n");
    CliRun bad = cli("compare-averages --config " + cfg2.string(), "cmp2");
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("constant") != std::string::npos);
}

TEST_CASE("geometry-report writes the field table and flags invalid tubes") {
    fs::path dir = fresh_dir("geo1");
    fs::path cfg = work_root() / "geo1.cfg";
    spit(cfg,
         "[geometry]\nkind = cone\nr0 = 0.01\nr1 = 0.02\nn_samples = 33\n"
         "[output]\ndirectory = " +
             dir.string() + "\nprefix = geo\n");

    CliRun r = cli("geometry-report --config " + cfg.string(), "geo1");
    CAPTURE(r.err);
    CHECK(r.exit_code == 0);
    std::string csv = slurp(dir / "geo_geometry.csv");
    CHECK(csv.rfind("#schema=1\ns,R,Rp,kappa,A,eta,sigma,w_str\n", 0) == 0);
    CsvTable t = read_csv((dir / "geo_geometry.csv").string());
    CHECK(t.n_rows() == 33);

    fs::path cfg2 = work_root() / "geo2.cfg";
    spit(cfg2,
         "[geometry]\nkind = constant\nr0 = 0.01\nkappa = 120\n"
         "[output]\ndirectory = " +
             dir.string() + "\n");
    CliRun bad = cli("geometry-report --config " + cfg2.string(), "geo2");
    CHECK(bad.exit_code == 1);
    CHECK((bad.out + bad.err).find("eta") != std::string::npos);
}

TEST_CASE("config mistakes exit with status 2 and name the key") {
    fs::path cfg = work_root() / "badkey.cfg";
    spit(cfg, "[geometry]\nkind = constant\nradius = 1\n");
    CliRun r = cli("simulate-webster --config " + cfg.string(), "badkey");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("geometry.radius") != std::string::npos);
}

TEST_CASE("--jobs runs independent configs concurrently") {
    fs::path da = fresh_dir("jobs_a");
    fs::path db = fresh_dir("jobs_b");
    fs::path ca = work_root() / "jobs_a.cfg";
    fs::path cb = work_root() / "jobs_b.cfg";
    spit(ca, webster_cfg(da));
    spit(cb, webster_cfg(db, "[physics]\nalpha = 1\n"));

    CliRun r = cli("simulate-webster --config " + ca.string() + " --config " +
                       cb.string() + " --jobs 2",
                   "jobs");
    CAPTURE(r.err);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(da / "run_timeseries.csv"));
    CHECK(fs::exists(db / "run_timeseries.csv"));
}
