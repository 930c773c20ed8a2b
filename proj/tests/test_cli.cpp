#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "glt/graph.hpp"
#include "glt/macs.hpp"
#include "glt/metrics.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using glt::idx;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string bench_bin() {
    const char* v = std::getenv("GLT_BENCH_BIN");
    REQUIRE_MESSAGE(v != nullptr, "GLT_BENCH_BIN must point at the glt-bench binary");
    return v;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CmdResult run_cmd(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    std::string tag = std::to_string(counter++);
    std::string out_path = (fs::temp_directory_path() / ("glt_cli_out_" + tag)).string();
    std::string err_path = (fs::temp_directory_path() / ("glt_cli_err_" + tag)).string();
    std::string cmd = env_prefix + "\"" + bench_bin() + "\" " + args + " >" + out_path + " 2>" +
                      err_path;
    int rc = std::system(cmd.c_str());
    CmdResult r;
    r.exit_code = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    fs::remove(out_path);
    fs::remove(err_path);
    return r;
}

std::string scratch_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("glt_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

// small but trainable fixture dataset on disk
std::string fixture_dataset(const std::string& tag, std::uint64_t seed) {
    std::string dir = scratch_dir("ds_" + tag);
    glt::Graph g = testutil::make_synth_dataset(24, 6, 3, 0.2, seed);
    testutil::write_dataset_dir(g, dir);
    return dir;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

// strips the timestamp column (index 1) from a csv line
std::string drop_timestamp(const std::string& line) {
    std::size_t first = line.find(',');
    std::size_t second = line.find(',', first + 1);
    return line.substr(0, first) + line.substr(second);
}

}  // namespace

TEST_CASE("cli rejects bad invocations with the validation exit code") {
    CHECK(run_cmd("").exit_code == 1);
    CHECK(run_cmd("--definitely-not-a-flag").exit_code == 1);
    CHECK(run_cmd("run").exit_code == 1);                         // missing --config
    CHECK(run_cmd("run --config /nope/missing.ini").exit_code == 1);
    CHECK(run_cmd("frobnicate").exit_code == 1);
}

TEST_CASE("cli maps config field errors to exit 1 and names the field") {
    std::string dir = scratch_dir("badcfg");
    write_file(dir + "/bad.ini", "[run]\ndataset = " + dir + "\np_g = 1.5\n");
    CmdResult r = run_cmd("run --config " + dir + "/bad.ini");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("p_g") != std::string::npos);
}

TEST_CASE("cli maps runtime failures to exit 2") {
    std::string dir = scratch_dir("nods");
    write_file(dir + "/run.ini", "[run]\ndataset = " + dir + "/does_not_exist\nk = 0\n");
    CmdResult r = run_cmd("run --config " + dir + "/run.ini");
    CHECK(r.exit_code == 2);
}

TEST_CASE("run emits one schema-versioned csv row on stdout") {
    std::string ds = fixture_dataset("run1", 5);
    std::string dir = scratch_dir("run1cfg");
    write_file(dir + "/run.ini",
               "[run]\ndataset = " + ds + "\nk = 2\nepochs = 8\nhidden = 8\nseed = 3\n");
    CmdResult r = run_cmd("run --config " + dir + "/run.ini");
    REQUIRE(r.exit_code == 0);
    auto lines = csv_lines(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].rfind("schema_version,timestamp,", 0) == 0);
    CHECK(lines[1].rfind("1,", 0) == 0);
    CHECK(lines[1].find(",teddy,2,") != std::string::npos);  // scorer and k columns
    CHECK(lines[1].find(",ok") == lines[1].size() - 3);
    // dataset name defaults to the directory basename
    CHECK(lines[1].find("ds_run1") != std::string::npos);

    // same config, same seed: identical row minus the timestamp
    CmdResult r2 = run_cmd("run --config " + dir + "/run.ini");
    REQUIRE(r2.exit_code == 0);
    CHECK(drop_timestamp(csv_lines(r2.out)[1]) == drop_timestamp(lines[1]));
}

TEST_CASE("run appends to a metrics csv and writes a bundle") {
    std::string ds = fixture_dataset("run2", 6);
    std::string dir = scratch_dir("run2cfg");
    std::string csv = dir + "/metrics.csv";
    std::string bundle = dir + "/bundle";
    write_file(dir + "/run.ini", "[run]\ndataset = " + ds +
                                     "\np_g = 0.2\np_theta = 0.3\nepochs = 8\nhidden = 8\n"
                                     "metrics_csv = " +
                                     csv + "\nout_dir = " + bundle + "\n");
    CmdResult r = run_cmd("run --config " + dir + "/run.ini");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(bundle + "/checkpoint.bin"));
    CHECK(fs::exists(bundle + "/edge_mask.tsv"));
    CHECK(fs::exists(bundle + "/param_mask.bin"));
    CHECK(fs::exists(bundle + "/metrics.json"));
    auto lines1 = csv_lines(slurp(csv));
    REQUIRE(lines1.size() == 2);

    CmdResult r2 = run_cmd("run --config " + dir + "/run.ini");
    REQUIRE(r2.exit_code == 0);
    auto lines2 = csv_lines(slurp(csv));
    REQUIRE(lines2.size() == 3);
    CHECK(lines2[0] == lines1[0]);
    CHECK(drop_timestamp(lines2[2]) == drop_timestamp(lines2[1]));

    // macs subcommand agrees with the csv column for the bundle
    CmdResult m = run_cmd("macs --dataset " + ds + " --bundle " + bundle + " --hidden 8");
    REQUIRE(m.exit_code == 0);
    std::string row = lines1[1];
    std::size_t tail = row.rfind(",ok");
    std::size_t comma = row.rfind(',', tail - 1);
    std::string macs_field = row.substr(comma + 1, tail - comma - 1);
    CHECK(m.out.find(macs_field) == 0);
}

TEST_CASE("macs on a dataset uses the dense closed form") {
    std::string ds = fixture_dataset("macs", 7);
    glt::Graph g = glt::load_graph(ds);
    CmdResult r = run_cmd("macs --dataset " + ds + " --hidden 16");
    REQUIRE(r.exit_code == 0);
    const std::uint64_t m = g.num_edges(), n = g.num_nodes;
    const std::uint64_t f = g.num_features(), c = g.num_classes;
    const std::uint64_t expect = (2 * m + n) * (16 + c) + (f * 16 + 16 * c) * n;
    CHECK(std::stoull(r.out) == expect);
    CHECK(expect == glt::compute_macs_dense(g, f, 16, c));
}

TEST_CASE("convert ingests a linqs-style source deterministically") {
    std::string src = scratch_dir("linqs_src");
    write_file(src + "/toy.content",
               "p1\t1\t0\t1\tyes\n"
               "p2\t0\t1\t0\tno\n"
               "p3\t1\t1\t0\tyes\n"
               "p4\t0\t0\t1\tno\n");
    write_file(src + "/toy.cites",
               "p1\tp2\n"
               "p2\tp1\n"      // reciprocal duplicate
               "p3\tp3\n"      // self loop
               "p3\tp4\n"
               "p9\tp1\n");    // unknown id
    std::string out1 = scratch_dir("linqs_out1");
    CmdResult r = run_cmd("convert --format linqs --in " + src + " --out " + out1 +
                          " --train-per-class 1 --val 1 --test 1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("N=4 M=2 C=2 F=3") == 0);
    CHECK(r.err.find("1 unknown id") != std::string::npos);
    CHECK(r.err.find("1 self-loop") != std::string::npos);
    CHECK(r.err.find("1 duplicate") != std::string::npos);

    std::string out2 = scratch_dir("linqs_out2");
    REQUIRE(run_cmd("convert --format linqs --in " + src + " --out " + out2 +
                    " --train-per-class 1 --val 1 --test 1")
                .exit_code == 0);
    for (const char* f : {"edges.tsv", "features.tsv", "labels.tsv", "split.tsv"})
        CHECK(slurp(out1 + "/" + f) == slurp(out2 + "/" + f));

    // converted output round-trips through the loader
    glt::Graph g = glt::load_graph(out1);
    CHECK(g.num_nodes == 4);
    CHECK(g.num_edges() == 2);
    CHECK(g.num_classes == 2);

    CHECK(run_cmd("convert --format unknown --in " + src + " --out " + out1).exit_code == 1);
}

TEST_CASE("analyze energy prints the spectral energy") {
    std::string dir = scratch_dir("energy");
    glt::Graph k5 = testutil::make_complete(5);
    glt::Graph ds = testutil::make_synth_dataset(5, 3, 2, 0.0, 1);
    ds.edge_list = k5.edge_list;
    ds.adj_ptr = k5.adj_ptr;
    ds.adj_idx = k5.adj_idx;
    testutil::write_dataset_dir(ds, dir);
    CmdResult r = run_cmd("analyze --dataset " + dir + " --mode energy");
    REQUIRE(r.exit_code == 0);
    CHECK(std::stod(r.out) == doctest::Approx(2.0).epsilon(1e-9));

    std::string spec_out = dir + "/spectrum.tsv";
    CmdResult r2 = run_cmd("analyze --dataset " + dir + " --mode energy --out " + spec_out);
    REQUIRE(r2.exit_code == 0);
    auto lines = csv_lines(slurp(spec_out));
    CHECK(lines.size() == 6);  // header + 5 eigenvalues
}

TEST_CASE("analyze delta writes the report and prints spearman") {
    std::string dir = scratch_dir("delta");
    glt::Graph c4 = testutil::make_cycle(4);
    glt::Graph ds = testutil::make_synth_dataset(4, 3, 2, 0.0, 2);
    ds.edge_list = c4.edge_list;
    ds.adj_ptr = c4.adj_ptr;
    ds.adj_idx = c4.adj_idx;
    testutil::write_dataset_dir(ds, dir);
    std::string out = dir + "/delta.tsv";
    CmdResult r = run_cmd("analyze --dataset " + dir + " --mode delta --out " + out);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("spearman(-edge_degree, delta)") == 0);
    int rows = 0;
    for (const std::string& line : csv_lines(slurp(out))) {
        if (line[0] == '#') continue;
        std::istringstream ss(line);
        idx i, j;
        double ed, delta;
        ss >> i >> j >> ed >> delta;
        CHECK(delta == doctest::Approx(1.0).epsilon(1e-8));
        ++rows;
    }
    CHECK(rows == 4);

    CHECK(run_cmd("analyze --dataset " + dir + " --mode delta").exit_code == 1);  // no --out
    CHECK(run_cmd("analyze --dataset " + dir + " --mode nonsense").exit_code == 1);
}

TEST_CASE("analyze degree-report walks the ratio grid") {
    std::string ds = fixture_dataset("degrep", 9);
    CmdResult r = run_cmd("analyze --dataset " + ds + " --mode degree-report --grid 0.2,0.8");
    REQUIRE(r.exit_code == 0);
    auto lines = csv_lines(r.out);
    REQUIRE(lines.size() == 2);
    std::istringstream a(lines[0]), b(lines[1]);
    double pg1, d1, pg2, d2;
    a >> pg1 >> d1;
    b >> pg2 >> d2;
    CHECK(pg1 == doctest::Approx(0.2));
    CHECK(pg2 == doctest::Approx(0.8));
    CHECK(d1 >= d2 - 1e-9);  // pruning extends toward lower-degree edges

    CHECK(run_cmd("analyze --dataset " + ds + " --mode degree-report --grid ''").exit_code == 1);
}

TEST_CASE("analyze scores dumps a per-edge table") {
    std::string ds = fixture_dataset("scores", 10);
    glt::Graph g = glt::load_graph(ds);
    std::string out = ds + "/scores.tsv";
    CmdResult r =
        run_cmd("analyze --dataset " + ds + " --mode scores --scorer lowest_degree --out " + out);
    REQUIRE(r.exit_code == 0);
    int rows = 0;
    for (const std::string& line : csv_lines(slurp(out)))
        if (line[0] != '#') ++rows;
    CHECK(rows == g.num_edges());
}

TEST_CASE("sweep covers the grid in a deterministic csv") {
    std::string ds = fixture_dataset("sweep", 11);
    std::string dir = scratch_dir("sweepcfg");
    std::string csv = dir + "/sweep.csv";
    write_file(dir + "/sweep.ini",
               "[sweep]\ndataset = " + ds + "\nout_csv = " + csv +
                   "\nscorers = teddy, random\nk_grid = 0, 2\nseeds = 0, 1\n"
                   "[run]\nepochs = 6\nhidden = 8\n");
    CmdResult r = run_cmd("sweep --config " + dir + "/sweep.ini");
    REQUIRE(r.exit_code == 0);
    auto lines = csv_lines(slurp(csv));
    REQUIRE(lines.size() == 9);  // header + 2 scorers x 2 k x 2 seeds
    CHECK(lines[0] == glt::csv_header());
    for (std::size_t i = 1; i < lines.size(); ++i)
        CHECK(lines[i].find(",ok") != std::string::npos);

    // rerun with a different worker count: identical bytes except timestamps
    std::string csv2 = dir + "/sweep2.csv";
    write_file(dir + "/sweep2.ini",
               "[sweep]\ndataset = " + ds + "\nout_csv = " + csv2 +
                   "\nscorers = teddy, random\nk_grid = 0, 2\nseeds = 0, 1\n"
                   "[run]\nepochs = 6\nhidden = 8\n");
    CmdResult r2 = run_cmd("sweep --config " + dir + "/sweep2.ini", "GLT_THREADS=3 ");
    REQUIRE(r2.exit_code == 0);
    auto lines2 = csv_lines(slurp(csv2));
    REQUIRE(lines2.size() == lines.size());
    for (std::size_t i = 1; i < lines.size(); ++i)
        CHECK(drop_timestamp(lines2[i]) == drop_timestamp(lines[i]));

    // the k=0 teddy seed=0 cell reproduces a standalone run
    write_file(dir + "/one.ini",
               "[run]\ndataset = " + ds + "\nk = 0\nepochs = 6\nhidden = 8\nseed = 0\n");
    CmdResult one = run_cmd("run --config " + dir + "/one.ini");
    REQUIRE(one.exit_code == 0);
    CHECK(drop_timestamp(csv_lines(one.out)[1]) == drop_timestamp(lines[1]));
}

TEST_CASE("sweep records failing cells and keeps going") {
    // a dataset with no split lines loads fine but cannot be trained on
    std::string dir = scratch_dir("sweepfail");
    std::string ds = dir + "/ds";
    glt::Graph g = testutil::make_synth_dataset(10, 4, 2, 0.3, 12);
    g.train_mask.assign(10, 0);
    g.val_mask.assign(10, 0);
    g.test_mask.assign(10, 0);
    testutil::write_dataset_dir(g, ds);
    std::string csv = dir + "/sweep.csv";
    write_file(dir + "/sweep.ini", "[sweep]\ndataset = " + ds + "\nout_csv = " + csv +
                                       "\nscorers = teddy\nk_grid = 0, 1\nseeds = 0\n"
                                       "[run]\nepochs = 3\nhidden = 4\n");
    CmdResult r = run_cmd("sweep --config " + dir + "/sweep.ini");
    CHECK(r.exit_code == 0);
    auto lines = csv_lines(slurp(csv));
    REQUIRE(lines.size() == 3);
    for (std::size_t i = 1; i < lines.size(); ++i)
        CHECK(lines[i].find(",error:") != std::string::npos);
}
