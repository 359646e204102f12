#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output; // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = TRANSREC_CLI_PATH " "s + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "transrec_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string fixture_log() {
    // five users in a ring over five items; every count is 4 and every user
    // leaves two items unseen
    static const std::string path = [] {
        const auto p = (work_dir() / "log.tsv").string();
        std::ofstream f(p);
        f << "u1\ta\t1\nu1\tb\t2\nu1\tc\t3\nu1\ta\t4\n";
        f << "u2\tb\t1\nu2\tc\t2\nu2\td\t3\nu2\tb\t4\n";
        f << "u3\tc\t1\nu3\td\t2\nu3\te\t3\nu3\tc\t4\n";
        f << "u4\td\t1\nu4\te\t2\nu4\ta\t3\nu4\td\t4\n";
        f << "u5\te\t1\nu5\ta\t2\nu5\tb\t3\nu5\te\t4\n";
        return p;
    }();
    return path;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return std::string((std::istreambuf_iterator<char>(f)), {});
}

std::string prepared_dataset() {
    static const std::string path = [] {
        const auto out = work_dir() / "ds";
        const auto r = run_cli("prepare --input " + fixture_log() + " --output " + out.string() +
                               " --min-count 2");
        REQUIRE(r.exit_code == 0);
        return (out / "dataset.txt").string();
    }();
    return path;
}

std::string trained_model() {
    static const std::string path = [] {
        const auto out = (work_dir() / "model.bin").string();
        const auto r = run_cli("train --dataset " + prepared_dataset() +
                               " --model-kind transrec-l2 --out " + out +
                               " --no-grid --lambda 0.01 -k 4 --max-iters 3 --patience 3 --seed 7");
        REQUIRE(r.exit_code == 0);
        return out;
    }();
    return path;
}

} // namespace

TEST_CASE("prepare produces the hand-counted manifest and is idempotent") {
    const auto out = work_dir() / "prep";
    const std::string args = "prepare --input " + fixture_log() + " --output " + out.string() +
                             " --min-count 2";
    const auto r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    // 5 users, 5 items, 20 actions: avg 4 per user and per item
    CHECK(r.output.find("users\t5") != std::string::npos);
    CHECK(r.output.find("items\t5") != std::string::npos);
    CHECK(r.output.find("actions\t20") != std::string::npos);
    CHECK(r.output.find("avg_actions_per_user\t4.000000") != std::string::npos);
    CHECK(r.output.find("avg_actions_per_item\t4.000000") != std::string::npos);
    CHECK(r.output.find("config.min_count=2") != std::string::npos);

    const std::string manifest1 = read_file(out / "manifest.txt");
    const std::string dataset1 = read_file(out / "dataset.txt");
    const auto r2 = run_cli(args);
    REQUIRE(r2.exit_code == 0);
    CHECK(read_file(out / "manifest.txt") == manifest1);
    CHECK(read_file(out / "dataset.txt") == dataset1);
}

TEST_CASE("prepare fails cleanly on a missing file") {
    const auto r = run_cli("prepare --input " + (work_dir() / "absent.tsv").string() +
                           " --output " + (work_dir() / "x").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("train writes a model and a report reproducibly") {
    const std::string model_path = trained_model();
    CHECK(fs::exists(model_path));
    CHECK(fs::exists(model_path + ".report.txt"));

    const std::string report = read_file(model_path + ".report.txt");
    CHECK(report.find("# transrec training report") != std::string::npos);
    CHECK(report.find("config.kind=transrec-l2") != std::string::npos);
    CHECK(report.find("# selected\t0") != std::string::npos);
    CHECK(report.find("iteration\tmean_loglik\tvalidation_auc\tseconds") != std::string::npos);

    const std::string bytes = read_file(model_path);
    const auto out2 = (work_dir() / "model2.bin").string();
    const auto r = run_cli("train --dataset " + prepared_dataset() +
                           " --model-kind transrec-l2 --out " + out2 +
                           " --no-grid --lambda 0.01 -k 4 --max-iters 3 --patience 3 --seed 7");
    REQUIRE(r.exit_code == 0);
    CHECK(read_file(out2) == bytes); // bit-identical rerun
}

TEST_CASE("train runs a lambda grid and records the table") {
    const auto out = (work_dir() / "grid_model.bin").string();
    const auto r = run_cli("train --dataset " + prepared_dataset() +
                           " --model-kind fmc --out " + out +
                           " --lambda-grid 0,0.01 -k 3 --max-iters 2 --patience 2 --seed 3");
    REQUIRE(r.exit_code == 0);
    const std::string report = read_file(out + ".report.txt");
    CHECK(report.find("# grid summary") != std::string::npos);
    CHECK(report.find("selected_lambda") == std::string::npos); // table lives in the report
    CHECK(r.output.find("selected_lambda") != std::string::npos);
    // two grid rows
    CHECK(report.find("# 0\t0\t") != std::string::npos);
    CHECK(report.find("# 1\t0.01\t") != std::string::npos);
}

TEST_CASE("eval reports both tie conventions and matches the dataset") {
    const auto r = run_cli("eval --model " + trained_model() + " --dataset " +
                           prepared_dataset() + " -K 2");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("auc\t") != std::string::npos);
    CHECK(r.output.find("auc_ties_half\t") != std::string::npos);
    CHECK(r.output.find("hit_k\t2") != std::string::npos);
    CHECK(r.output.find("users_evaluated\t5") != std::string::npos);
    CHECK(r.output.find("config.split=test") != std::string::npos);

    SECTION("shape mismatch exits nonzero") {
        // a second dataset with a different catalog
        const auto log2 = (work_dir() / "log2.tsv").string();
        std::ofstream(log2) << "u1\tx\t1\nu1\ty\t2\nu1\tz\t3\nu2\tx\t1\nu2\tz\t2\nu2\ty\t3\n";
        const auto out2 = work_dir() / "ds2";
        REQUIRE(run_cli("prepare --input " + log2 + " --output " + out2.string() +
                        " --min-count 1").exit_code == 0);
        const auto bad = run_cli("eval --model " + trained_model() + " --dataset " +
                                 (out2 / "dataset.txt").string());
        CHECK(bad.exit_code == 2);
    }
}

TEST_CASE("eval writes per-user ranks on request") {
    const auto ranks = (work_dir() / "ranks.tsv").string();
    const auto r = run_cli("eval --model " + trained_model() + " --dataset " +
                           prepared_dataset() + " --ranks " + ranks);
    REQUIRE(r.exit_code == 0);
    const std::string text = read_file(ranks);
    CHECK(text.find("user_id\trank\tcandidates") != std::string::npos);
    CHECK(text.find("u1\t") != std::string::npos);
}

TEST_CASE("recommend prints ranked original ids") {
    const auto r = run_cli("recommend --model " + trained_model() +
                           " --user u1 --prev-item a --top 2");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("1\t") == 0); // first line starts with rank 1
    std::size_t lines = 0;
    for (char c : r.output)
        if (c == '\n') ++lines;
    CHECK(lines == 2);

    SECTION("exclude-seen needs the dataset") {
        const auto bad = run_cli("recommend --model " + trained_model() +
                                 " --user u1 --prev-item a --top 2 --exclude-seen");
        CHECK(bad.exit_code == 2);
        // u1 has seen a, b, c: excluding them leaves d and e
        const auto left = run_cli("recommend --model " + trained_model() +
                                  " --user u1 --prev-item a --top 5 --exclude-seen --dataset " +
                                  prepared_dataset());
        CHECK(left.exit_code == 0);
        std::size_t lines = 0;
        for (char c : left.output)
            if (c == '\n') ++lines;
        CHECK(lines == 2);
        CHECK(left.output.find("a") == std::string::npos);
    }
    SECTION("unknown ids are input errors") {
        const auto bad = run_cli("recommend --model " + trained_model() +
                                 " --user nobody --prev-item a --top 2");
        CHECK(bad.exit_code == 2);
    }
}

TEST_CASE("item-to-item workflow end to end") {
    const auto corpus = (work_dir() / "corpus.tsv").string();
    {
        std::ofstream f(corpus);
        f << "p0\tsteel hammer with oak handle\n";
        f << "p1\tsteel nails box of hammer nails\n";
        f << "p2\toak table with steel legs\n";
        f << "p3\toak chair matching table\n";
        f << "p4\tvarnish tin for oak furniture\n";
        f << "p5\tsteel screws and screwdriver\n";
    }
    const auto features = (work_dir() / "features.txt").string();
    auto r = run_cli("i2i-features --corpus " + corpus + " --out " + features + " --dim 50");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("items\t6") != std::string::npos);

    const auto edges = (work_dir() / "edges.tsv").string();
    {
        std::ofstream f(edges);
        f << "p0\tp1\np0\tp4\np1\tp0\np2\tp3\np2\tp4\np3\tp4\np3\tp2\np4\tp2\np5\tp1\np5\tp0\n";
        f << "p1\tp5\np4\tp3\n";
    }
    const auto model = (work_dir() / "i2i.bin").string();
    r = run_cli("i2i-train --edges " + edges + " --features " + features +
                " --kind transrec --out " + model +
                " --kprime 3 --no-grid --lambda 0.01 --max-iters 2 --patience 2 --seed 5");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(model));

    r = run_cli("i2i-eval --model " + model + " --edges " + edges + " --features " + features +
                " --split validation -K 3");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("auc\t") != std::string::npos);
    CHECK(r.output.find("config.split_seed=5") != std::string::npos);
}

TEST_CASE("usage errors exit with the input-error code") {
    CHECK(run_cli("train --dataset missing.txt").exit_code == 2); // missing required flags
    CHECK(run_cli("no-such-command").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
}
