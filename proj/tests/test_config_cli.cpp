#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>

#include "rofu/cli.hpp"
#include "rofu/config.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
}

const char* kMinimalMab =
    "[env]\n"
    "kind = mab\n"
    "means = 0.2,0.8\n"
    "noise_std = 0.1\n"
    "[run]\n"
    "horizon = 10\n"
    "seeds = 2\n"
    "output = cfgtest_out\n"
    "[agent ucb]\n"
    "kind = ucb1\n"
    "[agent greedy]\n"
    "kind = greedy\n"
    "train_steps = 5\n"
    "train_step_size = 0.3\n";

}  // namespace

TEST_CASE("config: minimal file parses with expected fields") {
    auto cfg = rofu::parse_experiment_config(kMinimalMab);
    CHECK(cfg.horizon == 10);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2});
    CHECK(cfg.env.kind == rofu::EnvSpec::Kind::Mab);
    CHECK(cfg.env.arm_count == 2);
    CHECK(cfg.agent_sections.size() == 2);
}

TEST_CASE("config: missing horizon names the key") {
    const std::string text =
        "[env]\nkind = mab\nmeans = 0.1,0.9\n[run]\nseeds = 2\n[agent a]\nkind = ucb1\n";
    try {
        rofu::parse_experiment_config(text);
        FAIL("expected ConfigError");
    } catch (const rofu::ConfigError& e) {
        CHECK(std::string(e.what()).find("horizon") != std::string::npos);
    }
}

TEST_CASE("config: unknown keys are rejected with their line number") {
    const std::string text =
        "[env]\nkind = mab\nmeans = 0.1,0.9\nnois_std = 0.1\n[run]\nhorizon = 5\n[agent a]\nkind = ucb1\n";
    try {
        rofu::parse_experiment_config(text);
        FAIL("expected ConfigError");
    } catch (const rofu::ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("nois_std") != std::string::npos);
        CHECK(msg.find("line 4") != std::string::npos);
    }
}

TEST_CASE("config: canonical text round-trips to an identical configuration") {
    auto cfg = rofu::parse_experiment_config(kMinimalMab);
    auto again = rofu::parse_experiment_config(cfg.to_text());
    CHECK(cfg.to_json() == again.to_json());
    CHECK(cfg.to_text() == again.to_text());
}

TEST_CASE("config: every bundled preset parses and builds its agents") {
    for (const auto& name : rofu::preset_names()) {
        INFO(name);
        auto text = rofu::preset_text(name);
        REQUIRE(text.has_value());
        if (name == "dataset_csv") continue;  // needs a user-provided file
        auto cfg = rofu::parse_experiment_config(*text);
        for (const auto& section : cfg.agent_sections)
            CHECK_NOTHROW(rofu::build_agent_factory(section, cfg.env));
    }
}

TEST_CASE("config: mlp_table2 preset matches the simulator card") {
    auto cfg = rofu::parse_experiment_config(*rofu::preset_text("mlp_table2"));
    CHECK(cfg.env.kind == rofu::EnvSpec::Kind::MlpSim);
    CHECK(cfg.env.context_dim == 10);
    CHECK(cfg.env.arm_count == 10);
    CHECK(cfg.env.noise_std == 0.05);
    CHECK(cfg.horizon == 5000);
    CHECK(cfg.seeds.size() == 16);
}

TEST_CASE("cmd_run: minimal mab config writes per-agent curves") {
    std::filesystem::remove_all("cfgtest_out");
    write_file("cfgtest_min.cfg", kMinimalMab);
    CHECK(rofu::cli::cmd_run("cfgtest_min.cfg") == 0);
    CHECK(std::filesystem::exists("cfgtest_out/ucb/curves.csv"));
    CHECK(std::filesystem::exists("cfgtest_out/greedy/curves.csv"));
    CHECK(std::filesystem::exists("cfgtest_out/ucb/run_meta.json"));

    // config echo in run_meta re-parses to the same configuration
    auto meta = nlohmann::json::parse(read_file("cfgtest_out/ucb/run_meta.json"));
    auto echoed = rofu::parse_experiment_config(meta["config"]["text"].get<std::string>());
    auto original = rofu::parse_experiment_config(kMinimalMab);
    CHECK(echoed.to_json() == original.to_json());

    // determinism: re-running produces byte-identical curves
    const std::string first = read_file("cfgtest_out/ucb/curves.csv");
    CHECK(rofu::cli::cmd_run("cfgtest_min.cfg") == 0);
    CHECK(read_file("cfgtest_out/ucb/curves.csv") == first);
    std::filesystem::remove("cfgtest_min.cfg");
}

TEST_CASE("cmd_run: config errors exit 2") {
    write_file("cfgtest_bad.cfg", "[env]\nkind = mab\n[run]\nseeds = 2\n[agent a]\nkind = ucb1\n");
    CHECK(rofu::cli::cmd_run("cfgtest_bad.cfg") == 2);
    CHECK(rofu::cli::cmd_run("no_such_file.cfg") == 2);
    std::filesystem::remove("cfgtest_bad.cfg");
}

TEST_CASE("cmd_run: flag overrides replace run keys") {
    std::filesystem::remove_all("cfgtest_ovr");
    write_file("cfgtest_min2.cfg", kMinimalMab);
    rofu::cli::Overrides ov;
    ov.horizon = 5;
    ov.seeds = 3;
    ov.out = "cfgtest_ovr";
    CHECK(rofu::cli::cmd_run("cfgtest_min2.cfg", ov) == 0);
    const std::string curves = read_file("cfgtest_ovr/ucb/curves.csv");
    CHECK(std::count(curves.begin(), curves.end(), '\n') == 6);  // header + 5 rounds
    auto meta = nlohmann::json::parse(read_file("cfgtest_ovr/ucb/run_meta.json"));
    CHECK(meta["seeds"].size() == 3);
    std::filesystem::remove("cfgtest_min2.cfg");
    std::filesystem::remove_all("cfgtest_ovr");
}

TEST_CASE("cmd_verify: unknown suite exits 2") {
    CHECK(rofu::cli::cmd_verify("definitely_not_a_suite") == 2);
    CHECK(rofu::cli::cmd_verify("linalg") == 0);
}

TEST_CASE("cmd_plotdata merges per-agent curves") {
    // reuse the output of the minimal run
    REQUIRE(std::filesystem::exists("cfgtest_out/ucb/curves.csv"));
    CHECK(rofu::cli::cmd_plotdata("cfgtest_out") == 0);
    const std::string body = read_file("cfgtest_out/comparison.csv");
    std::stringstream ss(body);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "round,greedy_mean,greedy_std,ucb_mean,ucb_std");
    int rows = 0;
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 10);

    // byte-stable on re-run
    CHECK(rofu::cli::cmd_plotdata("cfgtest_out") == 0);
    CHECK(read_file("cfgtest_out/comparison.csv") == body);

    // mismatched horizons are rejected, naming both lengths
    std::filesystem::create_directories("cfgtest_out/short");
    write_file("cfgtest_out/short/curves.csv",
               "round,mean_regret,std_regret,mean_bonus\n1,1,0,0\n2,2,0,0\n");
    CHECK(rofu::cli::cmd_plotdata("cfgtest_out") == 1);
    std::filesystem::remove_all("cfgtest_out");
}

TEST_CASE("cmd_plotdata on an empty directory exits 1") {
    std::filesystem::create_directories("cfgtest_empty");
    CHECK(rofu::cli::cmd_plotdata("cfgtest_empty") == 1);
    std::filesystem::remove_all("cfgtest_empty");
}
