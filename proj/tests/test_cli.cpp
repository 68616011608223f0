#include "helpers.hpp"

#include "json.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = GDSTHERMO_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               fs::path("gdsthermo_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
    const int rc = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_reference_model(const fs::path& p, json patch = {}) {
    json m = {{"schema", "gdsthermo-model-v1"},
              {"n", 1},
              {"hbar", 1.0},
              {"beta", 1.0},
              {"B", {{1.0, 0.0}, {0.0, 1.0}}},
              {"gamma", {0.2}}};
    m.update(patch);
    std::ofstream(p) << m.dump(2);
}

} // namespace

TEST_CASE("cli build produces an audited report") {
    TempDir tmp;
    const auto model = tmp.path / "model.json";
    const auto out = tmp.path / "report.json";
    write_reference_model(model);
    REQUIRE(run("build " + model.string() + " -o " + out.string()) == 0);

    const json rep = json::parse(slurp(out));
    REQUIRE(rep["schema"] == "gdsthermo-report-v1");
    REQUIRE(rep["audit"]["verdict"] == true);
    REQUIRE(rep["fluctuation_dissipation"]["pass"] == true);
    const double k = 0.5 / std::tanh(0.5);
    REQUIRE(rep["D"][0][0].get<double>() == Catch::Approx(0.2 * k).epsilon(1e-12));
    REQUIRE(rep["C"][0][1].get<double>() == Catch::Approx(-0.1).epsilon(1e-12));
    REQUIRE(rep["qome"]["nbar"][0].get<double>() ==
            Catch::Approx(1.0 / std::expm1(1.0)).epsilon(1e-10));
    REQUIRE(rep["lindblad_vectors"].size() == 2);
}

TEST_CASE("cli input validation exits with code 2") {
    TempDir tmp;
    const auto model = tmp.path / "model.json";

    std::ofstream(model) << "{ not json";
    REQUIRE(run("build " + model.string()) == 2);

    write_reference_model(model, {{"beta", -1.0}});
    REQUIRE(run("build " + model.string()) == 2);

    write_reference_model(model, {{"gamma", {0.2, 0.3}}});
    REQUIRE(run("build " + model.string()) == 2);

    // non-positive-definite Hessian
    write_reference_model(model, {{"B", {{1.0, 0.0}, {0.0, -1.0}}}});
    REQUIRE(run("build " + model.string()) == 2);

    REQUIRE(run("build " + (tmp.path / "missing.json").string()) == 2);
    REQUIRE(run("frobnicate") == 2);

    write_reference_model(model);
    REQUIRE(run("evolve " + model.string() + " --dt -0.5") == 2);
}

TEST_CASE("cli evolve writes a trajectory that thermalizes") {
    TempDir tmp;
    const auto model = tmp.path / "model.json";
    const auto csv = tmp.path / "traj.csv";
    write_reference_model(model);
    REQUIRE(run("evolve " + model.string() + " --tmax 60 --sample-dt 1 -o " +
                csv.string()) == 0);

    std::ifstream in(csv);
    std::string line, last;
    std::getline(in, line);
    REQUIRE(line == "# gdsthermo-traj-v1");
    std::getline(in, line);
    REQUIRE(line.rfind("t,mean0,mean1,V0_0,V0_1,V1_1,kappa_min", 0) == 0);
    while (std::getline(in, line))
        if (!line.empty()) last = line;

    std::vector<double> cells;
    std::stringstream ss(last);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == 7);
    const double k = 0.5 / std::tanh(0.5);
    REQUIRE(cells[0] == Catch::Approx(60.0));
    REQUIRE(cells[3] == Catch::Approx(k).margin(1e-6)); // V00
    REQUIRE(std::abs(cells[4]) < 1e-6);                 // V01
    REQUIRE(cells[5] == Catch::Approx(k).margin(1e-6)); // V11
    REQUIRE(cells[6] == Catch::Approx(k).margin(1e-6)); // kappa_min
}

TEST_CASE("cli diffusive regime refuses to evolve without the flag") {
    TempDir tmp;
    const auto model = tmp.path / "model.json";
    write_reference_model(model, {{"regime", "diffusive"}, {"gamma", {0.5}}});
    REQUIRE(run("evolve " + model.string()) == 1);
    REQUIRE(run("evolve " + model.string() + " --allow-nonstationary --tmax 1") ==
            0);

    const auto out = tmp.path / "build.json";
    REQUIRE(run("build " + model.string() + " -o " + out.string()) == 0);
    const json rep = json::parse(slurp(out));
    REQUIRE(rep["stationary"] == false);
    REQUIRE(rep["note"].get<std::string>().find("no stationary state") !=
            std::string::npos);
}

TEST_CASE("cli audit verdicts and the tolerance override") {
    TempDir tmp;
    const auto model = tmp.path / "model.json";
    const auto out = tmp.path / "audit.json";
    write_reference_model(model);
    REQUIRE(run("audit " + model.string() + " -o " + out.string()) == 0);
    REQUIRE(json::parse(slurp(out))["verdict"] == true);

    // hand-broken Lindblad vectors: rotate one channel's balance
    const double s = std::sqrt(0.2 * (1.0 + 1.0 / std::expm1(1.0)));
    const double r = 1.3 * s * std::exp(-0.5);
    const double a = s / std::sqrt(2.0), b = r / std::sqrt(2.0);
    json lv = {{{a, 0.0}, {0.0, a}}, {{b, 0.0}, {0.0, -b}}};
    write_reference_model(model, {{"lindblad_vectors", lv}});
    REQUIRE(run("audit " + model.string() + " -o " + out.string()) == 1);
    REQUIRE(json::parse(slurp(out))["verdict"] == false);

    // an absurdly loose tolerance flips the verdict back
    const int rc = std::system(("GDS_THERMO_TOL=1e6 " + kCli + " audit " +
                                model.string() + " -o " + out.string() +
                                " >/dev/null 2>&1")
                                   .c_str());
    REQUIRE(WEXITSTATUS(rc) == 0);
}

TEST_CASE("cli sweep covers both temperature limits") {
    TempDir tmp;
    const auto model = tmp.path / "model.json";
    const auto csv = tmp.path / "sweep.csv";
    write_reference_model(model);
    REQUIRE(run("sweep " + model.string() +
                " --beta-min 1e-3 --beta-max 30 --points 9 -j 4 -o " +
                csv.string()) == 0);

    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "# gdsthermo-sweep-v1");
    std::getline(in, line);
    REQUIRE(line ==
            "beta,k_th0,D_norm,C_norm,high_T_residual,low_T_residual");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
        rows.push_back(cells);
    }
    REQUIRE(rows.size() == 9);
    REQUIRE(rows.front()[0] == Catch::Approx(1e-3));
    REQUIRE(rows.back()[0] == Catch::Approx(30.0));
    REQUIRE(rows.front()[4] < 1e-7);  // classical limit reached
    REQUIRE(rows.back()[5] < 1e-12);  // ground-state limit reached
    // monotone beta and k_th columns
    for (size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i][0] > rows[i - 1][0]);
        REQUIRE(rows[i][1] < rows[i - 1][1]);
    }
}

TEST_CASE("cli oracle compares against the fock integration") {
    TempDir tmp;
    const auto model = tmp.path / "model.json";
    const auto out = tmp.path / "oracle.json";
    write_reference_model(model);
    // short horizon keeps the unit test quick; the acceptance suite runs the
    // full-length comparison
    REQUIRE(run("oracle " + model.string() +
                " --cutoff 30 --tmax 2 -o " + out.string()) == 0);
    const json rep = json::parse(slurp(out));
    REQUIRE(rep["verdict"] == true);
    REQUIRE(rep["max_moment_deviation"].get<double>() < 1e-4);
    REQUIRE(rep["gibbs_residual"].get<double>() < 1e-5);
    REQUIRE(rep["gns_defect"].get<double>() < 1e-6);

    write_reference_model(model, {{"n", 2},
                                  {"B",
                                   {{1.0, 0.0, 0.0, 0.0},
                                    {0.0, 1.5, 0.0, 0.0},
                                    {0.0, 0.0, 1.0, 0.0},
                                    {0.0, 0.0, 0.0, 1.5}}},
                                  {"gamma", {0.2, 0.3}}});
    REQUIRE(run("oracle " + model.string()) == 2); // needs --experimental
}
