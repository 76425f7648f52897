#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace cc = curveclust;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("curveclust_cli_") + info->name() + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    /// Runs the binary with `args`; stdout goes to out.txt, stderr to err.txt.
    int run(const std::string& args, const std::string& env = "")
    {
        const std::string cmd = env + " \"" CURVECLUST_BIN "\" " + args + " >\"" + path("out.txt") + "\" 2>\"" +
                                path("err.txt") + "\"";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    static std::string slurp(const std::string& file)
    {
        std::ifstream in(file);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }
    std::string out() const { return slurp(path("out.txt")); }
    std::string err() const { return slurp(path("err.txt")); }

    /// Two order-1 curves from the order1 suite, 300 points each.
    std::string two_curve_csv()
    {
        const cc::SuiteCase sc = cc::suite("order1", 21)[0];
        const std::string file = path("two.csv");
        cc::write_csv(cc::generate(sc.specs, 21), file);
        return file;
    }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, HelpExitsZero)
{
    EXPECT_EQ(run("--help"), 0);
    EXPECT_NE(out().find("cluster"), std::string::npos);
}

TEST_F(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run(""), 2); }

TEST_F(Cli, GenerateRabbit)
{
    ASSERT_EQ(run("generate --preset rabbit --sigma 0.05 --count 500 --seed 1 --out " + path("r.csv")), 0) << err();
    const cc::Dataset ds = cc::read_csv(path("r.csv"));
    EXPECT_EQ(ds.size(), 500);
    EXPECT_EQ(ds.dim(), 2);
    const auto summary = nlohmann::json::parse(out());
    EXPECT_EQ(summary["points"], 500);
}

TEST_F(Cli, GenerateTwoCirclesLabels)
{
    ASSERT_EQ(run("generate --preset two-circles --count 100 --seed 2 --out " + path("c.csv")), 0) << err();
    const cc::Dataset ds = cc::read_csv(path("c.csv"));
    ASSERT_TRUE(ds.labels.has_value());
    EXPECT_EQ(cc::cluster_sizes(*ds.labels, 2), (std::vector<long>{100, 100}));
}

TEST_F(Cli, GenerateToStdoutIsDeterministic)
{
    ASSERT_EQ(run("generate --preset circle --count 20 --seed 4"), 0);
    const std::string first = out();
    ASSERT_EQ(run("generate --preset circle --count 20 --seed 4"), 0);
    EXPECT_EQ(out(), first);
    EXPECT_EQ(first.rfind("x1,x2,label\n", 0), 0u);
}

TEST_F(Cli, GenerateErrors)
{
    EXPECT_NE(run("generate --preset banana --out " + path("x.csv")), 0);
    EXPECT_NE(err().find("rabbit"), std::string::npos);
    EXPECT_EQ(run("generate --preset rabbit --curve-file " + path("m.json")), 2);
    EXPECT_EQ(run("generate --count 5"), 2);
}

TEST_F(Cli, ClusterMcecRecoversCurves)
{
    const std::string csv = two_curve_csv();
    ASSERT_EQ(run("cluster --in " + csv + " --method mcec --k 4 --starts 16 --seed 3 --out-model " + path("m.json") +
                  " --out-report " + path("rep.json")),
              0)
        << err();
    const auto report = nlohmann::json::parse(slurp(path("rep.json")));
    EXPECT_GE(report["best"]["rand"].get<double>(), 0.995);
    EXPECT_EQ(report["starts"].size(), 16u);
    const cc::MixtureState model = cc::load_model(path("m.json"));
    EXPECT_EQ(model.active_count(), report["best"]["active_clusters"].get<int>());

    ASSERT_EQ(run("cluster --in " + csv + " --method gmm --k 4 --starts 16 --seed 3 --out-report " + path("g.json")), 0)
        << err();
    const auto gmm = nlohmann::json::parse(slurp(path("g.json")));
    EXPECT_LT(gmm["best"]["score"]["mle"].get<double>(), report["best"]["score"]["mle"].get<double>());
}

TEST_F(Cli, ClusterReportsAreReproducible)
{
    const std::string csv = two_curve_csv();
    ASSERT_EQ(run("cluster --in " + csv + " --k 2 --starts 1 --seed 7 --out-report " + path("a.json")), 0) << err();
    ASSERT_EQ(run("cluster --in " + csv + " --k 2 --starts 1 --seed 7 --out-report " + path("b.json")), 0) << err();
    EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
    const auto report = nlohmann::json::parse(slurp(path("a.json")));
    EXPECT_EQ(report["config"]["trig_convention"], "neg:cos,zero:one,pos:sin");
    EXPECT_FALSE(report["starts"][0].contains("seconds"));
}

TEST_F(Cli, ClusterErrors)
{
    EXPECT_EQ(run("cluster --in " + path("missing.csv")), 2);
    const std::string csv = two_curve_csv();
    EXPECT_EQ(run("cluster --in " + csv + " --method kmeans"), 2);
    // Too many clusters for the data: every start fails.
    std::ofstream(path("tiny.csv")) << "x1,x2\n0,0\n1,0\n0,1\n1,1\n0.5,0.5\n";
    EXPECT_EQ(run("cluster --in " + path("tiny.csv") + " --k 3 --starts 2"), 1);
}

TEST_F(Cli, DensitySvgAndCsv)
{
    const std::string csv = two_curve_csv();
    ASSERT_EQ(run("cluster --in " + csv + " --k 2 --starts 2 --out-model " + path("m.json")), 0) << err();
    ASSERT_EQ(run("density --model " + path("m.json") + " --grid 120x60 --out " + path("d.svg")), 0) << err();
    const std::string svg = slurp(path("d.svg"));
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("viewBox=\"0 0 120 60\""), std::string::npos);

    ASSERT_EQ(run("density --model " + path("m.json") + " --grid 200x200 --format csv --out " + path("d.csv")), 0)
        << err();
    const auto summary = nlohmann::json::parse(out());
    EXPECT_NEAR(summary["mass"].get<double>(), 1.0, 0.01);
    std::ifstream in(path("d.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 200 * 200);

    ASSERT_EQ(run("density --model " + path("m.json") + " --points " + csv + " --out " + path("p.svg")), 0) << err();
    EXPECT_NE(slurp(path("p.svg")).find("class=\"point\""), std::string::npos);
}

TEST_F(Cli, DensityErrors)
{
    const std::string csv = two_curve_csv();
    ASSERT_EQ(run("cluster --in " + csv + " --k 2 --starts 1 --out-model " + path("m.json")), 0) << err();
    EXPECT_EQ(run("density --model " + path("m.json") + " --bbox 1,1,0,1 --out " + path("d.svg")), 2);
    EXPECT_EQ(run("density --model " + path("m.json") + " --bbox 0,1,0 --out " + path("d.svg")), 2);
    EXPECT_EQ(run("density --model " + path("m.json") + " --grid 10by10 --out " + path("d.svg")), 2);
    std::ofstream(path("bad.json")) << "{\"schema\": \"curveclust.model\"}";
    EXPECT_EQ(run("density --model " + path("bad.json") + " --out " + path("d.svg")), 1);
    EXPECT_NE(err().find("schema_version"), std::string::npos);
}

TEST_F(Cli, BenchWritesTables)
{
    ASSERT_EQ(run("bench --suite order1 --seed 1 --starts 2 --out-dir " + path("bench")), 0) << err();
    const std::string md = slurp(path("bench/bench_order1.md"));
    EXPECT_NE(md.find("| case | method |"), std::string::npos);
    const auto j = nlohmann::json::parse(slurp(path("bench/bench_order1.json")));
    EXPECT_EQ(j["rows"].size(), 6u);
    EXPECT_EQ(run("bench --suite order7"), 2);
}

TEST_F(Cli, ThreadsFromEnvironmentGiveSameReport)
{
    const std::string csv = two_curve_csv();
    ASSERT_EQ(run("cluster --in " + csv + " --k 3 --starts 3 --seed 5 --out-report " + path("a.json")), 0);
    ASSERT_EQ(run("cluster --in " + csv + " --k 3 --starts 3 --seed 5 --out-report " + path("b.json"),
                  "CURVECLUST_THREADS=3"),
              0);
    const auto a = nlohmann::json::parse(slurp(path("a.json")));
    const auto b = nlohmann::json::parse(slurp(path("b.json")));
    EXPECT_EQ(a["config"]["threads"], 1);
    EXPECT_EQ(b["config"]["threads"], 3);
    EXPECT_EQ(a["starts"], b["starts"]);
    EXPECT_EQ(a["best_start"], b["best_start"]);
}
