#include "moebius_cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace moebius;

namespace {

struct Run {
    int code;
    std::string out, err;
    json j() const { return json::parse(out); }
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "moebius");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("moebius_test_" + name)).string();
}

} // namespace

TEST(CliParsing, ComplexNumbers)
{
    EXPECT_EQ(cli::parse_complex("2"), Complex(2, 0));
    EXPECT_EQ(cli::parse_complex("-0.5i"), Complex(0, -0.5L));
    EXPECT_EQ(cli::parse_complex("1+2i"), Complex(1, 2));
    EXPECT_EQ(cli::parse_complex("1.5-0.25i"), Complex(1.5L, -0.25L));
    EXPECT_EQ(cli::parse_complex("i"), Complex(0, 1));
    EXPECT_EQ(cli::parse_complex("-i"), Complex(0, -1));
    EXPECT_EQ(cli::parse_complex("1e-3+2e+1i"), Complex(1e-3L, 20));
    EXPECT_EQ(cli::parse_complex("(1,2)"), Complex(1, 2));
    EXPECT_THROW(cli::parse_complex("1+2j"), cli::UsageError);
}

TEST(CliParsing, RealsAndRationals)
{
    EXPECT_EQ(cli::parse_real("8/3"), 8.0L / 3);
    EXPECT_THROW(cli::parse_real("abc"), cli::UsageError);
    EXPECT_EQ(cli::parse_rational("3/5"), Rational(3, 5));
    EXPECT_EQ(cli::parse_rational("0.6"), Rational(3, 5));
    EXPECT_EQ(cli::parse_rational("-2"), Rational(-2));
    EXPECT_EQ(cli::parse_params("a=1,b=8/3,c=2/9").at("b"), "8/3");
    EXPECT_THROW(cli::parse_params("a1"), cli::UsageError);
}

TEST(Cli, MembershipExample)
{
    auto r = run({"membership", "--map", "[[1,1],[0,1]]", "-b", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = r.j();
    EXPECT_TRUE(j["in_U"].get<bool>());
    EXPECT_EQ(j["k"], 0);
}

TEST(Cli, MissingEpsIsAUsageError)
{
    auto r = run({"approximate", "lft", "--system", "LFT3", "--params", "a=1,b=2,c=3", "--target", "[[1,0],[0,1]]"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--eps"), std::string::npos);
    EXPECT_NE(r.err.find("Usage:"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UnknownSystemAndMalformedTarget)
{
    EXPECT_EQ(run({"approximate", "lft", "--system", "LFT9", "--target", "[[1,0],[0,1]]", "--eps", "1e-3"}).code, 2);
    EXPECT_EQ(run({"approximate", "lft", "--system", "LFT2", "--params", "a=1,b=2", "--target", "[[1,0],[0,1]",
                   "--eps", "1e-3"})
                  .code,
              2);
    EXPECT_EQ(run({"approximate", "lft", "--system", "LFT2", "--params", "a=1,b=2", "--target", "/nonexistent.json",
                   "--eps", "1e-3"})
                  .code,
              2);
    EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, ApproximateLftFromFileRoundTrips)
{
    std::string path = temp_path("target.json");
    std::ofstream(path) << R"({"field":"real","m":[[3,1],[1,2]]})";
    auto r = run({"approximate", "lft", "--system", "LFT3", "--params", "a=1,b=2,c=3", "--target", path, "--eps",
                  "1e-4", "--exact-check"});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    auto j = r.j();
    EXPECT_LE(j["error"].get<double>(), 1e-4);
    EXPECT_TRUE(j["within_eps"].get<bool>());
    EXPECT_TRUE(j["exact_check"]["round_trip"].get<bool>());

    auto sys = lft3<Real>(1, 2, 3);
    auto ev = evaluate(parse_word(j["word"].get<std::string>()), sys);
    Real err = proj_distance(ev.projective, ProjectiveMap<Real>::lft(3, 1, 1, 2));
    EXPECT_NEAR(static_cast<double>(err), j["error"].get<double>(), 1e-15);
    std::filesystem::remove(path);
}

TEST(Cli, DeterministicAcrossRunsAndJobs)
{
    std::vector<std::string> args{"approximate", "lft", "--system", "LFT2", "--params", "a=1,b=2", "--target",
                                  R"({"targets":[[[1,0],[0.3,1]],[[1,0.5],[0.2,1]],[[2,1],[1,1]]]})", "--eps",
                                  "1e-6"};
    auto a = run(args), b = run(args);
    args.insert(args.end(), {"--jobs", "3"});
    auto c = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
    EXPECT_EQ(a.j()["reports"].size(), 3u);
}

TEST(Cli, ConvergenceCsv)
{
    std::string path = temp_path("conv.csv");
    auto r = run({"approximate", "lft", "--system", "LFT2", "--params", "a=1,b=2", "--target", "[[1,0.5],[0.2,1]]",
                  "--eps", "1e-6", "--max-depth", "64", "--csv", path});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "depth,error");
    int rows = 0;
    while (std::getline(in, line)) {
        auto comma = line.find(',');
        ASSERT_NE(comma, std::string::npos);
        EXPECT_GT(std::stod(line.substr(comma + 1)), 0);
        ++rows;
    }
    EXPECT_EQ(rows, 6);
    std::filesystem::remove(path);
}

TEST(Cli, MatrixTargets)
{
    auto r = run({"approximate", "matrix", "--system", "MAT3+", "--params", "a=1,b=8/3,c=2/9", "--target",
                  "[[1,2],[3,4]]", "--eps", "1e-2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LE(r.j()["error"].get<double>(), 1e-2);

    auto c = run({"approximate", "matrix", "--system", "EXC2", "--params", "r=4", "--height", "0", "--target",
                  R"({"field":"complex","m":[[[0,1],0],[0,[0,1]]]})", "--eps", "1e-2"});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_LE(c.j()["error"].get<double>(), 1e-2);
}

TEST(Cli, DomainErrorsExitOneWithTheErrorName)
{
    auto r = run({"approximate", "matrix", "--system", "EXC2", "--params", "r=4", "--target",
                  "[[[0,1],0],[0,[0,1]]]", "--eps", "1e-2"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.j()["error"], "IndependenceSuspect");

    auto m = run({"membership", "--map", "[[1,2],[3,1]]", "-b", "2"});
    EXPECT_EQ(m.code, 1);
    EXPECT_EQ(m.j()["error"], "NotInDomain");
}

TEST(Cli, VerifyIdentities)
{
    auto ok = run({"verify-identities", "--exact"});
    ASSERT_EQ(ok.code, 0);
    auto j = ok.j();
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j["checks"][0]["value"], 0.0);

    auto bad = run({"verify-identities", "--exr-a", "0.6"});
    EXPECT_EQ(bad.code, 1);
    auto b = bad.j();
    EXPECT_EQ(b["error"], "IdentityFailure");
    EXPECT_EQ(b["failed"][0], "ABA^3BA = diag(-2/9, 1)");
}

TEST(Cli, ExpandAndKronecker)
{
    auto e = run({"expand", "--value", "5.75", "-b", "2"});
    ASSERT_EQ(e.code, 0);
    EXPECT_EQ(e.j()["exponents"], json::parse("[2,0,-1,-2]"));

    auto c = run({"expand", "--value", "-1", "--r", "2"});
    ASSERT_EQ(c.code, 0);
    EXPECT_EQ(c.j()["exponents"], json::parse("[-2,-2,-2,-2]"));

    auto k = run({"kronecker", "ratio", "--target", "5", "-b", "2", "-c", "3", "--tol", "0.05"});
    ASSERT_EQ(k.code, 0);
    EXPECT_LE(k.j()["rel_err"].get<double>(), 0.05);

    auto s = run({"kronecker", "simul", "--theta1", "0.6180339887", "--theta2", "1.4142135624", "--phi1", "0.5",
                  "--phi2", "0.25", "--eps", "0.01"});
    ASSERT_EQ(s.code, 0) << s.out;

    auto i = run({"kronecker", "independence", "--theta1", "0.5", "--theta2", "1.41421356237", "--height", "10"});
    ASSERT_EQ(i.code, 0);
    EXPECT_EQ(i.j()["verdict"], "RelationFound");
}

TEST(Cli, OrbitCommands)
{
    auto c = run({"orbit", "closure", "--base", "2,1", "--point", "10,1", "-a", "1", "-b", "2"});
    ASSERT_EQ(c.code, 0);
    EXPECT_FALSE(c.j()["contained"].get<bool>());

    std::string path = temp_path("cells.csv");
    auto s = run({"orbit", "sample", "--depth", "3", "--grid", "5", "--csv", path});
    ASSERT_EQ(s.code, 0);
    EXPECT_EQ(s.j()["grid_n"], 5);
    std::ifstream in(path);
    int lines = 0;
    for (std::string line; std::getline(in, line);)
        ++lines;
    EXPECT_EQ(lines, 26);
    std::filesystem::remove(path);

    auto g = run({"orbit", "region", "--base", "2,1", "-a", "1", "-n", "8"});
    ASSERT_EQ(g.code, 0);
    EXPECT_EQ(g.j()["curves"].size(), 4u);
}

TEST(Cli, EnvironmentOverridesDefaults)
{
    ::setenv("MOEBIUS_MAX_TERMS", "3", 1);
    auto r = run({"expand", "--value", "0.3333", "-b", "2"});
    ::unsetenv("MOEBIUS_MAX_TERMS");
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.j()["error"], "BudgetExceeded");
    EXPECT_EQ(run({"expand", "--value", "0.3333", "-b", "2"}).code, 0);
}
