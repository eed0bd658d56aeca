#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli_path() {
    const char* p = std::getenv("PROPFLOW_CLI");
    return p ? p : "";
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string dir = "cli_tmp";
    int rc = std::system(("mkdir -p " + dir).c_str());
    REQUIRE(rc == 0);
    std::string out_file = dir + "/out.txt";
    std::string cmd = cli_path() + " " + args + " > " + out_file + " 2>&1";
    int status = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream buf;
    buf << in.rdbuf();
    return {WEXITSTATUS(status), buf.str()};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("malformed instance files exit 2 and name the line") {
    REQUIRE_FALSE(cli_path().empty());
    write_file("cli_tmp_bad.txt", "nodes\nv 1\nsink t\nbogus line here\n");
    auto r = run("weights --instance cli_tmp_bad.txt --epsilon 0.2");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("line 4") != std::string::npos);
    std::remove("cli_tmp_bad.txt");
}

TEST_CASE("learn exits 3 when a capacity sits below the floor") {
    write_file("cli_tmp_low.txt",
               "nodes\na 2\nsink t\nedges\na t\ntypes\ni 0 a\n");
    write_file("cli_tmp_low.dist",
               "propflow-distribution v1\nm 4\nkind iid\ntype i 1\n");
    auto r = run("learn --instance cli_tmp_low.txt --dist cli_tmp_low.dist --samples 3 "
                 "--epsilon 0.25 --seed 1");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("'a'") != std::string::npos);
    std::remove("cli_tmp_low.txt");
    std::remove("cli_tmp_low.dist");
}

TEST_CASE("lb robustness exits 3 on an undefined size ratio") {
    write_file("cli_tmp_base.txt", "machines 2\njob 2 1\njob 1 1 2\n");
    write_file("cli_tmp_pert.txt", "machines 2\njob 2 1\n");  // a type vanished
    auto r = run("lb --mode robust --schedule cli_tmp_base.txt --perturbed cli_tmp_pert.txt "
                 "--epsilon 0.25");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("UndefinedRatio") != std::string::npos);
    std::remove("cli_tmp_base.txt");
    std::remove("cli_tmp_pert.txt");
}

TEST_CASE("learning from a single sample is degenerate but valid") {
    write_file("cli_tmp_one.txt",
               "nodes\na 30\nb 30\nsink t\nedges\na t\nb t\ntypes\ni 0 a b\nj 0 a\n");
    write_file("cli_tmp_one.dist",
               "propflow-distribution v1\nm 20\nkind iid\ntype i 0.5\ntype j 0.5\n");
    auto r = run("learn --instance cli_tmp_one.txt --dist cli_tmp_one.dist --samples 1 "
                 "--epsilon 0.25 --seed 4 --trials 10");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("samples=1") != std::string::npos);
    std::remove("cli_tmp_one.txt");
    std::remove("cli_tmp_one.dist");
}

TEST_CASE("weights on a tiny chain reports ratio 1") {
    write_file("cli_tmp_chain.txt", "nodes\nv 3\nsink t\nedges\nv t\ntypes\ni 2 v\n");
    auto r = run("weights --instance cli_tmp_chain.txt --epsilon 0.2 --with-oracle");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("ratio=1") != std::string::npos);
    std::remove("cli_tmp_chain.txt");
}
