#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace
{
    struct Run
    {
        int code;
        std::string out, err;
    };

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    struct Scratch
    {
        fs::path dir = fs::temp_directory_path() / ("cqm-cli-test-" + std::to_string(::getpid()));
        Scratch()
        {
            fs::create_directories(dir / "cache");
            ::setenv("CQM_CACHE_DIR", (dir / "cache").c_str(), 1);
        }
        ~Scratch()
        {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    };

    fs::path scratch()
    {
        static Scratch s;
        return s.dir;
    }

    std::string quote(const std::string &s)
    {
        std::string q = "'";
        for (char c : s)
            q += c == '\'' ? std::string("'\\''") : std::string(1, c);
        return q + "'";
    }

    Run run(const std::vector<std::string> &args)
    {
        auto err = scratch() / "stderr.txt";
        std::string cmd = quote(CQM_TOOL);
        for (const auto &a : args)
            cmd += " " + quote(a);
        cmd += " 2>" + quote(err.string());
        FILE *p = ::popen(cmd.c_str(), "r");
        REQUIRE(p != nullptr);
        std::string out;
        char buf[4096];
        for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;)
            out.append(buf, n);
        int status = ::pclose(p);
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, slurp(err)};
    }
} // namespace

TEST_CASE("fixtures replay through the command line")
{
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(fs::path(FIXTURE_DIR) / "cli"))
        if (e.path().extension() == ".json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    REQUIRE(files.size() >= 20);

    for (const auto &f : files)
    {
        INFO("fixture " << f.filename().string());
        auto fx = nlohmann::json::parse(slurp(f));
        auto r = run(fx["args"].get<std::vector<std::string>>());
        CHECK(r.code == fx["exit_code"].get<int>());
        if (r.code != 0)
        {
            // the failure block is repeated on stderr as one JSON line
            auto block = nlohmann::json::parse(r.err);
            CHECK(block.contains("failure"));
        }
        if (fx.contains("stdout_file"))
            CHECK(r.out == slurp(f.parent_path() / fx["stdout_file"].get<std::string>()));
        if (fx.contains("expect"))
        {
            auto doc = nlohmann::json::parse(r.out);
            for (const auto &[ptr, want] : fx["expect"].items())
            {
                INFO("pointer " << ptr);
                nlohmann::json::json_pointer jp(ptr);
                REQUIRE(doc.contains(jp));
                CHECK(doc[jp] == want);
            }
        }
    }
}

TEST_CASE("output is byte-stable across threads and cache state")
{
    auto a = run({"cqs", "--dim", "3", "--steps", "1", "--threads", "1", "--out", (scratch() / "a.json").string()});
    auto b = run({"cqs", "--dim", "3", "--steps", "1", "--threads", "4", "--out", (scratch() / "b.json").string()});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(slurp(scratch() / "a.json") == slurp(scratch() / "b.json"));

    auto cold = run({"group", "--dim", "2", "--no-cache"});
    auto warm1 = run({"group", "--dim", "2"});
    auto warm2 = run({"group", "--dim", "2", "--threads", "3"});
    CHECK(cold.out == warm1.out);
    CHECK(warm1.out == warm2.out);
    CHECK(fs::exists(scratch() / "cache" / "group-clifford-2.json"));
    CHECK(fs::exists(scratch() / "cache" / "phi-24.json"));
}

TEST_CASE("resume and export from a saved state set")
{
    auto saved = scratch() / "s0.json";
    CHECK(run({"cqs", "--dim", "2", "--steps", "0", "--out", saved.string()}).code == 0);
    auto resumed = run({"cqs", "--in", saved.string(), "--steps", "1", "--no-calibration"});
    CHECK(resumed.code == 0);
    auto doc = nlohmann::json::parse(resumed.out);
    CHECK(doc["total"] == 30);
    CHECK(doc["steps"][0]["step"] == 1);

    auto csv = run({"bloch-export", "--in", saved.string()});
    CHECK(csv.code == 0);
    CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 7);
}

TEST_CASE("corrupted cache is detected")
{
    auto dir = scratch() / "bad-cache";
    fs::create_directories(dir);
    std::ofstream(dir / "phi-24.json") << R"({"m":24,"coeffs":[1,0,0,0,-1,0,0,0,2],"cache_version":1})";
    const char *old = std::getenv("CQM_CACHE_DIR");
    std::string keep = old ? old : "";
    ::setenv("CQM_CACHE_DIR", dir.c_str(), 1);
    auto r = run({"group", "--dim", "2"});
    ::setenv("CQM_CACHE_DIR", keep.c_str(), 1);
    CHECK(r.code == 4);
    CHECK(nlohmann::json::parse(r.out)["failure"]["kind"] == "integrity");
}

TEST_CASE("usage errors")
{
    CHECK(run({}).code == 2);
    CHECK(run({"group"}).code == 2);
    CHECK(run({"group", "--dim", "2", "--which", "nope"}).code == 2);
    CHECK(run({"cqs", "--in", (scratch() / "missing.json").string()}).code == 2);
}
