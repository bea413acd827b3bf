#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "emrsim.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("emrsim_capi_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string str() const { return path.string(); }
};

struct OwnedString {
    char* ptr = nullptr;
    ~OwnedString() { emrsim_string_free(ptr); }
    std::string view() const { return ptr ? std::string(ptr) : std::string(); }
};

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

emrsim_config* open_defaults() {
    emrsim_config* config = nullptr;
    char* errmsg = nullptr;
    const emrsim_status rc =
        emrsim_config_open(EMRSIM_DEFAULT_CONFIG_DIR, &config, &errmsg);
    const std::string msg = errmsg ? errmsg : "";
    INFO(msg);
    REQUIRE(rc == EMRSIM_OK);
    emrsim_string_free(errmsg);
    return config;
}

}  // namespace

TEST_CASE("version string is exposed") {
    REQUIRE(emrsim_version() != nullptr);
    CHECK(std::strlen(emrsim_version()) > 0);
}

TEST_CASE("open, check, generate, summarize, compare and expect") {
    emrsim_config* config = open_defaults();

    OwnedString report;
    CHECK(emrsim_config_check(config, &report.ptr, nullptr) == EMRSIM_OK);
    CHECK(report.view().find("OK") != std::string::npos);

    TempDir out("roundtrip");
    emrsim_generate_opts opts{};
    opts.has_n = 1;
    opts.n_patients = 30;
    opts.has_seed = 1;
    opts.seed = 99;
    opts.workers = 2;
    emrsim_emit_stats stats{};
    {
        OwnedString err;
        const emrsim_status rc =
            emrsim_generate(config, out.str().c_str(), &opts, &stats,
                            &err.ptr);
        INFO(err.view());
        REQUIRE(rc == EMRSIM_OK);
    }
    CHECK(stats.patients.rows == 30);
    CHECK(stats.diagnoses.rows == stats.admissions.rows);
    CHECK(stats.labs.rows > 0);
    CHECK(fs::exists(out.path / "manifest.txt"));
    const std::string manifest = read_bytes(out.path / "manifest.txt");
    CHECK(manifest.find("param.master_seed=99") != std::string::npos);
    CHECK(manifest.find("output.labs.tsv.sha256=") != std::string::npos);

    {
        OwnedString text, err;
        const emrsim_status rc = emrsim_summarize(
            out.str().c_str(), config, nullptr, &text.ptr, &err.ptr);
        INFO(err.view());
        REQUIRE(rc == EMRSIM_OK);
        CHECK(text.view().find("Patients (n = 30)") != std::string::npos);
        CHECK(text.view().find("Blood urea nitrogen") != std::string::npos);
    }
    {
        OwnedString text, err;
        int pass = 0;
        const emrsim_status rc =
            emrsim_compare(out.str().c_str(), config, nullptr, 0.0,
                           &text.ptr, &pass, &err.ptr);
        INFO(err.view());
        REQUIRE(rc == EMRSIM_OK);
        CHECK(pass == 1);
        CHECK(text.view().find("RESULT: pass") != std::string::npos);
        CHECK(fs::exists(out.path / "validation.tsv"));
    }
    {
        OwnedString text, err;
        const emrsim_status rc =
            emrsim_expected(config, 100000, &text.ptr, &err.ptr);
        INFO(err.view());
        REQUIRE(rc == EMRSIM_OK);
        CHECK(text.view().find("n = 100000") != std::string::npos);
        CHECK(text.view().find("Blood urea nitrogen") != std::string::npos);
    }

    emrsim_config_close(config);
}

TEST_CASE("two identical runs produce identical bytes") {
    emrsim_config* config = open_defaults();
    TempDir a("det_a"), b("det_b");
    emrsim_generate_opts opts{};
    opts.has_n = 1;
    opts.n_patients = 25;
    opts.has_seed = 1;
    opts.seed = 4242;
    opts.workers = 1;
    REQUIRE(emrsim_generate(config, a.str().c_str(), &opts, nullptr,
                            nullptr) == EMRSIM_OK);
    opts.workers = 4;
    REQUIRE(emrsim_generate(config, b.str().c_str(), &opts, nullptr,
                            nullptr) == EMRSIM_OK);
    for (const char* base :
         {"patients.tsv", "admissions.tsv", "diagnoses.tsv", "labs.tsv"}) {
        INFO(base);
        CHECK(read_bytes(a.path / base) == read_bytes(b.path / base));
    }
    emrsim_config_close(config);
}

TEST_CASE("error paths map to the documented status codes") {
    emrsim_config* config = nullptr;
    OwnedString err;

    // Missing directory is an I/O failure.
    CHECK(emrsim_config_open("/nonexistent/config/dir", &config, &err.ptr) ==
          EMRSIM_STATUS_IO);
    CHECK(config == nullptr);
    CHECK(!err.view().empty());

    // Malformed content is a validation failure with file and line.
    TempDir broken("broken");
    for (const char* name :
         {"population.csv", "population_ranges.csv", "labs.csv",
          "complaints.csv", "params.cfg"}) {
        std::ofstream out(broken.path / name);
        out << "";
    }
    {
        std::ofstream out(broken.path / "population.csv");
        out << "Gender,Male,not_a_number\n";
    }
    OwnedString err2;
    CHECK(emrsim_config_open(broken.str().c_str(), &config, &err2.ptr) ==
          EMRSIM_STATUS_VALIDATION);
    CHECK(err2.view().find("population.csv:1") != std::string::npos);

    // NULL arguments are argument errors.
    CHECK(emrsim_config_open(nullptr, &config, nullptr) == EMRSIM_STATUS_ARG);
    CHECK(emrsim_generate(nullptr, "/tmp/x", nullptr, nullptr, nullptr) ==
          EMRSIM_STATUS_ARG);
    CHECK(emrsim_summarize(nullptr, nullptr, nullptr, nullptr, nullptr) ==
          EMRSIM_STATUS_ARG);

    // Summarizing a directory with no repository is an I/O failure.
    TempDir empty("empty");
    OwnedString err3;
    CHECK(emrsim_summarize(empty.str().c_str(), nullptr, nullptr, nullptr,
                           &err3.ptr) == EMRSIM_STATUS_IO);

    // A config whose weights do not sum to 100 fails the check with the
    // validation status.
    emrsim_config* defaults = open_defaults();
    OwnedString report;
    CHECK(emrsim_config_check(defaults, &report.ptr, nullptr) == EMRSIM_OK);
    emrsim_config_close(defaults);
}
