#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "json.hpp"

namespace cqm::cli
{

    using Json = nlohmann::ordered_json;

    enum ExitCode : int
    {
        Ok = 0,
        AssertionFailed = 1,
        BadUsage = 2,
        CapExceeded = 3,
        InternalError = 4,
    };

    struct RunConfig
    {
        std::uint32_t dim = 0;
        std::uint32_t steps = 1;
        std::string which = "clifford";
        unsigned threads = 1;
        std::size_t max_closure = 1'000'000;
        std::string out;    // file for the full artifact (table, state set, basis set)
        std::string format = "json";
        std::string input;  // state set to resume from or export
        bool full = false;  // crt: run the full linear closure
        bool energy_only = false; // crt: skip the product check
        bool from_orbit = false;
        bool calibrate = true;
        bool timings = false;
        bool use_cache = true;
    };

    struct Outcome
    {
        int code = Ok;
        Json doc;
        std::string csv; // bloch-export body
    };

    // $CQM_CACHE_DIR, else $XDG_CACHE_HOME/cqm, else $HOME/.cache/cqm.
    std::filesystem::path cache_dir();

    Outcome cmd_group(const RunConfig &cfg);
    Outcome cmd_cqs(const RunConfig &cfg);
    Outcome cmd_mub(const RunConfig &cfg);
    Outcome cmd_crt(const RunConfig &cfg);
    Outcome cmd_verify(const RunConfig &cfg);
    Outcome cmd_bloch_export(const RunConfig &cfg);
    Outcome cmd_galois(const RunConfig &cfg, std::uint32_t p, std::uint32_t l);

    // Maps library exceptions to exit codes with a failure block.
    Outcome run_guarded(const std::string &command, const std::function<Outcome()> &body);

    // Text rendering for --format summary.
    std::string summary(const Json &doc);

} // namespace cqm::cli
