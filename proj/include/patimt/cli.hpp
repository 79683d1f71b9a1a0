#pragma once

#include "patimt/filters.hpp"
#include "patimt/instruct.hpp"
#include "patimt/predparse.hpp"
#include "patimt/refine.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace patimt::cli {

/// Settings shared by all subcommands. Loaded from --config (JSON) and then
/// overridden by any flag given on the command line.
struct ToolConfig {
    MergeParams merge;
    RefineParams refine;
    FilterParams filter;
    BoxDialect dialect = BoxDialect::PlainUnit;
    InstanceFormat format = InstanceFormat::PlainText;
    ParseStrictness strictness = ParseStrictness::Salvage;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool translator_serial = false; // call the translator from one thread only
};

/// Applies the keys present in a JSON config document on top of `cfg`.
void apply_config(ToolConfig& cfg, std::string_view json_bytes);

enum ExitCode : int { kOk = 0, kProcessingError = 1, kUsageError = 2 };

/// Entry point; `args` excludes the program name. Each subcommand prints a
/// one-line JSON summary to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace patimt::cli
