#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hklab::cli {

enum class Command { colength, profile, hn, limits, sandwich, convergence, gm };

std::string_view command_name(Command c);
std::optional<Command> parse_command(std::string_view text);

/// Exit statuses of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitMath = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitInfeasible = 3;

struct ExperimentConfig {
  std::optional<std::string> family;  // fermat-quartic | chang-quartic | buchweitz-chen | diagonal:d1,..
  std::optional<std::string> ring;    // explicit ring description, fixes p
  std::string ideal = "maximal";
  std::vector<std::uint64_t> primes;  // after the residue filter
  std::vector<int> ns{1};
  std::optional<int> m_max;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> cache;
  int jobs = 1;
  std::size_t cap = 5000;
  std::vector<int> d;  // diagonal exponents for gm, limits and sandwich
};

/// Flat key=value settings, keyed like the long flags without dashes.
using Settings = std::map<std::string, std::string>;

/// '#' starts a comment; blank lines are skipped.
Settings read_config_file(const std::filesystem::path& path);

/// "3,5,7", "3-23" (all primes in the range) or a mix of both.
std::vector<std::uint64_t> parse_primes(std::string_view text);

/// Keeps primes whose residue mod M is listed: "8:1,7".
std::vector<std::uint64_t> filter_residues(const std::vector<std::uint64_t>& primes, std::string_view filter);

ExperimentConfig config_from_settings(const Settings& settings);

/// Runs one command. The JSON result goes to `out`; diagnostics to `err`.
int run(const ExperimentConfig& config, Command command, std::ostream& out, std::ostream& err);

/// Command-line entry point shared by hk-lab and the tests.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hklab::cli
