#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sandwich/format.hpp"
#include "sandwich/germ.hpp"

namespace sandwich {

struct RunConfig {
  /// e.g. {"germ", "invariants"}, {"enumerate"}, {"reproduce"}.
  std::vector<std::string> command;
  std::vector<std::string> files;     // positional files, or --germ/--germs
  std::vector<std::string> matrices;  // --matrices
  std::optional<std::string> slopes;  // "a1,...,ar", "generic" or "quadrilateral"
  std::string example;                // reproduce target
  MRule rule = MRule::PaperCalibrated;
  std::optional<int> max_extra;
  unsigned samples = 8;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  OutputFormat format = OutputFormat::Text;
  std::string data_dir;  // empty: built-in location
  bool write_golden = false;
};

/// Exit status 0 on success, 1 on domain errors, 2 on parse errors; the error
/// name goes to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses the command line (argv[0] excluded) and calls run().
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Full text of a bundled reproduction ("six-lines", "cusp-line",
/// "fig1-graph"), before comparison with its golden file.
std::string reproduction_report(const std::string& name, const RunConfig& config);

std::string default_data_dir();

}  // namespace sandwich
