#pragma once

// Key-value experiment configs for the command line front end. A config is a
// flat map of lowercase keys; the space keys are consumed into typed fields
// up front and the remaining operation parameters stay textual until the
// operation runner reads them through ParamReader, which rejects leftovers.
// Every run is therefore either fully consumed or refused with a named key.

#include "geolab/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace geocli {

// category feeds the machine readable error document:
// usage | config | io | module | artifact
struct CliError : std::runtime_error {
  CliError(std::string cat, const std::string& detail)
      : std::runtime_error(detail), category(std::move(cat)) {}
  std::string category;
};

enum class SpaceKind { Torus, Graph, Apartment, Revolution };
enum class Operation { Enumerate, Block, Verify, Classify, Growth, Entropy, Scan };

const char* space_kind_str(SpaceKind k);
const char* operation_str(Operation op);
Operation parse_operation(const std::string& text);

using KeyValues = std::map<std::string, std::string>;

// One `key = value` pair per line; '#' starts a comment, blank lines are
// ignored, duplicate keys within one source are rejected.
KeyValues parse_config_text(const std::string& text, const std::string& where);
KeyValues load_config_file(const std::string& path);

// Later layers win; used to lay command line flags over file values.
KeyValues merge(KeyValues base, const KeyValues& over);

struct ExperimentConfig {
  SpaceKind space = SpaceKind::Torus;
  std::vector<geolab::VecQ> basis;                         // torus
  std::size_t vertices = 0;                                // graph
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // graph
  geolab::VecQ sides;                                      // apartment
  std::string profile;                                     // revolution
  double epsilon = 0.0;                                    // revolution, zoll
  std::vector<double> h_coeffs;                            // revolution, resolved

  std::optional<Operation> op;
  KeyValues params;  // operation parameters, consumed by the runner
};

// Consumes the space keys and the operation name, validates their values,
// and leaves the operation parameters behind. Unknown keys and keys of the
// wrong space are rejected here.
ExperimentConfig build_config(const KeyValues& raw);

// Typed access to the remaining parameters. finish() turns anything left
// over into an error naming the key, so a `grid` in a block run fails loudly.
class ParamReader {
 public:
  explicit ParamReader(KeyValues params) : left_(std::move(params)) {}

  bool has(const std::string& key) const { return left_.count(key) != 0; }
  std::string take(const std::string& key);  // required
  std::optional<std::string> take_opt(const std::string& key);
  geolab::Rat take_rat(const std::string& key);
  geolab::Rat take_rat(const std::string& key, const geolab::Rat& fallback);
  double take_real(const std::string& key, double fallback);
  long long take_int(const std::string& key, long long fallback, long long lo,
                     long long hi);
  std::uint64_t take_seed();                          // "seed", default 0
  double take_tol();                                  // "tol", default 0
  std::string take_out(const std::string& fallback);  // "out"
  void finish(Operation op);

 private:
  KeyValues left_;
};

// Shared literal parsers; all throw CliError naming the offending key.
geolab::Rat parse_rat_value(const std::string& key, const std::string& text);
geolab::VecQ parse_vecq_value(const std::string& key, const std::string& text);
double parse_real_value(const std::string& key, const std::string& text);
long long parse_int_value(const std::string& key, const std::string& text,
                          long long lo, long long hi);
std::vector<std::string> split_list(const std::string& text, char sep);

}  // namespace geocli
