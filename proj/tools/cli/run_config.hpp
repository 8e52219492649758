#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bni::cli {

enum class Command { derive, estimate, simulate, discover };
std::string to_string(Command c);

struct KeySpec {
  std::string name;
  std::string default_value;
  std::string help;
};

// Keys accepted by a subcommand's config file; each is also a `--name`
// flag with underscores written as dashes.
const std::vector<KeySpec>& keys_for(Command c);

using KeyValues = std::map<std::string, std::string>;

// `key = value` per line, `#` starts a comment, blank lines ignored.
KeyValues parse_config_text(std::string_view text, const std::string& source);
KeyValues read_config_file(const std::filesystem::path& path);

// Resolved settings: defaults, then config file, then flags.
class RunConfig {
 public:
  Command command = Command::derive;
  std::optional<unsigned long long> seed;

  // Throws ConfigError for a key not accepted by `command`.
  static RunConfig resolve(Command command, const KeyValues& file, const KeyValues& flags,
                           std::optional<unsigned long long> seed);

  const std::string& text(const std::string& key) const;
  bool empty(const std::string& key) const { return text(key).empty(); }
  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  // Two comma-separated numbers, or nullopt for "none".
  std::optional<std::pair<double, double>> range(const std::string& key) const;
  const std::string& required(const std::string& key) const;

  const KeyValues& values() const { return values_; }
  // One `key = value` line per key, sorted, seed first.
  void print(std::ostream& out) const;

 private:
  KeyValues values_;
};

}  // namespace bni::cli
