#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rfxy/global_solvers.hpp"

namespace rfxy::harness {

/// Ordered `key = value` entries. Blank lines and text after '#' are ignored;
/// keys may repeat.
class KeyValueFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line;
  };

  static KeyValueFile parse(std::istream& in, std::string source = "<input>");
  static KeyValueFile load(const std::filesystem::path& path);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const std::string& source() const noexcept { return source_; }
  /// Last value of `key`, if any.
  std::optional<std::string> get(const std::string& key) const;
  std::vector<std::string> get_all(const std::string& key) const;

 private:
  std::string source_;
  std::vector<Entry> entries_;
};

/// Applies one option key; returns false if the key is not an option.
/// Throws std::invalid_argument for a malformed value.
bool apply_option(GlobalOptions& opts, const std::string& key,
                  const std::string& value);

/// Applies every entry; unknown keys are an error unless listed in `extra`.
void apply_options(GlobalOptions& opts, const KeyValueFile& file,
                   const std::vector<std::string>& extra = {});

GlobalOptions load_options(const std::filesystem::path& path);

/// Every option with its current value, in config-file syntax.
std::string dump_options(const GlobalOptions& opts);

/// Thread-count override from RFXY_THREADS, if set and valid.
std::optional<int> threads_from_env();

}  // namespace rfxy::harness
