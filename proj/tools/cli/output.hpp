#pragma once

#include <filesystem>
#include <string>

#include "cnls/grid.hpp"
#include "config.hpp"

namespace cnls::cli {

/// Writes the files of one subcommand into <directory>/<subcommand>/. Every
/// text file starts with header(); field dumps get a .meta sidecar instead.
class OutputWriter {
 public:
  OutputWriter(const RunConfig& config, const std::string& subcommand);

  const std::filesystem::path& directory() const { return dir_; }
  std::string header() const;

  /// No-ops when the corresponding format is disabled.
  void text(const std::string& name, const std::string& body) const;
  void csv(const std::string& name, const std::string& body) const;
  void dump(const std::string& name, const FieldVector& z) const;

 private:
  void write(const std::string& name, const std::string& body) const;

  const RunConfig& config_;
  std::filesystem::path dir_;
};

}  // namespace cnls::cli
