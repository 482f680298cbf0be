#include "output.hpp"

#include <fstream>
#include <stdexcept>

#include "cnls/field_io.hpp"

namespace cnls::cli {

OutputWriter::OutputWriter(const RunConfig& config, const std::string& subcommand)
    : config_(config), dir_(config.output.directory / subcommand) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

std::string OutputWriter::header() const {
  return std::string("# cnls ") + CNLS_VERSION + " config_hash=" + config_.hash + " seed=" +
         std::to_string(config_.seed) + "\n";
}

void OutputWriter::write(const std::string& name, const std::string& body) const {
  std::ofstream out(dir_ / name, std::ios::binary);
  out << header() << body;
  if (!out) throw std::runtime_error("failed to write " + (dir_ / name).string());
}

void OutputWriter::text(const std::string& name, const std::string& body) const {
  if (config_.output.text) write(name, body);
}

void OutputWriter::csv(const std::string& name, const std::string& body) const {
  if (config_.output.csv) write(name, body);
}

void OutputWriter::dump(const std::string& name, const FieldVector& z) const {
  if (!config_.output.dump) return;
  write_field_dump(dir_ / name, z);
  write(name + ".meta", "format_version " + std::to_string(kFieldDumpVersion) + "\n");
}

}  // namespace cnls::cli
