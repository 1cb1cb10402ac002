#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lieform/catalog.hpp"

namespace lieform {

/// Parsed input description: exactly one input kind plus a grid and optional
/// tolerance overrides. Schema version is mandatory ("schema": 1).
struct InputSpec {
  std::string kind;         // catalog | sampled-surface | sampled-coframe |
                            // invariant-set | legendre-field
  std::string family;       // for catalog inputs
  std::string params_json;  // raw JSON of the input object (kind-specific)
  Grid grid;
};

struct Manifest {
  int schema = 0;
  std::optional<InputSpec> input;               // single-input commands
  std::optional<std::pair<InputSpec, InputSpec>> pair;  // verify
  std::map<std::string, double> tolerances;
  bool reduction = true;  // surface inputs: recover r through the frame reduction
};

Manifest parse_manifest(const std::string& path);

/// Everything a pipeline stage may need, resolved from one input spec.
struct ResolvedInput {
  std::string describe;
  std::optional<SurfacePatch> patch;
  std::optional<Coframe> cf;
  std::optional<InvariantSet> inv;
  std::optional<LegendreField> lf;
  std::optional<catalog::FlatWebData> flatweb;
};

ResolvedInput resolve_input(const InputSpec& spec);

/// Deterministic JSON report (insertion-ordered keys, no timestamps).
class Report {
 public:
  Report();
  ~Report();
  Report(Report&&) noexcept;
  Report& operator=(Report&&) noexcept;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);
  void set(const std::string& key, bool value);
  void set_json(const std::string& key, const std::string& raw_json);

  void add_residual(const std::string& name, double max,
                    std::optional<double> order = std::nullopt);
  void add_field_summary(const std::string& name, const ScalarField& f);
  void add_spectrum(const ParallelSpace& ps);

  std::string dump() const;
  void write(const std::string& path) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Flat binary export (float64 little-endian) with a JSON sidecar holding
/// shape, dtype, and node order (row-major in u).
void export_array(const std::string& dir, const std::string& name, const std::vector<double>& data,
                  const std::vector<int>& shape);
void export_scalar_field(const std::string& dir, const std::string& name, const ScalarField& f);
void export_legendre_field(const std::string& dir, const std::string& name,
                           const LegendreField& f);
std::vector<double> import_array(const std::string& sidecar_path, std::vector<int>* shape);

/// CSV of (u, v, value) triples for plotting.
void export_csv(const std::string& path, const ScalarField& f);

}  // namespace lieform
