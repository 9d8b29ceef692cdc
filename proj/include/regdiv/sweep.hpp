#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "regdiv/mc_sim.hpp"
#include "regdiv/model.hpp"
#include "regdiv/policy.hpp"

namespace regdiv {

enum class SweepMode { Chained, Cold };

struct SweepOptions {
  SweepMode mode = SweepMode::Chained;
  ValidationOptions validation;
  SelectOptions select;
  unsigned threads = 0;  // cold mode only
};

struct SweepRow {
  double value = 0.0;
  ModelParams params;
  bool verified = false;
  std::optional<CaseTag> case_tag;
  std::optional<Policy> policy;
  std::optional<Selection> selection;
  std::string failure;
};

struct SweepTable {
  std::string parameter;
  std::vector<SweepRow> rows;
};

// Output columns understood by sweep_csv.
const std::vector<std::string>& sweep_fields();

SweepTable sweep_parameter(const ModelParams& base, std::string_view parameter, const std::vector<double>& values,
                           const SweepOptions& opts = {});

// n evenly spaced values from `from` to `to` inclusive.
std::vector<double> linspace(double from, double to, int n);

// One reference cell: a boundary of one row of a published table.
struct TableCell {
  std::string group;  // swept parameter
  double value = 0.0;
  std::string field;  // d1, b1 or b2
  double reference = 0.0;
  std::optional<double> computed;
  std::optional<double> abs_diff;
  bool within = false;
};

struct TableRowCheck {
  std::string group;
  double value = 0.0;
  CaseTag expected_case = CaseTag::B;
  std::optional<Ordering> expected_ordering;
  SweepRow row;
  bool case_matches = false;
};

struct TableReproduction {
  int id = 0;
  std::string caption;
  double tolerance = 0.0;
  std::vector<TableRowCheck> rows;
  std::vector<TableCell> cells;
  double max_abs_diff = 0.0;
  bool passed = false;
};

// Parameter set the tables are based on.
ModelParams reference_base();
std::vector<int> table_ids();
TableReproduction reproduce_table(int id, const std::optional<ModelParams>& base = std::nullopt,
                                  const SweepOptions& opts = {});

using Cell = std::variant<double, std::string>;

struct FigureData {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct FigureSpec {
  ModelParams params = reference_params(0.9);
  ValidationOptions validation;
  std::optional<Policy> policy;  // value_function and sample_path: default is the selected policy
  std::optional<double> x_min, x_max;
  int points = 401;
  // sample_path
  double x0 = 0.5;
  int regime = 2;
  SimConfig sim;
  std::size_t stride = 100;
  // barrier_vs_param
  std::string parameter = "mu2";
  std::vector<double> values;
};

const std::vector<std::string>& figure_kinds();
FigureData emit_figure_data(std::string_view kind, const FigureSpec& spec);

std::string format_number(double v, int precision);
std::string to_csv(const FigureData& data, int precision = 6);
std::string sweep_csv(const SweepTable& table, const std::vector<std::string>& fields, int precision = 6);
std::string table_csv(const TableReproduction& t, int precision = 6);

}  // namespace regdiv
