#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskaudit/table.hpp"

namespace riskaudit {

/// Categorical attribute declaration: a name plus the ordered list of
/// allowed values. Missing cells are represented by an explicit token value
/// (kMissingToken) rather than by dropping rows.
struct AttributeDecl {
  std::string name;
  std::vector<std::string> values;
};

using AttributeSchema = std::vector<AttributeDecl>;

constexpr const char* kMissingToken = "(missing)";

/// One scored subject: risk score in [0,1], binary outcome, and one
/// categorical value per declared attribute.
struct RiskRecord {
  double score = 0.0;
  int outcome = 0;
  std::map<std::string, std::string> attributes;
};

/// Immutable columnar dataset. Attribute values are stored as codes into
/// the schema's value lists; records can be materialized on demand.
class Dataset {
 public:
  Dataset(std::vector<double> scores, std::vector<std::uint8_t> outcomes,
          std::vector<std::vector<std::uint32_t>> attr_codes, AttributeSchema schema);

  std::size_t size() const { return scores_.size(); }
  double score(std::size_t row) const { return scores_[row]; }
  int outcome(std::size_t row) const { return outcomes_[row]; }
  std::span<const double> scores() const { return scores_; }
  std::span<const std::uint8_t> outcomes() const { return outcomes_; }

  const AttributeSchema& schema() const { return schema_; }
  std::size_t attribute_index(const std::string& name) const;  // throws if unknown
  std::uint32_t attribute_code(std::size_t attr, std::size_t row) const {
    return attr_codes_[attr][row];
  }
  const std::string& attribute_value(std::size_t attr, std::size_t row) const {
    return schema_[attr].values[attr_codes_[attr][row]];
  }

  std::size_t positive_count() const { return positive_count_; }
  RiskRecord record(std::size_t row) const;

 private:
  std::vector<double> scores_;
  std::vector<std::uint8_t> outcomes_;
  std::vector<std::vector<std::uint32_t>> attr_codes_;  // [attribute][row]
  AttributeSchema schema_;
  std::size_t positive_count_ = 0;
};

/// Conjunction of attribute=value conditions; empty = the overall group.
struct GroupDefinition {
  std::vector<std::pair<std::string, std::string>> conditions;  // sorted by attribute name
  std::string display_name;

  bool is_overall() const { return conditions.empty(); }
};

/// A group definition resolved against a dataset.
struct GroupIndex {
  GroupDefinition definition;
  std::vector<std::uint32_t> row_indices;  // sorted record positions
  std::size_t size = 0;
  std::size_t positive_count = 0;
};

/// Per-row rejection produced by validate_dataset. row is 1-based over the
/// data rows (header excluded).
struct RowDiagnostic {
  std::size_t row;
  std::string message;
};

struct ValidatedDataset {
  Dataset dataset;
  std::vector<RowDiagnostic> rejected;
};

/// Builds a Dataset from a parsed table. Rows violating the score, outcome
/// or schema constraints are rejected with a diagnostic naming the row and
/// the violated constraint; throws std::runtime_error if the table has no
/// valid rows or a referenced column is missing. Empty attribute cells are
/// mapped to kMissingToken, which must be part of the declared values.
ValidatedDataset validate_dataset(const RawTable& table, const AttributeSchema& schema,
                                  const std::string& score_column,
                                  const std::string& outcome_column);

/// Infers a schema for the given attribute columns: distinct cell values
/// sorted lexicographically (with kMissingToken substituted for empty
/// cells), so downstream ordering is byte-stable.
AttributeSchema infer_schema(const RawTable& table, const std::vector<std::string>& attributes);

/// Enumerates every group formed by choosing 1..max_combination distinct
/// sensitive attributes and one value for each, keeping groups of size >=
/// min_group_size, plus the overall group (always first). Deterministic
/// order: condition lists sorted by attribute name, groups compared
/// lexicographically by (name, value) pairs.
std::vector<GroupIndex> enumerate_groups(const Dataset& dataset,
                                         const std::vector<std::string>& sensitive_attributes,
                                         std::size_t max_combination,
                                         std::size_t min_group_size);

/// Extracts the group's parallel (scores, outcomes) columns in dataset row
/// order. Throws on an empty group or a stale row index.
std::pair<std::vector<double>, std::vector<std::uint8_t>> group_slice(const Dataset& dataset,
                                                                      const GroupIndex& group);

/// Membership mask over all dataset rows (1 = in group).
std::vector<std::uint8_t> group_mask(const Dataset& dataset, const GroupIndex& group);

/// Builds the GroupIndex for an explicit definition (used by tests and the
/// bench tools; enumerate_groups is the audit path).
GroupIndex resolve_group(const Dataset& dataset, GroupDefinition definition);

std::string make_display_name(const std::vector<std::pair<std::string, std::string>>& conditions);

}  // namespace riskaudit
