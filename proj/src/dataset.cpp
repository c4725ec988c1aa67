#include "riskaudit/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace riskaudit {

Dataset::Dataset(std::vector<double> scores, std::vector<std::uint8_t> outcomes,
                 std::vector<std::vector<std::uint32_t>> attr_codes, AttributeSchema schema)
    : scores_(std::move(scores)),
      outcomes_(std::move(outcomes)),
      attr_codes_(std::move(attr_codes)),
      schema_(std::move(schema)) {
  if (scores_.empty()) throw std::invalid_argument("dataset must contain at least one record");
  if (outcomes_.size() != scores_.size())
    throw std::invalid_argument("scores/outcomes length mismatch");
  if (attr_codes_.size() != schema_.size())
    throw std::invalid_argument("attribute column count does not match schema");
  for (const auto& col : attr_codes_)
    if (col.size() != scores_.size())
      throw std::invalid_argument("attribute column length mismatch");
  for (auto o : outcomes_) positive_count_ += o;
}

std::size_t Dataset::attribute_index(const std::string& name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i)
    if (schema_[i].name == name) return i;
  throw std::invalid_argument("unknown attribute: " + name);
}

RiskRecord Dataset::record(std::size_t row) const {
  RiskRecord r;
  r.score = scores_[row];
  r.outcome = outcomes_[row];
  for (std::size_t a = 0; a < schema_.size(); ++a)
    r.attributes[schema_[a].name] = attribute_value(a, row);
  return r;
}

namespace {

bool parse_number(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return errno == 0 && end == cell.c_str() + cell.size();
}

}  // namespace

AttributeSchema infer_schema(const RawTable& table, const std::vector<std::string>& attributes) {
  AttributeSchema schema;
  for (const auto& name : attributes) {
    std::size_t col = table.column_index(name);
    if (col == RawTable::npos) throw std::runtime_error("attribute column not found: " + name);
    std::set<std::string> values;
    for (const auto& row : table.rows)
      values.insert(row[col].empty() ? kMissingToken : row[col]);
    schema.push_back({name, std::vector<std::string>(values.begin(), values.end())});
  }
  return schema;
}

ValidatedDataset validate_dataset(const RawTable& table, const AttributeSchema& schema,
                                  const std::string& score_column,
                                  const std::string& outcome_column) {
  if (table.rows.empty()) throw std::runtime_error("empty table: no data rows");

  std::size_t score_col = table.column_index(score_column);
  if (score_col == RawTable::npos)
    throw std::runtime_error("score column not found: " + score_column);
  std::size_t outcome_col = table.column_index(outcome_column);
  if (outcome_col == RawTable::npos)
    throw std::runtime_error("outcome column not found: " + outcome_column);

  std::vector<std::size_t> attr_cols;
  for (const auto& decl : schema) {
    std::size_t col = table.column_index(decl.name);
    if (col == RawTable::npos)
      throw std::runtime_error("attribute column not found: " + decl.name);
    attr_cols.push_back(col);
  }

  std::vector<double> scores;
  std::vector<std::uint8_t> outcomes;
  std::vector<std::vector<std::uint32_t>> codes(schema.size());
  std::vector<RowDiagnostic> rejected;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t row_no = r + 1;

    double score;
    if (!parse_number(row[score_col], score)) {
      rejected.push_back({row_no, "score '" + row[score_col] + "' is not numeric"});
      continue;
    }
    if (!(score >= 0.0 && score <= 1.0)) {
      rejected.push_back({row_no, "score " + row[score_col] + " outside [0,1]"});
      continue;
    }

    double outcome;
    if (!parse_number(row[outcome_col], outcome) || (outcome != 0.0 && outcome != 1.0)) {
      rejected.push_back({row_no, "outcome '" + row[outcome_col] + "' not in {0,1}"});
      continue;
    }

    std::vector<std::uint32_t> row_codes(schema.size());
    bool ok = true;
    for (std::size_t a = 0; a < schema.size() && ok; ++a) {
      const std::string& raw = row[attr_cols[a]];
      const std::string& value = raw.empty() ? kMissingToken : raw;
      auto it = std::find(schema[a].values.begin(), schema[a].values.end(), value);
      if (it == schema[a].values.end()) {
        rejected.push_back({row_no, "attribute " + schema[a].name + " has undeclared value '" +
                                        value + "'"});
        ok = false;
      } else {
        row_codes[a] = static_cast<std::uint32_t>(it - schema[a].values.begin());
      }
    }
    if (!ok) continue;

    scores.push_back(score);
    outcomes.push_back(static_cast<std::uint8_t>(outcome));
    for (std::size_t a = 0; a < schema.size(); ++a) codes[a].push_back(row_codes[a]);
  }

  if (scores.empty()) throw std::runtime_error("no valid rows after validation");
  return {Dataset(std::move(scores), std::move(outcomes), std::move(codes), schema),
          std::move(rejected)};
}

std::string make_display_name(const std::vector<std::pair<std::string, std::string>>& conditions) {
  if (conditions.empty()) return "overall";
  std::string name;
  for (const auto& [attr, value] : conditions) {
    if (!name.empty()) name += " & ";
    name += attr + "=" + value;
  }
  return name;
}

namespace {

GroupIndex build_group(const Dataset& dataset,
                       std::vector<std::pair<std::string, std::string>> conditions) {
  GroupIndex g;
  g.definition.conditions = std::move(conditions);
  std::sort(g.definition.conditions.begin(), g.definition.conditions.end());
  for (std::size_t i = 1; i < g.definition.conditions.size(); ++i)
    if (g.definition.conditions[i].first == g.definition.conditions[i - 1].first)
      throw std::invalid_argument("duplicate attribute in group definition: " +
                                  g.definition.conditions[i].first);
  g.definition.display_name = make_display_name(g.definition.conditions);

  std::vector<std::pair<std::size_t, std::uint32_t>> tests;  // (attr index, value code)
  for (const auto& [attr, value] : g.definition.conditions) {
    std::size_t a = dataset.attribute_index(attr);
    const auto& values = dataset.schema()[a].values;
    auto it = std::find(values.begin(), values.end(), value);
    if (it == values.end())
      throw std::invalid_argument("value '" + value + "' not in schema of attribute " + attr);
    tests.emplace_back(a, static_cast<std::uint32_t>(it - values.begin()));
  }

  for (std::size_t row = 0; row < dataset.size(); ++row) {
    bool match = true;
    for (const auto& [a, code] : tests)
      if (dataset.attribute_code(a, row) != code) {
        match = false;
        break;
      }
    if (match) {
      g.row_indices.push_back(static_cast<std::uint32_t>(row));
      g.positive_count += dataset.outcome(row);
    }
  }
  g.size = g.row_indices.size();
  return g;
}

}  // namespace

GroupIndex resolve_group(const Dataset& dataset, GroupDefinition definition) {
  return build_group(dataset, std::move(definition.conditions));
}

std::vector<GroupIndex> enumerate_groups(const Dataset& dataset,
                                         const std::vector<std::string>& sensitive_attributes,
                                         std::size_t max_combination,
                                         std::size_t min_group_size) {
  if (max_combination < 1) throw std::invalid_argument("max_combination must be >= 1");
  if (min_group_size < 1) throw std::invalid_argument("min_group_size must be >= 1");

  // Attribute names sorted so the emitted order is independent of the
  // caller's list order.
  std::vector<std::string> attrs = sensitive_attributes;
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  std::vector<std::size_t> attr_idx;
  for (const auto& a : attrs) attr_idx.push_back(dataset.attribute_index(a));

  std::vector<GroupIndex> groups;
  groups.push_back(build_group(dataset, {}));  // overall reference group

  // Per-combination single pass: rows are hashed to the value tuple of the
  // chosen attributes, so enumeration stays linear in rows per combination.
  std::vector<std::size_t> combo;
  auto emit_combo = [&](const std::vector<std::size_t>& chosen) {
    std::map<std::vector<std::uint32_t>, std::vector<std::uint32_t>> cells;
    for (std::size_t row = 0; row < dataset.size(); ++row) {
      std::vector<std::uint32_t> key(chosen.size());
      for (std::size_t k = 0; k < chosen.size(); ++k)
        key[k] = dataset.attribute_code(attr_idx[chosen[k]], row);
      cells[key].push_back(static_cast<std::uint32_t>(row));
    }
    for (auto& [key, rows] : cells) {
      if (rows.size() < min_group_size) continue;
      GroupIndex g;
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        const auto& decl = dataset.schema()[attr_idx[chosen[k]]];
        g.definition.conditions.emplace_back(decl.name, decl.values[key[k]]);
      }
      std::sort(g.definition.conditions.begin(), g.definition.conditions.end());
      g.definition.display_name = make_display_name(g.definition.conditions);
      g.row_indices = std::move(rows);
      g.size = g.row_indices.size();
      for (auto r : g.row_indices) g.positive_count += dataset.outcome(r);
      groups.push_back(std::move(g));
    }
  };

  // Enumerate attribute subsets of size 1..max_combination.
  std::vector<std::size_t> stack;
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (!stack.empty()) emit_combo(stack);
    if (stack.size() == max_combination) return;
    for (std::size_t i = start; i < attrs.size(); ++i) {
      stack.push_back(i);
      self(self, i + 1);
      stack.pop_back();
    }
  };
  recurse(recurse, 0);

  std::sort(groups.begin(), groups.end(), [](const GroupIndex& a, const GroupIndex& b) {
    return a.definition.conditions < b.definition.conditions;
  });
  return groups;
}

std::pair<std::vector<double>, std::vector<std::uint8_t>> group_slice(const Dataset& dataset,
                                                                      const GroupIndex& group) {
  if (group.row_indices.empty())
    throw std::invalid_argument("group '" + group.definition.display_name + "' selects no rows");
  std::vector<double> scores;
  std::vector<std::uint8_t> outcomes;
  scores.reserve(group.row_indices.size());
  outcomes.reserve(group.row_indices.size());
  for (auto row : group.row_indices) {
    if (row >= dataset.size())
      throw std::out_of_range("stale group index: row " + std::to_string(row));
    scores.push_back(dataset.score(row));
    outcomes.push_back(static_cast<std::uint8_t>(dataset.outcome(row)));
  }
  return {std::move(scores), std::move(outcomes)};
}

std::vector<std::uint8_t> group_mask(const Dataset& dataset, const GroupIndex& group) {
  std::vector<std::uint8_t> mask(dataset.size(), 0);
  for (auto row : group.row_indices) {
    if (row >= dataset.size())
      throw std::out_of_range("stale group index: row " + std::to_string(row));
    mask[row] = 1;
  }
  return mask;
}

}  // namespace riskaudit
