#pragma once

#include <string>
#include <vector>

namespace audit {

struct Category {
  std::string id;
  std::string name;
  bool non_target = false;
};

/// One yes/no question. The wording is carried verbatim into reports but
/// is inert to every computation.
struct Criterion {
  std::string id;
  std::string text;
  std::string category_id;  // always a substantive category
};

/// A task schema: categories (exactly one of which is the non-target
/// category), criteria, and the criterion-to-category mapping carried on
/// each criterion. Ordering is stable and determines all report ordering.
/// Immutable after load; safe to share across threads.
class Schema {
 public:
  Schema(std::vector<Category> categories, std::vector<Criterion> criteria,
         std::string version = {});

  const std::vector<Category>& categories() const { return categories_; }
  const std::vector<Criterion>& criteria() const { return criteria_; }
  const std::string& version() const { return version_; }

  const Category& non_target() const { return categories_[non_target_index_]; }

  /// Substantive categories in schema order (everything except the
  /// non-target one).
  std::vector<Category> substantive_categories() const;

  /// Criteria q with mapping(q) == category_id, in schema order.
  /// Throws InputError for an unknown or non-target category id.
  std::vector<Criterion> supporting_criteria(const std::string& category_id) const;

  bool has_criterion(const std::string& id) const;
  std::size_t criterion_index(const std::string& id) const;  // throws if unknown
  const Criterion& criterion(const std::string& id) const;
  bool has_category(const std::string& id) const;
  const Category& category(const std::string& id) const;

  /// Stable content hash of the canonical serialization (FNV-1a, hex).
  std::string fingerprint() const;

  /// Canonical JSON text; load_schema(save) round-trips to an identical
  /// schema.
  std::string to_json() const;

 private:
  std::vector<Category> categories_;
  std::vector<Criterion> criteria_;
  std::string version_;
  std::size_t non_target_index_ = 0;
};

/// Loads and validates a schema file (JSON with top-level `categories`
/// and `criteria`). Errors: parse failure, duplicate ids, criterion
/// mapped to the non-target or a missing category, zero substantive
/// categories, not exactly one non-target category.
Schema load_schema(const std::string& path);
Schema parse_schema(const std::string& json_text, const std::string& source_name = "<string>");

void save_schema(const Schema& schema, const std::string& path);

}  // namespace audit
