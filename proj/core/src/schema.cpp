#include "audit/schema.hpp"

#include <cstdint>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "audit/errors.hpp"

namespace audit {

namespace {
using ordered_json = nlohmann::ordered_json;
}

Schema::Schema(std::vector<Category> categories, std::vector<Criterion> criteria,
               std::string version)
    : categories_(std::move(categories)),
      criteria_(std::move(criteria)),
      version_(std::move(version)) {
  std::unordered_set<std::string> seen;
  std::size_t non_target_count = 0;
  std::size_t substantive = 0;
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    const auto& c = categories_[i];
    if (!seen.insert(c.id).second) {
      throw InputError("duplicate category id '" + c.id + "'");
    }
    if (c.non_target) {
      ++non_target_count;
      non_target_index_ = i;
    } else {
      ++substantive;
    }
  }
  if (non_target_count != 1) {
    throw InputError("schema must declare exactly one non-target category, found " +
                     std::to_string(non_target_count));
  }
  if (substantive == 0) {
    throw InputError("schema has zero substantive categories");
  }
  seen.clear();
  for (const auto& q : criteria_) {
    if (!seen.insert(q.id).second) {
      throw InputError("duplicate criterion id '" + q.id + "'");
    }
    if (!has_category(q.category_id)) {
      throw InputError("criterion '" + q.id + "' mapped to missing category '" +
                       q.category_id + "'");
    }
    if (category(q.category_id).non_target) {
      throw InputError("criterion '" + q.id + "' mapped to non-target category '" +
                       q.category_id + "'");
    }
  }
}

std::vector<Category> Schema::substantive_categories() const {
  std::vector<Category> out;
  for (const auto& c : categories_) {
    if (!c.non_target) out.push_back(c);
  }
  return out;
}

std::vector<Criterion> Schema::supporting_criteria(const std::string& category_id) const {
  if (!has_category(category_id)) {
    throw InputError("unknown category id '" + category_id + "'");
  }
  if (category(category_id).non_target) {
    throw InputError("category '" + category_id +
                     "' is the non-target category; it has no supporting criteria");
  }
  std::vector<Criterion> out;
  for (const auto& q : criteria_) {
    if (q.category_id == category_id) out.push_back(q);
  }
  return out;
}

bool Schema::has_criterion(const std::string& id) const {
  for (const auto& q : criteria_) {
    if (q.id == id) return true;
  }
  return false;
}

std::size_t Schema::criterion_index(const std::string& id) const {
  for (std::size_t i = 0; i < criteria_.size(); ++i) {
    if (criteria_[i].id == id) return i;
  }
  throw InputError("unknown criterion id '" + id + "'");
}

const Criterion& Schema::criterion(const std::string& id) const {
  return criteria_[criterion_index(id)];
}

bool Schema::has_category(const std::string& id) const {
  for (const auto& c : categories_) {
    if (c.id == id) return true;
  }
  return false;
}

const Category& Schema::category(const std::string& id) const {
  for (const auto& c : categories_) {
    if (c.id == id) return c;
  }
  throw InputError("unknown category id '" + id + "'");
}

std::string Schema::fingerprint() const {
  // FNV-1a over the canonical serialization.
  const std::string text = to_json();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string Schema::to_json() const {
  ordered_json j;
  if (!version_.empty()) j["version"] = version_;
  j["categories"] = ordered_json::array();
  for (const auto& c : categories_) {
    j["categories"].push_back(
        {{"id", c.id}, {"name", c.name}, {"non_target", c.non_target}});
  }
  j["criteria"] = ordered_json::array();
  for (const auto& q : criteria_) {
    j["criteria"].push_back(
        {{"id", q.id}, {"text", q.text}, {"category", q.category_id}});
  }
  return j.dump(2) + "\n";
}

Schema parse_schema(const std::string& json_text, const std::string& source_name) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source_name + ": schema parse failure: " + e.what());
  }
  if (!j.is_object() || !j.contains("categories") || !j.contains("criteria")) {
    throw InputError(source_name + ": schema must be an object with 'categories' and 'criteria'");
  }
  std::vector<Category> categories;
  for (const auto& jc : j.at("categories")) {
    Category c;
    c.id = jc.at("id").get<std::string>();
    c.name = jc.value("name", c.id);
    c.non_target = jc.value("non_target", false);
    categories.push_back(std::move(c));
  }
  std::vector<Criterion> criteria;
  for (const auto& jq : j.at("criteria")) {
    Criterion q;
    q.id = jq.at("id").get<std::string>();
    q.text = jq.value("text", std::string{});
    q.category_id = jq.at("category").get<std::string>();
    criteria.push_back(std::move(q));
  }
  return Schema(std::move(categories), std::move(criteria),
                j.value("version", std::string{}));
}

Schema load_schema(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open schema file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_schema(text, path);
}

void save_schema(const Schema& schema, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write schema file '" + path + "'");
  out << schema.to_json();
}

}  // namespace audit
