#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace graftbench {

// Canonical table of monitored API categories. Dynamic feature vectors have
// one counter per category; the first kStaticApiCategoryCount entries double
// as the category list behind the manifest's static API counts. The table is
// versioned: any reordering or edit must bump kApiTableVersion, since feature
// indices and persisted corpora depend on it.
inline constexpr int kApiCategoryCount = 37;
inline constexpr int kStaticApiCategoryCount = 27;
inline constexpr int kApiTableVersion = 1;
inline constexpr int kUnknownCategory = -1;

std::span<const std::string_view> api_category_names();

// Name of category index in [0, kApiCategoryCount).
std::string_view api_category_name(int category);

// Index of an exact category name, kUnknownCategory if absent.
int api_category_index(std::string_view name);

// Monitored methods of a category, used when synthesizing call emissions.
std::span<const std::string_view> api_category_methods(int category);

// Longest-prefix match of the class name against the category table. The
// method name is accepted for interface symmetry; matching is class-based.
int map_call_to_category(std::string_view class_name, std::string_view method_name);

// Splits a full "package.module.class.method" string at the last dot.
std::pair<std::string, std::string> split_call_name(std::string_view full_method);

// "class.method" for category's n-th monitored method.
std::string make_method_name(int category, int method_index);

}  // namespace graftbench
