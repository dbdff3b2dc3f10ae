#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "budgetcot/core.hpp"

namespace budgetcot {

enum class DatasetFormat { gsm8k_jsonl, mathbench_json, scripted_json };

std::string_view to_string(DatasetFormat format);
DatasetFormat dataset_format_from_string(std::string_view name);

struct SamplingInfo {
  std::uint64_t seed = 0;
  std::size_t sample_size = 0;
  std::size_t source_size = 0;
};

struct Dataset {
  std::string name;
  std::vector<Question> questions;
  /// Set whenever `questions` is a subsample of the source file.
  std::optional<SamplingInfo> sampling;
};

/// Gold answer of a GSM8K answer field: the text after the last "#### ".
std::optional<std::string> gsm8k_gold_answer(std::string_view answer_field);

/// Loads and normalizes a dataset file. Throws DatasetError naming the line
/// (JSONL) or item index (JSON) of the first malformed record, and on
/// duplicate ids or missing gold answers.
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     std::string name = {});

/// Seeded subsample of n questions kept in source order. Identical (seed, n)
/// gives the identical subset on every platform. Throws DomainError if n > size.
Dataset sample_dataset(const Dataset& dataset, std::size_t n, std::uint64_t seed);

}  // namespace budgetcot
