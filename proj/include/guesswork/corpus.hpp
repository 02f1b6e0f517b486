#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "guesswork/pmf.hpp"

namespace guesswork {

struct CountRow {
  std::string symbol;
  std::uint64_t count = 0;
  std::size_t line = 0;  // 1-based source line, 0 when not from a file
};

/// Empirical distribution proportional to the counts. Support is ordered by
/// descending count, ties broken lexicographically. Throws InputError on an
/// empty input, duplicate symbols, or zero counts.
Pmf empirical_from_counts(std::span<const CountRow> rows);

/// Parses the `<password>\t<count>` frequency format. Lines starting with
/// '#' and blank lines are skipped; the count follows the last tab on the
/// line. Throws InputError naming the offending line.
std::vector<CountRow> parse_frequency_text(std::istream& in);
std::vector<CountRow> read_frequency_file(const std::filesystem::path& path);

/// Keeps the k most probable symbols (in support order) and renormalizes.
Pmf truncate_top_k(const Pmf& p, std::size_t k);

}  // namespace guesswork
