#include "guesswork/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <unordered_map>

#include "guesswork/errors.hpp"

namespace guesswork {

namespace {

std::string where(std::size_t line) { return line > 0 ? "line " + std::to_string(line) + ": " : ""; }

}  // namespace

Pmf empirical_from_counts(std::span<const CountRow> rows) {
  if (rows.empty()) throw InputError("empirical_from_counts: no records");
  std::unordered_map<std::string_view, std::size_t> first_seen;
  first_seen.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.count == 0) throw InputError(where(row.line) + "count must be a positive integer");
    const auto [it, inserted] = first_seen.emplace(row.symbol, row.line);
    if (!inserted) {
      throw InputError(where(row.line) + "duplicate symbol '" + row.symbol + "' (first seen " +
                       where(it->second) + ")");
    }
  }

  std::vector<const CountRow*> order;
  order.reserve(rows.size());
  for (const auto& row : rows) order.push_back(&row);
  std::sort(order.begin(), order.end(), [](const CountRow* a, const CountRow* b) {
    if (a->count != b->count) return a->count > b->count;
    return a->symbol < b->symbol;
  });

  long double total = 0;
  for (const auto& row : rows) total += static_cast<long double>(row.count);

  std::vector<std::string> symbols;
  std::vector<double> probs;
  symbols.reserve(rows.size());
  probs.reserve(rows.size());
  for (const CountRow* row : order) {
    symbols.push_back(row->symbol);
    probs.push_back(static_cast<double>(static_cast<long double>(row->count) / total));
  }
  return Pmf::renormalized(std::make_shared<const Alphabet>(std::move(symbols)), std::move(probs));
}

std::vector<CountRow> parse_frequency_text(std::istream& in) {
  std::vector<CountRow> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw InputError(where(number) + "expected '<password>\\t<count>'");
    const std::string_view digits(line.data() + tab + 1, line.size() - tab - 1);
    std::uint64_t count = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), count);
    if (digits.empty() || ec != std::errc() || end != digits.data() + digits.size()) {
      throw InputError(where(number) + "count '" + std::string(digits) + "' is not a base-10 integer");
    }
    if (count == 0) throw InputError(where(number) + "count must be a positive integer");
    rows.push_back(CountRow{line.substr(0, tab), count, number});
  }
  return rows;
}

std::vector<CountRow> read_frequency_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open frequency file '" + path.string() + "'");
  return parse_frequency_text(in);
}

Pmf truncate_top_k(const Pmf& p, std::size_t k) {
  if (k == 0) throw InputError("top-k must be positive");
  if (k >= p.size()) return p;
  std::vector<std::size_t> idx(p.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<std::string> symbols;
  std::vector<double> weights;
  for (std::size_t i : idx) {
    symbols.push_back(p.symbol(i));
    weights.push_back(p[i]);
  }
  return Pmf::normalized(std::make_shared<const Alphabet>(std::move(symbols)), std::move(weights));
}

}  // namespace guesswork
