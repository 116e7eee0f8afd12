#include "dco/multiindex.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace dco {

MultiIndex::MultiIndex(std::initializer_list<value_type> entries) : entries_(entries) {
  canonicalize();
}

MultiIndex::MultiIndex(std::vector<value_type> entries) : entries_(std::move(entries)) {
  canonicalize();
}

void MultiIndex::canonicalize() {
  while (!entries_.empty() && entries_.back() == 0) entries_.pop_back();
}

std::uint64_t MultiIndex::degree() const {
  std::uint64_t total = 0;
  for (auto e : entries_) total += e;
  return total;
}

boost::multiprecision::cpp_int MultiIndex::factorial() const {
  boost::multiprecision::cpp_int result = 1;
  for (auto e : entries_)
    for (value_type k = 2; k <= e; ++k) result *= k;
  return result;
}

double MultiIndex::log_factorial() const {
  double total = 0.0;
  for (auto e : entries_)
    if (e > 1) total += std::lgamma(static_cast<double>(e) + 1.0);
  return total;
}

std::optional<MultiIndex::LastNonzero> MultiIndex::last_nonzero() const {
  if (entries_.empty()) return std::nullopt;
  return LastNonzero{entries_.size(), entries_.back()};
}

MultiIndex MultiIndex::with_slot(std::size_t i, value_type value) const {
  if (i == 0) throw std::invalid_argument("MultiIndex slots are 1-based");
  std::vector<value_type> e = entries_;
  if (e.size() < i) e.resize(i, 0);
  e[i - 1] = value;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::prefix(std::size_t ell) const {
  if (ell >= entries_.size()) return *this;
  return MultiIndex(std::vector<value_type>(entries_.begin(), entries_.begin() + ell));
}

std::string MultiIndex::to_string() const {
  if (entries_.empty()) return "()";
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(entries_[i]);
  }
  return out;
}

MultiIndex MultiIndex::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (!text.empty() && text.front() == '(') {
    if (text.back() != ')') throw std::invalid_argument("unbalanced parentheses in multi-index");
    text = trim(text.substr(1, text.size() - 2));
  }
  std::vector<value_type> entries;
  if (text.empty()) return MultiIndex{};
  while (true) {
    auto comma = text.find(',');
    auto field = trim(text.substr(0, comma));
    value_type v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
      throw std::invalid_argument("bad multi-index entry '" + std::string(field) + "'");
    entries.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return MultiIndex(std::move(entries));
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
  if (auto c = degree() <=> other.degree(); c != 0) return c;
  const std::size_t n = std::max(entries_.size(), other.entries_.size());
  for (std::size_t i = 1; i <= n; ++i) {
    // larger leading entry sorts first
    if (auto c = other.slot(i) <=> slot(i); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

MultiIndex coarsen(const MultiIndex& fine, std::size_t n0, std::size_t n1) {
  if (n0 == 0 || n1 == 0) throw std::invalid_argument("coarsen: N0 and N1 must be positive");
  if (fine.size() > n0 * n1)
    throw std::invalid_argument("coarsen: index " + fine.to_string() + " exceeds N0*N1 slots");
  std::vector<MultiIndex::value_type> blocks(n0, 0);
  for (std::size_t k = 1; k <= fine.size(); ++k) blocks[(k - 1) / n1] += fine.slot(k);
  return MultiIndex(std::move(blocks));
}

bool matches(const MultiIndex& fine, const MultiIndex& coarse, std::size_t n0, std::size_t n1) {
  if (fine.size() > n0 * n1 || coarse.size() > n0) return false;
  return coarsen(fine, n0, n1) == coarse;
}

namespace {

// Compositions of `total` into `parts` non-negative parts, first part largest first.
void compositions(std::uint32_t total, std::size_t parts, std::vector<std::uint32_t>& prefix,
                  const std::function<void(const std::vector<std::uint32_t>&)>& visit) {
  if (parts == 1) {
    prefix.push_back(total);
    visit(prefix);
    prefix.pop_back();
    return;
  }
  for (std::uint32_t first = total + 1; first-- > 0;) {
    prefix.push_back(first);
    compositions(total - first, parts - 1, prefix, visit);
    prefix.pop_back();
  }
}

}  // namespace

void for_each_matching(const MultiIndex& coarse, std::size_t n0, std::size_t n1,
                       const std::function<void(const MultiIndex&)>& visit) {
  if (n0 == 0 || n1 == 0) throw std::invalid_argument("enumerate_matching: N0 and N1 must be positive");
  if (coarse.size() > n0) throw std::invalid_argument("enumerate_matching: coarse index exceeds N0 slots");
  const std::size_t blocks = coarse.size();
  std::vector<MultiIndex::value_type> fine(blocks * n1, 0);

  // Depth-first over blocks; each block runs through the compositions of a_i.
  std::function<void(std::size_t)> fill = [&](std::size_t block) {
    if (block == blocks) {
      visit(MultiIndex(fine));
      return;
    }
    std::vector<std::uint32_t> scratch;
    compositions(coarse.slot(block + 1), n1, scratch, [&](const std::vector<std::uint32_t>& parts) {
      std::copy(parts.begin(), parts.end(), fine.begin() + static_cast<std::ptrdiff_t>(block * n1));
      fill(block + 1);
    });
  };
  fill(0);
}

std::vector<MultiIndex> enumerate_matching(const MultiIndex& coarse, std::size_t n0, std::size_t n1) {
  std::vector<MultiIndex> out;
  out.reserve(matching_count(coarse, n1));
  for_each_matching(coarse, n0, n1, [&](const MultiIndex& a) { out.push_back(a); });
  return out;
}

std::uint64_t matching_count(const MultiIndex& coarse, std::size_t n1) {
  std::uint64_t count = 1;
  for (auto ai : coarse.entries()) {
    // C(ai + n1 - 1, n1 - 1), built incrementally to stay exact
    std::uint64_t c = 1;
    for (std::uint64_t k = 1; k <= ai; ++k) c = c * (n1 - 1 + k) / k;
    count *= c;
  }
  return count;
}

std::vector<MultiIndex> enumerate_degree(std::size_t dimension, std::size_t degree) {
  std::vector<MultiIndex> out;
  if (dimension == 0) {
    if (degree == 0) out.emplace_back();
    return out;
  }
  std::vector<std::uint32_t> scratch;
  compositions(static_cast<std::uint32_t>(degree), dimension, scratch,
               [&](const std::vector<std::uint32_t>& parts) { out.emplace_back(parts); });
  return out;
}

std::vector<MultiIndex> enumerate_upto(std::size_t dimension, std::size_t max_degree) {
  std::vector<MultiIndex> out;
  for (std::size_t d = 0; d <= max_degree; ++d) {
    auto level = enumerate_degree(dimension, d);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace dco

std::size_t std::hash<dco::MultiIndex>::operator()(const dco::MultiIndex& a) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (auto e : a.entries()) h ^= std::hash<std::uint32_t>{}(e) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}
