#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dco {

/// Finitely supported multi-index a = (a_1, a_2, ...) of non-negative integers.
///
/// Stored in canonical form with trailing zeros removed, so the same index is
/// valid on every grid with at least `size()` slots. Slots are 1-based in the
/// public API (slot(1) is the first increment), matching the usual a_i notation.
class MultiIndex {
 public:
  using value_type = std::uint32_t;

  MultiIndex() = default;
  MultiIndex(std::initializer_list<value_type> entries);
  explicit MultiIndex(std::vector<value_type> entries);

  /// Number of stored slots (position of the last nonzero entry, 0 if none).
  std::size_t size() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }

  /// Entry at 1-based slot i; zero beyond the stored range.
  value_type slot(std::size_t i) const {
    return (i >= 1 && i <= entries_.size()) ? entries_[i - 1] : 0;
  }
  const std::vector<value_type>& entries() const { return entries_; }

  /// |a| = sum of entries.
  std::uint64_t degree() const;

  /// a! = prod a_i! (exact).
  boost::multiprecision::cpp_int factorial() const;
  /// log(a!) in double precision, for ratios fed into floating-point formulas.
  double log_factorial() const;

  struct LastNonzero {
    std::size_t slot;
    value_type value;
    bool operator==(const LastNonzero&) const = default;
  };
  std::optional<LastNonzero> last_nonzero() const;

  /// Copy with slot i set to `value` (re-canonicalized).
  MultiIndex with_slot(std::size_t i, value_type value) const;
  /// Copy truncated to the first `ell` slots.
  MultiIndex prefix(std::size_t ell) const;

  /// Textual form "a1,a2,...,ak"; the zero index prints as "()".
  std::string to_string() const;
  /// Accepts the textual form, optionally wrapped in parentheses; "()" and "" are zero.
  static MultiIndex parse(std::string_view text);

  bool operator==(const MultiIndex&) const = default;
  /// Graded lexicographic order: lower degree first; within a degree the
  /// index with the larger leading entry comes first, so (1) < (0,1).
  std::strong_ordering operator<=>(const MultiIndex& other) const;

 private:
  void canonicalize();
  std::vector<value_type> entries_;
};

/// Block sums a_i = sum_{k=(i-1)N1+1}^{iN1} a'_k. Throws std::invalid_argument if
/// a_fine uses more than N0*N1 slots.
MultiIndex coarsen(const MultiIndex& fine, std::size_t n0, std::size_t n1);

/// True iff every coarse block sum of `fine` equals the corresponding entry of `coarse`.
bool matches(const MultiIndex& fine, const MultiIndex& coarse, std::size_t n0, std::size_t n1);

/// Visits every fine index on N0*N1 slots that matches `coarse`, exactly once.
void for_each_matching(const MultiIndex& coarse, std::size_t n0, std::size_t n1,
                       const std::function<void(const MultiIndex&)>& visit);
std::vector<MultiIndex> enumerate_matching(const MultiIndex& coarse, std::size_t n0, std::size_t n1);

/// Number of fine indexes matching `coarse`: prod_i C(a_i + N1 - 1, N1 - 1).
std::uint64_t matching_count(const MultiIndex& coarse, std::size_t n1);

/// All indexes with at most `dimension` slots and degree <= max_degree, in graded lex order.
std::vector<MultiIndex> enumerate_upto(std::size_t dimension, std::size_t max_degree);

/// All indexes with at most `dimension` slots and degree exactly `degree`, in graded lex order.
std::vector<MultiIndex> enumerate_degree(std::size_t dimension, std::size_t degree);

}  // namespace dco

template <>
struct std::hash<dco::MultiIndex> {
  std::size_t operator()(const dco::MultiIndex& a) const noexcept;
};
