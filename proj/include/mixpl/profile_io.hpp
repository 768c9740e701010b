#pragma once

// JSON-Lines profile format:
//
//   {"m":4}
//   {"kind":"top","m":4,"ranked":[2,3]}
//   {"kind":"way","m":4,"ranked":[3,4,1]}
//   {"kind":"choice","m":4,"subset":[1,2,3],"chosen":3}
//
// Indices are 1-based. Writers emit choice subsets sorted ascending; that is
// the canonical form under which write(read(x)) == x byte for byte.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "mixpl/core.hpp"

namespace mixpl {

// Forward-only stream of orders.
class OrderSource {
 public:
  virtual ~OrderSource() = default;
  virtual int m() const = 0;
  virtual std::optional<PartialOrder> next() = 0;
};

class ProfileSource final : public OrderSource {
 public:
  explicit ProfileSource(const Profile& profile) : profile_(profile) {}
  int m() const override { return profile_.m; }
  std::optional<PartialOrder> next() override;

 private:
  const Profile& profile_;
  std::size_t cursor_ = 0;
};

// Reads the header eagerly and then one order per next() call.
class JsonLinesSource final : public OrderSource {
 public:
  explicit JsonLinesSource(std::istream& in);
  int m() const override { return m_; }
  std::optional<PartialOrder> next() override;

 private:
  std::istream& in_;
  int m_ = 0;
  std::size_t line_ = 0;
};

PartialOrder parse_order_line(const std::string& line, int m, std::size_t line_number = 0);
std::string format_order_line(const PartialOrder& o, int m);

Profile read_profile(std::istream& in);
void write_profile(std::ostream& out, const Profile& profile);

}  // namespace mixpl
