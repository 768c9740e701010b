#include "mixpl/profile_io.hpp"

#include <json.hpp>

#include "mixpl/errors.hpp"

namespace mixpl {
namespace {

using Json = nlohmann::ordered_json;

std::vector<int> zero_based(const Json& array, std::size_t line, const char* field) {
  if (!array.is_array()) throw ParseError(line, std::string("field '") + field + "' must be an array");
  std::vector<int> out;
  out.reserve(array.size());
  for (const Json& v : array) {
    if (!v.is_number_integer()) {
      throw ParseError(line, std::string("field '") + field + "' must hold integers");
    }
    out.push_back(v.get<int>() - 1);
  }
  return out;
}

Json one_based(std::span<const int> items) {
  Json array = Json::array();
  for (int a : items) array.push_back(a + 1);
  return array;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

std::optional<PartialOrder> ProfileSource::next() {
  if (cursor_ >= profile_.orders.size()) return std::nullopt;
  return profile_.orders[cursor_++];
}

JsonLinesSource::JsonLinesSource(std::istream& in) : in_(in) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (blank(line)) continue;
    Json header;
    try {
      header = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(line_, std::string("malformed header: ") + e.what());
    }
    if (!header.is_object() || !header.contains("m") || !header["m"].is_number_integer() ||
        header.contains("kind")) {
      throw ParseError(line_, "expected header line {\"m\": <int>}");
    }
    m_ = header["m"].get<int>();
    if (m_ < 2) throw ParseError(line_, "header requires m >= 2");
    return;
  }
  throw ParseError(line_, "missing header line");
}

std::optional<PartialOrder> JsonLinesSource::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (blank(line)) continue;
    return parse_order_line(line, m_, line_);
  }
  return std::nullopt;
}

PartialOrder parse_order_line(const std::string& line, int m, std::size_t line_number) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError(line_number, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ParseError(line_number, "order line needs a string 'kind'");
  }
  if (j.contains("m")) {
    if (!j["m"].is_number_integer()) throw ParseError(line_number, "'m' must be an integer");
    if (j["m"].get<int>() != m) {
      throw ParseError(line_number, "order declares m=" + std::to_string(j["m"].get<int>()) +
                                        " but profile has m=" + std::to_string(m));
    }
  }
  const std::string kind = j["kind"].get<std::string>();
  try {
    PartialOrder o = [&] {
      if (kind == "top" || kind == "way") {
        if (!j.contains("ranked")) throw ParseError(line_number, "missing 'ranked'");
        std::vector<int> ranked = zero_based(j["ranked"], line_number, "ranked");
        return kind == "top" ? PartialOrder::top(std::move(ranked))
                             : PartialOrder::way(std::move(ranked));
      }
      if (kind == "choice") {
        if (!j.contains("subset") || !j.contains("chosen") || !j["chosen"].is_number_integer()) {
          throw ParseError(line_number, "choice order needs 'subset' and integer 'chosen'");
        }
        return PartialOrder::choice(zero_based(j["subset"], line_number, "subset"),
                                    j["chosen"].get<int>() - 1);
      }
      throw ParseError(line_number, "unknown kind '" + kind + "'");
    }();
    o.validate(m);
    return o;
  } catch (const InvariantError& e) {
    throw InvariantError("line " + std::to_string(line_number) + ": " + e.what());
  }
}

std::string format_order_line(const PartialOrder& o, int m) {
  Json j;
  j["kind"] = to_string(o.kind());
  j["m"] = m;
  if (o.kind() == StructureKind::Choice) {
    j["subset"] = one_based(o.items());
    j["chosen"] = o.chosen() + 1;
  } else {
    j["ranked"] = one_based(o.items());
  }
  return j.dump();
}

Profile read_profile(std::istream& in) {
  JsonLinesSource source(in);
  Profile profile;
  profile.m = source.m();
  while (auto o = source.next()) profile.orders.push_back(std::move(*o));
  return profile;
}

void write_profile(std::ostream& out, const Profile& profile) {
  Json header;
  header["m"] = profile.m;
  out << header.dump() << '\n';
  for (const PartialOrder& o : profile.orders) out << format_order_line(o, profile.m) << '\n';
}

}  // namespace mixpl
