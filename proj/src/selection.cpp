#include "pose_eval/selection.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pose_eval/error.hpp"
#include "pose_eval/text_util.hpp"

namespace pose_eval {

extern const char* const kBuiltinSelectionPresets;

namespace {

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::size_t> parse_indices(std::string_view spec, const std::string& where) {
  std::vector<std::size_t> out;
  for (auto part : split(spec, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string_view::npos) {
      const auto v = parse_int(part);
      if (!v || *v < 0) fail(ErrorCode::ParseError, where + ": bad index '" + std::string(part) + "'");
      out.push_back(static_cast<std::size_t>(*v));
    } else {
      const auto lo = parse_int(part.substr(0, dash));
      const auto hi = parse_int(part.substr(dash + 1));
      if (!lo || !hi || *lo < 0 || *hi < *lo) {
        fail(ErrorCode::ParseError, where + ": bad range '" + std::string(part) + "'");
      }
      for (auto i = *lo; i <= *hi; ++i) out.push_back(static_cast<std::size_t>(i));
    }
  }
  return out;
}

}  // namespace

std::vector<PointRef> KeypointSelection::expand(const PoseHeader& header) const {
  std::vector<PointRef> out;
  for (const auto& e : entries) {
    if (e.component == "*") {
      for (const auto& c : header.components()) {
        for (std::size_t i = 0; i < c.point_count; ++i) out.push_back({c.name, i});
      }
      continue;
    }
    const auto* c = header.find(e.component);
    if (!c) {
      fail(ErrorCode::UnknownComponent,
           "selection '" + name + "' references component '" + e.component + "'");
    }
    if (e.indices.empty()) {
      for (std::size_t i = 0; i < c->point_count; ++i) out.push_back({c->name, i});
    } else {
      for (auto i : e.indices) out.push_back({c->name, i});
    }
  }
  return out;
}

std::size_t resolve_point(const PointRef& ref, const PoseHeader& header) {
  const auto offset = header.offset_of(ref.component);
  if (!offset) fail(ErrorCode::UnknownComponent, "unknown component '" + ref.component + "'");
  const auto* c = header.find(ref.component);
  if (ref.index >= c->point_count) {
    fail(ErrorCode::IndexOutOfRange, ref.component + ":" + std::to_string(ref.index) +
                                         " exceeds " + std::to_string(c->point_count) +
                                         " points");
  }
  return *offset + ref.index;
}

std::vector<std::size_t> resolve_selection(const KeypointSelection& sel, const PoseHeader& header) {
  std::vector<std::size_t> out;
  std::set<std::size_t> seen;
  for (const auto& ref : sel.expand(header)) {
    const auto flat = resolve_point(ref, header);
    if (!seen.insert(flat).second) {
      fail(ErrorCode::InvalidConfig, "selection '" + sel.name + "' lists " + ref.component +
                                         ":" + std::to_string(ref.index) + " twice");
    }
    out.push_back(flat);
  }
  return out;
}

SelectionLibrary SelectionLibrary::parse(std::string_view ini_text, const std::string& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(ini_text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::ParseError, origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  // Raw entries first so @references can point forward.
  std::map<std::string, std::vector<std::string>> raw;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      fail(ErrorCode::ParseError, origin + ": key '" + section + "' outside of a preset section");
    }
    const auto points = body.get_optional<std::string>("points");
    if (!points) fail(ErrorCode::ParseError, origin + ": preset '" + section + "' lacks points");
    std::vector<std::string> tokens;
    for (auto t : split_whitespace(*points)) tokens.emplace_back(t);
    raw[section] = std::move(tokens);
    order.emplace_back(section, body.get<std::string>("label", section));
  }

  SelectionLibrary lib;
  std::map<std::string, std::vector<SelectionEntry>> done;
  std::function<std::vector<SelectionEntry>(const std::string&, std::set<std::string>&)> build =
      [&](const std::string& name, std::set<std::string>& stack) -> std::vector<SelectionEntry> {
    if (auto it = done.find(name); it != done.end()) return it->second;
    if (!stack.insert(name).second) {
      fail(ErrorCode::ParseError, origin + ": preset '" + name + "' references itself");
    }
    const auto where = origin + ": preset '" + name + "'";
    std::vector<SelectionEntry> entries;
    for (const auto& tok : raw.at(name)) {
      if (tok.starts_with('@')) {
        const auto ref = tok.substr(1);
        if (!raw.contains(ref)) fail(ErrorCode::ParseError, where + ": unknown reference '" + tok + "'");
        auto sub = build(ref, stack);
        entries.insert(entries.end(), sub.begin(), sub.end());
      } else if (tok == "*") {
        entries.push_back({"*", {}});
      } else {
        const auto colon = tok.find(':');
        if (colon == std::string::npos || colon == 0) {
          fail(ErrorCode::ParseError, where + ": entry '" + tok + "' is not COMPONENT:INDEX");
        }
        SelectionEntry e{tok.substr(0, colon), {}};
        const auto idx = std::string_view(tok).substr(colon + 1);
        if (idx != "*") e.indices = parse_indices(idx, where);
        entries.push_back(std::move(e));
      }
    }
    stack.erase(name);
    done[name] = entries;
    return entries;
  };

  for (const auto& [name, label] : order) {
    std::set<std::string> stack;
    lib.add(KeypointSelection{name, label, build(name, stack)});
  }
  return lib;
}

SelectionLibrary SelectionLibrary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const SelectionLibrary& SelectionLibrary::builtin() {
  static const SelectionLibrary lib = parse(kBuiltinSelectionPresets, "selection_presets.ini");
  return lib;
}

const KeypointSelection* SelectionLibrary::find(std::string_view name_or_label) const {
  for (const auto& p : presets_) {
    if (p.name == name_or_label || p.label == name_or_label) return &p;
  }
  return nullptr;
}

const KeypointSelection& SelectionLibrary::at(std::string_view name_or_label) const {
  const auto* p = find(name_or_label);
  if (!p) {
    fail(ErrorCode::InvalidConfig, "unknown keypoint selection '" + std::string(name_or_label) + "'");
  }
  return *p;
}

void SelectionLibrary::add(KeypointSelection sel) {
  for (const auto& p : presets_) {
    if (p.name == sel.name || p.label == sel.label) {
      fail(ErrorCode::InvalidConfig, "selection '" + sel.name + "' defined twice");
    }
  }
  presets_.push_back(std::move(sel));
}

}  // namespace pose_eval
