#include "qtkz/style.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "qtkz/error.hpp"
#include "qtkz/strings.hpp"

namespace qtkz {

namespace {

std::optional<Color> base_color(std::string_view name) {
    static const std::map<std::string, Color, std::less<>> table = {
        {"red", {1, 0, 0}},     {"green", {0, 1, 0}},  {"blue", {0, 0, 1}},   {"cyan", {0, 1, 1}},
        {"magenta", {1, 0, 1}}, {"yellow", {1, 1, 0}}, {"black", {0, 0, 0}},  {"white", {1, 1, 1}},
        {"gray", {0.5, 0.5, 0.5}}, {"orange", {1, 0.5, 0}},
    };
    auto it = table.find(trim(name));
    if (it == table.end()) return std::nullopt;
    return it->second;
}

Color named_or_throw(std::string_view name) {
    auto c = base_color(name);
    if (!c) throw Error(ErrorCode::UnknownColorName, fmt::format("unknown color '{}'", trim(name)));
    return *c;
}

Color mix(const Color &a, const Color &b, double weight_a) {
    auto blend = [&](double x, double y) { return std::clamp(weight_a * x + (1.0 - weight_a) * y, 0.0, 1.0); };
    return {blend(a.r, b.r), blend(a.g, b.g), blend(a.b, b.b)};
}

std::optional<LabelPosition> parse_label_position(std::string_view v) {
    v = trim(v);
    if (v == "above") return LabelPosition::Above;
    if (v == "below") return LabelPosition::Below;
    if (v == "left") return LabelPosition::Left;
    if (v == "right") return LabelPosition::Right;
    return std::nullopt;
}

std::optional<Anchor> parse_anchor(std::string_view v) {
    static const std::map<std::string, Anchor, std::less<>> table = {
        {"center", Anchor::Center},          {"north", Anchor::North},
        {"south", Anchor::South},            {"east", Anchor::East},
        {"west", Anchor::West},              {"north east", Anchor::NorthEast},
        {"north west", Anchor::NorthWest},   {"south east", Anchor::SouthEast},
        {"south west", Anchor::SouthWest},   {"mid", Anchor::Mid},
        {"base", Anchor::Base},
    };
    auto it = table.find(trim(v));
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::optional<Paint> parse_paint(std::string_view v) {
    if (trim(v) == "none") return Paint{};
    try {
        return Paint{parse_color(v)};
    } catch (const Error &) {
        return std::nullopt;
    }
}

template <typename T>
void overlay(std::optional<T> &dst, const std::optional<T> &src) {
    if (src) dst = src;
}

template <typename T>
void overlay(T &dst, const std::optional<T> &src) {
    if (src) dst = *src;
}

}  // namespace

Color parse_color(std::string_view spec) {
    spec = trim(spec);
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= spec.size(); ++i) {
        if (i == spec.size() || spec[i] == '!') {
            parts.push_back(trim(spec.substr(start, i - start)));
            start = i + 1;
        }
    }
    if (parts.size() == 1) return named_or_throw(parts[0]);
    if (parts.size() != 2 && parts.size() != 3) {
        throw Error(ErrorCode::UnknownColorName, fmt::format("unsupported color expression '{}'", spec));
    }
    Color a = named_or_throw(parts[0]);
    auto percent = parse_real(parts[1]);
    if (!percent || *percent < 0.0 || *percent > 100.0) {
        throw Error(ErrorCode::BadPercent, fmt::format("bad mixing percentage in '{}'", spec));
    }
    Color b = parts.size() == 3 ? named_or_throw(parts[2]) : Color{1, 1, 1};
    return mix(a, b, *percent / 100.0);
}

std::string to_hex(const Color &c) {
    auto channel = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    return fmt::format("#{:02x}{:02x}{:02x}", channel(c.r), channel(c.g), channel(c.b));
}

NodeStylePartial merge(const NodeStylePartial &base, const NodeStylePartial &over) {
    NodeStylePartial out = base;
    overlay(out.stroke, over.stroke);
    overlay(out.fill, over.fill);
    overlay(out.line_width, over.line_width);
    overlay(out.dashed, over.dashed);
    overlay(out.rounded, over.rounded);
    overlay(out.corner_radius, over.corner_radius);
    overlay(out.inner_xsep, over.inner_xsep);
    overlay(out.inner_ysep, over.inner_ysep);
    overlay(out.xshift, over.xshift);
    overlay(out.yshift, over.yshift);
    overlay(out.shorten_start, over.shorten_start);
    overlay(out.shorten_end, over.shorten_end);
    overlay(out.label_position, over.label_position);
    overlay(out.anchor, over.anchor);
    overlay(out.rotate_deg, over.rotate_deg);
    overlay(out.font_scale, over.font_scale);
    return out;
}

NodeStyle apply(NodeStyle out, const NodeStylePartial &over) {
    overlay(out.stroke, over.stroke);
    overlay(out.fill, over.fill);
    overlay(out.line_width, over.line_width);
    overlay(out.dashed, over.dashed);
    overlay(out.rounded, over.rounded);
    overlay(out.corner_radius, over.corner_radius);
    overlay(out.inner_xsep, over.inner_xsep);
    overlay(out.inner_ysep, over.inner_ysep);
    overlay(out.xshift, over.xshift);
    overlay(out.yshift, over.yshift);
    overlay(out.shorten_start, over.shorten_start);
    overlay(out.shorten_end, over.shorten_end);
    overlay(out.label_position, over.label_position);
    overlay(out.anchor, over.anchor);
    overlay(out.rotate_deg, over.rotate_deg);
    overlay(out.font_scale, over.font_scale);
    return out;
}

ParsedStyle parse_style_keys(const std::vector<KeyValue> &pairs) {
    ParsedStyle out;
    auto &s = out.style;
    for (const auto &kv : pairs) {
        const std::string &key = kv.key;
        const std::string value = kv.value.value_or("");
        bool ok = true;
        auto length_into = [&](std::optional<Length> &dst) {
            if (auto len = parse_length(value)) {
                dst = *len;
            } else {
                ok = false;
            }
        };

        if (key == "draw") {
            if (!kv.value) {
                s.stroke = Paint{Color{0, 0, 0}};
            } else if (auto p = parse_paint(value)) {
                s.stroke = *p;
            } else {
                ok = false;
            }
        } else if (key == "fill") {
            if (auto p = kv.value ? parse_paint(value) : std::nullopt) {
                s.fill = *p;
            } else {
                ok = false;
            }
        } else if (key == "line width") {
            length_into(s.line_width);
        } else if (key == "dashed" && !kv.value) {
            s.dashed = true;
        } else if (key == "solid" && !kv.value) {
            s.dashed = false;
        } else if (key == "rounded corners") {
            s.rounded = true;
            if (kv.value) length_into(s.corner_radius);
        } else if (key == "sharp corners" && !kv.value) {
            s.rounded = false;
        } else if (key == "inner sep") {
            length_into(s.inner_xsep);
            s.inner_ysep = s.inner_xsep;
        } else if (key == "inner xsep") {
            length_into(s.inner_xsep);
        } else if (key == "inner ysep") {
            length_into(s.inner_ysep);
        } else if (key == "xshift") {
            length_into(s.xshift);
        } else if (key == "yshift") {
            length_into(s.yshift);
        } else if (key == "shorten <") {
            length_into(s.shorten_start);
        } else if (key == "shorten >") {
            length_into(s.shorten_end);
        } else if (key == "label position") {
            if (auto p = parse_label_position(value)) {
                s.label_position = *p;
            } else {
                ok = false;
            }
        } else if (key == "anchor") {
            if (auto a = parse_anchor(value)) {
                s.anchor = *a;
            } else {
                ok = false;
            }
        } else if (key == "rotate") {
            if (auto r = parse_real(value)) {
                s.rotate_deg = *r;
            } else {
                ok = false;
            }
        } else if (!kv.value) {
            // A bare color name sets the stroke.
            if (auto p = parse_paint(key); p && key != "none") {
                s.stroke = *p;
            } else {
                ok = false;
            }
        } else {
            ok = false;
        }

        if (!ok) out.unknown_keys.push_back(kv.value ? key + "=" + *kv.value : key);
    }
    return out;
}

ParsedStyle parse_style_keys(std::string_view raw) { return parse_style_keys(parse_key_values(raw)); }

std::string_view global_style_name(StyleTarget target) {
    switch (target) {
        case StyleTarget::Gate: return "operator";
        case StyleTarget::GateLabel: return "gg label";
        case StyleTarget::Meter: return "meter";
        case StyleTarget::MeterLabel: return "my label";
        case StyleTarget::Slice: return "slice";
        case StyleTarget::Wave: return "wave";
        case StyleTarget::GateInput: return "leftinternal";
        case StyleTarget::GateOutput: return "rightinternal";
        case StyleTarget::LeftBrace: return "dm";
        case StyleTarget::RightBrace: return "dd";
        case StyleTarget::Phase: return "phase";
        case StyleTarget::OpenPhase: return "ophase";
        case StyleTarget::PhaseLabel: return "phase label";
        case StyleTarget::Targ: return "circlewc";
        case StyleTarget::Swap: return "crossx2";
        case StyleTarget::GroupLabel: return "group label";
        default: return "";
    }
}

NodeStyle builtin_style(StyleTarget target) {
    NodeStyle s;
    const Color black{0, 0, 0};
    const Color white{1, 1, 1};
    switch (target) {
        case StyleTarget::Gate:
        case StyleTarget::Meter:
        case StyleTarget::Targ:
        case StyleTarget::OpenPhase:
            s.fill = Paint{white};
            break;
        case StyleTarget::Phase:
            s.fill = Paint{black};
            break;
        case StyleTarget::Slice:
            s.dashed = true;
            break;
        case StyleTarget::MeterLabel:
        case StyleTarget::PhaseLabel:
        case StyleTarget::GateInput:
        case StyleTarget::GateOutput:
            s.font_scale = 0.7;
            s.inner_xsep = Length::pt(1);
            s.inner_ysep = Length::pt(1);
            break;
        case StyleTarget::SliceLabel:
        case StyleTarget::GroupLabel:
            s.font_scale = 0.8;
            s.inner_xsep = Length::pt(1);
            s.inner_ysep = Length::pt(1);
            break;
        case StyleTarget::Wave:
            s.line_width = Length::pt(0.4);
            break;
        default:
            break;
    }
    return s;
}

StyleSheet::StyleSheet() {
    for (const auto &name : documented_names()) named_[name] = NodeStylePartial{};
}

const std::vector<std::string> &StyleSheet::documented_names() {
    static const std::vector<std::string> names = {
        "operator", "meter",   "slice",  "wave",     "leftinternal", "rightinternal", "dm",          "dd",
        "phase",    "ophase",  "circlewc", "crossx2", "my label",     "phase label",   "gg label", "group label",
    };
    return names;
}

void StyleSheet::append(const std::string &name, const NodeStylePartial &partial) {
    named_[name] = merge(named_[name], partial);
}

const NodeStylePartial *StyleSheet::find(const std::string &name) const {
    auto it = named_.find(name);
    return it == named_.end() ? nullptr : &it->second;
}

std::vector<std::string> load_stylesheet_json(std::string_view json_text, StyleSheet &sheet) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::BadStylesheet, fmt::format("stylesheet is not valid JSON: {}", e.what()));
    }
    if (!doc.is_object() || !doc.contains("styles") || !doc["styles"].is_object()) {
        throw Error(ErrorCode::BadStylesheet, "stylesheet must be an object with a \"styles\" object");
    }

    std::vector<std::string> unknown;
    for (const auto &[name, body] : doc["styles"].items()) {
        std::vector<KeyValue> pairs;
        if (body.is_string()) {
            pairs = parse_key_values(body.get<std::string>());
        } else if (body.is_object()) {
            for (const auto &[key, value] : body.items()) {
                if (value.is_null() || (value.is_boolean() && value.get<bool>())) {
                    pairs.push_back(KeyValue{key, std::nullopt});
                } else if (value.is_string()) {
                    pairs.push_back(KeyValue{key, value.get<std::string>()});
                } else if (value.is_number()) {
                    pairs.push_back(KeyValue{key, value.dump()});
                } else {
                    throw Error(ErrorCode::BadStylesheet, fmt::format("style '{}': bad value for '{}'", name, key));
                }
            }
        } else {
            throw Error(ErrorCode::BadStylesheet, fmt::format("style '{}' must be an object or a string", name));
        }
        auto parsed = parse_style_keys(pairs);
        for (auto &k : parsed.unknown_keys) unknown.push_back(name + ": " + k);
        sheet.append(name, parsed.style);
    }
    return unknown;
}

NodeStyle resolve_style(StyleTarget target, const StyleSheet &sheet, const GlobalFlags &flags,
                        const NodeStylePartial &per_element) {
    NodeStyle s = builtin_style(target);
    auto name = global_style_name(target);
    if (!name.empty()) {
        if (const auto *global = sheet.find(std::string(name))) s = apply(s, *global);
    }
    if (flags.thin_lines) s.line_width = Length{s.line_width.magnitude * kThinLineFactor, s.line_width.unit};
    if (flags.transparent && (target == StyleTarget::Gate || target == StyleTarget::Meter)) s.fill = Paint{};
    return apply(s, per_element);
}

}  // namespace qtkz
