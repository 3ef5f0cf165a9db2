#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "qtkz/scene.hpp"
#include "qtkz/strings.hpp"

namespace qtkz {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

constexpr double kPi = 3.14159265358979323846;
const double kDash = 3.0 * kUnitsPerPt;
const double kMargin = 2.0 * kUnitsPerPt;

std::string num(double v) { return format_number(v); }

struct Extent {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool any = false;
    void add(double x, double y) {
        if (!any) {
            x0 = x1 = x;
            y0 = y1 = y;
            any = true;
            return;
        }
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
};

// Offsets of the text block's corners from its anchor point, before rotation.
std::array<Point, 4> text_corners(const TextPrim &t) {
    double l = t.anchor == "start" ? 0.0 : t.anchor == "end" ? -t.w : -t.w / 2;
    return {Point{l, -t.h / 2}, Point{l + t.w, -t.h / 2}, Point{l, t.h / 2}, Point{l + t.w, t.h / 2}};
}

void extend(Extent &e, const Primitive &p) {
    double pad = p.style.stroke ? p.style.line_width / 2 : 0.0;
    auto padded = [&](Point q) {
        e.add(q.x - pad, q.y - pad);
        e.add(q.x + pad, q.y + pad);
    };
    std::visit(Overloaded{
                   [&](const LinePrim &l) {
                       padded(l.p1);
                       padded(l.p2);
                   },
                   [&](const PolylinePrim &l) {
                       for (auto q : l.pts) padded(q);
                   },
                   [&](const RectPrim &r) {
                       padded(Point{r.box.x, r.box.y});
                       padded(Point{r.box.right(), r.box.bottom()});
                   },
                   [&](const CirclePrim &c) {
                       padded(Point{c.c.x - c.r, c.c.y - c.r});
                       padded(Point{c.c.x + c.r, c.c.y + c.r});
                   },
                   [&](const ArcPrim &a) {
                       padded(Point{a.c.x - a.r, a.c.y - a.r});
                       padded(Point{a.c.x + a.r, a.c.y + a.r});
                   },
                   [&](const PathPrim &path) {
                       for (const auto &s : path.segments) {
                           for (auto q : s.pts) padded(q);
                       }
                   },
                   [&](const TextPrim &t) {
                       double a = -t.rotate_deg * kPi / 180.0;
                       for (auto q : text_corners(t)) {
                           e.add(t.pos.x + q.x * std::cos(a) - q.y * std::sin(a),
                                 t.pos.y + q.x * std::sin(a) + q.y * std::cos(a));
                       }
                   },
               },
               p.shape);
}

std::string path_data(const PathPrim &p) {
    std::string out;
    for (const auto &s : p.segments) {
        if (!out.empty()) out += ' ';
        out += s.op;
        for (auto q : s.pts) out += fmt::format(" {} {}", num(q.x), num(q.y));
    }
    return out;
}

std::string arc_data(const ArcPrim &a) {
    double a0 = a.a0 * kPi / 180.0, a1 = a.a1 * kPi / 180.0;
    double sx = a.c.x + a.r * std::cos(a0), sy = a.c.y - a.r * std::sin(a0);
    double ex = a.c.x + a.r * std::cos(a1), ey = a.c.y - a.r * std::sin(a1);
    int large = std::fabs(a.a1 - a.a0) > 180.0 ? 1 : 0;
    int sweep = a.a1 > a.a0 ? 0 : 1;
    return fmt::format("M {} {} A {} {} 0 {} {} {} {}", num(sx), num(sy), num(a.r), num(a.r), large, sweep, num(ex),
                       num(ey));
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string paint(const std::optional<Color> &c) { return c ? to_hex(*c) : "none"; }

std::string draw_attrs(const DrawStyle &s) {
    std::string out = fmt::format(R"( stroke="{}" fill="{}")", paint(s.stroke), paint(s.fill));
    if (s.stroke) {
        out += fmt::format(R"( stroke-width="{}")", num(s.line_width));
        if (s.dashed) out += fmt::format(R"( stroke-dasharray="{} {}")", num(kDash), num(kDash));
    }
    return out;
}

std::string svg_text(const TextPrim &t, const DrawStyle &s) {
    std::string anchor = t.anchor == "middle" ? "middle" : t.anchor == "end" ? "end" : "start";
    std::string out = fmt::format(R"(<text x="{}" y="{}" font-size="{}" text-anchor="{}" fill="{}")", num(t.pos.x),
                                  num(t.pos.y), num(t.font_size), anchor, paint(s.fill));
    if (t.rotate_deg != 0.0) {
        out += fmt::format(" transform=\"rotate({} {} {})\"", num(-t.rotate_deg), num(t.pos.x), num(t.pos.y));
    }
    out += ">";
    double line_h = t.content.lines.empty() ? 0.0 : t.h / static_cast<double>(t.content.lines.size());
    for (std::size_t i = 0; i < t.content.lines.size(); ++i) {
        double centre = t.pos.y - t.h / 2 + (static_cast<double>(i) + 0.5) * line_h;
        double base = centre + 0.35 * t.font_size;
        // only the first run of a line is absolutely placed, so each line is
        // one anchored chunk; later runs shift with dy
        std::optional<double> prev_y;
        for (const auto &run : t.content.lines[i]) {
            double y = base - run.rise * t.font_size;
            out += "<tspan";
            if (!prev_y) {
                out += fmt::format(R"( x="{}" y="{}")", num(t.pos.x), num(y));
            } else if (y != *prev_y) {
                out += fmt::format(R"( dy="{}")", num(y - *prev_y));
            }
            prev_y = y;
            if (run.scale != 1.0) out += fmt::format(R"( font-size="{}")", num(run.scale * t.font_size));
            out += ">" + xml_escape(run.text) + "</tspan>";
        }
    }
    out += "</text>";
    return out;
}

// JSON with sorted keys and our own number format.
void write_json(const nlohmann::json &j, std::string &out) {
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ", ";
                first = false;
                out += nlohmann::json(it.key()).dump();
                out += ": ";
                write_json(it.value(), out);
            }
            out += '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                write_json(j[i], out);
            }
            out += ']';
            return;
        }
        case nlohmann::json::value_t::number_float: out += num(j.get<double>()); return;
        default: out += j.dump(); return;
    }
}

nlohmann::json point(Point p) { return nlohmann::json::array({p.x, p.y}); }

nlohmann::json geometry(const Shape &shape) {
    using nlohmann::json;
    return std::visit(Overloaded{
                          [](const LinePrim &l) { return json{{"p1", point(l.p1)}, {"p2", point(l.p2)}}; },
                          [](const PolylinePrim &l) {
                              json pts = json::array();
                              for (auto q : l.pts) pts.push_back(point(q));
                              return json{{"points", pts}, {"closed", l.closed}};
                          },
                          [](const RectPrim &r) {
                              return json{{"x", r.box.x},
                                          {"y", r.box.y},
                                          {"w", r.box.w},
                                          {"h", r.box.h},
                                          {"corner_radius", r.corner_radius}};
                          },
                          [](const CirclePrim &c) { return json{{"c", point(c.c)}, {"r", c.r}}; },
                          [](const ArcPrim &a) {
                              return json{{"c", point(a.c)}, {"r", a.r}, {"a0", a.a0}, {"a1", a.a1}};
                          },
                          [](const PathPrim &p) { return json{{"d", path_data(p)}}; },
                          [](const TextPrim &t) {
                              json lines = json::array();
                              for (const auto &line : t.content.lines) {
                                  json runs = json::array();
                                  for (const auto &run : line) {
                                      runs.push_back({{"text", run.text}, {"scale", run.scale}, {"rise", run.rise}});
                                  }
                                  lines.push_back(runs);
                              }
                              return json{{"pos", point(t.pos)},   {"text", t.content.plain()},
                                          {"runs", lines},         {"anchor", t.anchor},
                                          {"rotate", t.rotate_deg}, {"font_size", t.font_size}};
                          },
                      },
                      shape);
}

}  // namespace

std::optional<Box> scene_bounds(const Scene &scene) {
    Extent e;
    for (const auto &p : scene.primitives) extend(e, p);
    if (!e.any) return std::nullopt;
    return Box{e.x0, e.y0, e.x1 - e.x0, e.y1 - e.y0};
}

std::string emit_svg(const Scene &scene, double scale) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    auto bounds = scene_bounds(scene);
    Box view{};
    if (bounds) {
        view = Box{bounds->x - kMargin, bounds->y - kMargin, bounds->w + 2 * kMargin, bounds->h + 2 * kMargin};
    }
    double px = kPxPerUnit * scale;
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">\n",
        num(view.w * px), num(view.h * px), num(view.x), num(view.y), num(view.w), num(view.h));
    out += fmt::format("<!-- baseline: {} -->\n", num(scene.baseline_y));
    out += "<g font-family=\"serif\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n";
    for (const auto &p : scene.primitives) {
        std::string attrs = fmt::format(" data-layer=\"{}\" data-role=\"{}\"", layer_name(p.layer), p.role);
        std::string el = std::visit(
            Overloaded{
                [&](const LinePrim &l) {
                    return fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}"{}{}/>)", num(l.p1.x), num(l.p1.y),
                                       num(l.p2.x), num(l.p2.y), attrs, draw_attrs(p.style));
                },
                [&](const PolylinePrim &l) {
                    std::string pts;
                    for (auto q : l.pts) pts += (pts.empty() ? "" : " ") + num(q.x) + "," + num(q.y);
                    return fmt::format(R"(<{} points="{}"{}{}/>)", l.closed ? "polygon" : "polyline", pts, attrs,
                                       draw_attrs(p.style));
                },
                [&](const RectPrim &r) {
                    std::string round;
                    if (r.corner_radius > 0) round = fmt::format(R"( rx="{0}" ry="{0}")", num(r.corner_radius));
                    return fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}"{}{}{}/>)", num(r.box.x),
                                       num(r.box.y), num(r.box.w), num(r.box.h), round, attrs, draw_attrs(p.style));
                },
                [&](const CirclePrim &c) {
                    return fmt::format(R"(<circle cx="{}" cy="{}" r="{}"{}{}/>)", num(c.c.x), num(c.c.y), num(c.r),
                                       attrs, draw_attrs(p.style));
                },
                [&](const ArcPrim &a) {
                    return fmt::format(R"(<path d="{}"{}{}/>)", arc_data(a), attrs, draw_attrs(p.style));
                },
                [&](const PathPrim &path) {
                    return fmt::format(R"(<path d="{}"{}{}/>)", path_data(path), attrs, draw_attrs(p.style));
                },
                [&](const TextPrim &t) { return svg_text(t, p.style); },
            },
            p.shape);
        out += el + "\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

std::string emit_json(const Scene &scene) {
    if (scene.primitives.empty()) return "{\"primitives\": []}";
    std::string out = "{\"baseline\": " + num(scene.baseline_y) + ", \"primitives\": [\n";
    for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
        const auto &p = scene.primitives[i];
        nlohmann::json style = {{"stroke", paint(p.style.stroke)},
                                {"fill", paint(p.style.fill)},
                                {"line_width", p.style.line_width},
                                {"dashed", p.style.dashed}};
        nlohmann::json obj = {{"layer", std::string(layer_name(p.layer))},
                              {"kind", std::string(shape_kind(p.shape))},
                              {"role", p.role},
                              {"geometry", geometry(p.shape)},
                              {"style", style}};
        out += "  ";
        write_json(obj, out);
        out += i + 1 < scene.primitives.size() ? ",\n" : "\n";
    }
    out += "]}";
    return out;
}

}  // namespace qtkz
