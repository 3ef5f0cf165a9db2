#include "qtkz/text.hpp"

#include <algorithm>
#include <map>

#include "qtkz/strings.hpp"

namespace qtkz {

namespace {

constexpr double kSuperRise = 0.4;
constexpr double kSubRise = -0.2;

const std::map<std::string, std::string, std::less<>> &symbol_table() {
    static const std::map<std::string, std::string, std::less<>> table = {
        {"alpha", "α"},   {"beta", "β"},     {"gamma", "γ"},    {"delta", "δ"},    {"epsilon", "ϵ"},
        {"varepsilon", "ε"}, {"zeta", "ζ"},  {"eta", "η"},      {"theta", "θ"},    {"vartheta", "ϑ"},
        {"iota", "ι"},    {"kappa", "κ"},    {"lambda", "λ"},   {"mu", "μ"},       {"nu", "ν"},
        {"xi", "ξ"},      {"pi", "π"},       {"rho", "ρ"},      {"sigma", "σ"},    {"tau", "τ"},
        {"upsilon", "υ"}, {"phi", "ϕ"},      {"varphi", "φ"},   {"chi", "χ"},      {"psi", "ψ"},
        {"omega", "ω"},   {"Gamma", "Γ"},    {"Delta", "Δ"},    {"Theta", "Θ"},    {"Lambda", "Λ"},
        {"Xi", "Ξ"},      {"Pi", "Π"},       {"Sigma", "Σ"},    {"Phi", "Φ"},      {"Psi", "Ψ"},
        {"Omega", "Ω"},   {"pm", "±"},       {"mp", "∓"},       {"otimes", "⊗"},   {"oplus", "⊕"},
        {"mapsto", "↦"},  {"to", "→"},       {"rightarrow", "→"}, {"leftarrow", "←"}, {"cdots", "⋯"},
        {"ldots", "…"},   {"dots", "…"},     {"vdots", "⋮"},    {"cdot", "·"},     {"times", "×"},
        {"dagger", "†"},  {"langle", "⟨"},   {"rangle", "⟩"},   {"equiv", "≡"},    {"approx", "≈"},
        {"neq", "≠"},     {"leq", "≤"},      {"geq", "≥"},      {"infty", "∞"},    {"partial", "∂"},
        {"hbar", "ℏ"},    {"sum", "Σ"},      {"prod", "Π"},     {"cos", "cos"},    {"sin", "sin"},
        {"exp", "exp"},   {"log", "log"},    {"quad", "  "},    {"qquad", "    "}, {"circ", "∘"},
    };
    return table;
}

bool is_wrapper(std::string_view name) {
    return name == "text" || name == "textrm" || name == "mathrm" || name == "textsc" || name == "mathbf" ||
           name == "textbf" || name == "mathit" || name == "textit" || name == "emph" || name == "operatorname" ||
           name == "mbox" || name == "hbox" || name == "mathcal";
}

bool is_ignored(std::string_view name) {
    return name == "sc" || name == "rm" || name == "it" || name == "bf" || name == "displaystyle" ||
           name == "textstyle" || name == "scriptstyle" || name == "left" || name == "right" || name == "big" ||
           name == "Big" || name == "bigg" || name == "Bigg" || name == "limits" || name == "nolimits";
}

class Formatter {
   public:
    FormattedText run(std::string_view raw) {
        out_.lines.emplace_back();
        parse(raw, 1.0, 0.0);
        finish();
        return std::move(out_);
    }

   private:
    FormattedText out_;

    void emit(std::string_view text, double scale, double rise) {
        if (text.empty()) return;
        auto &line = out_.lines.back();
        if (!line.empty() && line.back().scale == scale && line.back().rise == rise) {
            line.back().text += text;
        } else {
            line.push_back(StyledRun{std::string(text), scale, rise});
        }
    }

    void newline() { out_.lines.emplace_back(); }

    // Raw content of the next argument: a brace group or a single character
    // (or control word), after skipping spaces. Advances `i`.
    static std::string_view next_arg(std::string_view s, std::size_t &i) {
        while (i < s.size() && is_space(s[i])) ++i;
        if (i >= s.size()) return {};
        if (s[i] == '{') {
            int depth = 0;
            std::size_t start = i + 1;
            for (; i < s.size(); ++i) {
                if (s[i] == '\\') {
                    ++i;
                    continue;
                }
                if (s[i] == '{') ++depth;
                if (s[i] == '}' && --depth == 0) break;
            }
            std::string_view arg = s.substr(start, std::min(i, s.size()) - start);
            if (i < s.size()) ++i;
            return arg;
        }
        std::size_t start = i;
        if (s[i] == '\\') {
            ++i;
            if (i < s.size() && is_letter(s[i])) {
                while (i < s.size() && is_letter(s[i])) ++i;
            } else if (i < s.size()) {
                ++i;
            }
            return s.substr(start, i - start);
        }
        // One UTF-8 code point.
        ++i;
        while (i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) ++i;
        return s.substr(start, i - start);
    }

    void parse(std::string_view s, double scale, double rise) {
        std::size_t i = 0;
        while (i < s.size()) {
            char c = s[i];
            if (c == '$') {
                ++i;
            } else if (c == '{' || c == '}') {
                if (c == '{') {
                    parse(next_arg(s, i), scale, rise);
                } else {
                    ++i;
                }
            } else if (c == '^' || c == '_') {
                ++i;
                std::string_view arg = next_arg(s, i);
                double r = rise + (c == '^' ? kSuperRise : kSubRise) * scale;
                parse(arg, scale * 0.7, r);
            } else if (c == '&' || c == '~') {
                emit(" ", scale, rise);
                ++i;
            } else if (is_space(c)) {
                while (i < s.size() && is_space(s[i])) ++i;
                emit(" ", scale, rise);
            } else if (c == '\\') {
                macro(s, i, scale, rise);
            } else {
                std::size_t start = i;
                while (i < s.size() && std::string_view("${}^_&~\\").find(s[i]) == std::string_view::npos &&
                       !is_space(s[i])) {
                    ++i;
                }
                emit(s.substr(start, i - start), scale, rise);
            }
        }
    }

    void macro(std::string_view s, std::size_t &i, double scale, double rise) {
        ++i;  // backslash
        if (i >= s.size()) return;
        if (!is_letter(s[i])) {
            char c = s[i++];
            switch (c) {
                case '\\': newline(); break;
                case ' ': case ',': case ';': case ':': emit(" ", scale, rise); break;
                case '!': break;
                case '|': emit("‖", scale, rise); break;
                default: emit(std::string(1, c), scale, rise); break;
            }
            return;
        }
        std::size_t start = i;
        while (i < s.size() && is_letter(s[i])) ++i;
        std::string_view name = s.substr(start, i - start);

        if (is_wrapper(name)) {
            parse(next_arg(s, i), scale, rise);
        } else if (is_ignored(name)) {
            // nothing
        } else if (name == "ket") {
            emit("|", scale, rise);
            parse(next_arg(s, i), scale, rise);
            emit("⟩", scale, rise);
        } else if (name == "bra") {
            emit("⟨", scale, rise);
            parse(next_arg(s, i), scale, rise);
            emit("|", scale, rise);
        } else if (name == "proj") {
            std::string_view arg = next_arg(s, i);
            emit("|", scale, rise);
            parse(arg, scale, rise);
            emit("⟩⟨", scale, rise);
            parse(arg, scale, rise);
            emit("|", scale, rise);
        } else if (name == "braket") {
            std::string_view a = next_arg(s, i);
            std::string_view b = next_arg(s, i);
            emit("⟨", scale, rise);
            parse(a, scale, rise);
            emit("|", scale, rise);
            parse(b, scale, rise);
            emit("⟩", scale, rise);
        } else if (name == "sqrt") {
            emit("√", scale, rise);
            parse(next_arg(s, i), scale, rise);
        } else if (name == "frac") {
            std::string_view a = next_arg(s, i);
            std::string_view b = next_arg(s, i);
            parse(a, scale, rise);
            emit("/", scale, rise);
            parse(b, scale, rise);
        } else if (name == "begin") {
            std::string_view env = next_arg(s, i);
            if (env == "array" || env == "tabular") next_arg(s, i);  // column spec
        } else if (name == "end") {
            next_arg(s, i);
        } else if (auto it = symbol_table().find(name); it != symbol_table().end()) {
            emit(it->second, scale, rise);
        } else {
            emit("\\" + std::string(name), scale, rise);
        }
    }

    void finish() {
        std::vector<TextLine> lines;
        for (auto &line : out_.lines) {
            // Collapse doubled spaces across run boundaries, then trim the ends.
            TextLine cleaned;
            bool last_space = true;
            for (auto &run : line) {
                std::string text;
                for (char c : run.text) {
                    if (c == ' ') {
                        if (last_space) continue;
                        last_space = true;
                    } else {
                        last_space = false;
                    }
                    text.push_back(c);
                }
                if (!text.empty()) cleaned.push_back(StyledRun{std::move(text), run.scale, run.rise});
            }
            while (!cleaned.empty()) {
                auto &back = cleaned.back().text;
                while (!back.empty() && back.back() == ' ') back.pop_back();
                if (!back.empty()) break;
                cleaned.pop_back();
            }
            lines.push_back(std::move(cleaned));
        }
        // Leading and trailing empty lines carry no content (e.g. around an array).
        while (!lines.empty() && lines.back().empty()) lines.pop_back();
        auto first = std::find_if(lines.begin(), lines.end(), [](const TextLine &l) { return !l.empty(); });
        lines.erase(lines.begin(), first);
        out_.lines = std::move(lines);
    }
};

}  // namespace

bool FormattedText::empty() const {
    for (const auto &line : lines) {
        if (!line.empty()) return false;
    }
    return true;
}

std::string FormattedText::plain() const {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        for (const auto &run : lines[i]) out += run.text;
    }
    return out;
}

FormattedText format_label(std::string_view raw) { return Formatter().run(raw); }

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

double TextMetrics::width(std::string_view s, double scale) const {
    return static_cast<double>(utf8_length(s)) * advance * font_size * scale;
}

double TextMetrics::width(const FormattedText &t) const {
    double best = 0.0;
    for (const auto &line : t.lines) {
        double w = 0.0;
        for (const auto &run : line) w += width(run.text, run.scale);
        best = std::max(best, w);
    }
    return best;
}

double TextMetrics::height(const FormattedText &t) const {
    if (t.empty()) return 0.0;
    return static_cast<double>(t.lines.size()) * line_height * font_size;
}

}  // namespace qtkz
