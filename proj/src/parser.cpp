#include <algorithm>

#include "qtkz/error.hpp"
#include "qtkz/strings.hpp"
#include "qtkz/syntax.hpp"

namespace qtkz {

namespace {

// Index of the `]` closing the `[` at `open`, respecting brace groups.
std::optional<std::size_t> find_option_close(std::string_view s, std::size_t open) {
    int braces = 0;
    for (std::size_t i = open + 1; i < s.size(); ++i) {
        char c = s[i];
        if (c == '\\') {
            ++i;
            continue;
        }
        if (c == '{') ++braces;
        if (c == '}') --braces;
        if (c == ']' && braces == 0) return i;
    }
    return std::nullopt;
}

struct Envelope {
    std::string env_name = "quantikz";
    std::vector<std::string> options;
    std::size_t options_offset = 0;
    std::size_t body_begin = 0;
    std::size_t body_end = 0;
};

Envelope locate_body(std::string_view src) {
    Envelope env;
    env.body_end = src.size();

    // `%!quantikz [options]` header line.
    std::size_t first = 0;
    while (first < src.size() && is_space(src[first])) ++first;
    constexpr std::string_view kHeader = "%!quantikz";
    if (src.substr(first, kHeader.size()) == kHeader) {
        std::size_t eol = src.find('\n', first);
        if (eol == std::string_view::npos) eol = src.size();
        std::size_t p = first + kHeader.size();
        while (p < eol && is_space(src[p])) ++p;
        if (p < eol && src[p] == '[') {
            auto close = find_option_close(src, p);
            if (!close || *close > eol) {
                throw Error(ErrorCode::UnterminatedOptionBlock, "unterminated header options", p);
            }
            env.options.emplace_back(src.substr(p + 1, *close - p - 1));
            env.options_offset = p + 1;
        }
        env.body_begin = eol < src.size() ? eol + 1 : eol;
        return env;
    }

    for (std::string_view name : {"quantikz", "tikzcd"}) {
        std::string begin_tag = "\\begin{" + std::string(name) + "}";
        auto at = src.find(begin_tag);
        if (at == std::string_view::npos) continue;
        env.env_name = std::string(name);
        std::size_t p = at + begin_tag.size();
        std::size_t q = p;
        while (q < src.size() && is_space(src[q])) ++q;
        if (q < src.size() && src[q] == '[') {
            auto close = find_option_close(src, q);
            if (!close) throw Error(ErrorCode::UnterminatedOptionBlock, "unterminated environment options", q);
            env.options.emplace_back(src.substr(q + 1, *close - q - 1));
            env.options_offset = q + 1;
            p = *close + 1;
        }
        std::string end_tag = "\\end{" + std::string(name) + "}";
        auto end = src.find(end_tag, p);
        if (end == std::string_view::npos) {
            throw Error(ErrorCode::MissingEnvironmentEnd, "missing " + end_tag, at);
        }
        env.body_begin = p;
        env.body_end = end;
        return env;
    }
    return env;
}

bool ampersand_replacement_requested(const std::vector<std::string> &raw_options) {
    for (const auto &raw : raw_options) {
        for (const auto &kv : parse_key_values(raw)) {
            if (kv.key == "ampersand replacement") return true;
        }
    }
    return false;
}

class MatrixParser {
   public:
    MatrixParser(const std::vector<Token> &tokens, std::string_view source, MatrixSource &out)
        : toks_(tokens), src_(source), out_(out) {}

    void run(std::size_t body_begin) {
        start_row(body_begin);
        while (i_ < toks_.size()) {
            const Token &tok = toks_[i_];
            switch (tok.kind) {
                case TokenKind::CellSeparator:
                    if (tok.length) {
                        int gap = static_cast<int>(row().cells.size()) - 1;
                        auto it = out_.col_extra_space.find(gap);
                        if (it == out_.col_extra_space.end() || it->second.to_units() < tok.length->to_units()) {
                            out_.col_extra_space[gap] = *tok.length;
                        }
                    }
                    start_cell(tok.span.end);
                    ++i_;
                    break;
                case TokenKind::RowSeparator:
                    if (tok.length) out_.row_extra_space[static_cast<int>(out_.rows.size()) - 1] = *tok.length;
                    ++i_;
                    if (only_trivia_remains()) {
                        out_.trailing_row_separator = tok.span.begin;
                        return;
                    }
                    start_row(tok.span.end);
                    break;
                case TokenKind::Comment:
                    ++i_;
                    break;
                case TokenKind::InlineNodeStyle:
                    cell().inline_style = tok.text;
                    ++i_;
                    break;
                case TokenKind::Command:
                    cell().items.emplace_back(command());
                    break;
                case TokenKind::Text:
                    if (!trim(tok.text).empty()) append_text(tok.text, tok.span);
                    ++i_;
                    break;
                case TokenKind::BeginGroup: {
                    Span group = skip_group();
                    append_text(std::string(src_.substr(group.begin, group.end - group.begin)), group);
                    break;
                }
                case TokenKind::OptionOpen: {
                    // A stray option block; keep its text so nothing is lost.
                    std::size_t begin = tok.span.begin;
                    while (i_ < toks_.size() && toks_[i_].kind != TokenKind::OptionClose) ++i_;
                    std::size_t end = i_ < toks_.size() ? toks_[i_].span.end : src_.size();
                    ++i_;
                    append_text(std::string(src_.substr(begin, end - begin)), Span{begin, end});
                    break;
                }
                case TokenKind::OptionClose:
                case TokenKind::EndGroup:
                    ++i_;
                    break;
            }
        }
        // A body holding nothing at all has no rows.
        if (out_.rows.size() == 1 && out_.rows[0].cells.size() == 1 && out_.rows[0].cells[0].items.empty() &&
            !out_.rows[0].cells[0].inline_style) {
            out_.rows.clear();
        }
    }

   private:
    const std::vector<Token> &toks_;
    std::string_view src_;
    MatrixSource &out_;
    std::size_t i_ = 0;

    RowSource &row() { return out_.rows.back(); }
    CellSource &cell() { return row().cells.back(); }

    void start_row(std::size_t offset) {
        out_.rows.push_back(RowSource{{}, offset});
        start_cell(offset);
    }
    void start_cell(std::size_t offset) { row().cells.push_back(CellSource{{}, std::nullopt, offset}); }

    bool only_trivia_remains() const {
        for (std::size_t j = i_; j < toks_.size(); ++j) {
            const Token &t = toks_[j];
            if (t.kind == TokenKind::Comment) continue;
            if (t.kind == TokenKind::Text && trim(t.text).empty()) continue;
            return false;
        }
        return true;
    }

    void append_text(std::string text, Span span) {
        auto &items = cell().items;
        if (!items.empty()) {
            if (auto *prev = std::get_if<TextRun>(&items.back())) {
                prev->text += text;
                prev->span.end = span.end;
                return;
            }
        }
        items.emplace_back(TextRun{std::move(text), span});
    }

    // Returns the span of the brace group's content, leaving i_ past the `}`.
    Span skip_group() {
        std::size_t open = toks_[i_].span.end;
        int depth = 0;
        for (; i_ < toks_.size(); ++i_) {
            if (toks_[i_].kind == TokenKind::BeginGroup) ++depth;
            if (toks_[i_].kind == TokenKind::EndGroup && --depth == 0) break;
        }
        std::size_t close = toks_[i_].span.begin;
        ++i_;
        return Span{open, close};
    }

    CommandCall command() {
        const Token &head = toks_[i_];
        CommandCall call;
        call.name = head.text;
        call.span = head.span;
        ++i_;
        while (i_ < toks_.size()) {
            const Token &tok = toks_[i_];
            if (tok.kind == TokenKind::OptionOpen) {
                std::string content;
                ++i_;
                if (i_ < toks_.size() && toks_[i_].kind == TokenKind::Text) {
                    content = toks_[i_].text;
                    ++i_;
                }
                call.span.end = toks_[i_].span.end;  // OptionClose is guaranteed by the lexer
                ++i_;
                call.opt_args.push_back(std::move(content));
            } else if (tok.kind == TokenKind::BeginGroup) {
                Span group = skip_group();
                call.braced_args.emplace_back(src_.substr(group.begin, group.end - group.begin));
                call.span.end = group.end + 1;
            } else {
                break;
            }
        }
        return call;
    }
};

std::string collapse_spaces(std::string_view s) {
    std::string out;
    bool in_space = false;
    for (char c : trim(s)) {
        if (is_space(c)) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(c);
    }
    return out;
}

}  // namespace

MatrixSource parse_document(std::string_view source) {
    MatrixSource out;
    out.source = std::string(source);
    Envelope env = locate_body(source);
    out.env_name = env.env_name;
    out.env_options_raw = env.options;
    out.env_options_offset = env.options_offset;

    bool amp = ampersand_replacement_requested(env.options);
    auto body = source.substr(env.body_begin, env.body_end - env.body_begin);
    auto tokens = tokenize(body, amp, env.body_begin);
    MatrixParser(tokens, source, out).run(env.body_begin);
    return out;
}

std::vector<KeyValue> parse_key_values(std::string_view raw) {
    std::vector<KeyValue> out;
    auto flush = [&](std::string_view piece) {
        piece = trim(piece);
        if (piece.empty()) return;
        int depth = 0;
        std::optional<std::size_t> eq;
        for (std::size_t i = 0; i < piece.size(); ++i) {
            char c = piece[i];
            if (c == '\\') {
                ++i;
                continue;
            }
            if (c == '{') ++depth;
            if (c == '}') --depth;
            if (c == '=' && depth == 0) {
                eq = i;
                break;
            }
        }
        if (!eq) {
            out.push_back(KeyValue{collapse_spaces(strip_outer_braces(piece)), std::nullopt});
            return;
        }
        out.push_back(KeyValue{collapse_spaces(piece.substr(0, *eq)),
                               std::string(strip_outer_braces(piece.substr(*eq + 1)))});
    };

    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (c == '\\') {
            ++i;
            continue;
        }
        if (c == '{') ++depth;
        if (c == '}') --depth;
        if (c == ',' && depth == 0) {
            flush(raw.substr(start, i - start));
            start = i + 1;
        }
    }
    if (start <= raw.size()) flush(raw.substr(start));
    return out;
}

std::string serialize_key_values(const std::vector<KeyValue> &pairs) {
    std::string out;
    for (const auto &kv : pairs) {
        if (!out.empty()) out += ",";
        if (kv.key.find_first_of(",=") != std::string::npos) {
            out += "{" + kv.key + "}";
        } else {
            out += kv.key;
        }
        if (kv.value) {
            out += "={";
            out += *kv.value;
            out += "}";
        }
    }
    return out;
}

}  // namespace qtkz
