#include <string_view>

#include "qtkz/error.hpp"
#include "qtkz/strings.hpp"
#include "qtkz/syntax.hpp"

namespace qtkz {

namespace {

// Control symbols that stand for literal text (`\ `, `\,`, `\{`, ...).
bool is_text_control_symbol(char c) {
    switch (c) {
        case ' ': case '\t': case '\n': case '\r':
        case ',': case ';': case ':': case '!':
        case '{': case '}': case '%': case '$': case '#': case '_': case '|':
            return true;
        default:
            return false;
    }
}

class Lexer {
   public:
    Lexer(std::string_view src, bool amp, std::size_t base) : src_(src), amp_(amp), base_(base) {}

    std::vector<Token> run() {
        while (pos_ < src_.size()) step();
        if (!open_groups_.empty()) {
            throw Error(ErrorCode::UnbalancedBraces, "unmatched '{'", base_ + open_groups_.back());
        }
        return finish();
    }

   private:
    std::string_view src_;
    bool amp_;
    std::size_t base_;
    std::size_t pos_ = 0;
    std::vector<std::size_t> open_groups_;
    bool at_cell_start_ = true;
    std::vector<Token> out_;
    std::vector<bool> blank_;  // parallel to out_: whitespace-only Text

    int depth() const { return static_cast<int>(open_groups_.size()); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void emit(TokenKind kind, std::size_t begin, std::size_t end, std::string text = {},
              std::optional<Length> length = std::nullopt, bool blank = false) {
        out_.push_back(Token{kind, std::move(text), length, Span{base_ + begin, base_ + end}});
        blank_.push_back(blank);
    }

    bool is_cell_separator_here() const {
        if (depth() != 0) return false;
        if (amp_) return peek() == '\\' && peek(1) == '&';
        return peek() == '&';
    }

    bool is_row_separator_here() const { return depth() == 0 && peek() == '\\' && peek(1) == '\\'; }

    void skip_spaces() {
        while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
    }

    // `[len]` directly after a separator, possibly after whitespace. Only
    // consumed when the content is a valid length.
    std::optional<Length> try_length_option() {
        std::size_t save = pos_;
        skip_spaces();
        if (peek() == '[') {
            auto close = src_.find(']', pos_);
            if (close != std::string_view::npos) {
                if (auto len = parse_length(src_.substr(pos_ + 1, close - pos_ - 1))) {
                    pos_ = close + 1;
                    return len;
                }
            }
        }
        pos_ = save;
        return std::nullopt;
    }

    void separator(TokenKind kind, std::size_t width) {
        std::size_t begin = pos_;
        pos_ += width;
        auto len = try_length_option();
        skip_spaces();
        emit(kind, begin, pos_, {}, len);
        at_cell_start_ = true;
    }

    void step() {
        char c = peek();
        std::size_t begin = pos_;

        if (c == '%') {
            while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            if (pos_ < src_.size()) ++pos_;
            emit(TokenKind::Comment, begin, pos_, std::string(src_.substr(begin, pos_ - begin)));
            return;
        }
        if (c == '{') {
            open_groups_.push_back(pos_);
            ++pos_;
            emit(TokenKind::BeginGroup, begin, pos_);
            at_cell_start_ = false;
            return;
        }
        if (c == '}') {
            if (open_groups_.empty()) throw Error(ErrorCode::UnbalancedBraces, "unmatched '}'", base_ + pos_);
            open_groups_.pop_back();
            ++pos_;
            emit(TokenKind::EndGroup, begin, pos_);
            return;
        }
        if (is_row_separator_here()) {
            separator(TokenKind::RowSeparator, 2);
            return;
        }
        if (is_cell_separator_here()) {
            separator(TokenKind::CellSeparator, amp_ ? 2 : 1);
            return;
        }
        if (c == '\\' && is_letter(peek(1))) {
            ++pos_;
            std::size_t name_begin = pos_;
            while (pos_ < src_.size() && is_letter(src_[pos_])) ++pos_;
            std::string name(src_.substr(name_begin, pos_ - name_begin));
            skip_spaces();
            emit(TokenKind::Command, begin, pos_, std::move(name));
            at_cell_start_ = false;
            return;
        }
        if (depth() == 0 && c == '[') {
            option_block();
            return;
        }
        if (depth() == 0 && c == '|' && peek(1) == '[' && at_cell_start_) {
            auto close = src_.find("]|", pos_ + 2);
            if (close == std::string_view::npos) {
                throw Error(ErrorCode::UnterminatedOptionBlock, "unterminated '|[' node style", base_ + pos_);
            }
            pos_ = close + 2;
            emit(TokenKind::InlineNodeStyle, begin, pos_, std::string(src_.substr(begin + 2, close - begin - 2)));
            at_cell_start_ = false;
            return;
        }
        if (depth() == 0 && is_space(c)) {
            skip_spaces();
            emit(TokenKind::Text, begin, pos_, std::string(src_.substr(begin, pos_ - begin)), std::nullopt, true);
            return;
        }
        text_run();
    }

    void option_block() {
        std::size_t open = pos_;
        int braces = 0;
        std::size_t i = pos_ + 1;
        for (; i < src_.size(); ++i) {
            char ch = src_[i];
            if (ch == '\\') {
                ++i;
                continue;
            }
            if (ch == '{') ++braces;
            if (ch == '}') {
                if (braces == 0) throw Error(ErrorCode::UnbalancedBraces, "unmatched '}' in option block", base_ + i);
                --braces;
            }
            if (ch == ']' && braces == 0) break;
        }
        if (i >= src_.size()) {
            if (braces != 0) throw Error(ErrorCode::UnbalancedBraces, "unmatched '{' in option block", base_ + open);
            throw Error(ErrorCode::UnterminatedOptionBlock, "unterminated '['", base_ + open);
        }
        emit(TokenKind::OptionOpen, open, open + 1);
        if (i > open + 1) emit(TokenKind::Text, open + 1, i, std::string(src_.substr(open + 1, i - open - 1)));
        emit(TokenKind::OptionClose, i, i + 1);
        pos_ = i + 1;
        at_cell_start_ = false;
    }

    // Consumes ordinary characters. At brace depth 0 the run stops at
    // whitespace so that blanks can fold into neighbouring separators.
    void text_run() {
        std::size_t begin = pos_;
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == '%' || c == '{' || c == '}') break;
            if (is_row_separator_here() || is_cell_separator_here()) break;
            if (depth() == 0 && (c == '[' || is_space(c))) break;
            if (c == '\\') {
                char next = peek(1);
                if (is_letter(next)) break;
                if (next == '\\' || next == '&' || is_text_control_symbol(next)) {
                    pos_ += 2;
                    continue;
                }
                throw Error(ErrorCode::BadControlSymbol,
                            next == '\0' ? std::string("dangling backslash")
                                         : std::string("unsupported control symbol '\\") + next + "'",
                            base_ + pos_);
            }
            ++pos_;
        }
        if (pos_ == begin) {
            // A lone character that no other rule takes (e.g. ']' at depth 0).
            ++pos_;
        }
        emit(TokenKind::Text, begin, pos_, std::string(src_.substr(begin, pos_ - begin)));
        at_cell_start_ = false;
    }

    std::vector<Token> finish() {
        // Fold blanks that precede a separator into it.
        std::vector<Token> folded;
        std::vector<bool> folded_blank;
        for (std::size_t i = 0; i < out_.size(); ++i) {
            Token tok = out_[i];
            bool is_sep = tok.kind == TokenKind::CellSeparator || tok.kind == TokenKind::RowSeparator;
            if (is_sep && !folded.empty() && folded_blank.back()) {
                tok.span.begin = folded.back().span.begin;
                folded.pop_back();
                folded_blank.pop_back();
            }
            folded.push_back(std::move(tok));
            folded_blank.push_back(blank_[i]);
        }

        // Merge adjacent text runs.
        std::vector<Token> merged;
        std::vector<bool> merged_blank;
        for (std::size_t i = 0; i < folded.size(); ++i) {
            Token &tok = folded[i];
            if (tok.kind == TokenKind::Text && !merged.empty() && merged.back().kind == TokenKind::Text &&
                merged.back().span.end == tok.span.begin) {
                merged.back().text += tok.text;
                merged.back().span.end = tok.span.end;
                merged_blank.back() = merged_blank.back() && folded_blank[i];
                continue;
            }
            merged.push_back(std::move(tok));
            merged_blank.push_back(folded_blank[i]);
        }

        // Trailing blank at end of input attaches to the previous token.
        if (merged.size() >= 2 && merged_blank.back()) {
            merged[merged.size() - 2].span.end = merged.back().span.end;
            merged.pop_back();
        }
        return merged;
    }
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, bool ampersand_replacement, std::size_t base) {
    return Lexer(source, ampersand_replacement, base).run();
}

std::vector<Token> tokenize(std::string_view source, bool ampersand_replacement) {
    return tokenize(source, ampersand_replacement, 0);
}

}  // namespace qtkz
