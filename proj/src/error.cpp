#include "qtkz/error.hpp"

#include <fmt/format.h>

namespace qtkz {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnbalancedBraces: return "UnbalancedBraces";
        case ErrorCode::UnterminatedOptionBlock: return "UnterminatedOptionBlock";
        case ErrorCode::BadControlSymbol: return "BadControlSymbol";
        case ErrorCode::BadLength: return "BadLength";
        case ErrorCode::MissingEnvironmentEnd: return "MissingEnvironmentEnd";
        case ErrorCode::UnknownCommand: return "UnknownCommand";
        case ErrorCode::BadKey: return "BadKey";
        case ErrorCode::NonIntegerWires: return "NonIntegerWires";
        case ErrorCode::BadArgument: return "BadArgument";
        case ErrorCode::OrphanPortLabel: return "OrphanPortLabel";
        case ErrorCode::LinkOutOfRange: return "LinkOutOfRange";
        case ErrorCode::OverlappingGateSpans: return "OverlappingGateSpans";
        case ErrorCode::GateOutOfRange: return "GateOutOfRange";
        case ErrorCode::GroupOutOfRange: return "GroupOutOfRange";
        case ErrorCode::OutOfRangeAlign: return "OutOfRangeAlign";
        case ErrorCode::UnknownColorName: return "UnknownColorName";
        case ErrorCode::BadPercent: return "BadPercent";
        case ErrorCode::BadStylesheet: return "BadStylesheet";
    }
    return "Unknown";
}

LineCol line_col_of(std::string_view source, std::size_t offset) {
    LineCol lc;
    offset = std::min(offset, source.size());
    for (std::size_t i = 0; i < offset; ++i) {
        if (source[i] == '\n') {
            ++lc.line;
            lc.col = 1;
        } else {
            ++lc.col;
        }
    }
    return lc;
}

Error::Error(ErrorCode code, std::string message, std::optional<std::size_t> offset,
             std::optional<CellRef> cell)
    : std::runtime_error(std::move(message)), code_(code), offset_(offset), cell_(cell) {}

std::string Error::describe(std::string_view file, std::string_view source) const {
    if (offset_) {
        auto lc = line_col_of(source, *offset_);
        return fmt::format("{}:{}:{}: error[{}]: {}", file, lc.line, lc.col, error_code_name(code_), what());
    }
    if (cell_) {
        return fmt::format("{}: cell ({},{}): error[{}]: {}", file, cell_->row + 1, cell_->col + 1,
                           error_code_name(code_), what());
    }
    return fmt::format("{}: error[{}]: {}", file, error_code_name(code_), what());
}

}  // namespace qtkz
