#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qtkz {

enum class ErrorCode {
    UnbalancedBraces,
    UnterminatedOptionBlock,
    BadControlSymbol,
    BadLength,
    MissingEnvironmentEnd,
    UnknownCommand,
    BadKey,
    NonIntegerWires,
    BadArgument,
    OrphanPortLabel,
    LinkOutOfRange,
    OverlappingGateSpans,
    GateOutOfRange,
    GroupOutOfRange,
    OutOfRangeAlign,
    UnknownColorName,
    BadPercent,
    BadStylesheet,
};

std::string_view error_code_name(ErrorCode code);

/// Line and column (both 1-based) of a byte offset.
struct LineCol {
    std::size_t line = 1;
    std::size_t col = 1;
};

LineCol line_col_of(std::string_view source, std::size_t offset);

/// A grid cell reference, 0-based.
struct CellRef {
    int row = 0;
    int col = 0;
    friend bool operator==(const CellRef &, const CellRef &) = default;
};

/// Every failure in the pipeline is reported through this exception. The
/// source offset is set when the failure can be traced to input text; the
/// cell is set when it originates in grid resolution.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, std::string message, std::optional<std::size_t> offset = std::nullopt,
          std::optional<CellRef> cell = std::nullopt);

    ErrorCode code() const { return code_; }
    const std::optional<std::size_t> &offset() const { return offset_; }
    const std::optional<CellRef> &cell() const { return cell_; }

    /// `file:line:col: error[Code]: message`, falling back to the cell when
    /// no offset is known.
    std::string describe(std::string_view file, std::string_view source) const;

   private:
    ErrorCode code_;
    std::optional<std::size_t> offset_;
    std::optional<CellRef> cell_;
};

}  // namespace qtkz
