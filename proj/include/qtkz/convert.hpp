#pragma once

// QCircuit source to quantikz source.

#include <string>
#include <string_view>
#include <vector>

namespace qtkz {

struct ConvertResult {
    std::string output;
    /// One line per removed ghost or unrecognized command. Also written into
    /// the output as `%` comments above the environment.
    std::vector<std::string> notes;
};

/// Rewrites the first `\Qcircuit` (or `\QCircuit`) in `source`; text around
/// it is kept. Throws Error{BadArgument} when there is none or its body is
/// not a balanced brace group.
ConvertResult convert_qcircuit(std::string_view source);

}  // namespace qtkz
