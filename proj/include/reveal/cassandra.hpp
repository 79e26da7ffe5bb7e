#pragma once

#include "reveal/model.hpp"

#include <stdexcept>
#include <string>

namespace reveal {

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(std::string const& message, int line, int column);
};

// Parses the Cassandra POMDP format, extended with a `priorities:` line
// (one integer per state, in declaration order; default all 0) and with
// `D:` lines giving joint (signal, next-state) transition entries directly
// for models whose observation distribution depends on the source state.
// Row-sum checks are left to validate().
Pomdp parsePomdp(std::string const& text);
Pomdp parsePomdpFile(std::string const& path);

// Emits text that re-parses to a Pomdp with identical supports and
// probabilities within 1e-9. Uses T:/O: blocks when the model factorizes
// per Cassandra semantics, `D:` lines otherwise.
std::string serializePomdp(Pomdp const& pomdp);

} // namespace reveal
