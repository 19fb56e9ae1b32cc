#pragma once

#include <string>

#include "lsv/execution.hpp"
#include "lsv/logic.hpp"
#include "lsv/term.hpp"

namespace lsv {

// Concrete syntax. Terms: ek(a), dk(a), sk(a), vk(a), n(a,1,1), <t1, t2>,
// enc(t, ek(a))^ag(1), sig(t, sk(a))^adv(2), variables A1, X1@A1, C1@A2,
// S1@A2, L1. Protocols: a `protocol name { ... }` block with parties,
// agents, labeled/unlabeled, and role blocks of `step recv -> send` lines.
// Formulas: forall/exists LS(i, p) as s . body with atoms NC(t), t1 = t2,
// t1 != t2 and connectives && || ! ->. Comments run from '#' to newline.
// All parse errors carry line and column.

Term parse_term(const std::string& text);

Protocol parse_protocol(const std::string& text);

// Bound substitution variables are introduced by quantifiers; applying an
// unbound one is a parse error.
Formula parse_formula(const std::string& text);

// Canonical printers; parse(print(x)) == x on every value.
std::string print_protocol(const Protocol& p);
std::string print_term(const Term& t);
std::string print_formula(const Formula& f);

// Parses a variable name like "X1@A1" (used by the JSON trace reader).
Variable parse_variable_name(const std::string& name);

}  // namespace lsv
