#include "lsv/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

namespace lsv {

namespace {

enum class Tok : std::uint8_t {
  Word,     // keyword, identifier or variable, classified later
  Number,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LAngle,
  RAngle,
  Comma,
  Caret,
  Arrow,
  Eq,
  Neq,
  AndAnd,
  OrOr,
  Bang,
  Dot,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { next(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    next();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(tok_.line, tok_.col, msg);
  }

 private:
  void next() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else {
        break;
      }
    }
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_ = {Tok::End, "", line_, col_};
      return;
    }
    char c = text_[pos_];
    auto punct = [&](Tok k, std::size_t len, const char* t) {
      tok_ = {k, t, line_, col_};
      pos_ += len;
      col_ += len;
    };
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      auto word_char = [&](std::size_t i) {
        if (i >= text_.size()) return false;
        char w = text_[i];
        if (std::isalnum(static_cast<unsigned char>(w)) || w == '_' || w == '@')
          return true;
        // dashes join identifier parts, but never eat the '->' arrow
        return w == '-' && i + 1 < text_.size() && text_[i + 1] != '>' &&
               (std::isalnum(static_cast<unsigned char>(text_[i + 1])) ||
                text_[i + 1] == '_');
      };
      while (word_char(pos_)) ++pos_;
      std::string w = text_.substr(start, pos_ - start);
      col_ += w.size();
      tok_ = {Tok::Word, std::move(w), line_, tok_.col};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      std::string w = text_.substr(start, pos_ - start);
      col_ += w.size();
      tok_ = {Tok::Number, std::move(w), line_, tok_.col};
      return;
    }
    switch (c) {
      case '{': punct(Tok::LBrace, 1, "{"); return;
      case '}': punct(Tok::RBrace, 1, "}"); return;
      case '(': punct(Tok::LParen, 1, "("); return;
      case ')': punct(Tok::RParen, 1, ")"); return;
      case '<': punct(Tok::LAngle, 1, "<"); return;
      case '>': punct(Tok::RAngle, 1, ">"); return;
      case ',': punct(Tok::Comma, 1, ","); return;
      case '^': punct(Tok::Caret, 1, "^"); return;
      case '.': punct(Tok::Dot, 1, "."); return;
      case '-':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          punct(Tok::Arrow, 2, "->");
          return;
        }
        throw ParseError(line_, col_, "unexpected '-'");
      case '=': punct(Tok::Eq, 1, "="); return;
      case '!':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
          punct(Tok::Neq, 2, "!=");
          return;
        }
        punct(Tok::Bang, 1, "!");
        return;
      case '&':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '&') {
          punct(Tok::AndAnd, 2, "&&");
          return;
        }
        throw ParseError(line_, col_, "unexpected '&'");
      case '|':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '|') {
          punct(Tok::OrOr, 2, "||");
          return;
        }
        throw ParseError(line_, col_, "unexpected '|'");
      default:
        throw ParseError(line_, col_,
                         std::string("unexpected character '") + c + "'");
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
  Token tok_{};
};

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
  if (from >= to) return false;
  for (std::size_t i = from; i < to; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// A1 / X1@A1 / C1@A2 / S1@A2 / L1; anything else is not a variable name.
std::optional<Variable> classify_variable(const std::string& w) {
  if (w.size() >= 2 && w[0] == 'A' && all_digits(w, 1, w.size()))
    return Variable::agent(static_cast<unsigned>(std::stoul(w.substr(1))));
  if (w.size() >= 2 && w[0] == 'L' && all_digits(w, 1, w.size()))
    return Variable::label(static_cast<unsigned>(std::stoul(w.substr(1))));
  if (w.size() >= 4 && (w[0] == 'X' || w[0] == 'C' || w[0] == 'S')) {
    auto at = w.find('@');
    if (at == std::string::npos || at + 2 >= w.size() || w[at + 1] != 'A')
      return std::nullopt;
    if (!all_digits(w, 1, at) || !all_digits(w, at + 2, w.size()))
      return std::nullopt;
    unsigned index = static_cast<unsigned>(std::stoul(w.substr(1, at - 1)));
    unsigned owner = static_cast<unsigned>(std::stoul(w.substr(at + 2)));
    switch (w[0]) {
      case 'X': return Variable::nonce(index, owner);
      case 'C': return Variable::ciphertext(index, owner);
      default: return Variable::signature(index, owner);
    }
  }
  return std::nullopt;
}

bool is_plain_identifier(const std::string& w) {
  if (w.empty() || !std::islower(static_cast<unsigned char>(w[0]))) return false;
  return w.find('@') == std::string::npos;
}

const char* const kReservedWords[] = {
    "protocol", "parties", "agents", "labeled", "unlabeled", "role",
    "step",     "init",    "stop",   "enc",     "sig",       "ek",
    "dk",       "sk",      "vk",     "n",       "ag",        "adv",
    "forall",   "exists",  "LS",     "NC",      "as",
};

bool is_reserved(const std::string& w) {
  return std::find_if(std::begin(kReservedWords), std::end(kReservedWords),
                      [&](const char* k) { return w == k; }) !=
         std::end(kReservedWords);
}

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  // ---- shared helpers ----

  Token expect(Tok kind, const char* what) {
    if (lex_.peek().kind != kind)
      lex_.fail(std::string("expected ") + what + ", got '" +
                lex_.peek().text + "'");
    return lex_.take();
  }

  bool accept(Tok kind) {
    if (lex_.peek().kind != kind) return false;
    lex_.take();
    return true;
  }

  bool accept_word(const char* w) {
    if (lex_.peek().kind != Tok::Word || lex_.peek().text != w) return false;
    lex_.take();
    return true;
  }

  Token expect_word(const char* w) {
    if (lex_.peek().kind != Tok::Word || lex_.peek().text != w)
      lex_.fail(std::string("expected '") + w + "', got '" + lex_.peek().text +
                "'");
    return lex_.take();
  }

  unsigned expect_number() {
    Token t = expect(Tok::Number, "a number");
    return static_cast<unsigned>(std::stoul(t.text));
  }

  std::string expect_identifier(const char* what) {
    Token t = expect(Tok::Word, what);
    if (is_reserved(t.text) || !is_plain_identifier(t.text))
      throw ParseError(t.line, t.col,
                       std::string("expected ") + what + ", got '" + t.text + "'");
    return t.text;
  }

  void expect_end() {
    if (lex_.peek().kind != Tok::End)
      lex_.fail("trailing input: '" + lex_.peek().text + "'");
  }

  // ---- terms ----

  // formula_mode enables substitution applications s(x) over the subvars
  // currently in scope.
  Term term(bool formula_mode) {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::LAngle: {
        lex_.take();
        std::vector<Term> items;
        items.push_back(term(formula_mode));
        expect(Tok::Comma, "','");
        items.push_back(term(formula_mode));
        while (accept(Tok::Comma)) items.push_back(term(formula_mode));
        expect(Tok::RAngle, "'>'");
        Term out = items.back();
        for (auto it = items.rbegin() + 1; it != items.rend(); ++it)
          out = Term::pair(*it, out);
        return out;
      }
      case Tok::Word:
        return word_term(formula_mode);
      default:
        lex_.fail("expected a term, got '" + t.text + "'");
    }
  }

  Term word_term(bool formula_mode) {
    Token t = lex_.take();
    const std::string& w = t.text;
    auto guard = [&](Term&& made) { return std::move(made); };
    try {
      if (w == "enc" || w == "sig") {
        expect(Tok::LParen, "'('");
        Term payload = term(formula_mode);
        expect(Tok::Comma, "','");
        Term key = term(formula_mode);
        expect(Tok::RParen, "')'");
        std::optional<Term> label;
        if (accept(Tok::Caret)) label = label_term(formula_mode);
        return guard(w == "enc" ? Term::enc(payload, key, label)
                                : Term::sig(payload, key, label));
      }
      if (w == "ek" || w == "dk" || w == "sk" || w == "vk") {
        expect(Tok::LParen, "'('");
        Term id = term(formula_mode);
        expect(Tok::RParen, "')'");
        KeyKind kind = w == "ek"   ? KeyKind::Enc
                       : w == "dk" ? KeyKind::Dec
                       : w == "sk" ? KeyKind::Sig
                                   : KeyKind::Ver;
        return guard(Term::key(kind, id));
      }
      if (w == "n") {
        expect(Tok::LParen, "'('");
        std::string owner = expect_identifier("an agent name");
        expect(Tok::Comma, "','");
        unsigned j = expect_number();
        expect(Tok::Comma, "','");
        unsigned s = expect_number();
        expect(Tok::RParen, "')'");
        return guard(Term::nonce(owner, j, s));
      }
      if (w == "ag" || w == "adv") {
        expect(Tok::LParen, "'('");
        unsigned i = expect_number();
        expect(Tok::RParen, "')'");
        return guard(Term::label(
            w == "ag" ? LabelKind::Agent : LabelKind::Adversary, i));
      }
    } catch (const SortError& e) {
      throw ParseError(t.line, t.col, e.what());
    }
    if (auto v = classify_variable(w)) return Term::var(*v);
    if (is_reserved(w))
      throw ParseError(t.line, t.col, "'" + w + "' cannot start a term");
    if (!is_plain_identifier(w))
      throw ParseError(t.line, t.col, "unknown name '" + w + "'");
    if (formula_mode && lex_.peek().kind == Tok::LParen) {
      if (std::find(subvars_.begin(), subvars_.end(), w) == subvars_.end())
        throw ParseError(t.line, t.col,
                         "unbound substitution variable '" + w + "'");
      lex_.take();
      Token vt = expect(Tok::Word, "a variable");
      auto v = classify_variable(vt.text);
      if (!v)
        throw ParseError(vt.line, vt.col,
                         "'" + vt.text + "' is not a variable name");
      expect(Tok::RParen, "')'");
      return Term::sub_app(w, *v);
    }
    return Term::agent(w);
  }

  Term label_term(bool formula_mode) {
    Token t = lex_.peek();
    Term l = word_term(formula_mode);
    if (sort_of(l) != Sort::Label)
      throw ParseError(t.line, t.col,
                       "label position needs ag(i), adv(i) or a label variable");
    return l;
  }

  // ---- protocols ----

  Protocol protocol() {
    expect_word("protocol");
    Protocol p;
    Token name = expect(Tok::Word, "a protocol name");
    if (!is_plain_identifier(name.text) || is_reserved(name.text))
      throw ParseError(name.line, name.col, "bad protocol name");
    p.name = name.text;
    expect(Tok::LBrace, "'{'");
    bool have_parties = false, have_mode = false;
    std::vector<std::optional<Role>> roles;
    while (!accept(Tok::RBrace)) {
      if (accept_word("parties")) {
        p.parties = expect_number();
        have_parties = true;
        roles.assign(p.parties, std::nullopt);
      } else if (accept_word("agents")) {
        while (lex_.peek().kind == Tok::Word && !is_reserved(lex_.peek().text))
          p.universe.push_back(expect_identifier("an agent name"));
        if (p.universe.empty()) lex_.fail("agents: expected at least one name");
      } else if (accept_word("labeled")) {
        p.labeled = true;
        have_mode = true;
      } else if (accept_word("unlabeled")) {
        p.labeled = false;
        have_mode = true;
      } else if (lex_.peek().text == "role") {
        Token rt = lex_.take();
        unsigned idx = expect_number();
        if (!have_parties)
          throw ParseError(rt.line, rt.col, "parties must precede roles");
        if (idx == 0 || idx > p.parties)
          throw ParseError(rt.line, rt.col,
                           "role index outside 1.." + std::to_string(p.parties));
        if (roles[idx - 1])
          throw ParseError(rt.line, rt.col,
                           "role " + std::to_string(idx) + " defined twice");
        roles[idx - 1] = role_block();
      } else {
        lex_.fail("expected parties/agents/labeled/unlabeled/role");
      }
    }
    expect_end();
    if (!have_parties) throw ParseError(1, 1, "missing 'parties'");
    if (!have_mode) throw ParseError(1, 1, "missing 'labeled' or 'unlabeled'");
    if (p.universe.empty()) throw ParseError(1, 1, "missing 'agents'");
    for (std::size_t i = 0; i < roles.size(); ++i)
      p.roles.push_back(roles[i] ? std::move(*roles[i]) : Role{});
    try {
      validate_protocol(p);
    } catch (const std::runtime_error& e) {
      throw ParseError(1, 1, e.what());
    }
    return p;
  }

  Role role_block() {
    Role role;
    expect(Tok::LBrace, "'{'");
    while (!accept(Tok::RBrace)) {
      expect_word("step");
      RoleStep st;
      if (!accept_word("init")) st.recv = term(false);
      expect(Tok::Arrow, "'->'");
      if (!accept_word("stop")) st.send = term(false);
      role.steps.push_back(std::move(st));
    }
    return role;
  }

  // ---- formulas ----

  Formula formula() {
    Formula f = implies_chain();
    return f;
  }

  Formula implies_chain() {
    Formula lhs = or_chain();
    if (accept(Tok::Arrow)) return Formula::implies(lhs, implies_chain());
    return lhs;
  }

  Formula or_chain() {
    Formula f = and_chain();
    while (accept(Tok::OrOr)) f = Formula::disj(f, and_chain());
    return f;
  }

  Formula and_chain() {
    Formula f = unary();
    while (accept(Tok::AndAnd)) f = Formula::conj(f, unary());
    return f;
  }

  Formula unary() {
    if (accept(Tok::Bang)) return Formula::negation(unary());
    if (accept(Tok::LParen)) {
      Formula f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    const Token& t = lex_.peek();
    if (t.kind == Tok::Word && (t.text == "forall" || t.text == "exists")) {
      bool universal = t.text == "forall";
      lex_.take();
      expect_word("LS");
      expect(Tok::LParen, "'('");
      unsigned role = expect_number();
      expect(Tok::Comma, "','");
      unsigned point = expect_number();
      expect(Tok::RParen, "')'");
      expect_word("as");
      std::string subvar = expect_identifier("a substitution variable name");
      expect(Tok::Dot, "'.'");
      subvars_.push_back(subvar);
      Formula body = formula();
      subvars_.pop_back();
      return universal ? Formula::forall_ls(role, point, subvar, body)
                       : Formula::exists_ls(role, point, subvar, body);
    }
    if (t.kind == Tok::Word && t.text == "NC") {
      lex_.take();
      expect(Tok::LParen, "'('");
      Term arg = term(true);
      expect(Tok::RParen, "')'");
      return Formula::nc(arg);
    }
    // equality / disequality atom
    Term lhs = term(true);
    if (accept(Tok::Eq)) return Formula::eq(lhs, term(true));
    if (accept(Tok::Neq)) return Formula::neq(lhs, term(true));
    lex_.fail("expected '=' or '!=' after a term");
  }

  Lexer lex_;
  std::vector<std::string> subvars_;
};

}  // namespace

Term parse_term(const std::string& text) {
  Parser p(text);
  Term t = p.term(false);
  p.expect_end();
  return t;
}

Protocol parse_protocol(const std::string& text) {
  Parser p(text);
  return p.protocol();
}

Formula parse_formula(const std::string& text) {
  Parser p(text);
  Formula f = p.formula();
  p.expect_end();
  return f;
}

Variable parse_variable_name(const std::string& name) {
  if (auto v = classify_variable(name)) return *v;
  throw ParseError(1, 1, "'" + name + "' is not a variable name");
}

std::string print_term(const Term& t) { return t.to_string(); }

std::string print_formula(const Formula& f) { return f.to_string(); }

std::string print_protocol(const Protocol& p) {
  std::ostringstream os;
  os << "protocol " << p.name << " {\n";
  os << "  parties " << p.parties << "\n";
  os << "  agents";
  for (const std::string& a : p.universe) os << ' ' << a;
  os << "\n";
  os << (p.labeled ? "  labeled\n" : "  unlabeled\n");
  for (unsigned i = 1; i <= p.parties; ++i) {
    os << "  role " << i << " {\n";
    for (const RoleStep& st : p.role(i).steps) {
      os << "    step ";
      if (st.recv)
        os << *st.recv;
      else
        os << "init";
      os << " -> ";
      if (st.send)
        os << *st.send;
      else
        os << "stop";
      os << "\n";
    }
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace lsv
