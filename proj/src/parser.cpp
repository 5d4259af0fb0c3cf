#include "chorex/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

namespace chorex {

namespace {

std::string describe(int line, int column, const std::string& found, const std::set<std::string>& expected) {
  std::ostringstream os;
  os << line << ":" << column << ": ";
  if (!expected.empty()) {
    os << "expected ";
    bool first = true;
    for (const auto& e : expected) {
      os << (first ? "" : ", ") << e;
      first = false;
    }
    os << " but found " << found;
  } else {
    os << found;
  }
  return os.str();
}

}  // namespace

ParseError::ParseError(int line, int column, std::string found, std::set<std::string> expected)
    : Error(describe(line, column, found, expected)),
      line_(line),
      column_(column),
      found_(std::move(found)),
      expected_(std::move(expected)) {}

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

const std::set<std::string> kKeywords = {"if", "then", "else", "def", "in", "main"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      int l = line, k = col;
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
      if (i + 1 >= src.size()) throw ParseError(l, k, "unterminated comment", {});
      advance(2);
      continue;
    }
    int l = line, k = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, k});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && (std::isalpha(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        throw ParseError(l, k, "malformed literal", {});
      }
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), l, k});
      advance(j - i);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      out.push_back({Tok::Sym, "->", l, k});
      advance(2);
      continue;
    }
    static const std::string kSingle = "{}|!?+&():,;=.*[]";
    if (kSingle.find(c) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, c), l, k});
      advance(1);
      continue;
    }
    throw ParseError(l, k, std::string("unexpected character '") + c + "'", {});
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  // ---- networks -----------------------------------------------------------

  Network network() {
    Network n;
    if (at_end()) return n;
    while (true) {
      const Token& name_tok = peek();
      ProcessName p = name("process name");
      if (n.processes.count(p)) fail_at(name_tok, "duplicate process '" + p + "'");
      expect("{");
      std::vector<ProcedureName> scope;
      Behaviour b = behaviour(p, scope);
      expect("}");
      n.processes.emplace(std::move(p), std::move(b));
      if (!accept("|")) break;
    }
    expect_end();
    return n;
  }

  Behaviour single_behaviour() {
    std::vector<ProcedureName> scope;
    open_term_ = true;
    Behaviour b = behaviour("", scope);
    expect_end();
    return b;
  }

  // ---- choreographies -----------------------------------------------------

  ChoreographyProgram program() {
    ChoreographyProgram prog;
    while (peek_keyword("def")) {
      next();
      const Token& name_tok = peek();
      ProcedureName x = name("procedure name");
      if (prog.defs.count(x)) fail_at(name_tok, "duplicate definition of '" + x + "'");
      expect("=");
      prog.defs.emplace(std::move(x), choreography());
    }
    expect_keyword("main");
    expect("=");
    prog.main = choreography();
    expect_end();
    for (const auto& [call, tok] : calls_) {
      if (!prog.defs.count(call) && !nested_defs_.count(call)) fail_at(tok, "unbound procedure '" + call + "'");
    }
    return prog;
  }

  Choreography single_choreography() {
    Choreography c = choreography();
    expect_end();
    return c;
  }

 private:
  // ---- token plumbing -----------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    std::size_t idx = std::min(pos_ + k, toks_.size() - 1);
    return toks_[idx];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Tok::End; }

  static std::string show(const Token& t) {
    switch (t.kind) {
      case Tok::End:
        return "end of input";
      case Tok::Sym:
        return "'" + t.text + "'";
      default:
        return "'" + t.text + "'";
    }
  }

  [[noreturn]] void fail(std::set<std::string> expected) const {
    const Token& t = peek();
    throw ParseError(t.line, t.column, show(t), std::move(expected));
  }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw ParseError(t.line, t.column, msg, {});
  }

  bool is_sym(const Token& t, const char* s) const { return t.kind == Tok::Sym && t.text == s; }
  bool peek_sym(const char* s, std::size_t k = 0) const { return is_sym(peek(k), s); }
  bool peek_keyword(const char* kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

  bool accept(const char* s) {
    if (peek_sym(s)) {
      next();
      return true;
    }
    return false;
  }
  void expect(const char* s) {
    if (!accept(s)) fail({std::string("'") + s + "'"});
  }
  void expect_keyword(const char* kw) {
    if (!peek_keyword(kw)) fail({std::string("'") + kw + "'"});
    next();
  }
  void expect_end() {
    if (!at_end()) fail({"end of input"});
  }

  bool peek_name(std::size_t k = 0) const {
    const Token& t = peek(k);
    return t.kind == Tok::Ident && !kKeywords.count(t.text);
  }

  std::string name(const char* what) {
    if (!peek_name()) fail({what});
    return next().text;
  }

  Expression expression() {
    const Token& t = peek();
    if (is_sym(t, "*")) {
      next();
      return Expression::self();
    }
    if (is_sym(t, "(") && peek_sym(")", 1)) {
      next();
      next();
      return Expression::literal(Value::unit());
    }
    if (t.kind == Tok::Int || (t.kind == Tok::Ident && !kKeywords.count(t.text))) {
      next();
      return Expression::literal(Value::constant(t.text));
    }
    fail({"expression"});
  }

  // ---- behaviours ---------------------------------------------------------

  Behaviour behaviour(const ProcessName& self, std::vector<ProcedureName>& scope) {
    const Token& t = peek();
    if (t.kind == Tok::Int && t.text == "0") {
      next();
      return beh::end();
    }
    if (peek_keyword("if")) {
      next();
      expect("*");
      expect("=");
      const Token& other_tok = peek();
      ProcessName other = name("process name");
      check_peer(self, other, other_tok);
      expect_keyword("then");
      Behaviour b1 = behaviour(self, scope);
      expect_keyword("else");
      Behaviour b2 = behaviour(self, scope);
      return beh::cond(std::move(other), std::move(b1), std::move(b2));
    }
    if (peek_keyword("def")) {
      next();
      ProcedureName x = name("procedure name");
      expect("=");
      scope.push_back(x);
      Behaviour body = behaviour(self, scope);
      expect_keyword("in");
      Behaviour cont = behaviour(self, scope);
      scope.pop_back();
      return beh::def(std::move(x), std::move(body), std::move(cont));
    }
    if (accept("(")) {
      Behaviour b = behaviour(self, scope);
      expect(")");
      return b;
    }
    if (peek_name()) {
      const Token& name_tok = next();
      const std::string& id = name_tok.text;
      if (accept("!")) {
        check_peer(self, id, name_tok);
        Expression e = expression();
        expect(";");
        return beh::send(id, std::move(e), behaviour(self, scope));
      }
      if (accept("?")) {
        check_peer(self, id, name_tok);
        expect(";");
        return beh::recv(id, behaviour(self, scope));
      }
      if (accept("+")) {
        check_peer(self, id, name_tok);
        Label l = name("label");
        expect(";");
        return beh::select(id, std::move(l), behaviour(self, scope));
      }
      if (accept("&")) {
        check_peer(self, id, name_tok);
        expect("{");
        std::map<Label, Behaviour> branches;
        do {
          const Token& label_tok = peek();
          Label l = name("label");
          expect(":");
          Behaviour b = behaviour(self, scope);
          if (!branches.emplace(l, std::move(b)).second) fail_at(label_tok, "duplicate branch label '" + l + "'");
        } while (accept(","));
        expect("}");
        return beh::branch(id, std::move(branches));
      }
      if (!open_term_ && std::find(scope.begin(), scope.end(), id) == scope.end()) {
        fail_at(name_tok, "unbound procedure '" + id + "'");
      }
      return beh::call(id);
    }
    fail({"behaviour"});
  }

  void check_peer(const ProcessName& self, const ProcessName& other, const Token& at) const {
    if (!self.empty() && self == other) fail_at(at, "process '" + self + "' addresses itself");
  }

  // ---- choreographies -----------------------------------------------------

  bool looking_at_interaction() const {
    return peek_name() && (peek_sym(".", 1) || peek_sym("->", 1));
  }

  Interaction interaction() {
    const Token& p_tok = peek();
    ProcessName p = name("process name");
    if (accept(".")) {
      Expression e = expression();
      expect("->");
      ProcessName q = name("process name");
      if (p == q) fail_at(p_tok, "process '" + p + "' communicates with itself");
      return Interaction::com(std::move(p), std::move(e), std::move(q));
    }
    expect("->");
    ProcessName q = name("process name");
    expect("[");
    Label l = name("label");
    expect("]");
    if (p == q) fail_at(p_tok, "process '" + p + "' selects at itself");
    return Interaction::sel(std::move(p), std::move(q), std::move(l));
  }

  Choreography choreography() {
    const Token& t = peek();
    if (t.kind == Tok::Int && (t.text == "0" || t.text == "1")) {
      next();
      return t.text == "0" ? chor::end() : chor::stuck();
    }
    if (peek_keyword("if")) {
      next();
      const Token& p_tok = peek();
      ProcessName p = name("process name");
      expect("=");
      ProcessName q = name("process name");
      if (p == q) fail_at(p_tok, "conditional compares '" + p + "' with itself");
      expect_keyword("then");
      Choreography c1 = choreography();
      expect_keyword("else");
      Choreography c2 = choreography();
      return chor::cond(std::move(p), std::move(q), std::move(c1), std::move(c2));
    }
    if (peek_keyword("def")) {
      next();
      ProcedureName x = name("procedure name");
      expect("=");
      Choreography body = choreography();
      expect_keyword("in");
      Choreography cont = choreography();
      nested_defs_.insert(x);
      return chor::def(std::move(x), std::move(body), std::move(cont));
    }
    if (peek_sym("(")) {
      const Token& open = next();
      if (looking_at_interaction()) {
        std::vector<Interaction> actions{interaction()};
        if (accept(";")) {
          // A parenthesised choreography that happens to start with an action.
          Choreography rest = choreography();
          expect(")");
          return make_seq(std::move(actions), std::move(rest), open);
        }
        while (accept("|")) actions.push_back(interaction());
        expect(")");
        expect(";");
        Choreography cont = choreography();
        return make_seq(std::move(actions), std::move(cont), open);
      }
      Choreography c = choreography();
      expect(")");
      return c;
    }
    if (looking_at_interaction()) {
      const Token& start = peek();
      Interaction eta = interaction();
      expect(";");
      Choreography cont = choreography();
      return make_seq({std::move(eta)}, std::move(cont), start);
    }
    if (peek_name()) {
      const Token& tok = next();
      calls_.emplace_back(tok.text, tok);
      return chor::call(tok.text);
    }
    fail({"choreography"});
  }

  Choreography make_seq(std::vector<Interaction> actions, Choreography cont, const Token& at) {
    std::set<ProcessName> receivers;
    for (const auto& a : actions) {
      if (!receivers.insert(a.receiver).second) {
        fail_at(at, "multicom has two actions received by '" + a.receiver + "'");
      }
    }
    return chor::seq(std::move(actions), std::move(cont));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::string, Token>> calls_;
  std::set<ProcedureName> nested_defs_;
  bool open_term_ = false;
};

}  // namespace

Network parse_network(std::string_view text) { return Parser(text).network(); }

ChoreographyProgram parse_choreography(std::string_view text) { return Parser(text).program(); }

Behaviour parse_behaviour(std::string_view text) { return Parser(text).single_behaviour(); }

Choreography parse_choreography_term(std::string_view text) { return Parser(text).single_choreography(); }

}  // namespace chorex
