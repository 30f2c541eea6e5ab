#include <algorithm>
#include <cctype>
#include <sstream>

#include "ctmdp/errors.hpp"
#include "ctmdp/formats.hpp"

namespace ctmdp {
namespace {

enum class HTok { End, Header, Int, String, Ident, Sym, Body, EndMark };

struct HToken {
  HTok kind = HTok::End;
  std::string text;
  unsigned long long value = 0;
  std::size_t line = 0;
  std::size_t column = 0;
};

class HoaLexer {
 public:
  HoaLexer(const std::string& text, const std::string& origin) : text_(text), origin_(origin) {}

  std::vector<HToken> run() {
    std::vector<HToken> out;
    for (;;) {
      skip();
      HToken t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = text_[pos_];
      if (text_.compare(pos_, 8, "--BODY--") == 0) {
        t.kind = HTok::Body;
        t.text = "--BODY--";
        for (int i = 0; i < 8; ++i) advance();
      } else if (text_.compare(pos_, 7, "--END--") == 0) {
        t.kind = HTok::EndMark;
        t.text = "--END--";
        for (int i = 0; i < 7; ++i) advance();
      } else if (text_.compare(pos_, 9, "--ABORT--") == 0) {
        throw ParseError(origin_, t.line, t.column, "automaton stream aborted");
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          advance();
        }
        t.kind = HTok::Int;
        t.text = text_.substr(start, pos_ - start);
        if (t.text.size() > 9) fail(t, "integer too large");
        t.value = std::stoull(t.text);
      } else if (c == '"') {
        advance();
        std::string s;
        while (pos_ < text_.size() && text_[pos_] != '"') {
          if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) advance();
          s += text_[pos_];
          advance();
        }
        if (pos_ >= text_.size()) fail(t, "unterminated string");
        advance();
        t.kind = HTok::String;
        t.text = s;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '@') {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                text_[pos_] == '-' || text_[pos_] == '@')) {
          advance();
        }
        t.text = text_.substr(start, pos_ - start);
        if (pos_ < text_.size() && text_[pos_] == ':') {
          advance();
          t.kind = HTok::Header;
        } else {
          t.kind = HTok::Ident;
        }
      } else if (std::string("[]()!&|{}").find(c) != std::string::npos) {
        t.kind = HTok::Sym;
        t.text = std::string(1, c);
        advance();
      } else {
        fail(t, std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        advance();
      } else if (text_.compare(pos_, 2, "/*") == 0) {
        HToken at;
        at.line = line_;
        at.column = col_;
        advance();
        advance();
        while (pos_ < text_.size() && text_.compare(pos_, 2, "*/") != 0) advance();
        if (pos_ >= text_.size()) fail(at, "unterminated comment");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(const HToken& at, const std::string& msg) const {
    throw ParseError(origin_, at.line, at.column, msg);
  }

  const std::string& text_;
  const std::string& origin_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class HoaParser {
 public:
  HoaParser(std::vector<HToken> toks, const std::string& origin)
      : toks_(std::move(toks)), origin_(origin) {}

  BuchiAutomaton run() {
    header();
    body();
    return std::move(aut_);
  }

 private:
  const HToken& cur() const { return toks_[pos_]; }
  bool sym(const char* s) const { return cur().kind == HTok::Sym && cur().text == s; }

  [[noreturn]] void fail(const HToken& at, const std::string& msg) const {
    throw ParseError(origin_, at.line, at.column, msg);
  }

  const HToken& expect_int(const char* what) {
    if (cur().kind != HTok::Int) fail(cur(), std::string("expected ") + what);
    return toks_[pos_++];
  }

  void expect_sym(const char* s) {
    if (!sym(s)) fail(cur(), std::string("expected '") + s + "'");
    ++pos_;
  }

  void header() {
    if (cur().kind != HTok::Header || cur().text != "HOA") fail(cur(), "expected 'HOA: v1'");
    ++pos_;
    if (cur().kind != HTok::Ident || cur().text != "v1") fail(cur(), "unsupported HOA version");
    ++pos_;
    bool have_states = false, have_start = false, have_ap = false, have_acc = false;
    std::size_t num_states = 0;
    while (cur().kind != HTok::Body) {
      const HToken& h = cur();
      if (h.kind == HTok::End) fail(h, "missing --BODY--");
      if (h.kind != HTok::Header) fail(h, "expected a header item, found '" + h.text + "'");
      ++pos_;
      if (h.text == "States") {
        if (have_states) fail(h, "duplicate States header");
        num_states = expect_int("state count").value;
        have_states = true;
      } else if (h.text == "Start") {
        if (have_start) fail(h, "several Start headers are not supported");
        start_ = expect_int("start state");
        if (sym("&")) fail(cur(), "conjunctive start states are not supported");
        have_start = true;
      } else if (h.text == "AP") {
        if (have_ap) fail(h, "duplicate AP header");
        const std::size_t n = expect_int("proposition count").value;
        for (std::size_t i = 0; i < n; ++i) {
          if (cur().kind != HTok::String) fail(cur(), "expected a quoted proposition name");
          aut_.propositions.push_back(cur().text);
          ++pos_;
        }
        if (n > kMaxPropositions) fail(h, "more than 64 propositions");
        have_ap = true;
      } else if (h.text == "Acceptance") {
        acceptance(h);
        have_acc = true;
      } else if (h.text == "acc-name") {
        if (cur().kind != HTok::Ident || cur().text != "Buchi") {
          fail(cur(), "unsupported acceptance condition '" + cur().text + "' (expected Buchi)");
        }
        ++pos_;
        skip_values();
      } else if (h.text == "name") {
        if (cur().kind == HTok::String) aut_.name = cur().text;
        skip_values();
      } else {
        // tool, properties, Alias-free extensions: ignored
        skip_values();
      }
    }
    ++pos_;
    if (!have_acc) fail(cur(), "missing 'Acceptance: 1 Inf(0)' header");
    if (!have_states) fail(cur(), "missing States header");
    if (!have_start) fail(cur(), "missing Start header");
    if (!have_ap) fail(cur(), "missing AP header");
    aut_.edges.resize(num_states);
    aut_.accepting.assign(num_states, false);
    aut_.state_names.assign(num_states, "");
    if (start_.value >= num_states) fail(start_, "start state out of range");
    aut_.initial = static_cast<AutState>(start_.value);
  }

  void skip_values() {
    while (cur().kind != HTok::Header && cur().kind != HTok::Body && cur().kind != HTok::End) {
      ++pos_;
    }
  }

  void acceptance(const HToken& h) {
    // only one shape is accepted: 1 Inf(0)
    const auto at = [&](std::size_t k) -> const HToken& {
      return toks_[std::min(pos_ + k, toks_.size() - 1)];
    };
    const bool ok = at(0).kind == HTok::Int && at(0).value == 1 &&
                    at(1).kind == HTok::Ident && at(1).text == "Inf" &&
                    at(2).text == "(" && at(3).kind == HTok::Int &&
                    at(3).value == 0 && at(4).text == ")" &&
                    (at(5).kind == HTok::Header || at(5).kind == HTok::Body);
    if (!ok) {
      std::string text;
      for (std::size_t i = pos_; toks_[i].kind != HTok::Header && toks_[i].kind != HTok::Body &&
                                 toks_[i].kind != HTok::End;
           ++i) {
        text += toks_[i].text;
        if (toks_[i].kind == HTok::Int && toks_[i + 1].kind != HTok::Sym) text += ' ';
      }
      fail(h, "unsupported acceptance condition '" + text + "' (only 'Acceptance: 1 Inf(0)')");
    }
    pos_ += 5;
  }

  AutState state_ref(const HToken& t) {
    if (t.value >= aut_.num_states()) {
      fail(t, "reference to undefined state " + t.text);
    }
    return static_cast<AutState>(t.value);
  }

  void body() {
    std::vector<bool> seen(aut_.num_states(), false);
    while (cur().kind != HTok::EndMark) {
      const HToken& h = cur();
      if (h.kind == HTok::End) fail(h, "missing --END--");
      if (h.kind != HTok::Header || h.text != "State") fail(h, "expected 'State:'");
      ++pos_;
      if (sym("[")) fail(cur(), "state labels are not supported; label the edges");
      const AutState q = state_ref(expect_int("state number"));
      if (seen[q]) fail(h, "state " + std::to_string(q) + " defined twice");
      seen[q] = true;
      if (cur().kind == HTok::String) {
        aut_.state_names[q] = cur().text;
        ++pos_;
      }
      if (sym("{")) {
        ++pos_;
        while (!sym("}")) {
          const HToken& s = expect_int("acceptance set");
          if (s.value != 0) fail(s, "acceptance set " + s.text + " is not declared");
          aut_.accepting[q] = true;
        }
        ++pos_;
      }
      while (sym("[")) {
        ++pos_;
        LabelFormula guard = disjunction();
        expect_sym("]");
        const AutState target = state_ref(expect_int("edge target"));
        if (sym("&")) fail(cur(), "universal branching is not supported");
        if (sym("{")) fail(cur(), "transition-based acceptance is not supported");
        aut_.edges[q].push_back({std::move(guard), target});
      }
      if (cur().kind == HTok::Int) fail(cur(), "implicit edge labels are not supported");
    }
    ++pos_;
  }

  LabelFormula disjunction() {
    LabelFormula l = conjunction();
    while (sym("|")) {
      ++pos_;
      l = LabelFormula::disj(std::move(l), conjunction());
    }
    return l;
  }

  LabelFormula conjunction() {
    LabelFormula l = atom();
    while (sym("&")) {
      ++pos_;
      l = LabelFormula::conj(std::move(l), atom());
    }
    return l;
  }

  LabelFormula atom() {
    const HToken& t = cur();
    if (sym("!")) {
      ++pos_;
      return LabelFormula::negate(atom());
    }
    if (sym("(")) {
      ++pos_;
      LabelFormula f = disjunction();
      expect_sym(")");
      return f;
    }
    if (t.kind == HTok::Ident && (t.text == "t" || t.text == "f")) {
      ++pos_;
      return LabelFormula::constant(t.text == "t");
    }
    if (t.kind == HTok::Int) {
      if (t.value >= aut_.propositions.size()) {
        fail(t, "label uses undeclared proposition " + t.text);
      }
      ++pos_;
      return LabelFormula::prop(static_cast<std::uint32_t>(t.value));
    }
    fail(t, "malformed label formula near '" + (t.kind == HTok::End ? "end" : t.text) + "'");
  }

  std::vector<HToken> toks_;
  const std::string& origin_;
  std::size_t pos_ = 0;
  HToken start_;
  BuchiAutomaton aut_;
};

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

BuchiAutomaton parse_hoa(const HoaSource& src) {
  const std::string origin = src.origin.empty() ? std::string("<input>") : src.origin;
  HoaLexer lexer(src.text, origin);
  HoaParser parser(lexer.run(), origin);
  BuchiAutomaton a = parser.run();
  require_valid(a);
  return a;
}

std::string write_hoa(const BuchiAutomaton& a) {
  std::ostringstream out;
  out << "HOA: v1\n";
  if (!a.name.empty()) out << "name: " << quoted(a.name) << "\n";
  out << "States: " << a.num_states() << "\n";
  out << "Start: " << a.initial << "\n";
  out << "AP: " << a.propositions.size();
  for (const auto& p : a.propositions) out << " " << quoted(p);
  out << "\n";
  out << "acc-name: Buchi\n";
  out << "Acceptance: 1 Inf(0)\n";
  out << "properties: trans-labels explicit-labels state-acc\n";
  out << "--BODY--\n";
  for (std::size_t q = 0; q < a.num_states(); ++q) {
    out << "State: " << q;
    if (q < a.state_names.size() && !a.state_names[q].empty()) {
      out << " " << quoted(a.state_names[q]);
    }
    if (a.accepting[q]) out << " {0}";
    out << "\n";
    for (const auto& e : a.edges[q]) out << "[" << e.guard.to_hoa() << "] " << e.target << "\n";
  }
  out << "--END--\n";
  return out.str();
}

}  // namespace ctmdp
