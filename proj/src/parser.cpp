#include "homlog/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace homlog {

namespace {

enum class Tok {
    Ident,      // identifier (predicate / variable / constant / keyword)
    Number,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Dot,
    Slash,
    Eq,
    Neq,
    Arrow,      // ->
    DArrow,     // <->
    LArrow,     // <-
    Amp,
    Pipe,
    Bang,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return cur_; }
    Token next() {
        Token t = cur_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++col_;
                ++pos_;
            } else if (c == '#') {  // line comment
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
        int line = line_, col = col_;
        if (pos_ >= src_.size()) {
            cur_ = {Tok::End, "", line, col};
            return;
        }
        char c = src_[pos_];
        auto one = [&](Tok k, const char* s) {
            cur_ = {k, s, line, col};
            ++pos_;
            ++col_;
        };
        auto take = [&](Tok k, size_t n) {
            cur_ = {k, src_.substr(pos_, n), line, col};
            pos_ += n;
            col_ += static_cast<int>(n);
        };
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            while (pos_ < src_.size() && src_[pos_] == '\'') ++pos_;  // primed copies
            cur_ = {Tok::Ident, src_.substr(start, pos_ - start), line, col};
            col_ += static_cast<int>(pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            cur_ = {Tok::Number, src_.substr(start, pos_ - start), line, col};
            col_ += static_cast<int>(pos_ - start);
            return;
        }
        switch (c) {
            case '(': one(Tok::LParen, "("); return;
            case ')': one(Tok::RParen, ")"); return;
            case '{': one(Tok::LBrace, "{"); return;
            case '}': one(Tok::RBrace, "}"); return;
            case ',': one(Tok::Comma, ","); return;
            case ';': one(Tok::Semi, ";"); return;
            case '.': one(Tok::Dot, "."); return;
            case '/': one(Tok::Slash, "/"); return;
            case '&': one(Tok::Amp, "&"); return;
            case '|': one(Tok::Pipe, "|"); return;
            case '=': one(Tok::Eq, "="); return;
            case '!':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                    take(Tok::Neq, 2);
                } else {
                    one(Tok::Bang, "!");
                }
                return;
            case '-':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                    take(Tok::Arrow, 2);
                    return;
                }
                break;
            case '<':
                if (src_.compare(pos_, 3, "<->") == 0) {
                    take(Tok::DArrow, 3);
                    return;
                }
                if (src_.compare(pos_, 2, "<-") == 0) {
                    take(Tok::LArrow, 2);
                    return;
                }
                break;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token cur_{Tok::End, "", 1, 1};
};

bool is_keyword(const std::string& s) {
    return s == "forall" || s == "exists" || s == "existsSO" || s == "forallSO" ||
           s == "existsFin" || s == "lfp" || s == "in" || s == "true" || s == "false" ||
           s == "sig" || s == "const";
}

// Predicates are uppercase-initial identifiers (leading underscores of the
// reserved prefix are skipped when deciding the case).
bool is_predicate_name(const std::string& s) {
    size_t i = 0;
    while (i < s.size() && s[i] == '_') ++i;
    return i < s.size() && std::isupper(static_cast<unsigned char>(s[i]));
}

class Parser {
public:
    Parser(const std::string& src, const Signature* sig) : lex_(src), sig_(sig) {}

    FormulaPtr parse_formula_all() {
        FormulaPtr f = formula();
        expect(Tok::End, "end of input");
        return f;
    }

    Signature parse_sig_block() {
        expect_ident("sig");
        expect(Tok::LBrace, "'{'");
        Signature sig;
        while (lex_.peek().kind != Tok::RBrace) {
            Token t = lex_.next();
            if (t.kind != Tok::Ident) throw ParseError("expected declaration", t.line, t.col);
            if (t.text == "const") {
                Token name = lex_.next();
                if (name.kind != Tok::Ident || is_predicate_name(name.text) || is_keyword(name.text))
                    throw ParseError("expected constant name", name.line, name.col);
                if (is_reserved_name(name.text))
                    throw ParseError("reserved '__' prefix in user signature", name.line, name.col);
                sig.add_constant(name.text);
            } else {
                if (!is_predicate_name(t.text))
                    throw ParseError("predicate names must be uppercase-initial", t.line, t.col);
                if (is_reserved_name(t.text))
                    throw ParseError("reserved '__' prefix in user signature", t.line, t.col);
                expect(Tok::Slash, "'/'");
                Token num = lex_.next();
                if (num.kind != Tok::Number) throw ParseError("expected arity", num.line, num.col);
                sig.add_predicate(t.text, std::stoi(num.text));
            }
            expect(Tok::Semi, "';'");
        }
        lex_.next();  // }
        return sig;
    }

    void set_signature(const Signature* sig) { sig_ = sig; }
    bool at_end() { return lex_.peek().kind == Tok::End; }

private:
    Token expect(Tok kind, const char* what) {
        Token t = lex_.next();
        if (t.kind != kind)
            throw ParseError(std::string("expected ") + what + ", got '" + t.text + "'", t.line,
                             t.col);
        return t;
    }

    void expect_ident(const std::string& kw) {
        Token t = lex_.next();
        if (t.kind != Tok::Ident || t.text != kw)
            throw ParseError("expected '" + kw + "'", t.line, t.col);
    }

    // iff (lowest) > implies > or > and > unary
    FormulaPtr formula() { return iff_expr(); }

    FormulaPtr iff_expr() {
        FormulaPtr lhs = imp_expr();
        while (lex_.peek().kind == Tok::DArrow) {
            lex_.next();
            FormulaPtr rhs = imp_expr();
            lhs = iff(lhs, rhs);
        }
        return lhs;
    }

    FormulaPtr imp_expr() {
        FormulaPtr lhs = or_expr();
        if (lex_.peek().kind == Tok::Arrow) {
            lex_.next();
            FormulaPtr rhs = imp_expr();
            return implies(lhs, rhs);
        }
        return lhs;
    }

    FormulaPtr or_expr() {
        FormulaPtr first = and_expr();
        if (lex_.peek().kind != Tok::Pipe) return first;
        std::vector<FormulaPtr> kids{first};
        while (lex_.peek().kind == Tok::Pipe) {
            lex_.next();
            kids.push_back(and_expr());
        }
        return lor(std::move(kids));
    }

    FormulaPtr and_expr() {
        FormulaPtr first = unary();
        if (lex_.peek().kind != Tok::Amp) return first;
        std::vector<FormulaPtr> kids{first};
        while (lex_.peek().kind == Tok::Amp) {
            lex_.next();
            kids.push_back(unary());
        }
        return land(std::move(kids));
    }

    FormulaPtr unary() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Bang) {
            lex_.next();
            return lnot(unary());
        }
        if (t.kind == Tok::Ident &&
            (t.text == "forall" || t.text == "exists" || t.text == "existsSO" ||
             t.text == "forallSO" || t.text == "existsFin" || t.text == "lfp"))
            return quantified();
        return atom_level();
    }

    FormulaPtr quantified() {
        Token kw = lex_.next();
        if (kw.text == "forall" || kw.text == "exists") {
            std::vector<std::string> vars;
            while (lex_.peek().kind == Tok::Ident && !is_keyword(lex_.peek().text) &&
                   !is_predicate_name(lex_.peek().text)) {
                Token v = lex_.next();
                if (sig_ && sig_->has_constant(v.text))
                    throw ParseError("cannot quantify over constant " + v.text, v.line, v.col);
                vars.push_back(v.text);
            }
            if (vars.empty())
                throw ParseError("expected variable after '" + kw.text + "'", kw.line, kw.col);
            FormulaPtr body;
            const Token& nxt = lex_.peek();
            if (nxt.kind == Tok::Dot) {
                lex_.next();
                body = formula();
            } else if (nxt.kind == Tok::Ident &&
                       (nxt.text == "forall" || nxt.text == "exists" || nxt.text == "existsSO" ||
                        nxt.text == "forallSO" || nxt.text == "existsFin")) {
                body = quantified();
            } else {
                throw ParseError("expected '.' or nested quantifier", nxt.line, nxt.col);
            }
            return kw.text == "forall" ? forall_many(vars, body) : exists_many(vars, body);
        }
        if (kw.text == "existsSO" || kw.text == "forallSO" || kw.text == "existsFin") {
            Token p = lex_.next();
            if (p.kind != Tok::Ident || !is_predicate_name(p.text))
                throw ParseError("expected predicate name", p.line, p.col);
            expect(Tok::Slash, "'/'");
            Token num = expect(Tok::Number, "arity");
            int ar = std::stoi(num.text);
            FormulaPtr body;
            const Token& nxt = lex_.peek();
            if (nxt.kind == Tok::Dot) {
                lex_.next();
                body = formula();
            } else {
                body = quantified();
            }
            if (kw.text == "existsSO") return exists_so(p.text, ar, body);
            if (kw.text == "forallSO") return forall_so(p.text, ar, body);
            return exists_fin_so(p.text, ar, body);
        }
        // lfp { D1(x) <- body ; ... } in Goal(t,...)
        expect(Tok::LBrace, "'{'");
        std::vector<LfpDef> defs;
        while (true) {
            Token p = lex_.next();
            if (p.kind != Tok::Ident || !is_predicate_name(p.text))
                throw ParseError("expected fixpoint predicate name", p.line, p.col);
            expect(Tok::LParen, "'('");
            std::vector<std::string> params;
            while (true) {
                Token v = lex_.next();
                if (v.kind != Tok::Ident) throw ParseError("expected parameter", v.line, v.col);
                params.push_back(v.text);
                Token sep = lex_.next();
                if (sep.kind == Tok::RParen) break;
                if (sep.kind != Tok::Comma) throw ParseError("expected ','", sep.line, sep.col);
            }
            expect(Tok::LArrow, "'<-'");
            FormulaPtr body = formula();
            defs.push_back(LfpDef{p.text, (int)params.size(), params, body});
            Token sep = lex_.next();
            if (sep.kind == Tok::RBrace) break;
            if (sep.kind != Tok::Semi) throw ParseError("expected ';' or '}'", sep.line, sep.col);
        }
        expect_ident("in");
        Token g = lex_.next();
        if (g.kind != Tok::Ident || !is_predicate_name(g.text))
            throw ParseError("expected goal predicate", g.line, g.col);
        std::vector<Term> goal_terms = term_list();
        return lfp(std::move(defs), g.text, std::move(goal_terms));
    }

    std::vector<Term> term_list() {
        expect(Tok::LParen, "'('");
        std::vector<Term> ts;
        while (true) {
            Token t = lex_.next();
            if (t.kind != Tok::Ident || is_predicate_name(t.text) || is_keyword(t.text))
                throw ParseError("expected term", t.line, t.col);
            ts.push_back(mk_term(t.text));
            Token sep = lex_.next();
            if (sep.kind == Tok::RParen) break;
            if (sep.kind != Tok::Comma) throw ParseError("expected ','", sep.line, sep.col);
        }
        return ts;
    }

    Term mk_term(const std::string& name) {
        if (sig_ && sig_->has_constant(name)) return Term::cons(name);
        return Term::var(name);
    }

    FormulaPtr atom_level() {
        Token t = lex_.next();
        if (t.kind == Tok::LParen) {
            FormulaPtr f = formula();
            expect(Tok::RParen, "')'");
            return f;
        }
        if (t.kind != Tok::Ident)
            throw ParseError("expected formula, got '" + t.text + "'", t.line, t.col);
        if (t.text == "true") return tru();
        if (t.text == "false") return fal();
        if (is_keyword(t.text)) throw ParseError("unexpected keyword '" + t.text + "'", t.line, t.col);
        if (is_predicate_name(t.text)) {
            std::vector<Term> ts = term_list();
            return atom(t.text, std::move(ts));
        }
        // term = term / term != term
        Term lhs = mk_term(t.text);
        Token op = lex_.next();
        if (op.kind == Tok::Eq) {
            Token r = lex_.next();
            if (r.kind != Tok::Ident) throw ParseError("expected term", r.line, r.col);
            return eq(lhs, mk_term(r.text));
        }
        if (op.kind == Tok::Neq) {
            Token r = lex_.next();
            if (r.kind != Tok::Ident) throw ParseError("expected term", r.line, r.col);
            return neq(lhs, mk_term(r.text));
        }
        throw ParseError("expected '=' or '!=' after term", op.line, op.col);
    }

    Lexer lex_;
    const Signature* sig_;
};

}  // namespace

FormulaPtr parse_sentence(const std::string& text, const Signature& sig) {
    Parser p(text, &sig);
    FormulaPtr f = p.parse_formula_all();
    validate(f, sig);
    return f;
}

std::pair<Signature, FormulaPtr> parse_problem(const std::string& text) {
    Parser p(text, nullptr);
    Signature sig = p.parse_sig_block();
    p.set_signature(&sig);
    FormulaPtr f = p.parse_formula_all();
    validate(f, sig);
    return {std::move(sig), f};
}

Signature parse_signature(const std::string& text) {
    Parser p(text, nullptr);
    Signature sig = p.parse_sig_block();
    if (!p.at_end()) throw HomlogError("trailing input after signature block");
    return sig;
}

}  // namespace homlog
