#include "latsym/parse.hpp"

#include <cctype>
#include <optional>

namespace latsym {

namespace {

enum class Tok { End, Int, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, LBracket, RBracket, Comma };

struct Lexer {
    const std::string& text;
    std::size_t pos = 0;
    Tok tok = Tok::End;
    long int_value = 0;
    std::string ident;
    std::size_t tok_pos = 0;

    explicit Lexer(const std::string& t) : text(t) { next(); }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tok_pos); }

    void next() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        tok_pos = pos;
        if (pos >= text.size()) {
            tok = Tok::End;
            return;
        }
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            tok = Tok::Int;
            int_value = std::stol(text.substr(start, pos - start));
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                ++pos;
            tok = Tok::Ident;
            ident = text.substr(start, pos - start);
            return;
        }
        ++pos;
        switch (c) {
            case '+': tok = Tok::Plus; return;
            case '-': tok = Tok::Minus; return;
            case '*': tok = Tok::Star; return;
            case '/': tok = Tok::Slash; return;
            case '^': tok = Tok::Caret; return;
            case '(': tok = Tok::LParen; return;
            case ')': tok = Tok::RParen; return;
            case '[': tok = Tok::LBracket; return;
            case ']': tok = Tok::RBracket; return;
            case ',': tok = Tok::Comma; return;
            default: throw ParseError(std::string("unexpected character '") + c + "'", tok_pos);
        }
    }
};

struct Parser {
    Lexer lex;
    const ParseContext& ctx;

    Parser(const std::string& text, const ParseContext& c) : lex(text), ctx(c) {}

    void expect(Tok t, const char* what) {
        if (lex.tok != t) lex.fail(std::string("expected ") + what);
        lex.next();
    }

    std::optional<int> axis_of(const std::string& name) const {
        for (std::size_t i = 0; i < ctx.axes.size(); ++i)
            if (ctx.axes[i] == name) return static_cast<int>(i + 1);
        return std::nullopt;
    }

    Expr parse_sum() {
        Expr e = parse_term();
        std::vector<Expr> kids = {e};
        while (lex.tok == Tok::Plus || lex.tok == Tok::Minus) {
            bool minus = lex.tok == Tok::Minus;
            lex.next();
            Expr t = parse_term();
            kids.push_back(minus ? Expr::negate(std::move(t)) : std::move(t));
        }
        return kids.size() == 1 ? kids[0] : Expr::sum(std::move(kids));
    }

    Expr parse_term() {
        std::vector<Expr> kids = {parse_unary()};
        while (lex.tok == Tok::Star || lex.tok == Tok::Slash) {
            bool div = lex.tok == Tok::Slash;
            lex.next();
            Expr f = parse_unary();
            kids.push_back(div ? Expr::reciprocal(std::move(f)) : std::move(f));
        }
        return kids.size() == 1 ? kids[0] : Expr::product(std::move(kids));
    }

    Expr parse_unary() {
        if (lex.tok == Tok::Minus) {
            lex.next();
            Expr x = parse_unary();
            if (x.kind() == Kind::Constant) return Expr::constant(-x.value());
            return Expr::negate(std::move(x));
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (lex.tok != Tok::Caret) return base;
        std::size_t caret_pos = lex.tok_pos;
        lex.next();
        Expr expo = (lex.tok == Tok::Minus) ? parse_unary() : parse_power();
        bool minus_one = base.kind() == Kind::Constant && base.value() == -1;
        if (minus_one) {
            if (auto aff = lattice_affine_int(expo)) return alt_sign_from_affine(*aff);
        }
        try {
            return Expr::pow(std::move(base), std::move(expo));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), caret_pos);
        }
    }

    Expr parse_atom() {
        switch (lex.tok) {
            case Tok::Int: {
                long v = lex.int_value;
                lex.next();
                return Expr::integer(v);
            }
            case Tok::LParen: {
                lex.next();
                Expr e = parse_sum();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident:
                return parse_ident();
            default:
                lex.fail("expected a number, name, or '('");
        }
    }

    Expr parse_ident() {
        std::string name = lex.ident;
        std::size_t name_pos = lex.tok_pos;
        lex.next();

        if (lex.tok == Tok::LParen) {
            lex.next();
            Expr arg = parse_sum();
            expect(Tok::RParen, "')'");
            if (name == "ln") return Expr::ln(std::move(arg));
            if (name == "exp") return Expr::exp(std::move(arg));
            if (name == "tanh") return Expr::tanh(std::move(arg));
            if (name == "abs") return Expr::abs(std::move(arg));
            if (name == "sn")
                throw ParseError("sn is supported only in the degenerate case K = +/-1; write tanh",
                                 name_pos);
            throw ParseError("unknown function '" + name + "' (have ln, exp, tanh, abs)", name_pos);
        }

        if (lex.tok == Tok::LBracket) {
            if (!ctx.variables.empty() && !ctx.variables.count(name))
                throw ParseError("undeclared dependent variable '" + name + "'", name_pos);
            lex.next();
            std::vector<int> offsets;
            while (true) {
                bool neg = false;
                if (lex.tok == Tok::Minus) {
                    neg = true;
                    lex.next();
                }
                if (lex.tok != Tok::Int) lex.fail("expected an integer offset");
                offsets.push_back(static_cast<int>(neg ? -lex.int_value : lex.int_value));
                lex.next();
                if (lex.tok == Tok::Comma) {
                    lex.next();
                    continue;
                }
                break;
            }
            expect(Tok::RBracket, "']'");
            if (offsets.size() != ctx.dim)
                throw ParseError("offset " + MultiIndex(offsets).str() + " has " +
                                     std::to_string(offsets.size()) + " entries but the lattice dimension is " +
                                     std::to_string(ctx.dim),
                                 name_pos);
            return Expr::dependent(name, MultiIndex(std::move(offsets)));
        }

        if (auto axis = axis_of(name)) return Expr::lattice_var(*axis);
        if (ctx.params.count(name)) return Expr::parameter(name);
        throw ParseError("unknown identifier '" + name + "' (not an axis name or declared parameter)",
                         name_pos);
    }
};

} // namespace

Expr parse_expr(const std::string& text, const ParseContext& ctx) {
    Parser p(text, ctx);
    Expr e = p.parse_sum();
    if (p.lex.tok != Tok::End) p.lex.fail("unexpected trailing input");
    return e;
}

} // namespace latsym
