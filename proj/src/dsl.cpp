#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "msr/scenario.hpp"

namespace msr {

std::string Diagnostic::str() const {
    return file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + message;
}

namespace {

enum class Tok { Ident, Number, String, Fresh, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Time value = 0;
    int line = 1;
    int col = 1;
};

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::String: return "string \"" + t.text + "\"";
    default: return "'" + t.text + "'";
    }
}

struct ParseFailure {
    Diagnostic diag;
};

class Lexer {
public:
    Lexer(std::string_view src, std::string file) : src_(src), file_(std::move(file)) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip();
            Token t;
            t.line = line_;
            t.col = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    t.text += advance();
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                number(t);
            } else if (c == '"') {
                advance();
                t.kind = Tok::String;
                while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n')
                    t.text += advance();
                if (pos_ >= src_.size() || src_[pos_] != '"')
                    fail(t, "unterminated string");
                advance();
            } else if (c == '#') {
                advance();
                t.kind = Tok::Fresh;
                std::string type;
                while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    type += advance();
                if (type.empty() || pos_ >= src_.size() || src_[pos_] != ':')
                    fail(t, "malformed fresh constant, expected '#type:index'");
                advance();
                std::string digits;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    digits += advance();
                if (digits.empty())
                    fail(t, "malformed fresh constant, expected '#type:index'");
                t.text = type;
                t.value = to_number(t, digits);
            } else {
                t.kind = Tok::Punct;
                static const char* multi[] = {">=", "<=", "->"};
                for (const char* m : multi)
                    if (src_.substr(pos_, 2) == m) {
                        t.text = m;
                        advance();
                        advance();
                        break;
                    }
                if (t.text.empty()) {
                    static const std::string single = "{}(),;:@|+-*<>=";
                    if (single.find(c) == std::string::npos)
                        fail(t, std::string("unexpected character '") + c + "'");
                    t.text = std::string(1, advance());
                }
            }
            out.push_back(std::move(t));
        }
    }

private:
    [[noreturn]] void fail(const Token& at, const std::string& msg) {
        throw ParseFailure{Diagnostic{file_, at.line, at.col, msg}};
    }

    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++col_;
        }
        return c;
    }

    void skip() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (src_.substr(pos_, 2) == "//") {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    Time to_number(const Token& at, const std::string& digits) {
        if (digits.size() > 18)
            fail(at, "number too large: " + digits);
        return std::stoll(digits);
    }

    void number(Token& t) {
        t.kind = Tok::Number;
        std::string digits;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            digits += advance();
        t.text = digits;
        if (pos_ + 1 < src_.size() && src_[pos_] == 'd' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
            advance();
            std::string hh, mm;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                hh += advance();
            if (pos_ >= src_.size() || src_[pos_] != ':')
                fail(t, "malformed clock time, expected 'NdHH:MM'");
            advance();
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                mm += advance();
            if (mm.empty())
                fail(t, "malformed clock time, expected 'NdHH:MM'");
            t.text = digits + "d" + hh + ":" + mm;
            try {
                t.value = clock_convert(to_number(t, digits), to_number(t, hh), to_number(t, mm));
            } catch (const Error& e) {
                fail(t, e.what());
            }
            return;
        }
        t.value = to_number(t, digits);
    }

    std::string_view src_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    Parser(std::vector<Token> toks, std::string file, Signature* sig)
        : toks_(std::move(toks)), file_(std::move(file)), sig_(sig) {}

    PlanningScenario scenario() {
        PlanningScenario a;
        std::vector<TimedFact> init{TimedFact{Fact{std::string(kTimePredicate), {}}, 0}};
        bool have_init = false;
        Token init_tok;
        while (!at_end()) {
            const Token& t = peek();
            if (is_kw("scenario")) {
                next();
                a.name = expect_ident("scenario name").text;
                expect(";");
            } else if (is_kw("types")) {
                next();
                types();
            } else if (is_kw("consts")) {
                next();
                consts();
            } else if (is_kw("functions")) {
                next();
                functions();
            } else if (is_kw("predicates")) {
                next();
                predicates();
            } else if (is_kw("bound")) {
                next();
                a.fact_size_bound = static_cast<std::size_t>(expect_number().value);
                expect(";");
            } else if (is_kw("init")) {
                init_tok = next();
                if (have_init)
                    fail(init_tok, "duplicate init block");
                have_init = true;
                init = init_block();
            } else if (is_kw("rule")) {
                next();
                rule(a);
            } else if (is_kw("goal") || is_kw("critical")) {
                bool goal = next().text == "goal";
                auto pair = spec_pair();
                (goal ? a.goal : a.critical).pairs.push_back(std::move(pair));
            } else {
                fail(t, "expected one of 'scenario', 'types', 'consts', 'functions', 'predicates', 'bound', "
                        "'init', 'rule', 'goal', 'critical'; found " + describe(t));
            }
        }
        if (!have_init)
            fail(peek(), "missing init block");
        try {
            a.initial = Configuration(std::move(init));
        } catch (const Error& e) {
            fail(init_tok, e.what());
        }
        a.sig = *sig_;
        return a;
    }

    std::vector<TimedFact> facts_until(const std::string& close) {
        std::vector<TimedFact> out;
        if (!is_punct(close)) {
            out.push_back(ground_fact());
            while (accept(","))
                out.push_back(ground_fact());
        }
        return out;
    }

    Term lone_term() {
        auto t = term(nullptr, nullptr);
        if (!at_end())
            fail(peek(), "expected end of input; found " + describe(peek()));
        return t;
    }

    Configuration configuration() {
        Token open = expect("{");
        auto facts = facts_until("}");
        expect("}");
        if (!at_end())
            fail(peek(), "expected end of input; found " + describe(peek()));
        try {
            return Configuration(std::move(facts));
        } catch (const Error& e) {
            fail(open, e.what());
        }
    }

    [[noreturn]] void fail(const Token& at, const std::string& msg) {
        throw ParseFailure{Diagnostic{file_, at.line, at.col, msg}};
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    bool at_end() const { return peek().kind == Tok::End; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    bool is_kw(const char* kw) const { return peek().kind == Tok::Ident && peek().text == kw; }
    bool is_punct(const std::string& p) const { return peek().kind == Tok::Punct && peek().text == p; }

    bool accept(const std::string& p) {
        if (!is_punct(p))
            return false;
        next();
        return true;
    }

    Token expect(const std::string& p) {
        if (!is_punct(p))
            fail(peek(), "expected '" + p + "'; found " + describe(peek()));
        return next();
    }

    Token expect_ident(const std::string& what) {
        if (peek().kind != Tok::Ident)
            fail(peek(), "expected " + what + "; found " + describe(peek()));
        return next();
    }

    Token expect_number() {
        if (peek().kind != Tok::Number)
            fail(peek(), "expected a number; found " + describe(peek()));
        return next();
    }

    template <class F>
    void semantic(const Token& at, F&& f) {
        try {
            f();
        } catch (const Error& e) {
            fail(at, e.what());
        }
    }

    void types() {
        expect("{");
        while (!is_punct("}")) {
            Token t = expect_ident("a type name");
            sig_->add_type(t.text);
            if (!accept(",") && !accept(";") && !is_punct("}"))
                fail(peek(), "expected one of ',', ';', '}'; found " + describe(peek()));
        }
        expect("}");
    }

    void consts() {
        expect("{");
        while (!is_punct("}")) {
            std::vector<Token> names{expect_ident("a constant name")};
            while (accept(","))
                names.push_back(expect_ident("a constant name"));
            expect(":");
            Token type = expect_ident("a type name");
            expect(";");
            for (const auto& n : names)
                semantic(n, [&] { sig_->add_constant(n.text, type.text); });
        }
        expect("}");
    }

    void functions() {
        expect("{");
        while (!is_punct("}")) {
            Token name = expect_ident("a function name");
            expect(":");
            FunctionType ft;
            if (!is_punct("->")) {
                ft.args.push_back(expect_ident("a type name").text);
                while (accept("*"))
                    ft.args.push_back(expect_ident("a type name").text);
            }
            expect("->");
            ft.result = expect_ident("a type name").text;
            expect(";");
            semantic(name, [&] { sig_->add_function(name.text, ft); });
        }
        expect("}");
    }

    void predicates() {
        expect("{");
        while (!is_punct("}")) {
            Token name = expect_ident("a predicate name");
            PredicateType pt;
            if (accept("(")) {
                if (!is_punct(")")) {
                    pt.args.push_back(expect_ident("a type name").text);
                    while (accept(","))
                        pt.args.push_back(expect_ident("a type name").text);
                }
                expect(")");
            }
            expect(":");
            Token role = expect_ident("a role");
            if (role.text == "system")
                pt.role = PredRole::System;
            else if (role.text == "goal")
                pt.role = PredRole::Goal;
            else if (role.text == "critical")
                pt.role = PredRole::Critical;
            else
                fail(role, "expected one of 'system', 'goal', 'critical'; found " + describe(role));
            expect(";");
            semantic(name, [&] { sig_->add_predicate(name.text, pt); });
        }
        expect("}");
    }

    std::vector<TimedFact> init_block() {
        expect("{");
        auto facts = facts_until("}");
        expect("}");
        return facts;
    }

    // Variables are typed by position; `vars` maps names to their inferred type.
    Term term(const std::string* expected, std::map<std::string, std::string>* vars) {
        const Token& t = peek();
        if (t.kind == Tok::Fresh) {
            Token f = next();
            if (!sig_->has_type(f.text))
                fail(f, "fresh constant of undeclared type '" + f.text + "'");
            if (expected && *expected != f.text)
                fail(f, "type mismatch: '#" + f.text + "' has type '" + f.text + "', expected '" + *expected + "'");
            return Term::fresh(f.text, f.value);
        }
        Token id = expect_ident("a term");
        if (sig_->is_function(id.text)) {
            const auto& ft = sig_->function(id.text);
            expect("(");
            std::vector<Term> args;
            for (std::size_t i = 0; i < ft.args.size(); ++i) {
                if (i)
                    expect(",");
                args.push_back(term(&ft.args[i], vars));
            }
            expect(")");
            if (expected && *expected != ft.result)
                fail(id, "type mismatch: '" + id.text + "' returns '" + ft.result + "', expected '" + *expected + "'");
            return Term::app(id.text, std::move(args));
        }
        if (sig_->is_constant(id.text)) {
            const auto& ct = sig_->constant_type(id.text);
            if (expected && *expected != ct)
                fail(id, "type mismatch: '" + id.text + "' has type '" + ct + "', expected '" + *expected + "'");
            return Term::constant(id.text);
        }
        if (!vars)
            fail(id, "unknown constant '" + id.text + "'");
        if (is_punct("("))
            fail(id, "unknown function '" + id.text + "'");
        auto it = vars->find(id.text);
        if (it == vars->end()) {
            vars->emplace(id.text, *expected);
        } else if (it->second != *expected) {
            fail(id, "variable '" + id.text + "' used with type '" + *expected + "' and '" + it->second + "'");
        }
        return Term::var(id.text, *expected);
    }

    Fact atom(std::map<std::string, std::string>* vars, Token* at = nullptr) {
        Token name = expect_ident("a predicate name");
        if (at)
            *at = name;
        if (!sig_->is_predicate(name.text))
            fail(name, "unknown predicate '" + name.text + "'");
        const auto& pt = sig_->predicate(name.text);
        Fact f;
        f.pred = name.text;
        if (accept("(")) {
            for (std::size_t i = 0; i < pt.args.size(); ++i) {
                if (i)
                    expect(",");
                f.args.push_back(term(&pt.args[i], vars));
            }
            if (!is_punct(")"))
                fail(peek(), "predicate '" + name.text + "' takes " + std::to_string(pt.args.size()) +
                                 " arguments; expected ')', found " + describe(peek()));
            expect(")");
        } else if (!pt.args.empty()) {
            fail(name, "predicate '" + name.text + "' takes " + std::to_string(pt.args.size()) + " arguments");
        }
        return f;
    }

    TimedFact ground_fact() {
        Fact f = atom(nullptr);
        expect("@");
        Token n = expect_number();
        return TimedFact{std::move(f), n.value};
    }

    struct RawCreate {
        Fact atom;
        std::optional<std::string> tvar;
        Time delay = 0;
        Token at;
    };

    void rule(PlanningScenario& a) {
        Token role_tok = expect_ident("a rule role");
        Rule r;
        if (role_tok.text == "system")
            r.role = RuleRole::System;
        else if (role_tok.text == "system_update" || role_tok.text == "sur")
            r.role = RuleRole::SystemUpdate;
        else if (role_tok.text == "goal_update" || role_tok.text == "gur")
            r.role = RuleRole::GoalUpdate;
        else
            fail(role_tok, "expected one of 'system', 'system_update', 'goal_update'; found " + describe(role_tok));
        Token name = expect_ident("a rule name");
        r.name = name.text;
        if (a.find_rule(r.name) || std::any_of(pending_names_.begin(), pending_names_.end(),
                                               [&](const std::string& n) { return n == r.name; }))
            fail(name, "duplicate rule '" + r.name + "'");
        pending_names_.push_back(r.name);
        expect("{");
        std::map<std::string, std::string> vars;
        std::vector<RawCreate> creates;
        std::vector<std::pair<TimeConstraint, Token>> guard;
        bool time_named = false;
        while (!is_punct("}")) {
            Token field = expect_ident("one of 'pre', 'consume', 'create', 'guard'");
            expect(":");
            if (field.text == "pre" || field.text == "consume") {
                bool pre = field.text == "pre";
                if (!is_punct(";")) {
                    do {
                        Token at;
                        Fact f = atom(&vars, &at);
                        expect("@");
                        Token tv = expect_ident("a time variable");
                        if (f.is_time()) {
                            if (!pre)
                                fail(at, "the Time predicate may not be consumed by an instantaneous rule");
                            if (time_named)
                                fail(at, "the rule's clock is already named");
                            time_named = true;
                            r.time_var = tv.text;
                            continue;
                        }
                        (pre ? r.side : r.consumed).push_back({std::move(f), tv.text});
                    } while (accept(","));
                }
            } else if (field.text == "create") {
                if (!is_punct(";")) {
                    do {
                        RawCreate c;
                        c.atom = atom(&vars, &c.at);
                        if (c.atom.is_time())
                            fail(c.at, "the Time predicate may not be created by an instantaneous rule");
                        expect("@");
                        bool paren = accept("(");
                        Token tv = expect_ident("a time variable");
                        c.tvar = tv.text;
                        if (accept("+"))
                            c.delay = expect_number().value;
                        if (paren)
                            expect(")");
                        creates.push_back(std::move(c));
                    } while (accept(","));
                }
            } else if (field.text == "guard") {
                if (!is_punct(";")) {
                    do {
                        Token at = peek();
                        guard.push_back({constraint(), at});
                    } while (accept(","));
                }
            } else {
                fail(field, "expected one of 'pre', 'consume', 'create', 'guard'; found " + describe(field));
            }
            expect(";");
        }
        expect("}");

        for (auto& c : creates) {
            const std::string& tv = *c.tvar;
            if (c.delay == 0) {
                auto same = std::find_if(r.consumed.begin(), r.consumed.end(), [&](const TimedAtom& x) {
                    return x.tvar == tv && x.atom == c.atom;
                });
                if (same != r.consumed.end()) {
                    r.side.push_back(*same);
                    r.consumed.erase(same);
                    continue;
                }
            }
            if (tv != r.time_var)
                fail(c.at, "created facts must be stamped relative to the rule's clock '" + r.time_var +
                               "'; found '" + tv + "'");
            r.created.push_back({std::move(c.atom), c.delay});
        }
        for (auto& [c, at] : guard) {
            auto tvars = r.pre_time_vars();
            for (const auto* v : {&c.lhs, &c.rhs})
                if (std::find(tvars.begin(), tvars.end(), *v) == tvars.end())
                    fail(at, "guard variable '" + *v + "' does not occur in the precondition");
            r.guard.push_back(c);
        }
        semantic(name, [&] { check_rule(r, *sig_); });
        (r.role == RuleRole::System ? a.system_rules : a.update_rules).push_back(std::move(r));
    }

    TimeConstraint constraint() {
        auto side = [&](std::string& var, Time& off) {
            var = expect_ident("a time variable").text;
            off = 0;
            if (accept("+"))
                off = expect_number().value;
            else if (accept("-"))
                off = -expect_number().value;
        };
        TimeConstraint c;
        Time lo = 0, ro = 0;
        side(c.lhs, lo);
        const Token& op = peek();
        if (is_punct(">"))
            c.rel = Rel::Gt;
        else if (is_punct(">="))
            c.rel = Rel::Ge;
        else if (is_punct("="))
            c.rel = Rel::Eq;
        else if (is_punct("<="))
            c.rel = Rel::Le;
        else if (is_punct("<"))
            c.rel = Rel::Lt;
        else
            fail(op, "expected one of '>', '>=', '=', '<=', '<'; found " + describe(op));
        next();
        side(c.rhs, ro);
        c.offset = ro - lo;
        return c;
    }

    SpecPair spec_pair() {
        SpecPair p;
        if (peek().kind == Tok::String)
            p.label = next().text;
        expect("{");
        std::map<std::string, std::string> vars;
        std::vector<Token> tv_tokens;
        if (!is_punct("|") && !is_punct("}")) {
            do {
                Fact f = atom(&vars);
                expect("@");
                Token tv = expect_ident("a time variable");
                p.pattern.push_back({std::move(f), tv.text});
            } while (accept(","));
        }
        if (accept("|")) {
            do {
                Token at = peek();
                auto c = constraint();
                for (const auto* v : {&c.lhs, &c.rhs})
                    if (std::none_of(p.pattern.begin(), p.pattern.end(),
                                     [&](const TimedAtom& x) { return x.tvar == *v; }))
                        fail(at, "constraint variable '" + *v + "' does not occur in the pattern");
                p.constraints.push_back(c);
            } while (accept(","));
        }
        expect("}");
        return p;
    }

    std::vector<Token> toks_;
    std::string file_;
    Signature* sig_;
    std::size_t pos_ = 0;
    std::vector<std::string> pending_names_;
};

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        out += (i ? sep : "") + xs[i];
    return out;
}

std::string timed(const TimedAtom& a) {
    return render(a.atom) + "@" + a.tvar;
}

}  // namespace

ParseResult parse_scenario(std::string_view text, const std::string& file) {
    ParseResult out;
    try {
        Signature sig;
        Parser p(Lexer(text, file).run(), file, &sig);
        auto a = p.scenario();
        try {
            a.finalize();
        } catch (const Error& e) {
            throw ParseFailure{Diagnostic{file, 1, 1, e.what()}};
        }
        out.scenario = std::move(a);
    } catch (const ParseFailure& f) {
        out.diagnostics.push_back(f.diag);
    }
    return out;
}

PlanningScenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(path + ": cannot read file");
    std::stringstream ss;
    ss << in.rdbuf();
    auto r = parse_scenario(ss.str(), path);
    if (!r.ok()) {
        std::string msg;
        for (const auto& d : r.diagnostics)
            msg += (msg.empty() ? "" : "\n") + d.str();
        throw Error(msg);
    }
    return std::move(*r.scenario);
}

Term parse_ground_term(const Signature& sig, std::string_view text) {
    try {
        Signature copy = sig;
        Parser p(Lexer(text, "<term>").run(), "<term>", &copy);
        return p.lone_term();
    } catch (const ParseFailure& f) {
        throw Error(f.diag.str());
    }
}

Configuration parse_configuration(const Signature& sig, std::string_view text) {
    try {
        Signature copy = sig;
        Parser p(Lexer(text, "<configuration>").run(), "<configuration>", &copy);
        return p.configuration();
    } catch (const ParseFailure& f) {
        throw Error(f.diag.str());
    }
}

std::string print_scenario(const PlanningScenario& a) {
    std::ostringstream out;
    if (!a.name.empty())
        out << "scenario " << a.name << ";\n\n";
    const auto& sig = a.sig;
    out << "types { " << join(std::vector<std::string>(sig.types().begin(), sig.types().end()), ", ") << " }\n\n";
    if (!sig.constants().empty()) {
        std::map<std::string, std::vector<std::string>> by_type;
        for (const auto& [name, type] : sig.constants())
            by_type[type].push_back(name);
        out << "consts {\n";
        for (const auto& [type, names] : by_type)
            out << "  " << join(names, ", ") << " : " << type << ";\n";
        out << "}\n\n";
    }
    if (!sig.functions().empty()) {
        out << "functions {\n";
        for (const auto& [name, ft] : sig.functions())
            out << "  " << name << " : " << join(ft.args, " * ") << (ft.args.empty() ? "" : " ") << "-> "
                << ft.result << ";\n";
        out << "}\n\n";
    }
    out << "predicates {\n";
    for (const auto& [name, pt] : sig.predicates()) {
        if (pt.role == PredRole::Time)
            continue;
        out << "  " << name;
        if (!pt.args.empty())
            out << "(" << join(pt.args, ", ") << ")";
        out << " : " << to_string(pt.role) << ";\n";
    }
    out << "}\n\n";
    if (a.fact_size_bound)
        out << "bound " << a.fact_size_bound << ";\n\n";
    out << "init {\n";
    for (std::size_t i = 0; i < a.initial.facts().size(); ++i)
        out << "  " << render(a.initial.facts()[i]) << (i + 1 < a.initial.facts().size() ? "," : "") << "\n";
    out << "}\n";
    auto print_rule = [&](const Rule& r) {
        out << "\nrule " << to_string(r.role) << " " << r.name << " {\n";
        std::vector<std::string> pre;
        if (r.time_var != "T")
            pre.push_back("Time@" + r.time_var);
        for (const auto& x : r.side)
            pre.push_back(timed(x));
        if (!pre.empty())
            out << "  pre: " << join(pre, ", ") << ";\n";
        if (!r.consumed.empty()) {
            std::vector<std::string> xs;
            for (const auto& x : r.consumed)
                xs.push_back(timed(x));
            out << "  consume: " << join(xs, ", ") << ";\n";
        }
        if (!r.created.empty()) {
            std::vector<std::string> xs;
            for (const auto& c : r.created)
                xs.push_back(render(c.atom) + "@" +
                             (c.delay ? "(" + r.time_var + "+" + std::to_string(c.delay) + ")" : r.time_var));
            out << "  create: " << join(xs, ", ") << ";\n";
        }
        if (!r.guard.empty()) {
            std::vector<std::string> xs;
            for (const auto& c : r.guard)
                xs.push_back(render(c));
            out << "  guard: " << join(xs, ", ") << ";\n";
        }
        out << "}\n";
    };
    for (const auto& r : a.system_rules)
        print_rule(r);
    for (const auto& r : a.update_rules)
        print_rule(r);
    auto print_spec = [&](const ConfigSpec& spec) {
        for (const auto& p : spec.pairs) {
            out << "\n" << (spec.kind == SpecKind::Goal ? "goal" : "critical");
            if (!p.label.empty())
                out << " \"" << p.label << "\"";
            std::vector<std::string> xs;
            for (const auto& x : p.pattern)
                xs.push_back(timed(x));
            out << " { " << join(xs, ", ");
            if (!p.constraints.empty()) {
                std::vector<std::string> cs;
                for (const auto& c : p.constraints)
                    cs.push_back(render(c));
                out << " | " << join(cs, ", ");
            }
            out << " }\n";
        }
    };
    print_spec(a.goal);
    print_spec(a.critical);
    return out.str();
}

}  // namespace msr
