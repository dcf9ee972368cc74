#include "adtmas/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>

namespace adtmas {

std::string ParseError::str() const {
    return span.file + ":" + std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message;
}

bool ParseResult::has_syntax_errors() const {
    return std::any_of(errors.begin(), errors.end(), [](const ParseError& e) { return !e.semantic; });
}

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1, column = 1;
    std::size_t offset = 0;
};

std::optional<TimeUnit> time_unit(std::string_view s) {
    if (s == "min") return TimeUnit{"min", 1};
    if (s == "h") return TimeUnit{"h", 60};
    if (s == "d") return TimeUnit{"d", 1440};
    return std::nullopt;
}

class Lexer {
public:
    Lexer(std::string_view text, std::vector<Token>& out, std::vector<std::pair<Token, std::string>>& bad)
        : text_(text) {
        while (true) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            t.offset = pos_;
            if (pos_ >= text_.size()) {
                out.push_back(t);
                return;
            }
            char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                    t.text += advance();
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                t.kind = Tok::Number;
                digits(t.text);
                if (peek('.') && next_is_digit()) {
                    t.text += advance();
                    digits(t.text);
                } else if (peek('/') && next_is_digit()) {
                    t.text += advance();
                    digits(t.text);
                }
            } else {
                t.kind = Tok::Punct;
                static const char* two[] = {"<=", ">=", "==", "!="};
                bool matched = false;
                for (const char* p : two) {
                    if (text_.substr(pos_, 2) == p) {
                        t.text += advance();
                        t.text += advance();
                        matched = true;
                        break;
                    }
                }
                if (!matched) {
                    if (std::string_view("{}()[],:;=.+-*<>").find(c) == std::string_view::npos) {
                        t.text = std::string(1, advance());
                        bad.emplace_back(t, "unexpected character '" + t.text + "'");
                        continue;
                    }
                    t.text += advance();
                }
            }
            out.push_back(t);
        }
    }

private:
    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }
    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else if (c != '\r') {
            ++col_;
        }
        return c;
    }
    bool peek(char c) const { return pos_ < text_.size() && text_[pos_] == c; }
    bool next_is_digit() const {
        return pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]));
    }
    void digits(std::string& s) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) s += advance();
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

struct SyntaxError {
    Token at;
    std::string message;
    std::vector<std::string> expected;
};

struct RawNode {
    Node node;
    std::optional<Polarity> declared;
    Token where;
    std::vector<Token> child_tokens;
};

class Parser {
public:
    Parser(std::vector<Token> toks, std::string file) : toks_(std::move(toks)), file_(std::move(file)) {}

    ParseResult run(std::vector<std::pair<Token, std::string>> lex_errors) {
        for (auto& [t, msg] : lex_errors) error(t, msg, {});
        try {
            program();
        } catch (const SyntaxError& e) {
            error(e.at, e.message, e.expected);
        }
        ParseResult result;
        result.errors = std::move(errors_);
        if (!result.errors.empty()) return result;
        build(result);
        return result;
    }

private:
    // ---- token helpers
    const Token& cur() const { return toks_[pos_]; }
    bool at_punct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
    bool at_ident(std::string_view s) const { return cur().kind == Tok::Ident && cur().text == s; }
    Token take() {
        Token t = cur();
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    [[noreturn]] void fail(std::string message, std::vector<std::string> expected) {
        throw SyntaxError{cur(), std::move(message), std::move(expected)};
    }
    std::string describe(const Token& t) const {
        if (t.kind == Tok::End) return "end of input";
        return "'" + t.text + "'";
    }
    Token expect_punct(std::string_view p) {
        if (!at_punct(p)) fail("expected '" + std::string(p) + "' but found " + describe(cur()), {std::string(p)});
        return take();
    }
    Token expect_ident(const char* what) {
        if (cur().kind != Tok::Ident) fail("expected " + std::string(what) + " but found " + describe(cur()), {what});
        return take();
    }
    void expect_keyword(std::string_view kw) {
        if (!at_ident(kw)) fail("expected '" + std::string(kw) + "' but found " + describe(cur()), {std::string(kw)});
        take();
    }
    void error(const Token& t, std::string message, std::vector<std::string> expected, bool semantic = false) {
        ParseError e;
        e.span = SourceSpan{file_, t.line, t.column, std::max<int>(1, static_cast<int>(t.text.size()))};
        e.message = std::move(message);
        e.expected = std::move(expected);
        e.semantic = semantic;
        errors_.push_back(std::move(e));
    }
    // Skip to the next declaration keyword after an error inside a declaration.
    void recover() {
        static const std::set<std::string> starts{"leaf", "node", "assign", "param", "goal"};
        take();
        while (cur().kind != Tok::End && !(cur().kind == Tok::Ident && starts.count(cur().text)) && !at_punct("}"))
            take();
    }

    // ---- grammar
    void program() {
        expect_keyword("tree");
        name_ = expect_ident("tree name").text;
        expect_punct("{");
        while (!at_punct("}")) {
            if (cur().kind == Tok::End) fail("expected '}' but found end of input", {"}"});
            try {
                declaration();
            } catch (const SyntaxError& e) {
                error(e.at, e.message, e.expected);
                recover();
            }
        }
        take();
        if (cur().kind != Tok::End) fail("unexpected " + describe(cur()) + " after tree", {"end of input"});
    }

    void declaration() {
        if (at_ident("leaf")) return leaf();
        if (at_ident("node")) return gate();
        if (at_ident("assign")) return assign();
        if (at_ident("param")) return param();
        if (at_ident("goal")) return goal();
        fail("expected a declaration but found " + describe(cur()), {"leaf", "node", "assign", "param", "goal"});
    }

    Polarity polarity() {
        if (at_ident("attack")) {
            take();
            return Polarity::Attack;
        }
        if (at_ident("defence") || at_ident("defense")) {
            take();
            return Polarity::Defence;
        }
        fail("expected 'attack' or 'defence' but found " + describe(cur()), {"attack", "defence"});
    }

    void declare(RawNode raw) {
        if (seen_.count(raw.node.id)) {
            error(raw.where, "node '" + raw.node.id + "' declared twice", {});
            return;
        }
        seen_.insert(raw.node.id);
        raw_.push_back(std::move(raw));
    }

    void leaf() {
        take();
        RawNode raw;
        raw.where = expect_ident("node name");
        raw.node.id = raw.where.text;
        raw.node.kind = NodeKind::Leaf;
        expect_punct(":");
        raw.declared = polarity();
        raw.node.polarity = *raw.declared;
        if (at_punct("[")) attributes(raw.node);
        declare(std::move(raw));
    }

    void gate() {
        take();
        RawNode raw;
        raw.where = expect_ident("node name");
        raw.node.id = raw.where.text;
        if (at_punct(":")) {
            take();
            raw.declared = polarity();
        }
        expect_punct("=");
        Token kw = expect_ident("gate kind");
        auto kind = gate_kind(kw.text);
        if (!kind) {
            pos_--;
            fail("unknown gate kind '" + kw.text + "'", {"and", "or", "sand", "counter", "nocounter", "scounter"});
        }
        raw.node.kind = *kind;
        expect_punct("(");
        while (true) {
            Token c = expect_ident("child name");
            raw.node.children.push_back(c.text);
            raw.child_tokens.push_back(c);
            if (at_punct(",")) {
                take();
                continue;
            }
            expect_punct(")");
            break;
        }
        if (at_punct("[")) attributes(raw.node);
        if (at_ident("condition")) {
            take();
            expect_punct("{");
            raw.node.condition = condition();
            expect_punct("}");
        }
        declare(std::move(raw));
    }

    Rational number_with_unit(std::optional<TimeUnit>* unit_out) {
        if (cur().kind != Tok::Number) fail("expected a number but found " + describe(cur()), {"number"});
        Token num = take();
        auto value = parse_rational(num.text);
        if (!value) throw SyntaxError{num, "malformed number '" + num.text + "'", {"number"}};
        if (cur().kind == Tok::Ident) {
            if (auto u = time_unit(cur().text)) {
                take();
                if (unit_out) *unit_out = u;
                return *value * u->minutes;
            }
        }
        return *value;
    }

    void attributes(Node& n) {
        expect_punct("[");
        if (at_punct("]")) {
            take();
            return;
        }
        while (true) {
            Token key = expect_ident("attribute name");
            expect_punct("=");
            std::optional<TimeUnit> unit;
            Token at = cur();
            Rational v = number_with_unit(&unit);
            if (unit && key.text != "time") throw SyntaxError{at, "units apply to time only", {}};
            if (n.attributes.count(key.text)) throw SyntaxError{key, "attribute '" + key.text + "' repeated", {}};
            n.attributes[key.text] = v;
            if (unit && unit->symbol != "min") n.units[key.text] = *unit;
            if (at_punct(",")) {
                take();
                continue;
            }
            expect_punct("]");
            return;
        }
    }

    AttrRef attr_ref() {
        AttrRef r;
        r.node = expect_ident("node name").text;
        expect_punct(".");
        r.attr = expect_ident("attribute name").text;
        return r;
    }

    // term := number [unit] ['*' atom] | atom ['*' number]
    void term(LinearSide& side, const Rational& sign) {
        if (cur().kind == Tok::Number) {
            Rational k = number_with_unit(nullptr) * sign;
            if (at_punct("*")) {
                take();
                Term t = atom();
                t.coeff = k;
                side.terms.push_back(std::move(t));
            } else {
                side.constant += k;
            }
            return;
        }
        Term t = atom();
        t.coeff = sign;
        if (at_punct("*")) {
            take();
            t.coeff *= number_with_unit(nullptr);
        }
        side.terms.push_back(std::move(t));
    }

    Term atom() {
        Term t;
        if (at_ident("init"))
            t.kind = TermKind::Init;
        else if (at_ident("value"))
            t.kind = TermKind::Value;
        else
            fail("expected init(...), value(...) or a number but found " + describe(cur()), {"init", "value", "number"});
        take();
        expect_punct("(");
        t.ref = attr_ref();
        expect_punct(")");
        return t;
    }

    LinearSide linear() {
        LinearSide side;
        Rational sign = 1;
        if (at_punct("-")) {
            take();
            sign = -1;
        }
        term(side, sign);
        while (at_punct("+") || at_punct("-")) {
            sign = take().text == "+" ? 1 : -1;
            term(side, sign);
        }
        return side;
    }

    Condition condition() {
        Condition c;
        c.lhs = linear();
        static const std::map<std::string, Cmp> ops{{"<", Cmp::Lt}, {"<=", Cmp::Le}, {"=", Cmp::Eq},
                                                    {"==", Cmp::Eq}, {">=", Cmp::Ge}, {">", Cmp::Gt}};
        auto it = cur().kind == Tok::Punct ? ops.find(cur().text) : ops.end();
        if (it == ops.end()) fail("expected a comparison but found " + describe(cur()), {"<", "<=", "=", ">=", ">"});
        take();
        c.op = it->second;
        c.rhs = linear();
        return c;
    }

    void assign() {
        take();
        expect_keyword("agents");
        assign_seen_ = true;
        expect_punct("{");
        while (!at_punct("}")) {
            Token agent = expect_ident("agent name");
            expect_punct(":");
            while (true) {
                Token n = expect_ident("node name");
                if (assigned_.count(n.text))
                    error(n, "node '" + n.text + "' assigned twice", {});
                assigned_[n.text] = {agent.text, n};
                if (at_punct(",")) {
                    take();
                    continue;
                }
                break;
            }
            if (at_punct(";")) {
                take();
                continue;
            }
            if (!at_punct("}")) fail("expected ';' or '}' but found " + describe(cur()), {";", "}"});
        }
        take();
    }

    void param() {
        take();
        Token at = cur();
        AttrRef r = attr_ref();
        params_.emplace_back(r, at);
    }

    void goal() {
        take();
        goal_ = expect_ident("goal label");
    }

    // ---- assembly
    void build(ParseResult& result) {
        AdtModel m;
        m.name = name_;
        std::map<NodeId, const RawNode*> by_id;
        for (const auto& r : raw_) by_id[r.node.id] = &r;

        // gate polarity: declared, else inherited from the first child
        std::map<NodeId, std::optional<Polarity>> pol;
        std::function<std::optional<Polarity>(const NodeId&, int)> resolve = [&](const NodeId& id,
                                                                                 int depth) -> std::optional<Polarity> {
            auto it = by_id.find(id);
            if (it == by_id.end() || depth > static_cast<int>(raw_.size())) return std::nullopt;
            if (auto p = pol.find(id); p != pol.end()) return p->second;
            const RawNode& r = *it->second;
            std::optional<Polarity> p = r.declared;
            if (!p && !r.node.children.empty()) p = resolve(r.node.children.front(), depth + 1);
            pol[id] = p;
            return p;
        };

        for (const auto& r : raw_) {
            Node n = r.node;
            if (auto p = resolve(n.id, 0)) n.polarity = *p;
            for (std::size_t i = 0; i < n.children.size(); ++i)
                if (!by_id.count(n.children[i])) {
                    error(r.child_tokens[i], "unknown node '" + n.children[i] + "'", {}, true);
                    reported_unknown_.insert(n.children[i]);
                }
            m.add(std::move(n));
        }
        if (auto root = m.infer_root()) m.root = *root;

        if (assign_seen_) {
            for (const auto& [node, entry] : assigned_) {
                if (!by_id.count(node)) {
                    error(entry.second, "unknown node '" + node + "' in agent assignment", {}, true);
                    reported_unknown_.insert(node);
                }
                else
                    m.agents[node] = entry.first;
            }
        } else {
            m.agents = single_assignment(m);
        }
        for (const auto& [ref, tok] : params_) {
            if (!by_id.count(ref.node)) {
                error(tok, "unknown node '" + ref.node + "' in param", {}, true);
                continue;
            }
            if (m.param_index(ref)) {
                error(tok, "parameter '" + ref.str() + "' declared twice", {}, true);
                continue;
            }
            m.params.push_back(ref);
        }
        if (goal_) m.goal = goal_->text;

        for (const auto& d : validate(m)) {
            if (d.rule == "UnknownNode" && reported_unknown_.count(d.subject)) continue;
            error(locate(d, by_id), d.message.empty() ? d.rule : d.message + " [" + d.rule + "]", {}, true);
        }
        result.errors = std::move(errors_);
        if (result.errors.empty()) result.model = std::move(m);
    }

    Token locate(const Diagnostic& d, const std::map<NodeId, const RawNode*>& by_id) const {
        if (auto it = by_id.find(d.subject); it != by_id.end()) return it->second->where;
        for (const auto& [node, entry] : assigned_)
            if (entry.first == d.subject) return entry.second;
        if (goal_ && d.subject == goal_->text) return *goal_;
        for (const auto& r : raw_)
            for (const auto& c : r.child_tokens)
                if (c.text == d.subject) return c;
        return toks_.front();
    }

    std::vector<Token> toks_;
    std::string file_;
    std::size_t pos_ = 0;
    std::vector<ParseError> errors_;
    std::string name_;
    std::vector<RawNode> raw_;
    std::set<NodeId> seen_;
    bool assign_seen_ = false;
    std::map<NodeId, std::pair<AgentId, Token>> assigned_;
    std::vector<std::pair<AttrRef, Token>> params_;
    std::optional<Token> goal_;
    std::set<NodeId> reported_unknown_;
};

std::string literal(const Rational& v, const TimeUnit* unit) {
    if (!unit) return to_string(v);
    return to_string(v / unit->minutes) + unit->symbol;
}

std::string side_text(const LinearSide& s) {
    std::string out;
    for (const auto& t : s.terms) {
        Rational mag = t.coeff < 0 ? Rational(-t.coeff) : t.coeff;
        if (out.empty())
            out += t.coeff < 0 ? "-" : "";
        else
            out += t.coeff < 0 ? " - " : " + ";
        if (mag != 1) out += to_string(mag) + "*";
        out += std::string(t.kind == TermKind::Init ? "init(" : "value(") + t.ref.str() + ")";
    }
    if (out.empty()) {
        out = s.constant < 0 ? "-" + to_string(Rational(-s.constant)) : to_string(s.constant);
    } else if (s.constant != 0) {
        out += s.constant < 0 ? " - " + to_string(Rational(-s.constant)) : " + " + to_string(s.constant);
    }
    return out;
}

}  // namespace

ParseResult parse(std::string_view text, const std::string& file) {
    std::vector<Token> toks;
    std::vector<std::pair<Token, std::string>> bad;
    Lexer(text, toks, bad);
    return Parser(std::move(toks), file).run(std::move(bad));
}

std::string serialize(const AdtModel& model) {
    std::string out = "tree " + model.name + " {\n";
    for (const auto& id : model.topological_order()) {
        const Node& n = model.node(id);
        if (n.kind == NodeKind::Leaf) {
            out += "  leaf " + n.id + " : " + name(n.polarity);
        } else {
            out += "  node " + n.id + " = " + name(n.kind) + "(";
            for (std::size_t i = 0; i < n.children.size(); ++i) out += (i ? ", " : "") + n.children[i];
            out += ")";
        }
        if (!n.attributes.empty()) {
            out += " [";
            bool first = true;
            for (const auto& [k, v] : n.attributes) {
                auto u = n.units.find(k);
                out += (first ? "" : ", ") + k + "=" + literal(v, u == n.units.end() ? nullptr : &u->second);
                first = false;
            }
            out += "]";
        }
        if (n.condition)
            out += " condition { " + side_text(n.condition->lhs) + " " + symbol(n.condition->op) + " " +
                   side_text(n.condition->rhs) + " }";
        out += "\n";
    }
    std::map<AgentId, std::vector<NodeId>> groups;
    for (const auto& [node, agent] : model.agents) groups[agent].push_back(node);
    out += "  assign agents {";
    bool first = true;
    for (const auto& [agent, nodes] : groups) {
        out += std::string(first ? " " : "; ") + agent + ": ";
        for (std::size_t i = 0; i < nodes.size(); ++i) out += (i ? ", " : "") + nodes[i];
        first = false;
    }
    out += " }\n";
    for (const auto& p : model.params) out += "  param " + p.str() + "\n";
    if (model.goal) out += "  goal " + *model.goal + "\n";
    out += "}\n";
    return out;
}

}  // namespace adtmas
