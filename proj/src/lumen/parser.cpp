#include "lexer.hpp"
#include "sindarin/error.hpp"
#include "sindarin/lumen/ast.hpp"

#include <set>

namespace sindarin::lumen {

namespace {

constexpr int kMaxNesting = 400;

std::unique_ptr<Node> make_node(NodeKind kind, std::uint32_t start, std::uint32_t end) {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->span = {start, end};
    return n;
}

class Parser {
public:
    Parser(std::string_view source, std::vector<Token> tokens)
        : source_(source), tokens_(std::move(tokens)) {}

    std::unique_ptr<Node> program() {
        auto root = make_node(NodeKind::Program, 0, static_cast<std::uint32_t>(source_.size()));
        std::set<std::string> class_names;
        while (at_class_def()) {
            auto cls = class_def();
            if (!class_names.insert(cls->name).second)
                fail("duplicate class " + cls->name, cls->span.start, cls->span.end);
            root->children.push_back(std::move(cls));
        }
        auto main = sequence(TokenKind::End);
        expect(TokenKind::End, "end of input");
        root->children.push_back(std::move(main));
        return root;
    }

private:
    // -- token helpers --------------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    bool check(TokenKind kind) const { return peek().kind == kind; }
    bool check_binary(std::string_view text) const {
        return peek().kind == TokenKind::Binary && peek().text == text;
    }
    bool check_ident(std::string_view text) const {
        return peek().kind == TokenKind::Identifier && peek().text == text;
    }
    Token advance() {
        Token t = peek();
        if (pos_ < tokens_.size() - 1) ++pos_;
        return t;
    }
    Token expect(TokenKind kind, std::string_view what) {
        if (!check(kind)) fail("expected " + std::string(what), peek().start, std::max(peek().end, peek().start));
        return advance();
    }
    [[noreturn]] void fail(const std::string& message, std::uint32_t start, std::uint32_t end) const {
        throw Error(ErrorCode::SyntaxError, message, ErrorSpan{start, end});
    }
    std::uint32_t last_end() const { return pos_ == 0 ? 0 : tokens_[pos_ - 1].end; }

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth_ > kMaxNesting) p.fail("expression nested too deeply", p.peek().start, p.peek().end);
        }
        ~DepthGuard() { --p.depth_; }
    };

    // -- classes --------------------------------------------------------------

    bool at_class_def() const {
        if (!check_ident("class") || peek(1).kind != TokenKind::Identifier) return false;
        const Token& third = peek(2);
        return third.kind == TokenKind::LBrace || (third.kind == TokenKind::Identifier && third.text == "extends");
    }

    std::unique_ptr<Node> class_def() {
        Token kw = advance();
        Token name = expect(TokenKind::Identifier, "class name");
        auto cls = make_node(NodeKind::ClassDef, kw.start, kw.end);
        cls->name = name.text;
        cls->superclass = "Object";
        if (check_ident("extends")) {
            advance();
            cls->superclass = expect(TokenKind::Identifier, "superclass name").text;
        }
        expect(TokenKind::LBrace, "'{'");
        if (check_ident("fields")) {
            advance();
            std::set<std::string> seen;
            while (check(TokenKind::Identifier)) {
                Token f = advance();
                if (!seen.insert(f.text).second) fail("duplicate field " + f.text, f.start, f.end);
                cls->names.push_back(f.text);
            }
            expect(TokenKind::Period, "'.' after field list");
        }
        std::set<std::string> selectors;
        while (check_ident("method")) {
            auto m = method_def();
            if (!selectors.insert(m->name).second) fail("duplicate method " + m->name, m->span.start, m->span.end);
            cls->children.push_back(std::move(m));
        }
        Token close = expect(TokenKind::RBrace, "'}' or 'method'");
        cls->span.end = close.end;
        return cls;
    }

    std::unique_ptr<Node> method_def() {
        Token kw = advance();
        auto m = make_node(NodeKind::MethodDef, kw.start, kw.end);
        if (check(TokenKind::Identifier)) {
            m->name = advance().text;
        } else if (check(TokenKind::Binary)) {
            m->name = advance().text;
            m->names.push_back(expect(TokenKind::Identifier, "argument name").text);
        } else if (check(TokenKind::Keyword)) {
            while (check(TokenKind::Keyword)) {
                m->name += advance().text;
                m->names.push_back(expect(TokenKind::Identifier, "argument name").text);
            }
        } else {
            fail("expected message pattern", peek().start, peek().end);
        }
        std::set<std::string> seen;
        for (const auto& a : m->names)
            if (!seen.insert(a).second) fail("duplicate argument " + a, m->span.start, last_end());
        expect(TokenKind::LBrace, "'{'");
        m->children.push_back(sequence(TokenKind::RBrace));
        Token close = expect(TokenKind::RBrace, "'}'");
        m->span.end = close.end;
        return m;
    }

    // -- statements -----------------------------------------------------------

    std::unique_ptr<Node> sequence(TokenKind terminator) {
        std::uint32_t start = peek().start;
        auto seq = make_node(NodeKind::Sequence, start, start);
        if (check_binary("|")) seq->children.push_back(temp_decl());
        while (!check(terminator) && !check(TokenKind::End)) {
            seq->children.push_back(statement());
            if (check(TokenKind::Period)) {
                advance();
                while (check(TokenKind::Period)) advance();
                continue;
            }
            break;
        }
        if (!check(terminator)) fail("expected '.' or end of statements", peek().start, peek().end);
        if (!seq->children.empty()) {
            seq->span.start = seq->children.front()->span.start;
            seq->span.end = seq->children.back()->span.end;
        }
        return seq;
    }

    std::unique_ptr<Node> temp_decl() {
        Token open = advance();
        auto decl = make_node(NodeKind::TempDecl, open.start, open.end);
        while (check(TokenKind::Identifier)) decl->names.push_back(advance().text);
        if (!check_binary("|")) fail("expected '|' closing temporaries", peek().start, peek().end);
        decl->span.end = advance().end;
        return decl;
    }

    std::unique_ptr<Node> statement() {
        if (check(TokenKind::Caret)) {
            Token caret = advance();
            auto value = expression();
            auto ret = make_node(NodeKind::Return, caret.start, value->span.end);
            ret->children.push_back(std::move(value));
            return ret;
        }
        return expression();
    }

    std::unique_ptr<Node> expression() {
        DepthGuard guard(*this);
        if (check(TokenKind::Identifier) && peek(1).kind == TokenKind::Assign) {
            Token var = advance();
            if (is_reserved(var.text)) fail("cannot assign to " + var.text, var.start, var.end);
            advance();
            auto value = expression();
            auto assign = make_node(NodeKind::Assignment, var.start, value->span.end);
            assign->name = var.text;
            assign->children.push_back(std::move(value));
            return assign;
        }
        return keyword_expr();
    }

    static bool is_reserved(std::string_view s) {
        return s == "self" || s == "super" || s == "nil" || s == "true" || s == "false";
    }

    std::unique_ptr<Node> send(std::unique_ptr<Node> receiver, std::string selector,
                               std::vector<std::unique_ptr<Node>> args) {
        std::uint32_t end = args.empty() ? last_end() : args.back()->span.end;
        auto msg = make_node(NodeKind::Message, receiver->span.start, std::max(end, receiver->span.end));
        msg->name = std::move(selector);
        msg->is_super = receiver->kind == NodeKind::SelfRef && receiver->is_super;
        msg->children.push_back(std::move(receiver));
        for (auto& a : args) msg->children.push_back(std::move(a));
        return msg;
    }

    std::unique_ptr<Node> keyword_expr() {
        auto receiver = binary_expr();
        if (!check(TokenKind::Keyword)) return receiver;
        std::string selector;
        std::vector<std::unique_ptr<Node>> args;
        while (check(TokenKind::Keyword)) {
            selector += advance().text;
            args.push_back(binary_expr());
        }
        return send(std::move(receiver), std::move(selector), std::move(args));
    }

    std::unique_ptr<Node> binary_expr() {
        auto receiver = unary_expr();
        while (check(TokenKind::Binary)) {
            std::string op = advance().text;
            std::vector<std::unique_ptr<Node>> args;
            args.push_back(unary_expr());
            receiver = send(std::move(receiver), std::move(op), std::move(args));
        }
        return receiver;
    }

    std::unique_ptr<Node> unary_expr() {
        auto receiver = primary();
        while (check(TokenKind::Identifier) && peek(1).kind != TokenKind::Assign) {
            std::string sel = advance().text;
            receiver = send(std::move(receiver), std::move(sel), {});
        }
        return receiver;
    }

    std::unique_ptr<Node> primary() {
        DepthGuard guard(*this);
        const Token& t = peek();
        switch (t.kind) {
        case TokenKind::Integer: {
            Token tok = advance();
            auto lit = make_node(NodeKind::Literal, tok.start, tok.end);
            lit->literal = tok.integer;
            return lit;
        }
        case TokenKind::String: {
            Token tok = advance();
            auto lit = make_node(NodeKind::Literal, tok.start, tok.end);
            lit->literal = tok.text;
            return lit;
        }
        case TokenKind::Symbol: {
            Token tok = advance();
            auto lit = make_node(NodeKind::Literal, tok.start, tok.end);
            lit->literal = Symbol{tok.text};
            return lit;
        }
        case TokenKind::Binary:
            if (t.text == "-" && peek(1).kind == TokenKind::Integer && peek(1).start == t.end) {
                Token minus = advance();
                Token num = advance();
                auto lit = make_node(NodeKind::Literal, minus.start, num.end);
                lit->literal = -num.integer;
                return lit;
            }
            break;
        case TokenKind::Identifier: {
            Token tok = advance();
            if (tok.text == "nil" || tok.text == "true" || tok.text == "false") {
                auto lit = make_node(NodeKind::Literal, tok.start, tok.end);
                if (tok.text == "nil") lit->literal = Nil{};
                else lit->literal = tok.text == "true";
                return lit;
            }
            if (tok.text == "self" || tok.text == "super") {
                auto ref = make_node(NodeKind::SelfRef, tok.start, tok.end);
                ref->is_super = tok.text == "super";
                if (ref->is_super && !(check(TokenKind::Identifier) || check(TokenKind::Keyword) ||
                                       check(TokenKind::Binary)))
                    fail("super must be followed by a message", tok.start, tok.end);
                return ref;
            }
            auto var = make_node(NodeKind::VariableRead, tok.start, tok.end);
            var->name = tok.text;
            return var;
        }
        case TokenKind::LParen: {
            Token open = advance();
            auto inner = expression();
            Token close = expect(TokenKind::RParen, "')'");
            inner->span.start = open.start;
            inner->span.end = close.end;
            return inner;
        }
        case TokenKind::LBracket:
            return block();
        default:
            break;
        }
        fail("expected expression", t.start, std::max(t.end, t.start));
    }

    std::unique_ptr<Node> block() {
        Token open = advance();
        auto blk = make_node(NodeKind::Block, open.start, open.end);
        std::set<std::string> seen;
        while (check(TokenKind::Colon)) {
            advance();
            Token p = expect(TokenKind::Identifier, "block parameter name");
            if (!seen.insert(p.text).second) fail("duplicate block parameter " + p.text, p.start, p.end);
            blk->names.push_back(p.text);
        }
        if (!blk->names.empty() && check_binary("|")) advance();
        blk->children.push_back(sequence(TokenKind::RBracket));
        Token close = expect(TokenKind::RBracket, "']'");
        blk->span.end = close.end;
        auto& body = blk->children.front();
        if (body->children.empty()) body->span = {close.start, close.start};
        return blk;
    }

    std::string_view source_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

} // namespace

std::shared_ptr<const Program> parse_program(std::string source, const ParseOptions& options) {
    auto tokens = tokenize(source);
    Parser parser(source, std::move(tokens));
    auto root = parser.program();
    auto program = std::make_shared<Program>(options.unit, std::move(source), std::move(root));
    program->number(options.first_id);
    return program;
}

} // namespace sindarin::lumen
