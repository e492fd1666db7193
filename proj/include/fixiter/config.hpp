#pragma once

#include <cctype>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fixiter::config {

// Experiment configs are plain text, hand-editable:
//
//   # comment
//   seed = 42
//   schemes = [picard, ky]
//   compare = [[ky, s]]
//   stop {
//     residual_tol = 1e-10
//     max_iter = 200
//   }
//
// An entry is `key = value` or `key { entries }`. Values are numbers,
// identifiers, quoted strings, or (arbitrarily nested) bracketed lists.
// Keys may repeat; order is preserved.

/// Parse or validation failure, anchored to a 1-based source line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, std::string detail)
        : std::runtime_error("line " + std::to_string(line) + ": " + detail),
          line_(line),
          detail_(std::move(detail)) {}

    int line() const { return line_; }
    const std::string& detail() const { return detail_; }
    std::string anchored(const std::string& file) const {
        return file + ":" + std::to_string(line_) + ": " + detail_;
    }

private:
    int line_;
    std::string detail_;
};

enum class NodeType { number, ident, string, list, block };

struct Entry;

struct Node {
    NodeType type = NodeType::number;
    double number = 0.0;
    std::string text;           // ident / string payload
    std::vector<Node> items;    // list payload
    std::vector<Entry> entries; // block payload
    int line = 0;

    double as_number() const {
        if (type != NodeType::number) throw ConfigError(line, "expected a number");
        return number;
    }
    int as_int() const {
        double v = as_number();
        if (v != static_cast<double>(static_cast<long long>(v)))
            throw ConfigError(line, "expected an integer");
        return static_cast<int>(v);
    }
    const std::string& as_text() const {
        if (type != NodeType::ident && type != NodeType::string)
            throw ConfigError(line, "expected an identifier or string");
        return text;
    }
    const std::vector<Node>& as_list() const {
        if (type != NodeType::list) throw ConfigError(line, "expected a list");
        return items;
    }
    const std::vector<Entry>& as_block() const {
        if (type != NodeType::block) throw ConfigError(line, "expected a block");
        return entries;
    }

    std::vector<double> as_vector() const {
        std::vector<double> v;
        for (const Node& item : as_list()) v.push_back(item.as_number());
        if (v.empty()) throw ConfigError(line, "expected a non-empty vector");
        return v;
    }
    std::vector<std::vector<double>> as_matrix() const {
        std::vector<std::vector<double>> m;
        for (const Node& row : as_list()) m.push_back(row.as_vector());
        if (m.empty()) throw ConfigError(line, "expected a non-empty matrix");
        return m;
    }
};

struct Entry {
    std::string key;
    Node value;
};

// Block lookup helpers.

inline const Node* find(const std::vector<Entry>& block, std::string_view key) {
    for (const Entry& e : block)
        if (e.key == key) return &e.value;
    return nullptr;
}

inline std::vector<const Node*> find_all(const std::vector<Entry>& block, std::string_view key) {
    std::vector<const Node*> out;
    for (const Entry& e : block)
        if (e.key == key) out.push_back(&e.value);
    return out;
}

inline const Node& require(const std::vector<Entry>& block, std::string_view key, int anchor_line) {
    const Node* n = find(block, key);
    if (!n) throw ConfigError(anchor_line, "missing required key '" + std::string(key) + "'");
    return *n;
}

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    std::vector<Entry> parse_document() {
        std::vector<Entry> entries = parse_entries(false);
        skip_ws();
        if (!at_end()) throw ConfigError(line_, "unexpected '" + std::string(1, peek()) + "'");
        return entries;
    }

private:
    std::vector<Entry> parse_entries(bool inside_block) {
        std::vector<Entry> entries;
        while (true) {
            skip_ws();
            if (at_end() || (inside_block && peek() == '}')) return entries;
            Entry e;
            int key_line = line_;
            e.key = parse_ident_token();
            skip_ws();
            if (at_end()) throw ConfigError(key_line, "expected '=' or '{' after '" + e.key + "'");
            if (peek() == '=') {
                ++pos_;
                skip_ws();
                e.value = parse_value();
            } else if (peek() == '{') {
                ++pos_;
                e.value.type = NodeType::block;
                e.value.line = key_line;
                e.value.entries = parse_entries(true);
                skip_ws();
                expect('}');
            } else {
                throw ConfigError(key_line, "expected '=' or '{' after '" + e.key + "'");
            }
            entries.push_back(std::move(e));
        }
    }

    Node parse_value() {
        skip_ws();
        if (at_end()) throw ConfigError(line_, "expected a value");
        Node n;
        n.line = line_;
        char c = peek();
        if (c == '[') {
            ++pos_;
            n.type = NodeType::list;
            skip_ws();
            if (!at_end() && peek() == ']') {
                ++pos_;
                return n;
            }
            while (true) {
                n.items.push_back(parse_value());
                skip_ws();
                if (at_end()) throw ConfigError(n.line, "unterminated list");
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                if (peek() == ']') {
                    ++pos_;
                    return n;
                }
                throw ConfigError(line_, "expected ',' or ']' in list");
            }
        }
        if (c == '"') {
            ++pos_;
            n.type = NodeType::string;
            while (!at_end() && peek() != '"' && peek() != '\n') n.text += text_[pos_++];
            if (at_end() || peek() != '"') throw ConfigError(n.line, "unterminated string");
            ++pos_;
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
            std::string tok;
            while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) &&
                   peek() != ',' && peek() != ']' && peek() != '}' && peek() != '#')
                tok += text_[pos_++];
            char* end = nullptr;
            n.number = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size() || tok.empty())
                throw ConfigError(n.line, "malformed number '" + tok + "'");
            n.type = NodeType::number;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            n.type = NodeType::ident;
            n.text = parse_ident_token();
            return n;
        }
        throw ConfigError(line_, std::string("unexpected '") + c + "' in value");
    }

    std::string parse_ident_token() {
        skip_ws();
        if (at_end() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_'))
            throw ConfigError(line_, "expected an identifier");
        std::string tok;
        while (!at_end()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')
                tok += text_[pos_++];
            else
                break;
        }
        return tok;
    }

    void expect(char c) {
        if (at_end() || peek() != c)
            throw ConfigError(line_, std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_ws() {
        while (!at_end()) {
            char c = peek();
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '#') {
                while (!at_end() && peek() != '\n') ++pos_;
            } else {
                return;
            }
        }
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

}  // namespace detail

/// Parse a config document. Throws ConfigError with a 1-based line number.
inline std::vector<Entry> parse_document(std::string_view text) {
    return detail::Parser(text).parse_document();
}

}  // namespace fixiter::config
