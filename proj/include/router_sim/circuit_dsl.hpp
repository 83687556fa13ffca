// Copyright 2026 The router_sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "router_sim/circuit.hpp"
#include "router_sim/elements.hpp"

namespace router_sim::dsl {

// Line-oriented circuit text format (.circuit). One statement per line, '#'
// starts a comment:
//
//   mode NAME [A|B|C|aux] TIME ROLE
//   source NAME WEIGHT [NAME WEIGHT ...]
//   bs R M1 M2 | ps PHI M | ns M | ns2 M1 M2 | tunnel THETA M1 M2
//   pqr reflect|transmit PROBE_IN PROBE_OUT CONTROL
//   relabel M1 M2                       (exchanges the two modes)
//   postselect M=N [M=N ...] | postselect_state NAME WEIGHT [...]
//   detect LABEL M=N [M=N ...]
//
// Weights are a, bi or a+bi. A mode without a box tag takes box A, B or C when
// its name is that letter and aux otherwise.

using Weights = std::vector<std::pair<std::string, Complex>>;
using Pattern = std::vector<std::pair<std::string, int>>;

struct ModeDecl {
    std::string name;
    Box box = Box::Aux;
    TimeSlot time = TimeSlot::None;
    Role role = Role::Internal;
    bool operator==(const ModeDecl &) const = default;
};

struct SourceStmt {
    Weights weights;
    bool operator==(const SourceStmt &) const = default;
};

struct ElementStmt {
    std::string op;  // bs, ps, ns, ns2, pqr, relabel, tunnel
    std::optional<double> param;
    std::optional<RouterOrientation> orientation;
    std::vector<std::string> modes;
    bool operator==(const ElementStmt &) const = default;
};

struct PostselectStmt {
    Pattern pattern;
    bool operator==(const PostselectStmt &) const = default;
};

struct PostselectStateStmt {
    Weights weights;
    bool operator==(const PostselectStateStmt &) const = default;
};

struct DetectStmt {
    std::string label;
    Pattern pattern;
    bool operator==(const DetectStmt &) const = default;
};

using StatementBody = std::variant<ModeDecl, SourceStmt, ElementStmt, PostselectStmt, PostselectStateStmt, DetectStmt>;

struct Statement {
    StatementBody body;
    int line = 0;  // source line, 0 when built in code

    bool operator==(const Statement &o) const {
        return body == o.body;
    }
};

/// Parsed document: statements in file order. Equality is structural.
struct CircuitDoc {
    std::vector<Statement> statements;
    std::vector<std::string> warnings;

    bool operator==(const CircuitDoc &o) const {
        return statements == o.statements;
    }

    template <typename T>
    std::vector<T> all() const {
        std::vector<T> out;
        for (const auto &s : statements) {
            if (const auto *p = std::get_if<T>(&s.body)) out.push_back(*p);
        }
        return out;
    }
};

class ParseError : public std::runtime_error {
   public:
    ParseError(int line, int column, std::string message, std::string token)
        : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column),
          message_(std::move(message)),
          token_(std::move(token)) {}

    int line() const {
        return line_;
    }
    int column() const {
        return column_;
    }
    const std::string &message() const {
        return message_;
    }
    const std::string &token() const {
        return token_;
    }

   private:
    int line_;
    int column_;
    std::string message_;
    std::string token_;
};

class CompileError : public std::runtime_error {
   public:
    CompileError(std::size_t statement, int line, const std::string &message)
        : std::runtime_error((line > 0 ? "line " + std::to_string(line) : "statement " + std::to_string(statement)) +
                             ": " + message),
          statement_(statement),
          line_(line) {}

    std::size_t statement() const {
        return statement_;
    }
    int line() const {
        return line_;
    }

   private:
    std::size_t statement_;
    int line_;
};

namespace detail {

inline constexpr double kWeightNormTol = 1e-9;

struct Token {
    std::string text;
    int column = 0;
};

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char ch = line[i];
        if (ch == '#') break;
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            ++i;
            continue;
        }
        if (ch == '=') {
            out.push_back({"=", static_cast<int>(i) + 1});
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '=' &&
               line[i] != '#') {
            ++i;
        }
        out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
    }
    return out;
}

inline std::optional<double> parse_real(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<Complex> parse_weight(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.back() != 'i') {
        auto re = parse_real(s);
        if (!re) return std::nullopt;
        return Complex{*re, 0.0};
    }
    s.remove_suffix(1);
    std::size_t split = std::string_view::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    const std::string_view re_part = split == std::string_view::npos ? std::string_view{} : s.substr(0, split);
    std::string_view im_part = split == std::string_view::npos ? s : s.substr(split);
    double re = 0.0;
    if (!re_part.empty()) {
        auto r = parse_real(re_part);
        if (!r) return std::nullopt;
        re = *r;
    }
    double im = 0.0;
    if (im_part.empty() || im_part == "+") {
        im = 1.0;
    } else if (im_part == "-") {
        im = -1.0;
    } else {
        auto v = parse_real(im_part);
        if (!v) return std::nullopt;
        im = *v;
    }
    return Complex{re, im};
}

inline std::optional<Box> parse_box(std::string_view s) {
    if (s == "A") return Box::A;
    if (s == "B") return Box::B;
    if (s == "C") return Box::C;
    if (s == "aux") return Box::Aux;
    return std::nullopt;
}

inline bool is_ident(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' || c == '|')) return false;
    }
    return std::isalpha(static_cast<unsigned char>(s.front())) || s.front() == '_';
}

class LineParser {
   public:
    LineParser(int line, std::vector<Token> tokens, int end_column, const std::set<std::string> &declared)
        : line_(line), tokens_(std::move(tokens)), end_column_(end_column), declared_(declared) {}

    [[noreturn]] void fail(const std::string &message) const {
        if (pos_ < tokens_.size()) throw ParseError(line_, tokens_[pos_].column, message, tokens_[pos_].text);
        throw ParseError(line_, end_column_, message, "");
    }

    bool done() const {
        return pos_ >= tokens_.size();
    }

    const Token &peek() const {
        return tokens_[pos_];
    }

    std::string next() {
        return tokens_[pos_++].text;
    }

    double real(const std::string &what) {
        if (done()) fail(what);
        auto v = parse_real(peek().text);
        if (!v) fail(what);
        ++pos_;
        return *v;
    }

    std::string declared_mode(const std::string &what) {
        if (done() || peek().text == "=") fail(what);
        if (!is_ident(peek().text)) fail("expected a mode name");
        if (!declared_.count(peek().text)) fail("undeclared mode '" + peek().text + "'");
        return next();
    }

    std::vector<std::string> modes(std::size_t n, const std::string &what) {
        if (tokens_.size() - pos_ != n) {
            if (tokens_.size() - pos_ > n) pos_ += n;
            else pos_ = tokens_.size();
            fail(what);
        }
        std::vector<std::string> out;
        for (std::size_t k = 0; k < n; ++k) out.push_back(declared_mode(what));
        return out;
    }

    Weights weights(const std::string &directive) {
        Weights w;
        if (done()) fail(directive + " requires at least one mode and weight");
        while (!done()) {
            std::string m = declared_mode(directive + " requires mode and weight pairs");
            for (const auto &[name, _] : w) {
                if (name == m) fail("mode '" + m + "' listed twice");
            }
            if (done()) fail(directive + " requires a weight after mode '" + m + "'");
            auto c = parse_weight(peek().text);
            if (!c) fail("expected a complex weight a+bi");
            ++pos_;
            w.emplace_back(std::move(m), *c);
        }
        return w;
    }

    Pattern pattern(const std::string &directive) {
        Pattern p;
        if (done()) fail(directive + " requires at least one mode=count term");
        while (!done()) {
            std::string m = declared_mode(directive + " requires mode=count terms");
            for (const auto &[name, _] : p) {
                if (name == m) fail("mode '" + m + "' listed twice");
            }
            if (done() || peek().text != "=") fail("expected '=' after mode '" + m + "'");
            ++pos_;
            if (done()) fail("expected a photon number");
            int n = -1;
            const std::string &t = peek().text;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
            if (ec != std::errc{} || ptr != t.data() + t.size() || n < 0) fail("expected a photon number");
            ++pos_;
            p.emplace_back(std::move(m), n);
        }
        return p;
    }

   private:
    int line_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 1;  // token 0 is the directive
    int end_column_;
    const std::set<std::string> &declared_;
};

inline double weights_norm(const Weights &w) {
    double n = 0.0;
    for (const auto &[_, c] : w) n += std::norm(c);
    return n;
}

inline void normalize_weights(Weights &w, int line, const std::string &what, std::vector<std::string> &warnings) {
    const double n = weights_norm(w);
    if (n == 0.0) throw ParseError(line, 1, what + " weights are all zero", "");
    if (std::abs(n - 1.0) > kWeightNormTol) {
        for (auto &[_, c] : w) c /= std::sqrt(n);
        warnings.push_back("line " + std::to_string(line) + ": " + what + " weights normalized");
    }
}

}  // namespace detail

inline CircuitDoc parse(std::string_view text) {
    CircuitDoc doc;
    std::set<std::string> declared;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;
        auto tokens = detail::tokenize(line);
        if (tokens.empty()) {
            if (end == text.size()) break;
            continue;
        }
        std::size_t trimmed = line.find('#');
        if (trimmed == std::string_view::npos) trimmed = line.size();
        while (trimmed > 0 && (line[trimmed - 1] == ' ' || line[trimmed - 1] == '\t' || line[trimmed - 1] == '\r')) {
            --trimmed;
        }
        const std::string directive = tokens.front().text;
        const int directive_column = tokens.front().column;
        detail::LineParser p(line_no, std::move(tokens), static_cast<int>(trimmed) + 1, declared);
        Statement st;
        st.line = line_no;

        if (directive == "mode") {
            if (p.done()) p.fail("mode requires a name, time tag and role tag");
            if (!detail::is_ident(p.peek().text)) p.fail("expected a mode name");
            if (declared.count(p.peek().text)) p.fail("duplicate declaration of mode '" + p.peek().text + "'");
            ModeDecl m;
            m.name = p.next();
            if (p.done()) p.fail("mode requires a time tag (t1, t2, t3, tf, none)");
            if (auto b = detail::parse_box(p.peek().text)) {
                m.box = *b;
                p.next();
            } else {
                m.box = detail::parse_box(m.name).value_or(Box::Aux);
            }
            if (p.done()) p.fail("mode requires a time tag (t1, t2, t3, tf, none)");
            auto t = parse_time_slot(p.peek().text);
            if (!t) p.fail("expected a time tag (t1, t2, t3, tf, none)");
            m.time = *t;
            p.next();
            if (p.done()) p.fail("mode requires a role tag (shutter, probe_in, probe_r, probe_t, detector, internal)");
            auto r = parse_role(p.peek().text);
            if (!r) p.fail("expected a role tag (shutter, probe_in, probe_r, probe_t, detector, internal)");
            m.role = *r;
            p.next();
            if (!p.done()) p.fail("mode takes a name, optional box tag, time tag and role tag");
            declared.insert(m.name);
            st.body = std::move(m);
        } else if (directive == "source") {
            SourceStmt s{p.weights("source")};
            detail::normalize_weights(s.weights, line_no, "source", doc.warnings);
            st.body = std::move(s);
        } else if (directive == "postselect") {
            st.body = PostselectStmt{p.pattern("postselect")};
        } else if (directive == "postselect_state") {
            PostselectStateStmt s{p.weights("postselect_state")};
            detail::normalize_weights(s.weights, line_no, "postselect_state", doc.warnings);
            st.body = std::move(s);
        } else if (directive == "detect") {
            if (p.done() || p.peek().text == "=") p.fail("detect requires a label");
            if (!detail::is_ident(p.peek().text)) p.fail("expected a detector label");
            DetectStmt d;
            d.label = p.next();
            d.pattern = p.pattern("detect");
            st.body = std::move(d);
        } else if (directive == "bs" || directive == "tunnel") {
            ElementStmt e{directive, {}, {}, {}};
            e.param = p.real(directive + (directive == "bs" ? " requires a reflectivity" : " requires an angle"));
            e.modes = p.modes(2, directive + " requires two modes");
            st.body = std::move(e);
        } else if (directive == "ps") {
            ElementStmt e{directive, {}, {}, {}};
            e.param = p.real("ps requires an angle");
            e.modes = p.modes(1, "ps requires one mode");
            st.body = std::move(e);
        } else if (directive == "ns") {
            st.body = ElementStmt{directive, {}, {}, p.modes(1, "ns requires one mode")};
        } else if (directive == "ns2" || directive == "relabel") {
            st.body = ElementStmt{directive, {}, {}, p.modes(2, directive + " requires two modes")};
        } else if (directive == "pqr") {
            ElementStmt e{directive, {}, {}, {}};
            if (p.done()) p.fail("pqr requires an orientation (reflect or transmit)");
            const std::string o = p.peek().text;
            if (o == "reflect") {
                e.orientation = RouterOrientation::ReflectOnMatch;
            } else if (o == "transmit") {
                e.orientation = RouterOrientation::TransmitOnMatch;
            } else {
                p.fail("pqr requires an orientation (reflect or transmit)");
            }
            p.next();
            e.modes = p.modes(3, "pqr requires three modes");
            st.body = std::move(e);
        } else {
            throw ParseError(line_no, directive_column, "unknown directive '" + directive + "'", directive);
        }
        doc.statements.push_back(std::move(st));
        if (end == text.size()) break;
    }
    return doc;
}

struct CompileOptions {
    int max_photons = kDefaultMaxPhotons;
    RouterModel router_model = RouterModel::Ideal;
};

inline Circuit compile(const CircuitDoc &doc, const CompileOptions &options = {}) {
    Circuit c;
    c.max_photons = options.max_photons;
    std::map<std::string, ModeLabel> modes;
    for (std::size_t k = 0; k < doc.statements.size(); ++k) {
        const Statement &st = doc.statements[k];
        auto mode_of = [&](const std::string &name) -> const ModeLabel & {
            auto it = modes.find(name);
            if (it == modes.end()) throw CompileError(k, st.line, "dangling mode '" + name + "'");
            return it->second;
        };
        try {
            if (const auto *m = std::get_if<ModeDecl>(&st.body)) {
                if (modes.count(m->name)) throw CompileError(k, st.line, "duplicate mode '" + m->name + "'");
                ModeLabel label = mode(m->name, m->box, m->time, m->role);
                modes.emplace(m->name, label);
                c.modes.push_back(std::move(label));
            } else if (const auto *s = std::get_if<SourceStmt>(&st.body)) {
                for (const auto &[name, w] : s->weights) mode_of(name);
                c.sources.push_back({s->weights});
                if (static_cast<int>(c.sources.size()) > c.max_photons) {
                    throw CompileError(k, st.line,
                                       std::to_string(c.sources.size()) + " source photons exceed the photon budget of " +
                                           std::to_string(c.max_photons));
                }
            } else if (const auto *e = std::get_if<ElementStmt>(&st.body)) {
                std::vector<ModeLabel> ms;
                for (const auto &name : e->modes) ms.push_back(mode_of(name));
                const double x = e->param.value_or(0.0);
                if (e->op == "bs") {
                    c.schedule.push_back(beamsplitter(x, ms[0], ms[1]));
                } else if (e->op == "ps") {
                    c.schedule.push_back(phase_shifter(x, ms[0]));
                } else if (e->op == "ns") {
                    c.schedule.push_back(ns_single(ms[0]));
                } else if (e->op == "ns2") {
                    c.schedule.push_back(ns_two_mode(ms[0], ms[1]));
                } else if (e->op == "tunnel") {
                    c.schedule.push_back(tunneling(x, ms[0], ms[1]));
                } else if (e->op == "relabel") {
                    if (ms[0].name == ms[1].name) throw CompileError(k, st.line, "relabel needs two distinct modes");
                    c.schedule.push_back(swap_modes(ms[0], ms[1]));
                } else if (e->op == "pqr") {
                    c.schedule.push_back(pqr(ms[0], ms[1], ms[2], e->orientation.value_or(RouterOrientation::ReflectOnMatch),
                                             options.router_model));
                } else {
                    throw CompileError(k, st.line, "unknown element '" + e->op + "'");
                }
            } else if (const auto *ps = std::get_if<PostselectStmt>(&st.body)) {
                PhotonPattern pat;
                for (const auto &[name, n] : ps->pattern) {
                    mode_of(name);
                    pat[name] = n;
                }
                c.postselections.push_back(PatternPostselection{pat});
            } else if (const auto *pss = std::get_if<PostselectStateStmt>(&st.body)) {
                for (const auto &[name, w] : pss->weights) mode_of(name);
                c.postselections.push_back(StatePostselection{pss->weights});
            } else if (const auto *d = std::get_if<DetectStmt>(&st.body)) {
                PhotonPattern pat;
                for (const auto &[name, n] : d->pattern) {
                    mode_of(name);
                    pat[name] = n;
                }
                c.detectors.push_back({d->label, pat});
            }
        } catch (const Error &err) {
            throw CompileError(k, st.line, err.what());
        }
    }
    if (c.modes.empty()) throw CompileError(0, 0, "no modes declared");
    return c;
}

namespace detail {

inline std::string shortest(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

inline std::string weight_text(Complex w) {
    if (w.imag() == 0.0) return shortest(w.real());
    std::string im = shortest(std::abs(w.imag()));
    return shortest(w.real()) + (std::signbit(w.imag()) ? "-" : "+") + im + "i";
}

}  // namespace detail

/// Canonical text: one statement per line, single spaces, no comments.
inline std::string render(const CircuitDoc &doc) {
    std::ostringstream out;
    auto weights = [&](const Weights &w) {
        for (const auto &[name, c] : w) out << " " << name << " " << detail::weight_text(c);
    };
    auto pattern = [&](const Pattern &p) {
        for (const auto &[name, n] : p) out << " " << name << "=" << n;
    };
    for (const auto &st : doc.statements) {
        if (const auto *m = std::get_if<ModeDecl>(&st.body)) {
            out << "mode " << m->name << " " << to_string(m->box) << " " << to_string(m->time) << " "
                << to_string(m->role);
        } else if (const auto *s = std::get_if<SourceStmt>(&st.body)) {
            out << "source";
            weights(s->weights);
        } else if (const auto *e = std::get_if<ElementStmt>(&st.body)) {
            out << e->op;
            if (e->orientation) out << (*e->orientation == RouterOrientation::ReflectOnMatch ? " reflect" : " transmit");
            if (e->param) out << " " << detail::shortest(*e->param);
            for (const auto &m : e->modes) out << " " << m;
        } else if (const auto *ps = std::get_if<PostselectStmt>(&st.body)) {
            out << "postselect";
            pattern(ps->pattern);
        } else if (const auto *pss = std::get_if<PostselectStateStmt>(&st.body)) {
            out << "postselect_state";
            weights(pss->weights);
        } else if (const auto *d = std::get_if<DetectStmt>(&st.body)) {
            out << "detect " << d->label;
            pattern(d->pattern);
        }
        out << "\n";
    }
    return out.str();
}

/// Document for a programmatic circuit. Relabel elements must be swaps; the
/// router model is not part of the text format.
inline CircuitDoc to_doc(const Circuit &c) {
    CircuitDoc doc;
    auto add = [&](StatementBody b) { doc.statements.push_back({std::move(b), 0}); };
    auto normalized = [](Weights w) {
        const double n = detail::weights_norm(w);
        if (n > 0.0) {
            for (auto &[_, x] : w) x /= std::sqrt(n);
        }
        return w;
    };
    auto pattern = [](const PhotonPattern &p) { return Pattern(p.begin(), p.end()); };
    for (const auto &m : c.modes) add(ModeDecl{m.name, m.box, m.time, m.role});
    for (const auto &s : c.sources) add(SourceStmt{normalized(s.weights)});
    for (const auto &e : c.schedule) {
        std::vector<std::string> names;
        for (const auto &m : bound_modes(e)) names.push_back(m.name);
        if (const auto *b = std::get_if<Beamsplitter>(&e)) {
            add(ElementStmt{"bs", b->reflectivity, {}, names});
        } else if (const auto *p = std::get_if<PhaseShift>(&e)) {
            add(ElementStmt{"ps", p->angle, {}, names});
        } else if (std::holds_alternative<NsSingle>(e)) {
            add(ElementStmt{"ns", {}, {}, names});
        } else if (std::holds_alternative<NsTwoMode>(e)) {
            add(ElementStmt{"ns2", {}, {}, names});
        } else if (const auto *r = std::get_if<Router>(&e)) {
            add(ElementStmt{"pqr", {}, r->orientation, names});
        } else if (const auto *t = std::get_if<Tunnel>(&e)) {
            add(ElementStmt{"tunnel", t->theta, {}, names});
        } else if (const auto *rl = std::get_if<Relabel>(&e)) {
            const auto &mp = rl->mapping;
            if (mp.size() != 2 || mp[0].first.name != mp[1].second.name || mp[0].second.name != mp[1].first.name) {
                throw Error(ErrorCode::BadParam, "only two-mode swaps have a text form");
            }
            add(ElementStmt{"relabel", {}, {}, {mp[0].first.name, mp[0].second.name}});
        }
    }
    for (const auto &post : c.postselections) {
        if (const auto *p = std::get_if<PatternPostselection>(&post)) {
            add(PostselectStmt{pattern(p->pattern)});
        } else {
            add(PostselectStateStmt{normalized(std::get<StatePostselection>(post).weights)});
        }
    }
    for (const auto &d : c.detectors) add(DetectStmt{d.name, pattern(d.pattern)});
    return doc;
}

}  // namespace router_sim::dsl
