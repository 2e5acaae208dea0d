#include "bn2o/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <sstream>
#include <unordered_map>

namespace bn2o {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(line == 0 ? message
                                   : "line " + std::to_string(line) + ", column " +
                                         std::to_string(column) + ": " + message),
      message_(message),
      line_(line),
      column_(column) {}

TooManyPositiveFindings::TooManyPositiveFindings(std::size_t count, std::size_t cap)
    : CapExceeded(std::to_string(count) + " positive findings exceed the cap of " +
                  std::to_string(cap)) {}

TooManyDiseases::TooManyDiseases(std::size_t count, std::size_t cap)
    : CapExceeded(std::to_string(count) + " diseases exceed the cap of " + std::to_string(cap)) {}

std::optional<DiseaseIndex> Network::find_disease(std::string_view id) const {
    for (DiseaseIndex i = 0; i < diseases.size(); ++i)
        if (diseases[i].id == id) return i;
    return std::nullopt;
}

std::optional<FindingIndex> Network::find_finding(std::string_view id) const {
    for (FindingIndex j = 0; j < findings.size(); ++j)
        if (findings[j].id == id) return j;
    return std::nullopt;
}

namespace {

bool valid_token(std::string_view id) {
    if (id.empty()) return false;
    return std::none_of(id.begin(), id.end(), [](char ch) {
        return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' || ch == '\f' ||
               ch == '#';
    });
}

bool prior_ok(double p) { return p > 0.0 && p < 1.0; }
bool activation_ok(double c) { return c > 0.0 && c <= 1.0; }
bool leak_ok(double l) { return l >= 0.0 && l < 1.0; }

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

struct Line {
    std::size_t number;
    std::vector<Token> tokens;
};

// Splits into non-blank, comment-stripped lines of whitespace separated tokens.
std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            if (i > start) line.tokens.push_back({raw.substr(start, i - start), start + 1});
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        if (end == text.size()) break;
        pos = end + 1;
    }
    return lines;
}

double parse_number(const Token& tok, std::size_t line, std::string_view what) {
    double value = 0.0;
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value))
        throw ParseError("invalid " + std::string(what) + " '" + std::string(tok.text) + "'", line,
                         tok.column);
    return value;
}

void expect_header(const std::vector<Line>& lines, std::string_view keyword) {
    if (lines.empty()) throw ParseError("missing '" + std::string(keyword) + " 1' header", 1, 1);
    const Line& first = lines.front();
    if (first.tokens[0].text != keyword)
        throw ParseError("expected '" + std::string(keyword) + " 1' header", first.number,
                         first.tokens[0].column);
    if (first.tokens.size() != 2)
        throw ParseError("malformed header", first.number, first.tokens[0].column);
    if (first.tokens[1].text != "1")
        throw ParseError("unsupported format version '" + std::string(first.tokens[1].text) + "'",
                         first.number, first.tokens[1].column);
}

void arity(const Line& line, std::size_t expected) {
    if (line.tokens.size() != expected) {
        const Token& at = line.tokens.size() > expected ? line.tokens[expected] : line.tokens.back();
        throw ParseError("'" + std::string(line.tokens[0].text) + "' expects " +
                             std::to_string(expected - 1) + " argument(s)",
                         line.number, at.column);
    }
}

}  // namespace

void canonicalize(Network& net) {
    for (Finding& f : net.findings)
        std::sort(f.parents.begin(), f.parents.end(),
                  [](const Link& a, const Link& b) { return a.disease < b.disease; });
}

void canonicalize(CaseEvidence& evidence) {
    std::sort(evidence.positives.begin(), evidence.positives.end());
    std::sort(evidence.negatives.begin(), evidence.negatives.end());
}

void validate(const Network& net) {
    std::unordered_map<std::string_view, std::size_t> seen;
    for (const Disease& d : net.diseases) {
        if (!valid_token(d.id)) throw ValidationError("invalid disease id '" + d.id + "'");
        if (!seen.emplace(d.id, 0).second) throw ValidationError("duplicate disease id " + d.id);
        if (!prior_ok(d.prior))
            throw ValidationError("prior out of range (0,1) for disease " + d.id);
    }
    seen.clear();
    for (const Finding& f : net.findings) {
        if (!valid_token(f.id)) throw ValidationError("invalid finding id '" + f.id + "'");
        if (!seen.emplace(f.id, 0).second) throw ValidationError("duplicate finding id " + f.id);
        if (!leak_ok(f.leak)) throw ValidationError("leak out of range [0,1) for finding " + f.id);
        if (f.parents.empty()) throw ValidationError("finding " + f.id + " has no parents");
        for (std::size_t k = 0; k < f.parents.size(); ++k) {
            const Link& link = f.parents[k];
            if (link.disease >= net.diseases.size())
                throw ValidationError("finding " + f.id + " references unknown disease index " +
                                      std::to_string(link.disease));
            if (!activation_ok(link.activation))
                throw ValidationError("activation out of range (0,1] on edge " + f.id + " " +
                                      net.diseases[link.disease].id);
            if (k > 0 && f.parents[k - 1].disease >= link.disease)
                throw ValidationError("parents of finding " + f.id +
                                      " are not sorted and distinct");
        }
    }
}

void validate(const CaseEvidence& evidence, const Network& net) {
    auto check = [&](const std::vector<FindingIndex>& list, const char* sign) {
        for (std::size_t k = 0; k < list.size(); ++k) {
            if (list[k] >= net.findings.size())
                throw ValidationError(std::string(sign) + " evidence references unknown finding index " +
                                      std::to_string(list[k]));
            if (k > 0 && list[k - 1] >= list[k])
                throw ValidationError(std::string(sign) + " evidence is not sorted and distinct");
        }
    };
    check(evidence.positives, "positive");
    check(evidence.negatives, "negative");
    std::vector<FindingIndex> both;
    std::set_intersection(evidence.positives.begin(), evidence.positives.end(),
                          evidence.negatives.begin(), evidence.negatives.end(),
                          std::back_inserter(both));
    if (!both.empty())
        throw ValidationError("conflicting evidence for " + net.findings[both.front()].id);
}

Network parse_network(std::string_view text) {
    const std::vector<Line> lines = tokenize(text);
    expect_header(lines, "bn2o");

    Network net;
    std::unordered_map<std::string, DiseaseIndex> disease_ids;
    std::unordered_map<std::string, FindingIndex> finding_ids;
    std::vector<const Line*> edges;

    for (std::size_t n = 1; n < lines.size(); ++n) {
        const Line& line = lines[n];
        const std::string_view keyword = line.tokens[0].text;
        if (keyword == "disease") {
            arity(line, 3);
            const Token& id = line.tokens[1];
            const double prior = parse_number(line.tokens[2], line.number, "prior");
            if (!prior_ok(prior))
                throw ParseError("prior out of range (0,1)", line.number, line.tokens[2].column);
            if (!disease_ids.emplace(std::string(id.text), net.diseases.size()).second)
                throw ParseError("duplicate disease id " + std::string(id.text), line.number,
                                 id.column);
            net.diseases.push_back({std::string(id.text), prior});
        } else if (keyword == "finding") {
            if (line.tokens.size() < 2 || line.tokens.size() > 3) arity(line, 2);
            const Token& id = line.tokens[1];
            double leak = 0.0;
            if (line.tokens.size() == 3) {
                const Token& opt = line.tokens[2];
                if (!opt.text.starts_with("leak="))
                    throw ParseError("unknown finding option '" + std::string(opt.text) + "'",
                                     line.number, opt.column);
                Token value{opt.text.substr(5), opt.column + 5};
                leak = parse_number(value, line.number, "leak");
                if (!leak_ok(leak))
                    throw ParseError("leak out of range [0,1)", line.number, value.column);
            }
            if (!finding_ids.emplace(std::string(id.text), net.findings.size()).second)
                throw ParseError("duplicate finding id " + std::string(id.text), line.number,
                                 id.column);
            net.findings.push_back({std::string(id.text), leak, {}});
        } else if (keyword == "edge") {
            arity(line, 4);
            edges.push_back(&line);
        } else {
            throw ParseError("unknown directive '" + std::string(keyword) + "'", line.number,
                             line.tokens[0].column);
        }
    }

    // Edges are resolved after all declarations so the file order of
    // declarations and edges does not matter.
    for (const Line* line : edges) {
        const Token& fid = line->tokens[1];
        const Token& did = line->tokens[2];
        auto f = finding_ids.find(std::string(fid.text));
        if (f == finding_ids.end())
            throw ParseError("unknown finding " + std::string(fid.text), line->number, fid.column);
        auto d = disease_ids.find(std::string(did.text));
        if (d == disease_ids.end())
            throw ParseError("unknown disease " + std::string(did.text), line->number, did.column);
        const double c = parse_number(line->tokens[3], line->number, "activation");
        if (!activation_ok(c))
            throw ParseError("activation out of range (0,1]", line->number,
                             line->tokens[3].column);
        auto& parents = net.findings[f->second].parents;
        if (std::any_of(parents.begin(), parents.end(),
                        [&](const Link& l) { return l.disease == d->second; }))
            throw ParseError("duplicate edge " + std::string(fid.text) + " " +
                                 std::string(did.text),
                             line->number, fid.column);
        parents.push_back({d->second, c});
    }

    for (const Finding& f : net.findings)
        if (f.parents.empty()) throw ParseError("finding " + f.id + " has no parents");

    canonicalize(net);
    return net;
}

CaseEvidence parse_case(std::string_view text, const Network& net) {
    const std::vector<Line> lines = tokenize(text);
    expect_header(lines, "case");

    std::unordered_map<std::string_view, FindingIndex> ids;
    for (FindingIndex j = 0; j < net.findings.size(); ++j) ids.emplace(net.findings[j].id, j);

    // 0 = unobserved, +1 positive, -1 negative
    std::vector<int> state(net.findings.size(), 0);
    for (std::size_t n = 1; n < lines.size(); ++n) {
        const Line& line = lines[n];
        const std::string_view sign = line.tokens[0].text;
        if (sign != "+" && sign != "-")
            throw ParseError("expected '+' or '-', got '" + std::string(sign) + "'", line.number,
                             line.tokens[0].column);
        arity(line, 2);
        const Token& id = line.tokens[1];
        auto it = ids.find(id.text);
        if (it == ids.end())
            throw ParseError("unknown finding " + std::string(id.text), line.number, id.column);
        const int value = sign == "+" ? 1 : -1;
        int& slot = state[it->second];
        if (slot != 0 && slot != value)
            throw ParseError("conflicting evidence for " + std::string(id.text), line.number,
                             id.column);
        slot = value;
    }

    CaseEvidence evidence;
    for (FindingIndex j = 0; j < state.size(); ++j) {
        if (state[j] > 0) evidence.positives.push_back(j);
        if (state[j] < 0) evidence.negatives.push_back(j);
    }
    return evidence;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

std::string format_significant(double value, int digits) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    return std::string(buf, static_cast<std::size_t>(std::max(n, 0)));
}

std::string serialize_network(const Network& net) {
    std::ostringstream out;
    out << "bn2o 1\n";
    for (const Disease& d : net.diseases) out << "disease " << d.id << ' ' << format_double(d.prior) << '\n';
    for (const Finding& f : net.findings) {
        out << "finding " << f.id;
        if (f.leak != 0.0) out << " leak=" << format_double(f.leak);
        out << '\n';
        for (const Link& link : f.parents)
            out << "edge " << f.id << ' ' << net.diseases[link.disease].id << ' '
                << format_double(link.activation) << '\n';
    }
    return out.str();
}

std::string serialize_case(const CaseEvidence& evidence, const Network& net) {
    std::ostringstream out;
    out << "case 1\n";
    for (FindingIndex j : evidence.positives) out << "+ " << net.findings[j].id << '\n';
    for (FindingIndex j : evidence.negatives) out << "- " << net.findings[j].id << '\n';
    return out.str();
}

}  // namespace bn2o
