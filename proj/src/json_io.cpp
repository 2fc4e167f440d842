#include "qapkit/json_io.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace qapkit {

namespace {

std::vector<std::string> split_lines(const std::string &text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

bool starts_with(const std::string &s, const std::string &prefix) { return s.rfind(prefix, 0) == 0; }

std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(' ');
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(' ');
    return s.substr(a, b - a + 1);
}

/// "k1=v1 k2=v2 ..." tokens of a header line after its leading words.
std::map<std::string, std::string> key_values(const std::string &line) {
    std::map<std::string, std::string> kv;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

int to_int(const std::map<std::string, std::string> &kv, const std::string &key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("missing field " + key);
    return std::stoi(it->second);
}

std::string field(const std::map<std::string, std::string> &kv, const std::string &key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("missing field " + key);
    return it->second;
}

/// Items of a "{a, b, c}" list; "{}" and "{0}" are empty.
std::vector<std::string> brace_items(const std::string &s0) {
    std::string s = trim(s0);
    if (s.size() < 2 || s.front() != '{' || s.back() != '}') throw FormatError("expected {...}: " + s);
    s = s.substr(1, s.size() - 2);
    std::vector<std::string> out;
    if (trim(s).empty() || trim(s) == "0") return out;
    size_t pos = 0;
    while (true) {
        size_t c = s.find(", ", pos);
        out.push_back(trim(s.substr(pos, c == std::string::npos ? std::string::npos : c - pos)));
        if (c == std::string::npos) break;
        pos = c + 2;
    }
    return out;
}

std::string braces(const std::vector<std::string> &items) {
    std::string s = "{";
    for (size_t j = 0; j < items.size(); ++j) {
        if (j) s += ", ";
        s += items[j];
    }
    return s + "}";
}

std::vector<std::string> json_strings(const Json &j) {
    std::vector<std::string> out;
    for (const auto &x : j) out.push_back(x.get<std::string>());
    return out;
}

/// Text after "<label> = " on an indented detail line.
std::string detail_value(const std::string &line, const std::string &label) {
    std::string t = trim(line);
    std::string head = label + " = ";
    if (!starts_with(t, head)) throw FormatError("expected '" + head + "': " + line);
    return t.substr(head.size());
}

std::string bool_word(bool b) { return b ? "pass" : "FAIL"; }

// ---- cells

Json cell_from_name(const std::string &name, int p, int r, const std::string &body, bool lambda) {
    Json c;
    c["name"] = name;
    if (lambda) {
        c["lambda"] = body;
    } else {
        c["members"] = brace_items(body);
    }
    if (name == "0") {
        c["f"] = std::string(size_t(p), '0');
        c["i"] = std::string(size_t(r), '0');
        c["eps"] = 0;
        return c;
    }
    // "W(B_fff;ii)" or "Ŵ(B_fff)"
    size_t open = name.find("(B_");
    size_t close = name.rfind(')');
    if (open == std::string::npos || close == std::string::npos) throw FormatError("bad cell name " + name);
    std::string head = name.substr(0, open);
    std::string inner = name.substr(open + 3, close - open - 3);
    std::string f = inner, i;
    auto semi = inner.find(';');
    if (semi != std::string::npos) {
        f = inner.substr(0, semi);
        i = inner.substr(semi + 1);
    }
    c["f"] = f;
    c["i"] = i;
    c["eps"] = head == "W" ? 1 : 0;
    return c;
}

Json parse_quotient_lines(const std::vector<std::string> &lines, bool co) {
    auto kv = key_values(lines.at(0));
    Json j;
    j["kind"] = co ? "co-quotient" : "quotient";
    const int p = to_int(kv, "p"), r = to_int(kv, "rank");
    j["p"] = p;
    j["rank"] = r;
    const bool lambda = kv.count("render") && kv.at("render") == "lambda";
    j["render"] = lambda ? "lambda" : "spinor";
    if (co) {
        j["center_cell"] = field(kv, "center");
        j["degrade"] = lines[0].find("(degrade)") != std::string::npos;
    }
    j["cartan"] = brace_items(detail_value(lines.at(1), "C"));
    j["center"] = brace_items(detail_value(lines.at(2), "B^[r]"));
    Json rows = Json::array();
    for (size_t n = 3; n < lines.size(); ++n) {
        const std::string &ln = lines[n];
        auto bar = ln.find("} | ");
        if (bar == std::string::npos) throw FormatError("bad table row: " + ln);
        std::string left = ln.substr(0, bar + 1), right = ln.substr(bar + 4);
        auto cell = [&](const std::string &s) {
            auto eq = s.find(" = ");
            if (eq == std::string::npos) throw FormatError("bad cell: " + s);
            return cell_from_name(s.substr(0, eq), p, r, trim(s.substr(eq + 3)), lambda);
        };
        rows.push_back(Json{{"left", cell(left)}, {"right", cell(right)}});
    }
    j["rows"] = rows;
    return j;
}

// ---- decompositions

std::string key_list(const QAPartition &P, const std::vector<Key> &keys) {
    std::vector<std::string> items;
    for (Key k : keys) {
        if (!P.is_null(k)) items.push_back(P.key_name(k));
    }
    return braces(items);
}

std::vector<std::string> key_names(const QAPartition &P, const std::vector<Key> &keys) {
    std::vector<std::string> items;
    for (Key k : keys) {
        if (!P.is_null(k)) items.push_back(P.key_name(k));
    }
    return items;
}

/// Lambda text of a key set: the cells rendered one by one, joined by " + ".
std::string lambda_of_keys(const QAPartition &P, const std::vector<Key> &keys) {
    std::string s;
    for (Key k : keys) {
        if (P.is_null(k)) continue;
        if (!s.empty()) s += " + ";
        s += lambda_render(P.p(), P.members(k));
    }
    return s;
}

std::string types_str(const std::set<CartanType> &ts) {
    std::string s;
    for (CartanType t : ts) {
        if (!s.empty()) s += ",";
        s += type_name(t);
    }
    return s.empty() ? "-" : s;
}

std::vector<std::string> split_commas(const std::string &s) {
    std::vector<std::string> out;
    if (s == "-") return out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(tok);
    return out;
}

size_t generator_total(const QAPartition &P, const std::vector<Key> &keys) {
    size_t n = 0;
    for (Key k : keys) n += P.generator_count(k);
    return n;
}

}  // namespace

// ------------------------------------------------------------ basic objects

uint64_t parse_label(const std::string &s0, int p) {
    std::string s = trim(s0);
    if (!starts_with(s, "S[")) s = "S[" + s + "]";
    Spinor sp = Spinor::parse(s);
    if (p >= 0 && sp.p != p) throw DimensionError("label " + s0 + " has the wrong width");
    return sp.label();
}

Json spinor_list(int p, const std::vector<uint64_t> &labels) {
    Json a = Json::array();
    for (uint64_t x : labels) a.push_back(Spinor::from_label(p, x).str());
    return a;
}

Json to_json(const BiSubalgebra &B) {
    return Json{{"p", B.p()}, {"basis", spinor_list(B.p(), B.basis())}, {"order", B.order()}};
}

BiSubalgebra bisubalgebra_from_json(const Json &j) {
    const int p = j.at("p").get<int>();
    std::vector<uint64_t> labels;
    for (const auto &x : j.at("basis")) labels.push_back(parse_label(x.get<std::string>(), p));
    BiSubalgebra B(p, labels);
    if (j.contains("order") && j.at("order").get<int>() != B.order()) {
        throw FormatError("bi-subalgebra order does not match its basis");
    }
    return B;
}

namespace {
Json blocks_json(const BiSubalgebra &gen, const std::vector<std::vector<uint64_t>> &blocks, const char *kind,
                 int width) {
    Json j{{"generator", to_json(gen)}, {"kind", kind}};
    Json arr = Json::array();
    for (size_t i = 0; i < blocks.size(); ++i) {
        arr.push_back(Json{{"label", bits_to_string(i, width)}, {"members", spinor_list(gen.p(), blocks[i])}});
    }
    j["blocks"] = arr;
    return j;
}
}  // namespace

Json to_json(const CommutatorPartition &P) {
    return blocks_json(P.generator, P.blocks, "commutator", P.generator.dim());
}

Json to_json(const CosetPartition &P) {
    return blocks_json(P.generator, P.blocks, "coset", P.generator.order());
}

// ------------------------------------------------- enumeration listings

std::string ListingFilter::name() const {
    if (cartan_only) return "cartan";
    if (abelian_only) return "abelian";
    return "all";
}

Json listing_json(int p, int order, const ListingFilter &f, const std::vector<BiSubalgebra> &items) {
    Json arr = Json::array();
    for (const auto &B : items) arr.push_back(to_json(B));
    return Json{{"kind", "listing"}, {"p", p},           {"order", order},
                {"filter", f.name()}, {"count", items.size()}, {"items", arr}};
}

std::string render_listing(int p, int order, const ListingFilter &f, const std::vector<BiSubalgebra> &items) {
    std::ostringstream os;
    os << "bi-subalgebras p=" << p << " order=" << order << " filter=" << f.name() << " count=" << items.size()
       << "\n";
    for (const auto &B : items) os << B.str() << "\n";
    return os.str();
}

// ------------------------------------------------------ quotient tables

namespace {
std::string lambda_cell_text(const QAPartition &P, Key k) {
    return P.is_null(k) ? std::string("{0}") : lambda_render(P.p(), P.members(k));
}
}  // namespace

Json cell_json(const QAPartition &P, Key k, bool identity_as_zero, bool lambda) {
    Json c;
    c["name"] = (identity_as_zero && k == 0) ? std::string("0") : P.key_name(k);
    c["f"] = bits_to_string(P.key_f(k), P.p());
    c["i"] = P.rank() > 0 ? bits_to_string(P.key_i(k), P.rank()) : std::string();
    c["eps"] = P.key_eps(k);
    if (lambda) {
        c["lambda"] = lambda_cell_text(P, k);
    } else {
        c["members"] = spinor_list(P.p(), P.members(k));
    }
    return c;
}

Json to_json(const QAPartition &P, bool lambda) {
    Json j{{"kind", "quotient"},
           {"p", P.p()},
           {"rank", P.rank()},
           {"render", lambda ? "lambda" : "spinor"},
           {"cartan", spinor_list(P.p(), P.cartan().basis())},
           {"center", spinor_list(P.p(), P.center().basis())}};
    Json rows = Json::array();
    for (Key k = 1; k < P.key_count(); k += 2) {
        rows.push_back(Json{{"left", cell_json(P, k, false, lambda)}, {"right", cell_json(P, k ^ 1, false, lambda)}});
    }
    j["rows"] = rows;
    return j;
}

Json to_json(const CoQuotientAlgebra &Q, bool lambda) {
    const QAPartition &P = *Q.P;
    Json j{{"kind", "co-quotient"},
           {"p", P.p()},
           {"rank", P.rank()},
           {"render", lambda ? "lambda" : "spinor"},
           {"center_cell", P.key_name(Q.center)},
           {"degrade", Q.degrade},
           {"cartan", spinor_list(P.p(), P.cartan().basis())},
           {"center", spinor_list(P.p(), P.center().basis())}};
    Json rows = Json::array();
    for (const auto &[l, r] : Q.rows) {
        rows.push_back(Json{{"left", cell_json(P, l, false, lambda)}, {"right", cell_json(P, r, true, lambda)}});
    }
    j["rows"] = rows;
    return j;
}

std::string render_quotient_table(const QAPartition &P, bool lambda) {
    if (!lambda) return render_quotient(P);
    std::ostringstream os;
    os << "quotient algebra p=" << P.p() << " rank=" << P.rank() << " render=lambda\n";
    os << "C = " << P.cartan().str() << "\n";
    os << "B^[r] = " << P.center().str() << "\n";
    for (Key k = 1; k < P.key_count(); k += 2) {
        os << P.key_name(k) << " = " << lambda_cell_text(P, k) << " | " << P.key_name(k ^ 1) << " = "
           << lambda_cell_text(P, k ^ 1) << "\n";
    }
    return os.str();
}

std::string render_coquotient_table(const CoQuotientAlgebra &Q, bool lambda) {
    if (!lambda) return render_coquotient(Q);
    const QAPartition &P = *Q.P;
    std::ostringstream os;
    os << "co-quotient algebra p=" << P.p() << " rank=" << P.rank() << " center=" << P.key_name(Q.center)
       << (Q.degrade ? " (degrade)" : " (regular)") << " render=lambda\n";
    os << "C = " << P.cartan().str() << "\n";
    os << "B^[r] = " << P.center().str() << "\n";
    for (const auto &[l, r] : Q.rows) {
        os << P.key_name(l) << " = " << lambda_cell_text(P, l) << " | " << (r == 0 ? std::string("0") : P.key_name(r))
           << " = " << lambda_cell_text(P, r) << "\n";
    }
    return os.str();
}

// ------------------------------------------------------------ root tables

Json to_json(const RootSystem &rs, const RootPartition &part, const RootReport *report) {
    Json j{{"kind", "roots"},
           {"system", rs.name()},
           {"root_count", rs.roots.size()},
           {"pair_count", part.pairs.size()}};
    Json pairs = Json::array();
    for (const auto &pr : part.pairs) {
        Json w = Json::array(), wh = Json::array();
        for (int x : pr.W) w.push_back(format_root(rs.roots[size_t(x)]));
        for (int x : pr.W_hat) wh.push_back(format_root(rs.roots[size_t(x)]));
        pairs.push_back(Json{{"label", pr.label}, {"W", w}, {"W_hat", wh}});
    }
    j["pairs"] = pairs;
    if (report) {
        j["verify"] = Json{{"criterion1", report->criterion1},
                           {"criterion2", report->criterion2},
                           {"embedding", report->embedding},
                           {"negation_checks", report->negation_checks},
                           {"triple_checks", report->triple_checks},
                           {"pass", report->ok()},
                           {"failures", report->failures}};
    }
    return j;
}

std::string render_roots(const RootSystem &rs, const RootPartition &part, const RootReport *report) {
    std::string s = render_partition(rs, part);
    if (report) {
        std::ostringstream os;
        os << "verify criterion1=" << bool_word(report->criterion1) << " criterion2=" << bool_word(report->criterion2)
           << " embedding=" << bool_word(report->embedding) << " negation_checks=" << report->negation_checks
           << " triple_checks=" << report->triple_checks << " result=" << bool_word(report->ok()) << "\n";
        for (const auto &f : report->failures) os << "failure: " << f << "\n";
        s += os.str();
    }
    return s;
}

namespace {

Json parse_roots_lines(const std::vector<std::string> &lines) {
    // "C_A3  (12 roots, 3 conjugate pairs)"
    const std::string &h = lines.at(0);
    Json j;
    j["kind"] = "roots";
    auto sp = h.find(' ');
    j["system"] = h.substr(2, sp - 2);
    unsigned long nroots = 0, npairs = 0;
    if (std::sscanf(h.c_str() + sp, " (%lu roots, %lu conjugate pairs)", &nroots, &npairs) != 2) {
        throw FormatError("bad roots header: " + h);
    }
    j["root_count"] = nroots;
    j["pair_count"] = npairs;
    Json pairs = Json::array();
    Json verify;
    std::vector<std::string> failures;
    bool have_verify = false;
    for (size_t n = 1; n < lines.size(); ++n) {
        const std::string &ln = lines[n];
        if (starts_with(ln, "W_")) {
            auto bar = ln.find("  |");
            std::string left = ln.substr(0, bar), right = ln.substr(bar + 3);
            std::istringstream ls(left), rs(right);
            std::string tok;
            ls >> tok;
            uint32_t label = uint32_t(std::stoul(tok.substr(2)));
            Json w = Json::array(), wh = Json::array();
            while (ls >> tok) w.push_back(tok.substr(2, tok.size() - 3));
            while (rs >> tok) {
                if (starts_with(tok, "E[")) wh.push_back(tok.substr(2, tok.size() - 3));
            }
            pairs.push_back(Json{{"label", label}, {"W", w}, {"W_hat", wh}});
        } else if (starts_with(ln, "verify ")) {
            auto kv = key_values(ln);
            have_verify = true;
            verify["criterion1"] = field(kv, "criterion1") == "pass";
            verify["criterion2"] = field(kv, "criterion2") == "pass";
            verify["embedding"] = field(kv, "embedding") == "pass";
            verify["negation_checks"] = std::stoul(field(kv, "negation_checks"));
            verify["triple_checks"] = std::stoul(field(kv, "triple_checks"));
            verify["pass"] = field(kv, "result") == "pass";
        } else if (starts_with(ln, "failure: ")) {
            failures.push_back(ln.substr(9));
        } else {
            throw FormatError("unexpected roots line: " + ln);
        }
    }
    j["pairs"] = pairs;
    if (have_verify) {
        verify["failures"] = failures;
        j["verify"] = verify;
    }
    return j;
}

}  // namespace

// ---------------------------------------------------------- decompositions

Json decomposition_json(const DecompositionRow &row, bool lambda) {
    const Decomposition &D = row.D;
    const QAPartition &P = *D.source;
    auto t = D.t_keys(), pk = D.p_keys();
    Json forms = Json::array();
    for (uint64_t f : D.forms) forms.push_back(bits_to_string(f, P.key_bits()));
    Json admissible = Json::array();
    for (CartanType ty : row.decision.admissible) admissible.push_back(type_name(ty));
    Json j{{"forms", forms},
           {"type", type_name(row.decision.chosen)},
           {"admissible", admissible},
           {"t_dim", generator_total(P, t)},
           {"p_dim", generator_total(P, pk)},
           {"t_keys", key_names(P, t)},
           {"p_keys", key_names(P, pk)}};
    if (lambda) {
        j["t_lambda"] = lambda_of_keys(P, t);
        j["p_lambda"] = lambda_of_keys(P, pk);
    }
    return j;
}

Json decompositions_json(const QAPartition &P, const std::string &type_filter, const std::vector<DecompositionRow> &rows,
                         bool lambda) {
    Json arr = Json::array();
    for (const auto &r : rows) arr.push_back(decomposition_json(r, lambda));
    return Json{{"kind", "decompositions"}, {"p", P.p()},          {"rank", P.rank()},
                {"type", type_filter},      {"count", rows.size()}, {"decompositions", arr}};
}

std::string render_decompositions(const QAPartition &P, const std::string &type_filter,
                                  const std::vector<DecompositionRow> &rows, bool lambda) {
    std::ostringstream os;
    os << "decompositions p=" << P.p() << " rank=" << P.rank() << " type=" << type_filter << " count=" << rows.size()
       << "\n";
    for (const auto &row : rows) {
        const Decomposition &D = row.D;
        auto t = D.t_keys(), pk = D.p_keys();
        std::string forms;
        for (uint64_t f : D.forms) {
            if (!forms.empty()) forms += ",";
            forms += bits_to_string(f, P.key_bits());
        }
        os << "D forms=" << forms << " type=" << type_name(row.decision.chosen)
           << " admissible=" << types_str(row.decision.admissible) << " t_dim=" << generator_total(P, t)
           << " p_dim=" << generator_total(P, pk) << "\n";
        os << "  t = " << key_list(P, t) << "\n";
        os << "  p = " << key_list(P, pk) << "\n";
        if (lambda) {
            os << "  t_lambda = " << lambda_of_keys(P, t) << "\n";
            os << "  p_lambda = " << lambda_of_keys(P, pk) << "\n";
        }
    }
    return os.str();
}

Json divided_json(const DividedDecomposition &D, bool lambda) {
    const DividedQAP &div = *D.div;
    std::vector<std::string> tk, pk;
    size_t td = 0, pd = 0;
    for (uint32_t k : D.t_keys()) {
        if (div.is_null(k)) continue;
        tk.push_back(div.key_name(k));
        td += div.members(k).size();
    }
    for (uint32_t k : D.p_keys()) {
        if (div.is_null(k)) continue;
        pk.push_back(div.key_name(k));
        pd += div.members(k).size();
    }
    Json j{{"kind", "divided"},
           {"type", type_name(D.type)},
           {"m", div.m()},
           {"n", div.n()},
           {"m_prime", D.m_prime},
           {"n_prime", D.n_prime},
           {"t_dim", td},
           {"p_dim", pd},
           {"t_keys", tk},
           {"p_keys", pk}};
    if (lambda) {
        j["t_lambda"] = lambda_render(D.t_generators(), div.N());
        j["p_lambda"] = lambda_render(D.p_generators(), div.N());
    }
    return j;
}

std::string render_divided(const DividedDecomposition &D, bool lambda) {
    Json j = divided_json(D, lambda);
    std::ostringstream os;
    os << "divided type=" << j["type"].get<std::string>() << " m=" << j["m"] << " n=" << j["n"]
       << " m_prime=" << j["m_prime"] << " n_prime=" << j["n_prime"] << " t_dim=" << j["t_dim"]
       << " p_dim=" << j["p_dim"] << "\n";
    os << "  t = " << braces(json_strings(j["t_keys"])) << "\n";
    os << "  p = " << braces(json_strings(j["p_keys"])) << "\n";
    if (lambda) {
        os << "  t_lambda = " << j["t_lambda"].get<std::string>() << "\n";
        os << "  p_lambda = " << j["p_lambda"].get<std::string>() << "\n";
    }
    return os.str();
}

namespace {

Json parse_decomposition_lines(const std::vector<std::string> &lines) {
    auto kv = key_values(lines.at(0));
    Json j{{"kind", "decompositions"},
           {"p", to_int(kv, "p")},
           {"rank", to_int(kv, "rank")},
           {"type", field(kv, "type")},
           {"count", std::stoul(field(kv, "count"))}};
    Json arr = Json::array();
    for (size_t n = 1; n < lines.size();) {
        auto dk = key_values(lines[n]);
        Json d{{"forms", split_commas(field(dk, "forms"))},
               {"type", field(dk, "type")},
               {"admissible", split_commas(field(dk, "admissible"))},
               {"t_dim", std::stoul(field(dk, "t_dim"))},
               {"p_dim", std::stoul(field(dk, "p_dim"))}};
        d["t_keys"] = brace_items(detail_value(lines.at(n + 1), "t"));
        d["p_keys"] = brace_items(detail_value(lines.at(n + 2), "p"));
        n += 3;
        if (n < lines.size() && starts_with(lines[n], "  t_lambda")) {
            d["t_lambda"] = detail_value(lines[n], "t_lambda");
            d["p_lambda"] = detail_value(lines.at(n + 1), "p_lambda");
            n += 2;
        }
        arr.push_back(d);
    }
    j["decompositions"] = arr;
    return j;
}

Json parse_divided_lines(const std::vector<std::string> &lines) {
    auto kv = key_values(lines.at(0));
    Json j{{"kind", "divided"},
           {"type", field(kv, "type")},
           {"m", to_int(kv, "m")},
           {"n", to_int(kv, "n")},
           {"m_prime", to_int(kv, "m_prime")},
           {"n_prime", to_int(kv, "n_prime")},
           {"t_dim", std::stoul(field(kv, "t_dim"))},
           {"p_dim", std::stoul(field(kv, "p_dim"))}};
    j["t_keys"] = brace_items(detail_value(lines.at(1), "t"));
    j["p_keys"] = brace_items(detail_value(lines.at(2), "p"));
    if (lines.size() > 3) {
        j["t_lambda"] = detail_value(lines.at(3), "t_lambda");
        j["p_lambda"] = detail_value(lines.at(4), "p_lambda");
    }
    return j;
}

}  // namespace

// -------------------------------------------------------------- sequences

Json to_json(const DecompositionSequence &S) {
    const QAPartition &P = *S.partition;
    Json j{{"kind", "sequence"},
           {"p", P.p()},
           {"rank", P.rank()},
           {"length", S.length()},
           {"cartan", spinor_list(P.p(), P.cartan().basis())},
           {"center", spinor_list(P.p(), P.center().basis())}};
    Json levels = Json::array();
    for (int l = 1; l <= S.length(); ++l) {
        Decomposition D = S.level(l);
        Json lv{{"level", l},
                {"form", bits_to_string(S.forms[size_t(l - 1)], P.key_bits())},
                {"t_dim", generator_total(P, D.t_keys())},
                {"p_dim", generator_total(P, D.p_keys())},
                {"t_keys", key_names(P, D.t_keys())},
                {"p_keys", key_names(P, D.p_keys())}};
        if (size_t(l) <= S.types.size()) {
            const auto &td = S.types[size_t(l - 1)];
            Json adm = Json::array();
            for (CartanType ty : td.admissible) adm.push_back(type_name(ty));
            lv["type"] = type_name(td.chosen);
            lv["admissible"] = adm;
        }
        levels.push_back(lv);
    }
    j["levels"] = levels;
    return j;
}

std::string render_sequence(const DecompositionSequence &S) {
    const QAPartition &P = *S.partition;
    std::ostringstream os;
    os << "sequence p=" << P.p() << " rank=" << P.rank() << " length=" << S.length() << "\n";
    os << "C = " << P.cartan().str() << "\n";
    os << "B^[r] = " << P.center().str() << "\n";
    for (int l = 1; l <= S.length(); ++l) {
        Decomposition D = S.level(l);
        os << "level " << l << " form=" << bits_to_string(S.forms[size_t(l - 1)], P.key_bits());
        if (size_t(l) <= S.types.size()) {
            const auto &td = S.types[size_t(l - 1)];
            os << " type=" << type_name(td.chosen) << " admissible=" << types_str(td.admissible);
        }
        os << " t_dim=" << generator_total(P, D.t_keys()) << " p_dim=" << generator_total(P, D.p_keys()) << "\n";
        os << "  t = " << key_list(P, D.t_keys()) << "\n";
        os << "  p = " << key_list(P, D.p_keys()) << "\n";
    }
    return os.str();
}

namespace {

Json parse_sequence_lines(const std::vector<std::string> &lines) {
    auto kv = key_values(lines.at(0));
    Json j{{"kind", "sequence"}, {"p", to_int(kv, "p")}, {"rank", to_int(kv, "rank")}, {"length", to_int(kv, "length")}};
    j["cartan"] = brace_items(detail_value(lines.at(1), "C"));
    j["center"] = brace_items(detail_value(lines.at(2), "B^[r]"));
    Json levels = Json::array();
    for (size_t n = 3; n < lines.size(); n += 3) {
        auto lk = key_values(lines[n]);
        Json lv{{"level", std::stoi(lines[n].substr(6))},
                {"form", field(lk, "form")},
                {"t_dim", std::stoul(field(lk, "t_dim"))},
                {"p_dim", std::stoul(field(lk, "p_dim"))}};
        if (lk.count("type")) {
            lv["type"] = field(lk, "type");
            lv["admissible"] = split_commas(field(lk, "admissible"));
        }
        lv["t_keys"] = brace_items(detail_value(lines.at(n + 1), "t"));
        lv["p_keys"] = brace_items(detail_value(lines.at(n + 2), "p"));
        levels.push_back(lv);
    }
    j["levels"] = levels;
    return j;
}

}  // namespace

DecompositionSequence sequence_from_json(const Json &j) {
    const int p = j.at("p").get<int>();
    std::vector<uint64_t> cb, zb;
    for (const auto &x : j.at("cartan")) cb.push_back(parse_label(x.get<std::string>(), p));
    for (const auto &x : j.at("center")) zb.push_back(parse_label(x.get<std::string>(), p));
    QAPPtr P = build_qap(BiSubalgebra(p, cb), BiSubalgebra(p, zb));
    DecompositionSequence S;
    S.partition = P;
    for (const auto &lv : j.at("levels")) {
        const std::string f = lv.at("form").get<std::string>();
        if (int(f.size()) != P->key_bits()) throw FormatError("sequence form has the wrong width: " + f);
        S.forms.push_back(string_to_bits(f));
    }
    auto rep = validate_sequence(S, false);
    if (!rep.ok) throw FormatError("sequence file is not a valid sequence: " + rep.failures.front());
    S.annotate();
    return S;
}

// ------------------------------------------------------------- numerics

Json matrix_json(const CMat &M) {
    Json rows = Json::array();
    for (int r = 0; r < M.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < M.cols(); ++c) row.push_back(format_complex(M(r, c)));
        rows.push_back(row);
    }
    return rows;
}

CMat matrix_from_json(const Json &j) {
    const int n = int(j.size());
    CMat M(n, n);
    for (int r = 0; r < n; ++r) {
        if (int(j[size_t(r)].size()) != n) throw FormatError("matrix is not square");
        for (int c = 0; c < n; ++c) M(r, c) = parse_complex(j[size_t(r)][size_t(c)].get<std::string>());
    }
    return M;
}

Json to_json(const KAKResult &r, bool matrices) {
    Json j{{"kind", "kak"},
           {"type", type_name(r.type)},
           {"N", r.K0.rows()},
           {"m", r.m},
           {"n", r.n},
           {"phase", format_complex(r.phase)},
           {"recomposition", r.recomposition},
           {"metric_k0", r.metric_k0},
           {"metric_k1", r.metric_k1},
           {"attempts", r.attempts}};
    if (matrices) {
        j["K0"] = matrix_json(r.K0);
        j["A"] = matrix_json(r.A);
        j["K1"] = matrix_json(r.K1);
    }
    return j;
}

Json to_json(const FactorTree &t, bool matrices) {
    Json j{{"kind", "factor-tree"},
           {"p", t.p},
           {"depth", t.depth},
           {"ok", t.ok},
           {"failure", t.failure},
           {"leaves", t.leaf_count()},
           {"a_factors", t.a_factor_count()},
           {"level_types", t.level_types}};
    if (t.ok) {
        j["recomposition"] = t.recomposition_residual();
        j["max_constraint"] = t.max_constraint_residual();
    } else {
        j["failed_level"] = t.failed_level;
    }
    if (matrices && t.ok) {
        Json K = Json::object(), A = Json::object();
        for (size_t l = 0; l < t.K.size(); ++l) {
            for (size_t s = 0; s < t.K[l].size(); ++s) {
                K["K[" + std::to_string(l) + "]" + FactorTree::index_string(int(l), s)] = matrix_json(t.K[l][s]);
            }
        }
        for (size_t l = 0; l < t.A.size(); ++l) {
            for (size_t s = 0; s < t.A[l].size(); ++s) {
                A["A[" + std::to_string(l) + "]" + FactorTree::index_string(int(l), s)] = matrix_json(t.A[l][s]);
            }
        }
        j["K"] = K;
        j["A"] = A;
    }
    return j;
}

// ---------------------------------------------------------- text parsers

Json parse_table_text(const std::string &text) {
    auto lines = split_lines(text);
    if (lines.empty()) throw FormatError("empty table");
    const std::string &h = lines[0];
    if (starts_with(h, "bi-subalgebras ")) {
        auto kv = key_values(h);
        const int p = to_int(kv, "p");
        ListingFilter f;
        std::string fname = field(kv, "filter");
        f.cartan_only = fname == "cartan";
        f.abelian_only = fname == "abelian" || f.cartan_only;
        std::vector<BiSubalgebra> items;
        for (size_t n = 1; n < lines.size(); ++n) {
            std::vector<uint64_t> labels;
            for (const auto &s : brace_items(lines[n])) labels.push_back(parse_label(s, p));
            items.emplace_back(p, labels);
        }
        Json j = listing_json(p, to_int(kv, "order"), f, items);
        if (j["count"].get<size_t>() != std::stoul(field(kv, "count"))) throw FormatError("listing count mismatch");
        return j;
    }
    if (starts_with(h, "quotient algebra ")) return parse_quotient_lines(lines, false);
    if (starts_with(h, "co-quotient algebra ")) return parse_quotient_lines(lines, true);
    if (starts_with(h, "C_")) return parse_roots_lines(lines);
    if (starts_with(h, "decompositions ")) return parse_decomposition_lines(lines);
    if (starts_with(h, "divided ")) return parse_divided_lines(lines);
    if (starts_with(h, "sequence ")) return parse_sequence_lines(lines);
    throw FormatError("unrecognized table header: " + h);
}

// -------------------------------------------------------- golden fixtures

FixtureReport compare_fixture(const Json &fx) {
    FixtureReport rep;
    auto fail = [&](std::string m) {
        rep.ok = false;
        if (rep.failures.size() < 64) rep.failures.push_back(std::move(m));
    };
    const int p = fx.at("p").get<int>();
    auto labels = [&](const Json &arr) {
        std::vector<uint64_t> v;
        for (const auto &x : arr) v.push_back(parse_label(x.get<std::string>(), p));
        std::sort(v.begin(), v.end());
        return v;
    };
    auto C = BiSubalgebra(p, labels(fx.at("cartan")));
    auto Z = BiSubalgebra(p, labels(fx.at("center")));
    QAPPtr P = build_qap(C, Z);

    // Rows of our table as (left key, right key); the first row is the top block.
    std::vector<std::pair<Key, Key>> ours;
    Key top_key;
    if (fx.contains("coquotient_center") && !fx.at("coquotient_center").is_null()) {
        rep.table = "co-quotient";
        auto Q = build_coquotient(P, P->key_of(parse_label(fx.at("coquotient_center").get<std::string>(), p)));
        ours.assign(Q.rows.begin() + 1, Q.rows.end());
        top_key = Q.center;
    } else {
        rep.table = "quotient";
        for (Key k = 3; k < P->key_count(); k += 2) ours.emplace_back(k, k ^ 1);
        top_key = P->center_key();
    }
    auto members = [&](Key k) {
        std::vector<uint64_t> v = P->members(k);
        std::sort(v.begin(), v.end());
        return v;
    };
    if (members(top_key) != labels(fx.at("top"))) fail("top block differs from " + P->key_name(top_key));

    const auto &rows = fx.at("rows");
    if (rows.size() != ours.size()) {
        fail("row count " + std::to_string(rows.size()) + " != " + std::to_string(ours.size()));
    }
    std::map<std::string, Key> by_name;
    for (Key k = 0; k < P->key_count(); ++k) by_name[P->key_name(k)] = k;
    std::multiset<std::pair<std::vector<uint64_t>, std::vector<uint64_t>>> unmatched;
    for (const auto &[l, r] : ours) {
        auto a = members(l), b = members(r);
        if (b < a) std::swap(a, b);
        unmatched.insert({a, b});
    }
    for (const auto &row : rows) {
        ++rep.rows_checked;
        auto W = labels(row.at("W")), Wh = labels(row.at("W_hat"));
        for (const char *side : {"left", "right"}) {
            if (row.at(side).is_null()) continue;
            const std::string name = row.at(side).get<std::string>();
            auto it = by_name.find(name);
            if (it == by_name.end()) {
                fail("unknown cell name " + name);
                continue;
            }
            if (members(it->second) != (std::string(side) == "left" ? W : Wh)) fail("cell " + name + " differs");
        }
        auto a = W, b = Wh;
        if (b < a) std::swap(a, b);
        auto it = unmatched.find({a, b});
        if (it == unmatched.end()) {
            std::string desc = row.at("left").is_null() ? std::string("unnamed row") : row.at("left").get<std::string>();
            fail("row " + desc + " (" + std::to_string(W.size()) + "+" + std::to_string(Wh.size()) +
                 " members) has no matching pair");
        } else {
            unmatched.erase(it);
        }
    }
    return rep;
}

}  // namespace qapkit
