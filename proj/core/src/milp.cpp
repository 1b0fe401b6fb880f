#include "psh/milp.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace psh {

int Milp::add_row(std::string name, std::vector<std::pair<int, double>> terms, RowSense sense,
                  double rhs) {
    std::set<int> seen;
    for (auto& [idx, coeff] : terms) {
        if (idx < 0 || idx >= (int)variables.size())
            throw make_error("BoundViolation", "row " + name + ": bad variable index");
        if (!seen.insert(idx).second)
            throw make_error("BoundViolation", "row " + name + ": duplicate variable index");
        if (!std::isfinite(coeff) || coeff == 0.0)
            throw make_error("BoundViolation",
                             "row " + name + ": coefficients must be finite and nonzero");
    }
    rows.push_back({std::move(name), std::move(terms), sense, rhs});
    return (int)rows.size() - 1;
}

ModelStats model_stats(const Milp& model) {
    ModelStats s;
    s.n_variables = (int)model.variables.size();
    for (const auto& v : model.variables)
        if (v.integrality == Integrality::Binary) ++s.n_binaries;
    s.n_constraints = (int)model.rows.size();
    for (const auto& r : model.rows) s.n_nonzeros += (long)r.terms.size();
    return s;
}

Milp fix_variable(const Milp& model, int index, double value) {
    if (index < 0 || index >= (int)model.variables.size())
        throw make_error("ValueOutOfBounds", "fix_variable: bad variable index");
    const Variable& v = model.variables[index];
    if (value < v.lower - 1e-12 || value > v.upper + 1e-12)
        throw make_error("ValueOutOfBounds",
                         "fix_variable: value outside bounds of " + v.name);
    if (v.integrality == Integrality::Binary && std::abs(value - std::round(value)) > 1e-9)
        throw make_error("ValueOutOfBounds",
                         "fix_variable: non-integral value for binary " + v.name);
    Milp out = model;
    out.variables[index].lower = value;
    out.variables[index].upper = value;
    return out;
}

namespace {

// LP format forbids some characters in names; our generated names use [],
// which is fine for the readers we care about, but commas are not. Replace
// them with '.' on export.
std::string lp_name(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (c == ',' || c == ' ') c = '.';
    return out;
}

void write_terms(std::ostream& os, const Milp& m,
                 const std::vector<std::pair<int, double>>& terms) {
    bool first = true;
    for (const auto& [idx, coeff] : terms) {
        if (coeff >= 0.0 && !first) os << " + ";
        else if (coeff < 0.0) os << (first ? "- " : " - ");
        os << std::abs(coeff) << " " << lp_name(m.variables[idx].name);
        first = false;
    }
    if (first) os << "0 dummy";
}

}  // namespace

void write_lp_file(const Milp& model, std::ostream& os) {
    os.precision(17);
    os << "Minimize\n obj:";
    bool any = false;
    for (int j = 0; j < (int)model.variables.size(); ++j) {
        double c = model.variables[j].objective_coeff;
        if (c == 0.0) continue;
        os << (c >= 0.0 ? " + " : " - ") << std::abs(c) << " "
           << lp_name(model.variables[j].name);
        any = true;
    }
    if (!any) os << " 0 " << (model.variables.empty() ? "x0" : lp_name(model.variables[0].name));
    os << "\nSubject To\n";
    for (const auto& r : model.rows) {
        os << " " << lp_name(r.name) << ": ";
        write_terms(os, model, r.terms);
        switch (r.sense) {
            case RowSense::LessEqual: os << " <= "; break;
            case RowSense::Equal: os << " = "; break;
            case RowSense::GreaterEqual: os << " >= "; break;
        }
        os << r.rhs << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : model.variables) {
        os << " ";
        if (v.lower == -kInf) os << "-inf";
        else os << v.lower;
        os << " <= " << lp_name(v.name) << " <= ";
        if (v.upper == kInf) os << "+inf";
        else os << v.upper;
        os << "\n";
    }
    bool any_bin = false;
    for (const auto& v : model.variables)
        if (v.integrality == Integrality::Binary) any_bin = true;
    if (any_bin) {
        os << "Binaries\n";
        for (const auto& v : model.variables)
            if (v.integrality == Integrality::Binary) os << " " << lp_name(v.name) << "\n";
    }
    os << "End\n";
}

namespace {

bool is_section(const std::string& line, const char* kw) {
    return line.rfind(kw, 0) == 0;
}

double parse_bound(const std::string& tok) {
    if (tok == "-inf") return -kInf;
    if (tok == "+inf" || tok == "inf") return kInf;
    return std::stod(tok);
}

}  // namespace

Milp read_lp_file(std::istream& is) {
    Milp m;
    std::map<std::string, int> index_of;
    auto var = [&](const std::string& name) {
        auto it = index_of.find(name);
        if (it != index_of.end()) return it->second;
        int idx = m.add_variable(name, -kInf, kInf, Integrality::Continuous, 0.0);
        index_of[name] = idx;
        return idx;
    };

    enum Section { None, Objective, Rows, Bnds, Bins } section = None;
    std::string line;
    std::string pending;  // rows may wrap; we emit ours one per line, so no wrapping
    while (std::getline(is, line)) {
        if (is_section(line, "Minimize")) { section = Objective; continue; }
        if (is_section(line, "Subject To")) { section = Rows; continue; }
        if (is_section(line, "Bounds")) { section = Bnds; continue; }
        if (is_section(line, "Binaries")) { section = Bins; continue; }
        if (is_section(line, "End")) break;
        std::istringstream ls(line);
        if (section == Objective || section == Rows) {
            std::string tok;
            std::string row_name;
            ls >> tok;
            if (tok.empty()) continue;
            if (tok.back() == ':') row_name = tok.substr(0, tok.size() - 1);
            else throw make_error("ParseError", "expected name: in LP line '" + line + "'");
            std::vector<std::pair<int, double>> terms;
            double sign = 1.0;
            double coeff;
            RowSense sense = RowSense::Equal;
            double rhs = 0.0;
            bool done = false;
            while (ls >> tok && !done) {
                if (tok == "+") { sign = 1.0; continue; }
                if (tok == "-") { sign = -1.0; continue; }
                if (tok == "<=" || tok == "=" || tok == ">=") {
                    sense = tok == "<=" ? RowSense::LessEqual
                            : tok == "=" ? RowSense::Equal
                                         : RowSense::GreaterEqual;
                    ls >> rhs;
                    done = true;
                    continue;
                }
                coeff = sign * std::stod(tok);
                sign = 1.0;
                std::string name;
                if (!(ls >> name)) throw make_error("ParseError", "dangling coefficient");
                if (coeff != 0.0) terms.emplace_back(var(name), coeff);
            }
            if (section == Objective) {
                for (auto& [idx, c] : terms) m.variables[idx].objective_coeff = c;
            } else {
                m.add_row(row_name, std::move(terms), sense, rhs);
            }
        } else if (section == Bnds) {
            std::string lo, name, le1, le2, hi;
            if (ls >> lo >> le1 >> name >> le2 >> hi) {
                int idx = var(name);
                m.variables[idx].lower = parse_bound(lo);
                m.variables[idx].upper = parse_bound(hi);
            }
        } else if (section == Bins) {
            std::string name;
            if (ls >> name) m.variables[var(name)].integrality = Integrality::Binary;
        }
    }
    return m;
}

}  // namespace psh
