#include "ifc/label.hpp"

#include <cctype>

namespace ifc {

std::set<std::string> Label::atoms() const {
    std::set<std::string> out = conf.atoms();
    auto i = integ.atoms();
    out.insert(i.begin(), i.end());
    return out;
}

bool flows_to(const LabelContext& ctx, const Label& l1, const Label& l2) {
    return acts_for(ctx.conf_ctx, l2.conf, l1.conf) &&
           acts_for(ctx.integ_ctx, l1.integ, l2.integ);
}

Label label_join(const Label& l1, const Label& l2) {
    return Label(conj(l1.conf, l2.conf), disj(l1.integ, l2.integ));
}

Label label_meet(const Label& l1, const Label& l2) {
    return Label(disj(l1.conf, l2.conf), conj(l1.integ, l2.integ));
}

Label label_conj(const Label& l1, const Label& l2) {
    return Label(conj(l1.conf, l2.conf), conj(l1.integ, l2.integ));
}

Label label_disj(const Label& l1, const Label& l2) {
    return Label(disj(l1.conf, l2.conf), disj(l1.integ, l2.integ));
}

Label project(const Label& l, Proj p) {
    if (p == Proj::C) return Label(l.conf, NormalForm::bottom());
    return Label(NormalForm::bottom(), l.integ);
}

bool uncompromised(const LabelContext& ctx, const Label& label,
                   std::vector<std::string>* trace) {
    NormalForm witness = min_rep(ctx.integ_ctx, label.integ, trace);
    if (trace) {
        trace->push_back("uncompromised: min of integrity " + to_string(label.integ) +
                         " is " + to_string(witness));
    }
    return acts_for(ctx.conf_ctx, witness, label.conf, trace);
}

Label parse_label(const std::string& text) {
    // Trim the ends; the principal parser handles interior spacing.
    auto begin = text.find_first_not_of(" \t\r\n");
    auto end = text.find_last_not_of(" \t\r\n");
    if (begin == std::string::npos) throw parse_error("empty label", 0);
    std::string body = text.substr(begin, end - begin + 1);

    if (body.front() == '<') {
        if (body.back() != '>') throw parse_error("label: expected closing '>'", body.size() - 1);
        std::string inner = body.substr(1, body.size() - 2);
        // Split on the comma at principal-grammar depth zero.
        int depth = 0;
        std::size_t comma = std::string::npos;
        for (std::size_t i = 0; i < inner.size(); ++i) {
            if (inner[i] == '(') ++depth;
            else if (inner[i] == ')') --depth;
            else if (inner[i] == ',' && depth == 0) {
                comma = i;
                break;
            }
        }
        if (comma == std::string::npos) {
            throw parse_error("label: expected '<C, I>' with a comma", 0);
        }
        return Label(parse_normal_form(inner.substr(0, comma)),
                     parse_normal_form(inner.substr(comma + 1)));
    }

    // `P join Q` shorthand: find a top-level ` join ` keyword.
    int depth = 0;
    for (std::size_t i = 0; i + 4 <= body.size(); ++i) {
        if (body[i] == '(') ++depth;
        else if (body[i] == ')') --depth;
        else if (depth == 0 && body.compare(i, 4, "join") == 0) {
            bool left_ok = i > 0 && (std::isspace(static_cast<unsigned char>(body[i - 1])) ||
                                     body[i - 1] == ')');
            bool right_ok = i + 4 == body.size() ||
                            std::isspace(static_cast<unsigned char>(body[i + 4])) ||
                            body[i + 4] == '(';
            if (left_ok && right_ok) {
                NormalForm p = parse_normal_form(body.substr(0, i));
                NormalForm q = parse_normal_form(body.substr(i + 4));
                return Label(conj(p, q), disj(p, q));
            }
        }
    }

    NormalForm p = parse_normal_form(body);
    return Label(p, p);
}

std::string to_string(const Label& label) {
    return "<" + to_string(label.conf) + ", " + to_string(label.integ) + ">";
}

}  // namespace ifc
