#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace rnsift {

/// Parse "0.1pF", "4.77ns", "250ohm", "0.255V", "9k" ... into base SI units.
/// `unit` names the expected unit ("F", "s", "V", "ohm"); it may be omitted in
/// the text. Throws std::invalid_argument on garbage or nonmatching units.
inline double parse_quantity(std::string text, const std::string& unit) {
    auto strip = [](std::string& s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(0, 1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    };
    strip(text);
    if (text.empty()) throw std::invalid_argument("empty quantity");

    auto ends_with_ci = [](const std::string& s, const std::string& suffix) {
        if (s.size() < suffix.size()) return false;
        for (std::size_t i = 0; i < suffix.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(s[s.size() - suffix.size() + i])) !=
                std::tolower(static_cast<unsigned char>(suffix[i])))
                return false;
        }
        return true;
    };
    // unit suffix is optional but stripped when present; ohms may also be
    // written with the UTF-8 omega sign
    if (unit == "ohm" && ends_with_ci(text, "\xce\xa9") && text.size() > 2)
        text.erase(text.size() - 2);
    else if (ends_with_ci(text, unit) && text.size() > unit.size())
        text.erase(text.size() - unit.size());
    strip(text);
    double scale = 1.0;
    if (!text.empty() && std::isalpha(static_cast<unsigned char>(text.back()))) {
        switch (text.back()) {
            case 'f': scale = 1e-15; break;
            case 'p': scale = 1e-12; break;
            case 'n': scale = 1e-9; break;
            case 'u': scale = 1e-6; break;
            case 'm': scale = 1e-3; break;
            case 'k': case 'K': scale = 1e3; break;
            case 'M': scale = 1e6; break;
            case 'G': scale = 1e9; break;
            default:
                throw std::invalid_argument("unknown unit prefix in quantity: " + text);
        }
        text.pop_back();
    }
    strip(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("unreadable quantity: " + text);
    }
    if (used != text.size())
        throw std::invalid_argument("trailing junk in quantity: " + text);
    return value * scale;
}

/// Split "0.1pF,1pF,10pF" and parse each entry.
inline std::vector<double> parse_quantity_list(const std::string& text, const std::string& unit) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(parse_quantity(text.substr(start, comma - start), unit));
        start = comma + 1;
        if (comma == text.size()) break;
    }
    return out;
}

} // namespace rnsift
