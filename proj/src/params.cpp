#include "qjumps/params.hpp"

#include <cmath>
#include <numbers>

#include "qjumps/errors.hpp"

namespace qjumps {

namespace {

struct Field {
    const char* name;
    double SystemParams::*member;
};

constexpr Field kFields[] = {
    {"gamma1", &SystemParams::gamma1}, {"gamma2", &SystemParams::gamma2},
    {"omega1", &SystemParams::omega1}, {"omega2", &SystemParams::omega2},
    {"delta1", &SystemParams::delta1}, {"delta2", &SystemParams::delta2},
    {"eta1", &SystemParams::eta1},     {"eta2", &SystemParams::eta2},
    {"phi1", &SystemParams::phi1},     {"phi2", &SystemParams::phi2},
    {"psi", &SystemParams::psi},
};

}  // namespace

SystemParams SystemParams::reference() {
    SystemParams p;
    p.phi1 = std::numbers::pi / 9.0;
    p.phi2 = 0.0;
    p.psi = 4.0 * std::numbers::pi / 5.0;
    return p;
}

void SystemParams::validate() const {
    for (const auto& f : kFields)
        if (!std::isfinite(this->*f.member))
            throw InvalidParams(std::string("parameter ") + f.name + " is not finite");
    if (!(gamma1 > 0.0)) throw InvalidParams("gamma1 must be positive");
    if (!(gamma2 >= 0.0)) throw InvalidParams("gamma2 must be non-negative");
    if (eta1 < 0.0 || eta2 < 0.0) throw InvalidParams("Lamb-Dicke parameters must be non-negative");
    if (omega1 < 0.0) throw InvalidParams("omega1 must be non-negative");
    if (n_fock < 2) throw InvalidParams("n_fock must be at least 2");
}

double SystemParams::get(std::string_view name) const {
    for (const auto& f : kFields)
        if (name == f.name) return this->*f.member;
    if (name == "n_fock") return n_fock;
    throw InvalidParams("unknown parameter '" + std::string(name) + "'");
}

void SystemParams::set(std::string_view name, double value) {
    for (const auto& f : kFields)
        if (name == f.name) {
            this->*f.member = value;
            return;
        }
    if (name == "n_fock") {
        if (value != std::floor(value)) throw InvalidParams("n_fock must be an integer");
        n_fock = static_cast<int>(value);
        return;
    }
    throw InvalidParams("unknown parameter '" + std::string(name) + "'");
}

const std::vector<std::string>& SystemParams::real_field_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& f : kFields) v.emplace_back(f.name);
        return v;
    }();
    return names;
}

}  // namespace qjumps
