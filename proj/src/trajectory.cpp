#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/tools/roots.hpp>

#include "qjumps/cooling.hpp"
#include "qjumps/errors.hpp"
#include "qjumps/jumps.hpp"

namespace qjumps {

double sample_emission_direction(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidParams("direction sample must lie in [0, 1]");
    const double a = 4.0 * r - 2.0;
    const double root = std::sqrt(a * a + 1.0);
    return std::clamp(std::cbrt(a + root) + std::cbrt(a - root), -1.0, 1.0);
}

std::vector<double> TrajectoryRecord::inter_click_gaps() const {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < events.size(); ++i) gaps.push_back(events[i].time - events[i - 1].time);
    return gaps;
}

std::vector<double> TrajectoryRecord::durations(bool bright) const {
    std::vector<double> out;
    for (const auto& p : periods)
        if (p.bright == bright && !p.censored) out.push_back(p.end - p.start);
    return out;
}

namespace {

void split_periods(TrajectoryRecord& rec) {
    double bright_start = 0.0;
    double last = -1.0;
    for (const auto& e : rec.events) {
        if (e.transition != 1) continue;
        if (last >= 0.0 && e.time - last > rec.dark_threshold) {
            if (last > bright_start) rec.periods.push_back({bright_start, last, true, false});
            rec.periods.push_back({last, e.time, false, false});
            bright_start = e.time;
        }
        last = e.time;
    }
    // Whatever follows the last transition-1 emission runs into the end.
    if (last < 0.0) {
        rec.periods.push_back({0.0, rec.duration, false, true});
        return;
    }
    if (rec.duration - last > rec.dark_threshold) {
        if (last > bright_start) rec.periods.push_back({bright_start, last, true, false});
        rec.periods.push_back({last, rec.duration, false, true});
    } else {
        rec.periods.push_back({bright_start, rec.duration, true, true});
    }
}

}  // namespace

TrajectoryRecord simulate_trajectory(const SystemParams& p, double duration, std::uint64_t seed,
                                     double dark_threshold) {
    p.validate();
    if (!(duration > 0.0) || !(dark_threshold > 0.0)) throw InvalidParams("duration and dark threshold must be positive");
    TrajectoryRecord rec;
    rec.duration = duration;
    rec.dark_threshold = dark_threshold;

    const EffectiveHamiltonian heff(p);
    const int nf = p.n_fock;
    const SpaceDims dims{nf};
    const QuadratureExponential recoil(nf);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const RealVector pops = thermal_populations(cooling_rates(p).n_bar, nf);
    std::discrete_distribution<int> fock(pops.data(), pops.data() + pops.size());
    Vector psi = Vector::Zero(dims.dim());
    psi(fock(rng)) = 1.0;

    const double gammas[2] = {p.gamma1, p.gamma2};
    const double etas[2] = {p.eta1, p.eta2};
    double now = 0.0;
    while (true) {
        const Vector c = heff.dual() * psi;
        const double target = uniform(rng);
        const double remaining = duration - now;
        if (heff.norm2(c, remaining) > target) break;

        auto f = [&](double t) { return heff.norm2(c, t) - target; };
        double lo = 0.0, hi = std::min(1.0 / p.gamma1, remaining);
        while (f(hi) > 0.0) {
            lo = hi;
            hi = std::min(2.0 * hi, remaining);
        }
        std::uintmax_t iters = 200;
        const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(48), iters);
        const double dt = 0.5 * (bracket.first + bracket.second);
        now += dt;

        Vector phi = heff.evolve(psi, dt);
        double weight[2];
        for (int j = 0; j < 2; ++j) weight[j] = gammas[j] * phi.segment((j + 1) * nf, nf).squaredNorm();
        const int j = uniform(rng) * (weight[0] + weight[1]) < weight[0] ? 0 : 1;
        const double u = sample_emission_direction(uniform(rng));

        Vector next = Vector::Zero(dims.dim());
        next.head(nf) = recoil(-etas[j] * u) * phi.segment((j + 1) * nf, nf);
        psi = next / next.norm();
        rec.events.push_back({now, j + 1, u});
    }
    split_periods(rec);
    return rec;
}

double ks_distance(std::vector<double> gaps, const WaitingTimeResult& w) {
    if (gaps.empty()) throw InvalidParams("no gaps to compare");
    std::sort(gaps.begin(), gaps.end());
    const double n = static_cast<double>(gaps.size());
    double d = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double model = interpolate_survival(w, gaps[i]);
        d = std::max({d, std::abs((n - i) / n - model), std::abs((n - i - 1) / n - model)});
    }
    return d;
}

}  // namespace qjumps
