#include "rsgarch/types.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace rsgarch {

namespace {

constexpr double kPsdRelTol = 1e-12;

int parse_int(std::string_view s, std::string_view whole) {
    int value = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw InputError(fmt::format("invalid month '{}': expected YYYY-MM", whole));
    }
    return value;
}

}  // namespace

YearMonth YearMonth::parse(std::string_view text) {
    const auto dash = text.find('-');
    if (dash == std::string_view::npos || dash == 0 || text.size() - dash != 3) {
        throw InputError(fmt::format("invalid month '{}': expected YYYY-MM", text));
    }
    const int y = parse_int(text.substr(0, dash), text);
    const int m = parse_int(text.substr(dash + 1), text);
    if (m < 1 || m > 12) {
        throw InputError(fmt::format("invalid month '{}': month out of range", text));
    }
    return {y, m};
}

std::string YearMonth::str() const { return fmt::format("{:04d}-{:02d}", year, month); }

Cov2::Cov2(double smm, double sbb, double smb) : smm_(smm), sbb_(sbb), smb_(smb) {
    if (!std::isfinite(smm) || !std::isfinite(sbb) || !std::isfinite(smb)) {
        throw InvalidCovariance(fmt::format("covariance entries must be finite (smm={}, sbb={}, smb={})", smm, sbb, smb));
    }
    if (!(smm > 0.0)) {
        throw InvalidCovariance(fmt::format("covariance violates smm > 0 (smm={})", smm));
    }
    if (!(sbb > 0.0)) {
        throw InvalidCovariance(fmt::format("covariance violates sbb > 0 (sbb={})", sbb));
    }
    if (det() < -kPsdRelTol * smm * sbb) {
        throw InvalidCovariance(
            fmt::format("covariance violates smm*sbb - smb^2 >= 0 (smm={}, sbb={}, smb={})", smm, sbb, smb));
    }
}

void RsModelParams::validate() const {
    if (!(p > 0.0 && p < 1.0)) throw InputError(fmt::format("transition probability p={} outside (0, 1)", p));
    if (!(q > 0.0 && q < 1.0)) throw InputError(fmt::format("transition probability q={} outside (0, 1)", q));
}

ExcessReturnSeries::ExcessReturnSeries(std::vector<YearMonth> dates, std::vector<double> rm, std::vector<double> rb)
    : dates_(std::move(dates)) {
    if (rm.size() != rb.size() || rm.size() != dates_.size()) {
        throw InputError(fmt::format("misaligned series: {} dates, {} rm values, {} rb values", dates_.size(),
                                     rm.size(), rb.size()));
    }
    if (rm.size() < kMinLength) {
        throw InputError(fmt::format("series too short: {} observations, need at least {}", rm.size(), kMinLength));
    }
    obs_.reserve(rm.size());
    for (std::size_t i = 0; i < rm.size(); ++i) {
        if (!std::isfinite(rm[i])) throw InputError(fmt::format("non-finite rm value at row {}", i));
        if (!std::isfinite(rb[i])) throw InputError(fmt::format("non-finite rb value at row {}", i));
        if (i > 0 && dates_[i].index() != dates_[i - 1].index() + 1) {
            throw InputError(fmt::format("dates not consecutive months at row {} ({} follows {})", i,
                                         dates_[i].str(), dates_[i - 1].str()));
        }
        obs_.push_back({rm[i], rb[i]});
    }
}

std::vector<double> ExcessReturnSeries::rm() const {
    std::vector<double> out;
    out.reserve(obs_.size());
    for (const auto& o : obs_) out.push_back(o[0]);
    return out;
}

std::vector<double> ExcessReturnSeries::rb() const {
    std::vector<double> out;
    out.reserve(obs_.size());
    for (const auto& o : obs_) out.push_back(o[1]);
    return out;
}

std::vector<YearMonth> ExcessReturnSeries::monthly_dates(YearMonth start, std::size_t n) {
    std::vector<YearMonth> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(YearMonth::from_index(start.index() + static_cast<int>(i)));
    return out;
}

ExcessReturnSeries validate_series(RawSeries raw) {
    return {std::move(raw.dates), std::move(raw.rm), std::move(raw.rb)};
}

Cov2 sample_covariance(std::span<const Vec2> obs) {
    if (obs.size() < 2) throw InputError("sample covariance needs at least two observations");
    const double n = static_cast<double>(obs.size());
    double mm = 0.0, mb = 0.0;
    for (const auto& o : obs) {
        mm += o[0];
        mb += o[1];
    }
    mm /= n;
    mb /= n;
    double smm = 0.0, sbb = 0.0, smb = 0.0;
    for (const auto& o : obs) {
        const double dm = o[0] - mm;
        const double db = o[1] - mb;
        smm += dm * dm;
        sbb += db * db;
        smb += dm * db;
    }
    return {smm / n, sbb / n, smb / n};
}

}  // namespace rsgarch
