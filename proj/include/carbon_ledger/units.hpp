#pragma once

/// @file carbon_ledger/units.hpp
/// @brief Non-negative quantities (energy, carbon, coins, gas) and fractions.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <carbon_ledger/decimal.hpp>

namespace carbon_ledger {

/// Thrown when a quantity or fraction is constructed outside its domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A non-negative exact amount of some unit, distinguished by `Tag`.
template <class Tag>
class Quantity {
 public:
  Quantity() = default;
  explicit Quantity(Decimal value) : value_(std::move(value)) {
    if (value_.is_negative()) {
      throw DomainError(std::string(Tag::kName) + " must be non-negative, got " +
                        value_.exact_string());
    }
  }
  static Quantity parse(std::string_view text) { return Quantity(Decimal::parse(text)); }

  const Decimal& value() const { return value_; }
  bool is_zero() const { return value_.is_zero(); }

  friend Quantity operator+(const Quantity& a, const Quantity& b) { return Quantity(a.value_ + b.value_); }
  Quantity& operator+=(const Quantity& o) { value_ += o.value_; return *this; }
  /// Scaling by a non-negative factor.
  friend Quantity operator*(const Quantity& a, const Decimal& k) { return Quantity(a.value_ * k); }
  friend Decimal operator/(const Quantity& a, const Quantity& b) { return a.value_ / b.value_; }

  friend bool operator==(const Quantity& a, const Quantity& b) { return a.value_ == b.value_; }
  friend bool operator<(const Quantity& a, const Quantity& b) { return a.value_ < b.value_; }
  friend bool operator>(const Quantity& a, const Quantity& b) { return b < a; }
  friend bool operator<=(const Quantity& a, const Quantity& b) { return !(b < a); }
  friend bool operator>=(const Quantity& a, const Quantity& b) { return !(a < b); }

 private:
  Decimal value_{0};
};

struct EnergyTag { static constexpr std::string_view kName = "energy"; };
struct CarbonTag { static constexpr std::string_view kName = "carbon"; };
struct CoinTag { static constexpr std::string_view kName = "coin amount"; };
struct GasTag { static constexpr std::string_view kName = "gas"; };
struct EmissionFactorTag { static constexpr std::string_view kName = "emission factor"; };

/// Watt-hours.
using Energy = Quantity<EnergyTag>;
/// Grams CO2e.
using Carbon = Quantity<CarbonTag>;
/// Native coin or token units.
using CoinAmount = Quantity<CoinTag>;
/// Gas or other complexity units.
using Gas = Quantity<GasTag>;
/// Grams CO2e per kWh.
using EmissionFactor = Quantity<EmissionFactorTag>;

/// Exact value in [0, 1].
class Fraction {
 public:
  Fraction() = default;
  explicit Fraction(Decimal value) : value_(std::move(value)) {
    if (value_.is_negative() || value_ > Decimal(1)) {
      throw DomainError("fraction must lie in [0, 1], got " + value_.exact_string());
    }
  }
  static Fraction parse(std::string_view text) { return Fraction(Decimal::parse(text)); }
  static Fraction one() { return Fraction(Decimal(1)); }

  const Decimal& value() const { return value_; }
  Fraction complement() const { return Fraction(Decimal(1) - value_); }

  friend bool operator==(const Fraction& a, const Fraction& b) { return a.value_ == b.value_; }

 private:
  Decimal value_{0};
};

inline Energy operator*(const Energy& e, const Fraction& f) { return e * f.value(); }

enum class EnergyUnit { Wh, kWh, MWh, GWh, TWh };

inline constexpr std::array<EnergyUnit, 5> kEnergyUnits = {EnergyUnit::Wh, EnergyUnit::kWh,
                                                           EnergyUnit::MWh, EnergyUnit::GWh,
                                                           EnergyUnit::TWh};

inline std::string_view to_string(EnergyUnit u) {
  switch (u) {
    case EnergyUnit::Wh: return "Wh";
    case EnergyUnit::kWh: return "kWh";
    case EnergyUnit::MWh: return "MWh";
    case EnergyUnit::GWh: return "GWh";
    case EnergyUnit::TWh: return "TWh";
  }
  return "Wh";
}

inline std::optional<EnergyUnit> parse_energy_unit(std::string_view s) {
  for (auto u : kEnergyUnits)
    if (to_string(u) == s) return u;
  return std::nullopt;
}

inline int unit_exponent(EnergyUnit u) { return static_cast<int>(u); }

/// Exact value of `e` expressed in `unit`.
inline Decimal in_unit(const Energy& e, EnergyUnit unit) {
  return e.value() / pow1000(unit_exponent(unit));
}

inline Decimal to_kwh(const Energy& e) { return in_unit(e, EnergyUnit::kWh); }

/// Display text of `e` in `unit`, rounded half-even to `significant_digits`.
inline std::string convert_energy(const Energy& e, EnergyUnit unit, int significant_digits = 6) {
  return in_unit(e, unit).format_significant(significant_digits);
}

/// Largest unit in which `e` is at least 1; Wh for anything smaller.
inline EnergyUnit natural_unit(const Energy& e) {
  EnergyUnit best = EnergyUnit::Wh;
  for (auto u : kEnergyUnits)
    if (in_unit(e, u) >= Decimal(1)) best = u;
  return best;
}

/// carbon = energy in kWh x factor (gCO2e/kWh).
inline Carbon carbonize(const Energy& e, const EmissionFactor& factor) {
  return Carbon(to_kwh(e) * factor.value());
}

}  // namespace carbon_ledger
