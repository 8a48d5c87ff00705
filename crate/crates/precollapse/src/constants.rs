//! Physical constants and the sodium-beam reference parameters used throughout.

/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 299_792_458.0;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Planck constant, J·s (exact).
pub const PLANCK_H: f64 = 6.626_070_15e-34;

/// Mass of a sodium-23 atom, kg.
pub const SODIUM_MASS_KG: f64 = 3.818e-26;

/// Mass of a hydrogen atom, kg.
pub const HYDROGEN_MASS_KG: f64 = 1.6735e-27;

/// Sodium D-line wavelength, m.
pub const SODIUM_D_LINE_M: f64 = 589e-9;

/// Lifetime of the sodium 3p excited state, s.
pub const SODIUM_LIFETIME_S: f64 = 16e-9;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn light_speed_is_exactly_representable() {
        // The SI definition is an integer; f64 holds it without rounding.
        assert_eq!(C, 299792458.0);
        assert_eq!(C as u64 as f64, C);
    }

    #[test]
    fn sodium_to_hydrogen_mass_ratio_is_near_23() {
        let ratio = SODIUM_MASS_KG / HYDROGEN_MASS_KG;
        assert!((22.0..24.0).contains(&ratio), "mass ratio {ratio}");
    }
}
