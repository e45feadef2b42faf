//! Uplink SNR from physical link parameters.

use crate::error::{invalid, Result};

pub const EARTH_RADIUS_KM: f64 = 6371.0;
/// `10 log10(k_B)` in dBW/Hz/K.
pub const BOLTZMANN_DB: f64 = -228.6;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub altitude_km: f64,
    pub frequency_hz: f64,
    pub elevation_deg: f64,
    pub eirp_dbm: f64,
    pub g_over_t_dbk: f64,
    pub bandwidth_hz: f64,
    pub extra_losses_db: f64,
}

impl LinkBudget {
    /// 800 km altitude, 950 MHz, 30° elevation, 23 dBm EIRP, 3 dB extra
    /// losses, at the given receiver G/T and bandwidth.
    pub fn leo_iot(g_over_t_dbk: f64, bandwidth_hz: f64) -> Self {
        Self {
            altitude_km: 800.0,
            frequency_hz: 950e6,
            elevation_deg: 30.0,
            eirp_dbm: 23.0,
            g_over_t_dbk,
            bandwidth_hz,
            extra_losses_db: 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.altitude_km > 0.0) {
            return Err(invalid(format!(
                "altitude must be > 0 km, got {}",
                self.altitude_km
            )));
        }
        if !(self.elevation_deg > 0.0 && self.elevation_deg <= 90.0) {
            return Err(invalid(format!(
                "elevation must be in (0, 90] degrees, got {}",
                self.elevation_deg
            )));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(invalid(format!(
                "bandwidth must be > 0 Hz, got {}",
                self.bandwidth_hz
            )));
        }
        if !(self.frequency_hz > 0.0) {
            return Err(invalid(format!(
                "frequency must be > 0 Hz, got {}",
                self.frequency_hz
            )));
        }
        if !(self.extra_losses_db >= 0.0) {
            return Err(invalid(format!(
                "extra losses must be >= 0 dB, got {}",
                self.extra_losses_db
            )));
        }
        Ok(())
    }

    pub fn slant_range_km(&self) -> f64 {
        slant_range_km(self.altitude_km, self.elevation_deg)
    }

    pub fn fspl_db(&self) -> f64 {
        let d = self.slant_range_km() * 1e3;
        20.0 * (4.0 * std::f64::consts::PI * d * self.frequency_hz / SPEED_OF_LIGHT).log10()
    }

    pub fn snr_db(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.eirp_dbm - 30.0 + self.g_over_t_dbk
            - BOLTZMANN_DB
            - self.fspl_db()
            - 10.0 * self.bandwidth_hz.log10()
            - self.extra_losses_db)
    }
}

/// Distance from a ground point to a satellite at `altitude_km` seen at
/// `elevation_deg`.
pub fn slant_range_km(altitude_km: f64, elevation_deg: f64) -> f64 {
    let (s, c) = elevation_deg.to_radians().sin_cos();
    let r = EARTH_RADIUS_KM;
    ((r + altitude_km).powi(2) - (r * c).powi(2)).sqrt() - r * s
}

/// `(min, max)` SNR in dB over a nonempty grid.
pub fn feasible_range(grid: &[LinkBudget]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(invalid("link-budget grid is empty"));
    }
    grid.iter()
        .try_fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| {
            let s = b.snr_db()?;
            Ok((lo.min(s), hi.max(s)))
        })
}

/// NB-IoT sub-carrier and carrier bandwidths in Hz.
pub const IOT_BANDWIDTHS_HZ: [f64; 5] = [3.75e3, 15e3, 45e3, 90e3, 180e3];

/// G/T from −25 to −6 dB/K in 1 dB steps crossed with [`IOT_BANDWIDTHS_HZ`].
pub fn leo_iot_grid() -> Vec<LinkBudget> {
    (-25..=-6)
        .flat_map(|gt| {
            IOT_BANDWIDTHS_HZ
                .iter()
                .map(move |&bw| LinkBudget::leo_iot(f64::from(gt), bw))
        })
        .collect()
}
