//! Link budget: inverse-power-law path loss, thermal noise, SINR and the
//! Shannon bound. Powers are linear watts throughout.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::layout::positive;

pub const SPEED_OF_LIGHT_M_S: f64 = 2.998e8;
pub const BOLTZMANN_J_K: f64 = 1.38e-23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseFigureUnit {
    #[default]
    Decibel,
    Linear,
}

impl FromStr for NoiseFigureUnit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "db" => Ok(NoiseFigureUnit::Decibel),
            "linear" => Ok(NoiseFigureUnit::Linear),
            other => Err(format!(
                "unknown noise figure unit '{other}' (expected db or linear)"
            )),
        }
    }
}

impl fmt::Display for NoiseFigureUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseFigureUnit::Decibel => "db",
            NoiseFigureUnit::Linear => "linear",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub tx_power_w: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub frequency_hz: f64,
    pub path_loss_exponent: f64,
    pub reference_distance_m: f64,
    pub noise_figure: f64,
    pub noise_figure_unit: NoiseFigureUnit,
    pub temperature_k: f64,
    pub bandwidth_hz: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            tx_power_w: 0.1,
            tx_gain: 1.0,
            rx_gain: 1.0,
            frequency_hz: 2.0e9,
            path_loss_exponent: 4.0,
            reference_distance_m: 1.0,
            noise_figure: 4.0,
            noise_figure_unit: NoiseFigureUnit::Decibel,
            temperature_k: 300.0,
            bandwidth_hz: 1.0e6,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        positive("tx_power_w", self.tx_power_w)?;
        positive("tx_gain", self.tx_gain)?;
        positive("rx_gain", self.rx_gain)?;
        positive("frequency_hz", self.frequency_hz)?;
        positive("temperature_k", self.temperature_k)?;
        positive("bandwidth_hz", self.bandwidth_hz)?;
        let eta = self.path_loss_exponent;
        if !(2.0..=6.0).contains(&eta) {
            return Err(Error::OutOfRange {
                name: "path_loss_exponent",
                value: eta,
                min: 2.0,
                max: 6.0,
            });
        }
        if self.reference_distance_m != 1.0 {
            return Err(Error::OutOfRange {
                name: "reference_distance_m",
                value: self.reference_distance_m,
                min: 1.0,
                max: 1.0,
            });
        }
        if !self.noise_figure.is_finite() {
            return Err(Error::NonPositive {
                name: "noise_figure",
                value: self.noise_figure,
            });
        }
        if self.noise_figure_unit == NoiseFigureUnit::Linear {
            positive("noise_figure", self.noise_figure)?;
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT_M_S / self.frequency_hz
    }

    /// Gain-and-wavelength constant `K = G_tx G_rx (lambda / (4 pi d_ref))^2`.
    pub fn path_constant(&self) -> f64 {
        let r = self.wavelength_m() / (4.0 * PI * self.reference_distance_m);
        self.tx_gain * self.rx_gain * r * r
    }

    /// Mean received power at `distance_m`, `P_tx K (d_ref / d)^eta`.
    pub fn received_power(&self, distance_m: f64) -> Result<f64> {
        if distance_m.is_nan() || distance_m < self.reference_distance_m {
            return Err(Error::BelowReferenceDistance {
                distance: distance_m,
                reference: self.reference_distance_m,
            });
        }
        let ratio = self.reference_distance_m / distance_m;
        Ok(self.tx_power_w * self.path_constant() * ratio.powf(self.path_loss_exponent))
    }

    pub fn noise_factor_linear(&self) -> f64 {
        match self.noise_figure_unit {
            NoiseFigureUnit::Decibel => 10f64.powf(self.noise_figure / 10.0),
            NoiseFigureUnit::Linear => self.noise_figure,
        }
    }

    /// Thermal noise `F k T B`.
    pub fn noise_power(&self) -> f64 {
        self.noise_factor_linear() * BOLTZMANN_J_K * self.temperature_k * self.bandwidth_hz
    }

    pub fn shannon_rate(&self, sinr: f64) -> f64 {
        self.bandwidth_hz * (1.0 + sinr).log2()
    }

    /// Rate of a single link at the reference distance with no interference;
    /// no reception in the network can exceed it.
    pub fn rate_ceiling(&self) -> f64 {
        self.shannon_rate(self.tx_power_w * self.path_constant() / self.noise_power())
    }
}

pub fn sinr(signal_w: f64, interference_w: f64, noise_w: f64) -> f64 {
    signal_w / (interference_w + noise_w)
}
