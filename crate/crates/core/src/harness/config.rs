//! Flat `key = value` experiment configuration.
//!
//! One assignment per line, `#` starts a comment, list values are comma
//! separated. Every key is optional and falls back to the defaults below.
//!
//! | key                 | unit / values          | default        |
//! |---------------------|------------------------|----------------|
//! | `nodes_per_stream`  | nodes in each row      | 6              |
//! | `hop_length_m`      | meters                 | 100            |
//! | `row_separation_m`  | meters                 | 300            |
//! | `tx_power_w`        | watts                  | 0.1            |
//! | `tx_gain`           | linear                 | 1              |
//! | `rx_gain`           | linear                 | 1              |
//! | `frequency_hz`      | hertz                  | 2e9            |
//! | `path_loss_exponent`| dimensionless, 2..=6   | 4              |
//! | `noise_figure`      | see `noise_figure_unit`| 4              |
//! | `noise_figure_unit` | `db` or `linear`       | db             |
//! | `temperature_k`     | kelvin                 | 300            |
//! | `bandwidth_hz`      | hertz                  | 1e6            |
//! | `phase`             | `aligned` or `opposite`| aligned        |
//! | `modes`             | list of `TR`, `NC`     | TR, NC         |
//! | `z_values`          | list of timeslots      | 2, 3, 4, 5     |
//! | `hop_counts`        | list of hops           | 2, 3, 4, 5     |
//! | `streams`           | list from {1, 2}       | 1, 2           |
//! | `output`            | path of the sweep CSV  | (stdout)       |

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::capacity::SlotPhase;
use crate::error::{Error, Result};
use crate::layout::LayoutConfig;
use crate::radio::RadioConfig;
use crate::schedule::Mode;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Row geometry. `num_streams` is set per sweep cell from `streams`.
    pub layout: LayoutConfig,
    pub radio: RadioConfig,
    pub phase: SlotPhase,
    pub modes: Vec<Mode>,
    pub z_values: Vec<usize>,
    pub hop_counts: Vec<usize>,
    pub streams: Vec<usize>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            layout: LayoutConfig::default(),
            radio: RadioConfig::default(),
            phase: SlotPhase::Aligned,
            modes: Mode::ALL.to_vec(),
            z_values: vec![2, 3, 4, 5],
            hop_counts: vec![2, 3, 4, 5],
            streams: vec![1, 2],
            output: None,
        }
    }
}

fn scalar<T: FromStr>(value: &str) -> std::result::Result<T, String>
where
    T::Err: Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| format!("cannot parse '{}': {e}", value.trim()))
}

fn list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: Display,
{
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(scalar)
        .collect()
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = ExperimentSpec::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: i + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            spec.set(key.trim(), value.trim())
                .map_err(|message| Error::Config {
                    line: i + 1,
                    message,
                })?;
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Applies one assignment. Command-line overrides go through here too.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "nodes_per_stream" => self.layout.nodes_per_stream = scalar(value)?,
            "hop_length_m" => self.layout.hop_length_m = scalar(value)?,
            "row_separation_m" => self.layout.row_separation_m = scalar(value)?,
            "tx_power_w" => self.radio.tx_power_w = scalar(value)?,
            "tx_gain" => self.radio.tx_gain = scalar(value)?,
            "rx_gain" => self.radio.rx_gain = scalar(value)?,
            "frequency_hz" => self.radio.frequency_hz = scalar(value)?,
            "path_loss_exponent" => self.radio.path_loss_exponent = scalar(value)?,
            "noise_figure" => self.radio.noise_figure = scalar(value)?,
            "noise_figure_unit" => self.radio.noise_figure_unit = scalar(value)?,
            "temperature_k" => self.radio.temperature_k = scalar(value)?,
            "bandwidth_hz" => self.radio.bandwidth_hz = scalar(value)?,
            "phase" => self.phase = scalar(value)?,
            "modes" => self.modes = list(value)?,
            "z_values" => self.z_values = list(value)?,
            "hop_counts" => self.hop_counts = list(value)?,
            "streams" => self.streams = list(value)?,
            "output" => {
                self.output = (!value.is_empty()).then(|| PathBuf::from(value));
            }
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| Error::Config {
            line: 0,
            message: format!("override '{assignment}' is not key=value"),
        })?;
        self.set(key.trim(), value.trim())
            .map_err(|message| Error::Config { line: 0, message })
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::Experiment(m));
        self.radio.validate()?;
        for &s in &self.streams {
            LayoutConfig {
                num_streams: s,
                ..self.layout
            }
            .validate()?;
        }
        if self.modes.is_empty() || self.z_values.is_empty() {
            return invalid("modes and z_values must not be empty".into());
        }
        if self.hop_counts.is_empty() || self.streams.is_empty() {
            return invalid("hop_counts and streams must not be empty".into());
        }
        let n_o = self.layout.nodes_per_stream;
        if let Some(h) = self.hop_counts.iter().find(|h| !(2..n_o).contains(*h)) {
            return invalid(format!(
                "hop count {h} is outside [2, {}] for {n_o} nodes per stream",
                n_o - 1
            ));
        }
        let z_max = self.hop_counts.iter().max().copied().unwrap_or(2) + 1;
        if let Some(z) = self.z_values.iter().find(|z| !(2..=z_max).contains(*z)) {
            return invalid(format!("scheduling period {z} is outside [2, {z_max}]"));
        }
        Ok(())
    }

    pub fn layout_for(&self, streams: usize) -> LayoutConfig {
        LayoutConfig {
            num_streams: streams,
            ..self.layout
        }
    }

    /// The spec written back out in the file format.
    pub fn to_config_string(&self) -> String {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        }
        let r = &self.radio;
        let mut out = format!(
            "nodes_per_stream = {}\nhop_length_m = {}\nrow_separation_m = {}\n\
             tx_power_w = {}\ntx_gain = {}\nrx_gain = {}\nfrequency_hz = {}\n\
             path_loss_exponent = {}\nnoise_figure = {}\nnoise_figure_unit = {}\n\
             temperature_k = {}\nbandwidth_hz = {}\nphase = {}\nmodes = {}\n\
             z_values = {}\nhop_counts = {}\nstreams = {}\n",
            self.layout.nodes_per_stream,
            self.layout.hop_length_m,
            self.layout.row_separation_m,
            r.tx_power_w,
            r.tx_gain,
            r.rx_gain,
            r.frequency_hz,
            r.path_loss_exponent,
            r.noise_figure,
            r.noise_figure_unit,
            r.temperature_k,
            r.bandwidth_hz,
            self.phase,
            join(&self.modes),
            join(&self.z_values),
            join(&self.hop_counts),
            join(&self.streams),
        );
        if let Some(p) = &self.output {
            out.push_str(&format!("output = {}\n", p.display()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radio::NoiseFigureUnit;

    #[test]
    fn defaults_and_parse() {
        let text = "\
# two rows, closer together
row_separation_m = 500   # meters
noise_figure_unit = linear
modes = NC
z_values = 3, 4
";
        let spec = ExperimentSpec::parse(text).unwrap();
        assert_eq!(spec.layout.row_separation_m, 500.0);
        assert_eq!(spec.radio.noise_figure_unit, NoiseFigureUnit::Linear);
        assert_eq!(spec.modes, vec![Mode::NetworkCoded]);
        assert_eq!(spec.z_values, vec![3, 4]);
        assert_eq!(spec.hop_counts, vec![2, 3, 4, 5]);
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match ExperimentSpec::parse("tx_power_w = 0.1\nbogus = 3\n") {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            ExperimentSpec::parse("hop_length_m 100"),
            Err(Error::Config { line: 1, .. })
        ));
        assert!(ExperimentSpec::parse("z_values = 2, x").is_err());
    }

    #[test]
    fn validation_ranges() {
        let mut spec = ExperimentSpec::default();
        assert!(spec.validate().is_ok());
        spec.hop_counts = vec![6];
        assert!(spec.validate().is_err());
        spec.hop_counts = vec![3];
        spec.z_values = vec![5];
        assert!(spec.validate().is_err());
        spec.z_values = vec![4];
        spec.streams = vec![3];
        assert!(spec.validate().is_err());
        spec.streams = vec![1];
        spec.radio.path_loss_exponent = 7.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn config_string_round_trip() {
        let mut spec = ExperimentSpec::default();
        spec.apply_override("bandwidth_hz=2e6").unwrap();
        spec.apply_override("output = out.csv").unwrap();
        assert!(spec.apply_override("nonsense").is_err());
        let again = ExperimentSpec::parse(&spec.to_config_string()).unwrap();
        assert_eq!(again, spec);
    }
}
