//! Propagation model: free-space path loss, antenna gain, downlink SINR.
//!
//! Powers are linear (watt-like, arbitrary but consistent units). A phone
//! listening to station `a` treats every other station's signal as
//! interference, so its downlink SINR is
//! `P_a / (sum of P_b for b != a  +  noise_power)`.
//!
//! [`sinr_matrix`] evaluates that for every phone/station pair of a
//! [`Scenario`]; [`sinr_heatmap`] rasterizes it over a grid for inspection.

use crate::scenario::{Area, Phone, Scenario, Station};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};
use std::io::Write as _;
use std::path::Path;
use thiserror::Error;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Which antenna family [`crate::scenario::random_stations`] should install.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamKind {
    Isotropic,
    Gaussian,
}

/// Transmit antenna pattern of a station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum AntennaPattern {
    /// Unit gain in every direction.
    Isotropic,
    /// One or more Gaussian main lobes over a constant sidelobe floor.
    ///
    /// The gain at azimuth `phi` relative to the closest beam axis is
    /// `max(gmax * exp(-phi^2 / (2 sigma^2)), sll)` with `gmax` and `sll`
    /// converted from dB to linear and `sigma` derived from `theta_deg` per
    /// the configured [`BeamwidthConvention`].
    Gaussian {
        theta_deg: f64,
        gmax_db: f64,
        sll_db: f64,
        /// Beam axis azimuths in degrees, normalized to `[0, 360)`.
        beam_azimuths_deg: Vec<f64>,
    },
}

/// How the Gaussian lobe width `sigma` follows from `theta_deg`.
///
/// The serialized names are the config-file values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamwidthConvention {
    /// `sigma = 2 * theta * sqrt(ln 2)`. The default. Lobes are broad:
    /// gain falls to half power only near `2 * theta` off axis.
    Broad,
    /// `sigma = theta / (2 * sqrt(2 ln 2))`, the textbook relation making
    /// `theta` the full half-power beamwidth.
    Standard,
}

/// Linear or decibel representation of SINR values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SinrScale {
    Db,
    Linear,
}

#[derive(Debug, Error)]
pub enum RadioError {
    #[error("distance must be positive")]
    ZeroDistance,
    #[error("heatmap grid has {cells} cells, over the budget of {max_cells}")]
    GridTooLarge { cells: u64, max_cells: u64 },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Propagation and measurement parameters shared by a whole run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioConfig {
    pub frequency_hz: f64,
    /// Transmit power per station, linear.
    pub tx_power: f64,
    /// Receiver noise power, linear. May be zero (interference-limited).
    pub noise_power: f64,
    /// Receive antenna gain, linear.
    pub rx_gain: f64,
    pub sinr_scale: SinrScale,
    pub beamwidth_convention: BeamwidthConvention,
    /// Distances below this are clamped up to it before path loss, avoiding
    /// the near-field singularity at the transmitter.
    pub min_distance_m: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            frequency_hz: 2.0e9,
            tx_power: 1.0,
            noise_power: 1.0e-13,
            rx_gain: 1.0,
            sinr_scale: SinrScale::Db,
            beamwidth_convention: BeamwidthConvention::Broad,
            min_distance_m: 1.0,
        }
    }
}

/// Free-space path loss `(4 pi d f / c)^2` at distance `d` metres and
/// frequency `f` Hz. Dimensionless; received = transmitted / loss.
pub fn fspl(distance_m: f64, frequency_hz: f64) -> Result<f64, RadioError> {
    if !(distance_m > 0.0) {
        return Err(RadioError::ZeroDistance);
    }
    assert!(frequency_hz > 0.0, "frequency must be positive");
    let ratio = 4.0 * PI * distance_m * frequency_hz / SPEED_OF_LIGHT;
    Ok(ratio * ratio)
}

/// Azimuth normalized into `[0, 360)`.
pub fn normalize_azimuth_deg(az_deg: f64) -> f64 {
    let r = az_deg.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Angular offset folded into `(-180, 180]`.
fn wrap_offset_deg(delta_deg: f64) -> f64 {
    let r = delta_deg.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// Lobe width for a beamwidth parameter `theta_deg` under `convention`.
pub fn gaussian_sigma_deg(theta_deg: f64, convention: BeamwidthConvention) -> f64 {
    match convention {
        BeamwidthConvention::Broad => 2.0 * theta_deg * LN_2.sqrt(),
        BeamwidthConvention::Standard => theta_deg / (2.0 * (2.0 * LN_2).sqrt()),
    }
}

/// Linear gain of a Gaussian pattern at `azimuth_deg`.
///
/// Each beam contributes `gmax_linear * exp(-off^2 / (2 sigma^2))` where
/// `off` is the wrapped offset from its axis; the result is the maximum
/// over beams, floored at the linear sidelobe level. On a beam axis the
/// gain equals the linear `gmax` exactly.
pub fn gaussian_gain(
    theta_deg: f64,
    gmax_db: f64,
    sll_db: f64,
    beam_azimuths_deg: &[f64],
    azimuth_deg: f64,
    convention: BeamwidthConvention,
) -> f64 {
    let sigma = gaussian_sigma_deg(theta_deg, convention);
    let peak = 10f64.powf(gmax_db / 10.0);
    let floor = 10f64.powf(sll_db / 10.0);
    let mut best = floor;
    for &axis in beam_azimuths_deg {
        let off = wrap_offset_deg(azimuth_deg - axis);
        let g = peak * (-0.5 * (off / sigma) * (off / sigma)).exp();
        if g > best {
            best = g;
        }
    }
    best
}

impl AntennaPattern {
    /// Gaussian pattern with azimuths normalized to `[0, 360)`.
    pub fn gaussian(theta_deg: f64, gmax_db: f64, sll_db: f64, beam_azimuths_deg: Vec<f64>) -> Self {
        AntennaPattern::Gaussian {
            theta_deg,
            gmax_db,
            sll_db,
            beam_azimuths_deg: beam_azimuths_deg
                .into_iter()
                .map(normalize_azimuth_deg)
                .collect(),
        }
    }

    /// The benchmark directive pattern: 30 degree beamwidth, 0 dB peak,
    /// -15 dB sidelobes.
    pub fn default_gaussian(beam_azimuths_deg: Vec<f64>) -> Self {
        Self::gaussian(30.0, 0.0, -15.0, beam_azimuths_deg)
    }

    /// Linear gain toward `azimuth_deg` (degrees, any winding).
    pub fn gain(&self, azimuth_deg: f64, convention: BeamwidthConvention) -> f64 {
        match self {
            AntennaPattern::Isotropic => 1.0,
            AntennaPattern::Gaussian {
                theta_deg,
                gmax_db,
                sll_db,
                beam_azimuths_deg,
            } => gaussian_gain(
                *theta_deg,
                *gmax_db,
                *sll_db,
                beam_azimuths_deg,
                azimuth_deg,
                convention,
            ),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            AntennaPattern::Isotropic => true,
            AntennaPattern::Gaussian {
                theta_deg,
                gmax_db,
                sll_db,
                beam_azimuths_deg,
            } => {
                theta_deg.is_finite()
                    && *theta_deg > 0.0
                    && gmax_db.is_finite()
                    && sll_db.is_finite()
                    && sll_db < gmax_db
                    && !beam_azimuths_deg.is_empty()
                    && beam_azimuths_deg
                        .iter()
                        .all(|a| a.is_finite() && (0.0..360.0).contains(a))
            }
        }
    }
}

/// Linear received power at `(x, y)` from `station`.
pub fn received_power_at(
    x: f64,
    y: f64,
    station: &Station,
    cfg: &RadioConfig,
) -> Result<f64, RadioError> {
    let dx = x - station.x;
    let dy = y - station.y;
    let d = dx.hypot(dy).max(cfg.min_distance_m);
    let loss = fspl(d, cfg.frequency_hz)?;
    let az = dy.atan2(dx).to_degrees();
    let gain = station.pattern.gain(az, cfg.beamwidth_convention);
    Ok(cfg.tx_power * gain * cfg.rx_gain / loss)
}

/// Linear received power at a phone from a station.
pub fn received_power(phone: &Phone, station: &Station, cfg: &RadioConfig) -> Result<f64, RadioError> {
    received_power_at(phone.x, phone.y, station, cfg)
}

/// Dense phones-by-stations SINR matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrMatrix {
    values: Vec<f64>,
    num_phones: usize,
    num_stations: usize,
    scale: SinrScale,
}

impl SinrMatrix {
    /// Builds from per-phone rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<f64>>, scale: SinrScale) -> Self {
        let num_phones = rows.len();
        let num_stations = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(num_phones * num_stations);
        for row in rows {
            assert_eq!(row.len(), num_stations, "ragged SINR rows");
            values.extend(row);
        }
        SinrMatrix {
            values,
            num_phones,
            num_stations,
            scale,
        }
    }

    pub fn get(&self, phone: usize, station: usize) -> f64 {
        self.values[phone * self.num_stations + station]
    }

    pub fn row(&self, phone: usize) -> &[f64] {
        &self.values[phone * self.num_stations..(phone + 1) * self.num_stations]
    }

    pub fn num_phones(&self) -> usize {
        self.num_phones
    }

    pub fn num_stations(&self) -> usize {
        self.num_stations
    }

    pub fn scale(&self) -> SinrScale {
        self.scale
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Station with the highest SINR for `phone`, lowest index on ties.
    /// Scale-independent, since dB conversion is monotone.
    pub fn best_station(&self, phone: usize) -> usize {
        let row = self.row(phone);
        let mut best = 0;
        for (a, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = a;
            }
        }
        best
    }

    pub fn to_db(&self) -> SinrMatrix {
        match self.scale {
            SinrScale::Db => self.clone(),
            SinrScale::Linear => SinrMatrix {
                values: self.values.iter().map(|v| 10.0 * v.log10()).collect(),
                scale: SinrScale::Db,
                ..*self
            },
        }
    }

    pub fn to_linear(&self) -> SinrMatrix {
        match self.scale {
            SinrScale::Linear => self.clone(),
            SinrScale::Db => SinrMatrix {
                values: self.values.iter().map(|v| 10f64.powf(v / 10.0)).collect(),
                scale: SinrScale::Linear,
                ..*self
            },
        }
    }
}

/// Downlink SINR of every phone toward every station, in
/// `cfg.sinr_scale`. Interference for the pair `(phone, a)` is the sum of
/// received powers from all stations except `a`, summed directly (not by
/// subtraction from the total) to avoid cancellation.
pub fn sinr_matrix(scenario: &Scenario, cfg: &RadioConfig) -> Result<SinrMatrix, RadioError> {
    let m = scenario.stations.len();
    assert!(m >= 2, "SINR needs at least two stations");
    let mut rows = Vec::with_capacity(scenario.phones.len());
    for phone in &scenario.phones {
        let powers: Vec<f64> = scenario
            .stations
            .iter()
            .map(|s| received_power(phone, s, cfg))
            .collect::<Result<_, _>>()?;
        let row = (0..m)
            .map(|a| {
                let interference: f64 = powers
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| b != a)
                    .map(|(_, p)| p)
                    .sum();
                let sinr = powers[a] / (interference + cfg.noise_power);
                match cfg.sinr_scale {
                    SinrScale::Linear => sinr,
                    SinrScale::Db => 10.0 * sinr.log10(),
                }
            })
            .collect();
        rows.push(row);
    }
    Ok(SinrMatrix::from_rows(rows, cfg.sinr_scale))
}

/// Default cap on heatmap cells; guards against accidental huge rasters.
pub const DEFAULT_MAX_CELLS: u64 = 4_000_000;

/// Rectangular raster over `[x_min, x_max] x [y_min, y_max]` with spacing
/// `step_m`. Row 0 is the top of the map (`y_max`), matching image order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub step_m: f64,
    pub max_cells: u64,
}

impl GridSpec {
    pub fn over_area(area: &Area, step_m: f64) -> Self {
        GridSpec {
            x_min: 0.0,
            x_max: area.width,
            y_min: 0.0,
            y_max: area.height,
            step_m,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }

    pub fn with_bounds(x_min: f64, x_max: f64, y_min: f64, y_max: f64, step_m: f64) -> Self {
        GridSpec {
            x_min: x_min.min(x_max),
            x_max: x_min.max(x_max),
            y_min: y_min.min(y_max),
            y_max: y_min.max(y_max),
            step_m,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }

    /// Sample counts include both endpoints; the small epsilon keeps
    /// exactly-divisible spans from losing their last sample to rounding.
    pub fn cols(&self) -> u64 {
        ((self.x_max - self.x_min) / self.step_m + 1e-9).floor().max(0.0) as u64 + 1
    }

    pub fn rows(&self) -> u64 {
        ((self.y_max - self.y_min) / self.step_m + 1e-9).floor().max(0.0) as u64 + 1
    }

    pub fn cells(&self) -> u64 {
        self.rows().saturating_mul(self.cols())
    }
}

/// Rasterized SINR-at-best-station map. `sinr[r * cols + c]` holds the SINR
/// (in `scale`) a phone at that pixel would get from its best station;
/// `best` holds that station's index.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub grid: GridSpec,
    pub cols: usize,
    pub rows: usize,
    pub scale: SinrScale,
    pub sinr: Vec<f64>,
    pub best: Vec<usize>,
}

/// SINR heatmap over `grid` for a set of stations.
///
/// Pixel `(r, c)` sits at `(x_min + c*step, y_max - r*step)`. Best station
/// is the one with the highest received power (lowest index on ties);
/// the stored SINR is that station's. Rows are filled in parallel but the
/// result is identical for any worker count.
pub fn sinr_heatmap(
    stations: &[Station],
    cfg: &RadioConfig,
    grid: &GridSpec,
) -> Result<Heatmap, RadioError> {
    assert!(stations.len() >= 2, "heatmap needs at least two stations");
    assert!(grid.step_m > 0.0, "grid step must be positive");
    let cells = grid.cells();
    if cells > grid.max_cells {
        return Err(RadioError::GridTooLarge {
            cells,
            max_cells: grid.max_cells,
        });
    }
    let cols = grid.cols() as usize;
    let rows = grid.rows() as usize;

    use rayon::prelude::*;
    let filled: Vec<Result<(Vec<f64>, Vec<usize>), RadioError>> = (0..rows)
        .into_par_iter()
        .map(|r| {
            let y = grid.y_max - r as f64 * grid.step_m;
            let mut sinr_row = Vec::with_capacity(cols);
            let mut best_row = Vec::with_capacity(cols);
            let mut powers = vec![0.0; stations.len()];
            for c in 0..cols {
                let x = grid.x_min + c as f64 * grid.step_m;
                for (a, s) in stations.iter().enumerate() {
                    powers[a] = received_power_at(x, y, s, cfg)?;
                }
                let mut best = 0;
                for a in 1..powers.len() {
                    if powers[a] > powers[best] {
                        best = a;
                    }
                }
                let interference: f64 = powers
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| b != best)
                    .map(|(_, p)| p)
                    .sum();
                let sinr = powers[best] / (interference + cfg.noise_power);
                sinr_row.push(match cfg.sinr_scale {
                    SinrScale::Linear => sinr,
                    SinrScale::Db => 10.0 * sinr.log10(),
                });
                best_row.push(best);
            }
            Ok((sinr_row, best_row))
        })
        .collect();

    let mut sinr = Vec::with_capacity(rows * cols);
    let mut best = Vec::with_capacity(rows * cols);
    for row in filled {
        let (s, b) = row?;
        sinr.extend(s);
        best.extend(b);
    }
    Ok(Heatmap {
        grid: *grid,
        cols,
        rows,
        scale: cfg.sinr_scale,
        sinr,
        best,
    })
}

/// Five-stop dark-to-bright ramp for scalar rasters.
fn color_ramp(t: f64) -> [u8; 3] {
    const STOPS: [(f64, [f64; 3]); 5] = [
        (0.00, [13.0, 8.0, 135.0]),
        (0.25, [126.0, 3.0, 168.0]),
        (0.50, [204.0, 71.0, 120.0]),
        (0.75, [248.0, 149.0, 64.0]),
        (1.00, [240.0, 249.0, 33.0]),
    ];
    let t = t.clamp(0.0, 1.0);
    let mut lo = STOPS[0];
    let mut hi = STOPS[STOPS.len() - 1];
    for w in STOPS.windows(2) {
        if t >= w[0].0 && t <= w[1].0 {
            lo = w[0];
            hi = w[1];
            break;
        }
    }
    let f = if hi.0 > lo.0 { (t - lo.0) / (hi.0 - lo.0) } else { 0.0 };
    let mut rgb = [0u8; 3];
    for (k, byte) in rgb.iter_mut().enumerate() {
        *byte = (lo.1[k] + f * (hi.1[k] - lo.1[k])).round() as u8;
    }
    rgb
}

/// Distinct fill colors for per-station rasters, reused modulo length.
const STATION_COLORS: [[u8; 3]; 8] = [
    [230, 57, 70],
    [69, 123, 157],
    [42, 157, 143],
    [233, 196, 106],
    [144, 103, 198],
    [96, 108, 56],
    [17, 138, 178],
    [239, 35, 60],
];

impl Heatmap {
    pub fn at(&self, row: usize, col: usize) -> (f64, usize) {
        let i = row * self.cols + col;
        (self.sinr[i], self.best[i])
    }

    /// Pixel centre coordinates for `(row, col)`.
    pub fn coords(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.grid.x_min + col as f64 * self.grid.step_m,
            self.grid.y_max - row as f64 * self.grid.step_m,
        )
    }

    /// Binary PPM (P6) of the SINR field, normalized over its own range.
    pub fn write_sinr_ppm(&self, path: impl AsRef<Path>) -> Result<(), RadioError> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in &self.sinr {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let span = hi - lo;
        self.write_ppm(path, |i| {
            let t = if span > 0.0 { (self.sinr[i] - lo) / span } else { 0.5 };
            color_ramp(t)
        })
    }

    /// Binary PPM (P6) coloring each pixel by its best station.
    pub fn write_best_ppm(&self, path: impl AsRef<Path>) -> Result<(), RadioError> {
        self.write_ppm(path, |i| STATION_COLORS[self.best[i] % STATION_COLORS.len()])
    }

    fn write_ppm(
        &self,
        path: impl AsRef<Path>,
        pixel: impl Fn(usize) -> [u8; 3],
    ) -> Result<(), RadioError> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        write!(w, "P6\n{} {}\n255\n", self.cols, self.rows)?;
        for i in 0..self.rows * self.cols {
            w.write_all(&pixel(i))?;
        }
        w.flush()?;
        Ok(())
    }

    /// CSV with header `x,y,sinr_db,best_station`, one row per pixel in
    /// raster order. The SINR column is always dB regardless of `scale`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), RadioError> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        writeln!(w, "x,y,sinr_db,best_station")?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let (x, y) = self.coords(r, c);
                let (sinr, best) = self.at(r, c);
                let db = match self.scale {
                    SinrScale::Db => sinr,
                    SinrScale::Linear => 10.0 * sinr.log10(),
                };
                writeln!(w, "{x},{y},{db},{best}")?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::generate_uniform;

    fn iso_station(id: usize, x: f64, y: f64) -> Station {
        Station {
            id,
            x,
            y,
            pattern: AntennaPattern::Isotropic,
        }
    }

    #[test]
    fn fspl_reference_point() {
        // 1 km at 2 GHz, checked against a high-precision evaluation.
        let loss = fspl(1000.0, 2.0e9).unwrap();
        assert!((loss - 7_028_106_169.663_433).abs() / loss < 1e-12, "{loss}");
        let db = 10.0 * loss.log10();
        assert!((db - 98.468_382).abs() < 1e-5, "{db}");
    }

    #[test]
    fn fspl_scales_with_distance_squared() {
        let a = fspl(137.0, 2.0e9).unwrap();
        let b = fspl(274.0, 2.0e9).unwrap();
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn fspl_unit_loss_distance() {
        // d = c / (4 pi f): loss is exactly 1 there. At 10 MHz that lies
        // beyond the 1 m clamp used elsewhere.
        let d = 2.385_672_579_618_471;
        let loss = fspl(d, 1.0e7).unwrap();
        assert!((loss - 1.0).abs() < 1e-12, "{loss}");
    }

    #[test]
    fn fspl_rejects_nonpositive_distance() {
        assert!(matches!(fspl(0.0, 2.0e9), Err(RadioError::ZeroDistance)));
        assert!(matches!(fspl(-5.0, 2.0e9), Err(RadioError::ZeroDistance)));
    }

    #[test]
    fn sigma_conventions() {
        let wide = gaussian_sigma_deg(30.0, BeamwidthConvention::Broad);
        assert!((wide - 49.953_276_669_461_864).abs() < 1e-12, "{wide}");
        let narrow = gaussian_sigma_deg(30.0, BeamwidthConvention::Standard);
        assert!((narrow - 12.739_827_004_320_286).abs() < 1e-12, "{narrow}");
    }

    #[test]
    fn standard_convention_is_half_power_at_half_theta() {
        let g = gaussian_gain(30.0, 0.0, -40.0, &[0.0], 15.0, BeamwidthConvention::Standard);
        assert!((g - 0.5).abs() < 1e-12, "{g}");
    }

    #[test]
    fn gain_peaks_on_axis_and_floors_behind() {
        let g0 = gaussian_gain(30.0, 0.0, -15.0, &[0.0], 0.0, BeamwidthConvention::Broad);
        assert_eq!(g0, 1.0);
        // 180 degrees off axis the lobe is ~0.0015, below the -15 dB floor.
        let back = gaussian_gain(30.0, 0.0, -15.0, &[0.0], 180.0, BeamwidthConvention::Broad);
        assert!((back - 0.031_622_776_601_683_79).abs() < 1e-15, "{back}");
        // Nonzero peak gain scales the lobe, not the floor.
        let g = gaussian_gain(30.0, 3.0, -15.0, &[0.0], 0.0, BeamwidthConvention::Broad);
        assert!((g - 10f64.powf(0.3)).abs() < 1e-12);
    }

    #[test]
    fn gain_wraps_and_takes_best_beam() {
        let beams = [0.0, 90.0];
        let a = gaussian_gain(30.0, 0.0, -15.0, &beams, 359.0, BeamwidthConvention::Broad);
        let b = gaussian_gain(30.0, 0.0, -15.0, &beams, -1.0, BeamwidthConvention::Broad);
        assert_eq!(a, b);
        // Equidistant from both beams: same as 45 degrees off a single beam.
        let mid = gaussian_gain(30.0, 0.0, -15.0, &beams, 45.0, BeamwidthConvention::Broad);
        let single = gaussian_gain(30.0, 0.0, -15.0, &[0.0], 45.0, BeamwidthConvention::Broad);
        assert_eq!(mid, single);
        assert!(mid > gaussian_gain(30.0, 0.0, -15.0, &[0.0], 90.0, BeamwidthConvention::Broad));
    }

    #[test]
    fn pattern_validity() {
        assert!(AntennaPattern::Isotropic.is_valid());
        assert!(AntennaPattern::default_gaussian(vec![45.0]).is_valid());
        assert!(AntennaPattern::gaussian(30.0, 0.0, -15.0, vec![-10.0]).is_valid()); // normalized
        assert!(!AntennaPattern::Gaussian {
            theta_deg: 30.0,
            gmax_db: 0.0,
            sll_db: 5.0, // sidelobes above the peak
            beam_azimuths_deg: vec![0.0],
        }
        .is_valid());
        assert!(!AntennaPattern::Gaussian {
            theta_deg: 30.0,
            gmax_db: 0.0,
            sll_db: -15.0,
            beam_azimuths_deg: vec![],
        }
        .is_valid());
        assert!(!AntennaPattern::gaussian(0.0, 0.0, -15.0, vec![0.0]).is_valid());
    }

    #[test]
    fn received_power_matches_hand_computation() {
        let cfg = RadioConfig::default();
        let s = iso_station(0, 0.0, 0.0);
        let p = Phone {
            id: 0,
            x: 300.0,
            y: 400.0,
        };
        let expect = cfg.tx_power * cfg.rx_gain / fspl(500.0, cfg.frequency_hz).unwrap();
        let got = received_power(&p, &s, &cfg).unwrap();
        assert!((got - expect).abs() / expect < 1e-15);
    }

    #[test]
    fn near_field_clamps_to_min_distance() {
        let cfg = RadioConfig::default();
        let s = iso_station(0, 10.0, 10.0);
        let at_clamp = received_power(&Phone { id: 0, x: 11.0, y: 10.0 }, &s, &cfg).unwrap();
        let inside = received_power(&Phone { id: 0, x: 10.2, y: 10.0 }, &s, &cfg).unwrap();
        let coincident = received_power(&Phone { id: 0, x: 10.0, y: 10.0 }, &s, &cfg).unwrap();
        assert_eq!(at_clamp, inside);
        assert_eq!(at_clamp, coincident);
        // With no clamp, a coincident pair is an error.
        let raw = RadioConfig {
            min_distance_m: 0.0,
            ..cfg
        };
        assert!(matches!(
            received_power(&Phone { id: 0, x: 10.0, y: 10.0 }, &s, &raw),
            Err(RadioError::ZeroDistance)
        ));
    }

    #[test]
    fn directive_station_favors_its_axis() {
        let cfg = RadioConfig::default();
        let s = Station {
            id: 0,
            x: 0.0,
            y: 0.0,
            pattern: AntennaPattern::default_gaussian(vec![0.0]),
        };
        let ahead = received_power(&Phone { id: 0, x: 200.0, y: 0.0 }, &s, &cfg).unwrap();
        let behind = received_power(&Phone { id: 0, x: -200.0, y: 0.0 }, &s, &cfg).unwrap();
        // Ratio is peak over sidelobe floor: +15 dB.
        assert!((ahead / behind - 10f64.powf(1.5)).abs() < 1e-9);
    }

    #[test]
    fn sinr_two_stations_reciprocal() {
        // Zero noise, two isotropic stations: SINR_0 * SINR_1 = 1 per phone.
        let cfg = RadioConfig {
            noise_power: 0.0,
            sinr_scale: SinrScale::Linear,
            ..RadioConfig::default()
        };
        let area = Area { width: 500.0, height: 500.0 };
        let stations = vec![iso_station(0, 100.0, 250.0), iso_station(1, 400.0, 250.0)];
        let sc = generate_uniform(10, stations, area, 4).unwrap();
        let m = sinr_matrix(&sc, &cfg).unwrap();
        for i in 0..10 {
            let prod = m.get(i, 0) * m.get(i, 1);
            assert!((prod - 1.0).abs() < 1e-12, "phone {i}: {prod}");
        }
        let db = m.to_db();
        for i in 0..10 {
            assert!((db.get(i, 0) + db.get(i, 1)).abs() < 1e-9);
        }
    }

    #[test]
    fn sinr_matches_manual_three_station_oracle() {
        let cfg = RadioConfig {
            sinr_scale: SinrScale::Linear,
            ..RadioConfig::default()
        };
        let stations = vec![
            iso_station(0, 0.0, 0.0),
            iso_station(1, 300.0, 0.0),
            iso_station(2, 0.0, 300.0),
        ];
        let sc = Scenario {
            area: Area { width: 300.0, height: 300.0 },
            stations: stations.clone(),
            phones: vec![Phone { id: 0, x: 120.0, y: 90.0 }],
            capacities: vec![1, 0, 0],
            rng_seed: 0,
        };
        let m = sinr_matrix(&sc, &cfg).unwrap();
        let p: Vec<f64> = stations
            .iter()
            .map(|s| received_power(&sc.phones[0], s, &cfg).unwrap())
            .collect();
        for a in 0..3 {
            let mut interference = cfg.noise_power;
            for b in 0..3 {
                if b != a {
                    interference += p[b];
                }
            }
            let expect = p[a] / interference;
            assert!((m.get(0, a) - expect).abs() / expect < 1e-12);
        }
        assert_eq!(m.best_station(0), 0); // nearest of three isotropic towers
    }

    #[test]
    fn best_station_breaks_ties_low() {
        let m = SinrMatrix::from_rows(vec![vec![3.0, 3.0, 1.0]], SinrScale::Linear);
        assert_eq!(m.best_station(0), 0);
    }

    #[test]
    fn db_linear_round_trip() {
        let m = SinrMatrix::from_rows(vec![vec![0.5, 2.0], vec![10.0, 0.125]], SinrScale::Linear);
        let back = m.to_db().to_linear();
        for i in 0..2 {
            for a in 0..2 {
                assert!((back.get(i, a) - m.get(i, a)).abs() / m.get(i, a) < 1e-12);
            }
        }
    }

    #[test]
    fn grid_dimensions() {
        let g = GridSpec::with_bounds(0.0, 99.0, 0.0, 99.0, 1.0);
        assert_eq!(g.cols(), 100);
        assert_eq!(g.rows(), 100);
        let g = GridSpec::over_area(&Area { width: 700.0, height: 350.0 }, 7.0);
        assert_eq!(g.cols(), 101);
        assert_eq!(g.rows(), 51);
        // Non-divisible span keeps the last full step.
        let g = GridSpec::with_bounds(0.0, 10.5, 0.0, 0.3, 0.1);
        assert_eq!(g.cols(), 106);
        assert_eq!(g.rows(), 4);
    }

    #[test]
    fn heatmap_rejects_oversized_grids() {
        let stations = vec![iso_station(0, 0.0, 0.0), iso_station(1, 10.0, 0.0)];
        let mut g = GridSpec::with_bounds(0.0, 100.0, 0.0, 100.0, 1.0);
        g.max_cells = 1000;
        let e = sinr_heatmap(&stations, &RadioConfig::default(), &g).unwrap_err();
        assert!(matches!(
            e,
            RadioError::GridTooLarge {
                cells: 10201,
                max_cells: 1000
            }
        ));
    }

    #[test]
    fn heatmap_orientation_and_content() {
        // Station 0 near the top-left corner, station 1 near the bottom-right.
        let stations = vec![iso_station(0, 10.0, 90.0), iso_station(1, 90.0, 10.0)];
        let g = GridSpec::with_bounds(0.0, 100.0, 0.0, 100.0, 10.0);
        let h = sinr_heatmap(&stations, &RadioConfig::default(), &g).unwrap();
        assert_eq!((h.rows, h.cols), (11, 11));
        let (_, best_top_left) = h.at(0, 0);
        let (_, best_bottom_right) = h.at(10, 10);
        assert_eq!(best_top_left, 0);
        assert_eq!(best_bottom_right, 1);
        assert_eq!(h.coords(0, 0), (0.0, 100.0));
        assert_eq!(h.coords(10, 10), (100.0, 0.0));
        // SINR at the best station is >= 0 dB only near stations; just check
        // every pixel is finite and the best index in range.
        for r in 0..h.rows {
            for c in 0..h.cols {
                let (s, b) = h.at(r, c);
                assert!(s.is_finite());
                assert!(b < 2);
            }
        }
    }

    #[test]
    fn ppm_and_csv_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let stations = vec![iso_station(0, 20.0, 20.0), iso_station(1, 80.0, 80.0)];
        let g = GridSpec::with_bounds(0.0, 100.0, 0.0, 50.0, 10.0);
        let h = sinr_heatmap(&stations, &RadioConfig::default(), &g).unwrap();

        let sinr_path = dir.path().join("sinr.ppm");
        h.write_sinr_ppm(&sinr_path).unwrap();
        let bytes = std::fs::read(&sinr_path).unwrap();
        let header = format!("P6\n{} {}\n255\n", h.cols, h.rows);
        assert!(bytes.starts_with(header.as_bytes()));
        assert_eq!(bytes.len(), header.len() + 3 * h.rows * h.cols);

        let best_path = dir.path().join("best.ppm");
        h.write_best_ppm(&best_path).unwrap();
        assert_eq!(
            std::fs::read(&best_path).unwrap().len(),
            header.len() + 3 * h.rows * h.cols
        );

        let csv_path = dir.path().join("map.csv");
        h.write_csv(&csv_path).unwrap();
        let text = std::fs::read_to_string(&csv_path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,sinr_db,best_station"));
        assert_eq!(lines.count(), h.rows * h.cols);
        let first = text.lines().nth(1).unwrap();
        assert!(first.starts_with("0,50,"), "{first}");

        // Same inputs, same bytes.
        let h2 = sinr_heatmap(&stations, &RadioConfig::default(), &g).unwrap();
        let again = dir.path().join("sinr2.ppm");
        h2.write_sinr_ppm(&again).unwrap();
        assert_eq!(bytes, std::fs::read(&again).unwrap());
    }

    #[test]
    fn radio_config_serde_defaults_and_names() {
        let cfg: RadioConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, RadioConfig::default());
        let cfg: RadioConfig =
            serde_json::from_str(r#"{"noise_power": 0.0, "beamwidth_convention": "standard", "sinr_scale": "linear"}"#)
                .unwrap();
        assert_eq!(cfg.noise_power, 0.0);
        assert_eq!(cfg.beamwidth_convention, BeamwidthConvention::Standard);
        assert_eq!(cfg.sinr_scale, SinrScale::Linear);
        let text = serde_json::to_string(&RadioConfig::default()).unwrap();
        assert!(text.contains("\"beamwidth_convention\":\"broad\""), "{text}");
    }

    #[test]
    fn pattern_serde_tagging() {
        let p = AntennaPattern::default_gaussian(vec![45.0]);
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"type\":\"gaussian\""), "{text}");
        assert!(text.contains("\"beam_azimuths_deg\":[45.0]"), "{text}");
        let back: AntennaPattern = serde_json::from_str(&text).unwrap();
        assert_eq!(p, back);
        let iso: AntennaPattern = serde_json::from_str(r#"{"type":"isotropic"}"#).unwrap();
        assert_eq!(iso, AntennaPattern::Isotropic);
    }
}
