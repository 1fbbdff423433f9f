//! Range-Doppler image formation and export.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::Range;
use std::path::Path;

use ndarray::{s, Array2};
use num_complex::Complex64;

use crate::error::{IvaError, Result};
use crate::numerics::fft_in_place;
use crate::target::KinematicSnapshot;
use crate::tmc::RangeProfileSet;

/// Magnitude image: rows are range bins, columns are Doppler bins with zero
/// Doppler at column `M_p/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerImage {
    pub p: Array2<f64>,
    /// Metres, one entry per row.
    pub range_axis: Vec<f64>,
    /// Hz, one entry per column.
    pub doppler_axis: Vec<f64>,
    /// Metres, one entry per column, when the apparent rotation is known.
    pub crossrange_axis: Option<Vec<f64>>,
    /// Index of the first row within the full `K_p`-row profile set.
    pub first_row: usize,
    pub label: String,
}

/// Rectangular index window into an image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRegion {
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

impl RangeDopplerImage {
    pub fn rows(&self) -> usize {
        self.p.nrows()
    }

    pub fn cols(&self) -> usize {
        self.p.ncols()
    }

    pub fn full_region(&self) -> ImageRegion {
        ImageRegion { rows: 0..self.rows(), cols: 0..self.cols() }
    }

    pub fn max(&self) -> f64 {
        self.p.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.p.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// (row, col) of the largest pixel.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (f64::NEG_INFINITY, (0, 0));
        for ((r, c), &v) in self.p.indexed_iter() {
            if v > best.0 {
                best = (v, (r, c));
            }
        }
        best.1
    }

    /// Sub-image over `region`, axes sliced accordingly.
    pub fn crop(&self, region: &ImageRegion) -> RangeDopplerImage {
        RangeDopplerImage {
            p: self.p.slice(s![region.rows.clone(), region.cols.clone()]).to_owned(),
            range_axis: self.range_axis[region.rows.clone()].to_vec(),
            doppler_axis: self.doppler_axis[region.cols.clone()].to_vec(),
            crossrange_axis: self.crossrange_axis.as_ref().map(|a| a[region.cols.clone()].to_vec()),
            first_row: self.first_row + region.rows.start,
            label: self.label.clone(),
        }
    }

    pub fn with_crossrange(mut self, snapshot: &KinematicSnapshot, lambda: f64) -> Result<Self> {
        self.crossrange_axis = Some(crossrange_axis(&self.doppler_axis, snapshot, lambda)?);
        Ok(self)
    }
}

/// Image over every range bin.
pub fn form_image(profiles: &RangeProfileSet, m_p: usize, t_sri: f64) -> Result<RangeDopplerImage> {
    form_image_rows(profiles, m_p, t_sri, 0..profiles.k_p())
}

/// `|FFT_{M_p}|` of each slow-time row in `rows`, Doppler-centred.
pub fn form_image_rows(
    profiles: &RangeProfileSet,
    m_p: usize,
    t_sri: f64,
    rows: Range<usize>,
) -> Result<RangeDopplerImage> {
    if !profiles.phase_corrected {
        return Err(IvaError::Config("range profiles have not been phase corrected".into()));
    }
    let m_s = profiles.m_s();
    if !m_p.is_power_of_two() || m_p < 10 * m_s {
        return Err(IvaError::Config(format!("M_p = {m_p} must be a power of two >= 10·M_s = {}", 10 * m_s)));
    }
    if rows.end > profiles.k_p() || rows.is_empty() {
        return Err(IvaError::IndexOutOfRange { index: rows.end, len: profiles.k_p() });
    }
    let half = m_p / 2;
    let mut p = Array2::<f64>::zeros((rows.len(), m_p));
    let mut buf = vec![Complex64::new(0.0, 0.0); m_p];
    for (out_row, n) in rows.clone().enumerate() {
        buf[..m_s]
            .iter_mut()
            .zip(profiles.s.row(n).iter())
            .for_each(|(b, v)| *b = *v);
        buf[m_s..].iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        fft_in_place(&mut buf);
        let mut dst = p.row_mut(out_row);
        for (c, d) in dst.iter_mut().enumerate() {
            *d = buf[(c + half) % m_p].norm();
        }
    }
    let df = 1.0 / (m_p as f64 * t_sri);
    Ok(RangeDopplerImage {
        p,
        range_axis: rows.clone().map(|n| n as f64 * profiles.bin_m).collect(),
        doppler_axis: (0..m_p).map(|c| (c as f64 - half as f64) * df).collect(),
        crossrange_axis: None,
        first_row: rows.start,
        label: String::new(),
    })
}

/// `u = λ f_D / (2 ω₀ cos φ)`, with the target centroid at zero Doppler.
pub fn crossrange_axis(doppler_axis: &[f64], snapshot: &KinematicSnapshot, lambda: f64) -> Result<Vec<f64>> {
    let rate = snapshot.omega0 * snapshot.elevation.cos();
    if rate.abs() < 1e-12 {
        return Err(IvaError::UndefinedCrossRange);
    }
    Ok(doppler_axis.iter().map(|f| lambda * f / (2.0 * rate)).collect())
}

/// Strict 8-neighbour local maxima as `(row, col, value)`, strongest first.
pub fn local_maxima(image: &RangeDopplerImage, count: usize) -> Vec<(usize, usize, f64)> {
    let (rows, cols) = image.p.dim();
    let mut peaks = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = image.p[[r, c]];
            if v <= 0.0 {
                continue;
            }
            let mut is_peak = true;
            'scan: for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (rr, cc) = (r as i64 + dr, c as i64 + dc);
                    if rr < 0 || cc < 0 || rr >= rows as i64 || cc >= cols as i64 {
                        continue;
                    }
                    let w = image.p[[rr as usize, cc as usize]];
                    // ties resolved towards the first pixel in scan order
                    if w > v || (w == v && (dr < 0 || (dr == 0 && dc < 0))) {
                        is_peak = false;
                        break 'scan;
                    }
                }
            }
            if is_peak {
                peaks.push((r, c, v));
            }
        }
    }
    peaks.sort_by(|a, b| b.2.total_cmp(&a.2));
    peaks.truncate(count);
    peaks
}

/// CSV: a header comment, a row of column coordinates (cross-range when
/// available, Doppler otherwise) prefixed by `range_m`, then one line per
/// range bin.
pub fn write_image_csv(path: &Path, image: &RangeDopplerImage, region: &ImageRegion) -> Result<()> {
    let img = image.crop(region);
    let mut w = BufWriter::new(File::create(path)?);
    let (axis_name, axis) = match &img.crossrange_axis {
        Some(a) => ("crossrange_m", a),
        None => ("doppler_hz", &img.doppler_axis),
    };
    writeln!(w, "# {} rows x {} cols; columns: {axis_name}", img.rows(), img.cols())?;
    write!(w, "range_m")?;
    for v in axis {
        write!(w, ",{v:.6}")?;
    }
    writeln!(w)?;
    for (r, row) in img.p.rows().into_iter().enumerate() {
        write!(w, "{:.6}", img.range_axis[r])?;
        for v in row {
            write!(w, ",{v:e}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// 16-bit binary graymap (P5): row = range bin, column = cross-range bin,
/// linear amplitude with the region peak at 65535.
pub fn write_pgm16(path: &Path, image: &RangeDopplerImage, region: &ImageRegion) -> Result<()> {
    let img = image.crop(region);
    let peak = img.max();
    let scale = if peak > 0.0 { 65535.0 / peak } else { 0.0 };
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{} {}\n65535\n", img.cols(), img.rows())?;
    // highest range at the top
    for row in img.p.rows().into_iter().rev() {
        for &v in row {
            let level = (v * scale).round().clamp(0.0, 65535.0) as u16;
            w.write_all(&level.to_be_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}
