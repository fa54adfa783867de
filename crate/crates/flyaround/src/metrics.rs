//! Full-reference image quality metrics: PSNR and single-scale SSIM.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("channel counts differ: {0} vs {1}")]
    ChannelMismatch(u8, u8),
    #[error("image {width}x{height} smaller than the {window}x{window} SSIM window")]
    TooSmall { width: u32, height: u32, window: u32 },
    #[error("buffer length {got} does not match {width}x{height}x{channels}")]
    BadBufferLength { got: usize, width: u32, height: u32, channels: u8 },
    #[error("no matched image pairs between the two directories")]
    NoPairs,
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to decode {path}: {source}")]
    Decode {
        path: String,
        #[source]
        source: image::ImageError,
    },
    #[error("unsupported image layout in {0} (expected 8-bit grayscale or RGB)")]
    UnsupportedLayout(String),
}

/// 8-bit image, row-major, 1 (grayscale) or 3 (RGB) channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    pub width: u32,
    pub height: u32,
    pub channels: u8,
    pub data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self, MetricsError> {
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected || !(channels == 1 || channels == 3) {
            return Err(MetricsError::BadBufferLength { got: data.len(), width, height, channels });
        }
        Ok(Self { width, height, channels, data })
    }

    pub fn load_png(path: &Path) -> Result<Self, MetricsError> {
        let img = image::open(path).map_err(|source| MetricsError::Decode {
            path: path.display().to_string(),
            source,
        })?;
        match img {
            image::DynamicImage::ImageLuma8(g) => {
                let (w, h) = (g.width(), g.height());
                Self::new(w, h, 1, g.into_raw())
            }
            image::DynamicImage::ImageRgb8(rgb) => {
                let (w, h) = (rgb.width(), rgb.height());
                Self::new(w, h, 3, rgb.into_raw())
            }
            other => {
                let rgb = other.to_rgb8();
                let (w, h) = (rgb.width(), rgb.height());
                Self::new(w, h, 3, rgb.into_raw())
            }
        }
    }

    pub fn save_png(&self, path: &Path) -> Result<(), MetricsError> {
        let err = |source: image::ImageError| MetricsError::Decode {
            path: path.display().to_string(),
            source,
        };
        match self.channels {
            1 => image::GrayImage::from_raw(self.width, self.height, self.data.clone())
                .expect("validated buffer")
                .save(path)
                .map_err(err),
            _ => image::RgbImage::from_raw(self.width, self.height, self.data.clone())
                .expect("validated buffer")
                .save(path)
                .map_err(err),
        }
    }

    /// BT.601 luminance as f64 samples; grayscale passes through.
    pub fn luminance(&self) -> Vec<f64> {
        match self.channels {
            1 => self.data.iter().map(|&v| v as f64).collect(),
            _ => self
                .data
                .chunks_exact(3)
                .map(|px| 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64)
                .collect(),
        }
    }
}

fn check_dims(a: &ImageBuffer, b: &ImageBuffer) -> Result<(), MetricsError> {
    if a.width != b.width || a.height != b.height {
        return Err(MetricsError::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    if a.channels != b.channels {
        return Err(MetricsError::ChannelMismatch(a.channels, b.channels));
    }
    Ok(())
}

/// Mean squared error over all 8-bit samples.
pub fn mse(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    let sum: f64 = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    Ok(sum / a.data.len() as f64)
}

/// Peak signal-to-noise ratio in dB: `10 log10(255² / MSE)`.
///
/// Identical images return `f64::INFINITY` as an explicit sentinel.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    let mse = mse(a, b)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
pub const SSIM_DYNAMIC_RANGE: f64 = 255.0;

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let mut k = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *v;
    }
    for v in k.iter_mut() {
        *v /= sum;
    }
    k
}

/// Separable valid-region Gaussian filter.
fn gaussian_filter_valid(img: &[f64], w: usize, h: usize) -> Vec<f64> {
    let k = gaussian_kernel();
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    // horizontal pass
    let mut horiz = vec![0.0; ow * h];
    for row in 0..h {
        for col in 0..ow {
            let mut acc = 0.0;
            for (i, &kv) in k.iter().enumerate() {
                acc += kv * img[row * w + col + i];
            }
            horiz[row * ow + col] = acc;
        }
    }
    // vertical pass
    let mut out = vec![0.0; ow * oh];
    for row in 0..oh {
        for col in 0..ow {
            let mut acc = 0.0;
            for (i, &kv) in k.iter().enumerate() {
                acc += kv * horiz[(row + i) * ow + col];
            }
            out[row * ow + col] = acc;
        }
    }
    out
}

/// Single-scale SSIM on luminance: 11×11 Gaussian window (σ = 1.5),
/// K1 = 0.01, K2 = 0.03, dynamic range 255, averaged over all valid
/// window positions.
pub fn ssim(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    let (w, h) = (a.width as usize, a.height as usize);
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(MetricsError::TooSmall {
            width: a.width,
            height: a.height,
            window: SSIM_WINDOW as u32,
        });
    }
    let la = a.luminance();
    let lb = b.luminance();
    let la2: Vec<f64> = la.iter().map(|v| v * v).collect();
    let lb2: Vec<f64> = lb.iter().map(|v| v * v).collect();
    let lab: Vec<f64> = la.iter().zip(&lb).map(|(x, y)| x * y).collect();

    let mu_a = gaussian_filter_valid(&la, w, h);
    let mu_b = gaussian_filter_valid(&lb, w, h);
    let m_a2 = gaussian_filter_valid(&la2, w, h);
    let m_b2 = gaussian_filter_valid(&lb2, w, h);
    let m_ab = gaussian_filter_valid(&lab, w, h);

    let c1 = (SSIM_K1 * SSIM_DYNAMIC_RANGE).powi(2);
    let c2 = (SSIM_K2 * SSIM_DYNAMIC_RANGE).powi(2);
    let mut total = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = m_a2[i] - ma * ma;
        let vb = m_b2[i] - mb * mb;
        let cov = m_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
            / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    Ok(total / mu_a.len() as f64)
}

/// Per-pair metrics row of a batch evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMetrics {
    pub filename: String,
    pub psnr_db: f64,
    pub ssim: f64,
}

#[derive(Debug)]
pub struct BatchReport {
    pub rows: Vec<PairMetrics>,
    /// Files present in only one directory.
    pub unmatched: Vec<String>,
    /// Pairs that failed to evaluate (filename, reason).
    pub failures: Vec<(String, String)>,
    /// Mean PSNR over finite rows only; `None` when all rows are infinite.
    pub mean_psnr_db: Option<f64>,
    pub mean_ssim: f64,
    /// Rows with the PSNR infinity sentinel, excluded from the PSNR mean.
    pub infinite_psnr_rows: usize,
}

fn png_names(dir: &Path) -> Result<BTreeMap<String, std::path::PathBuf>, MetricsError> {
    let mut out = BTreeMap::new();
    let entries = std::fs::read_dir(dir).map_err(|source| MetricsError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    for entry in entries {
        let entry = entry.map_err(|source| MetricsError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()).map(|e| e.eq_ignore_ascii_case("png"))
            == Some(true)
        {
            if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                out.insert(name.to_string(), path.clone());
            }
        }
    }
    Ok(out)
}

/// Evaluates PSNR and SSIM for every same-named PNG pair in the two
/// directories. Pairs run in parallel; row order is lexicographic by
/// filename either way. A pair that fails (e.g. mismatched dimensions)
/// is reported and skipped; the run continues.
pub fn batch_eval(rendered_dir: &Path, gt_dir: &Path) -> Result<BatchReport, MetricsError> {
    let rendered = png_names(rendered_dir)?;
    let gt = png_names(gt_dir)?;
    let mut unmatched: Vec<String> = Vec::new();
    let mut matched: Vec<(String, std::path::PathBuf, std::path::PathBuf)> = Vec::new();
    for (name, path) in &rendered {
        match gt.get(name) {
            Some(gt_path) => matched.push((name.clone(), path.clone(), gt_path.clone())),
            None => unmatched.push(name.clone()),
        }
    }
    for name in gt.keys() {
        if !rendered.contains_key(name) {
            unmatched.push(name.clone());
        }
    }
    if matched.is_empty() {
        return Err(MetricsError::NoPairs);
    }

    let results: Vec<Result<PairMetrics, (String, String)>> = matched
        .par_iter()
        .map(|(name, rp, gp)| {
            let run = || -> Result<PairMetrics, MetricsError> {
                let a = ImageBuffer::load_png(rp)?;
                let b = ImageBuffer::load_png(gp)?;
                Ok(PairMetrics {
                    filename: name.clone(),
                    psnr_db: psnr(&a, &b)?,
                    ssim: ssim(&a, &b)?,
                })
            };
            run().map_err(|e| (name.clone(), e.to_string()))
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(fail) => failures.push(fail),
        }
    }
    if rows.is_empty() {
        return Err(MetricsError::NoPairs);
    }
    let finite: Vec<f64> = rows.iter().map(|r| r.psnr_db).filter(|p| p.is_finite()).collect();
    let infinite_psnr_rows = rows.len() - finite.len();
    let mean_psnr_db = if finite.is_empty() {
        None
    } else {
        Some(finite.iter().sum::<f64>() / finite.len() as f64)
    };
    let mean_ssim = rows.iter().map(|r| r.ssim).sum::<f64>() / rows.len() as f64;
    Ok(BatchReport { rows, unmatched, failures, mean_psnr_db, mean_ssim, infinite_psnr_rows })
}

impl BatchReport {
    /// CSV `filename,psnr_db,ssim,lpips` with a trailing aggregate row;
    /// `lpips` left blank for external tooling to fill.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("filename,psnr_db,ssim,lpips\n");
        for row in &self.rows {
            let psnr = if row.psnr_db.is_finite() {
                row.psnr_db.to_string()
            } else {
                "inf".to_string()
            };
            let _ = writeln!(out, "{},{},{},", row.filename, psnr, row.ssim);
        }
        let mean_psnr = match self.mean_psnr_db {
            Some(v) => v.to_string(),
            None => "inf".to_string(),
        };
        let _ = writeln!(out, "mean,{},{},", mean_psnr, self.mean_ssim);
        out
    }
}
