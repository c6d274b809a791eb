//! Depth-corruption pipeline: crop/resample, range clipping, axial and
//! lateral noise, uncertainty-proxy dropout, edge-conditioned dropout, final
//! masking.
//!
//! Invalid pixels (sentinel 0.0) are excluded from the frame mean, from
//! normalization and from noise injection, and are preserved through every
//! stage.

use crate::error::{Error, Result};
use crate::raycast::DepthImage;
use crate::rng::{RngStream, Stage};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Per-pixel scalar field aligned with a DepthImage.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelMap {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f32>,
}

impl PixelMap {
    pub fn zeros(width: u32, height: u32) -> PixelMap {
        PixelMap { width, height, data: vec![0.0; (width * height) as usize] }
    }

    pub fn at(&self, u: u32, v: u32) -> f32 {
        self.data[(v * self.width + u) as usize]
    }
}

pub type SigmaMap = PixelMap;
pub type GradientMap = PixelMap;
pub type ProbMap = PixelMap;

/// Hyperparameters of the corruption model. The underlying study gives no
/// numeric values for these; the defaults here are calibration-free choices
/// in the range reported for structured-light sensors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseParams {
    /// Axial sigma coefficients: sigma_z = a + b (z - mu_z)^2 + c / sqrt(z).
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Lateral scale alpha (unitless).
    pub alpha: f64,
    /// Axial weight in the combined uncertainty, >= 1.
    pub w: f64,
    /// Maximum missing-data ratio, in [0, 1].
    pub rho: f64,
    /// Edge dropout bound, in [0, 1].
    pub lambda_e: f64,
    /// Sensor valid range, meters.
    pub z_min: f64,
    pub z_max: f64,
    /// Crop margin M, pixels.
    pub margin: u32,
    /// Percentile of positive gradients defining the edge set, in (0, 100).
    pub edge_percentile: f64,
}

impl Default for NoiseParams {
    fn default() -> NoiseParams {
        NoiseParams {
            a: 0.0012,
            b: 0.0019,
            c: 0.0005,
            alpha: 0.01,
            w: 2.0,
            rho: 0.2,
            lambda_e: 0.5,
            z_min: 0.3,
            z_max: 6.0,
            margin: 8,
            edge_percentile: 95.0,
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.z_min < self.z_max) {
            return Err(Error::Config(format!(
                "z_min {} must be < z_max {}",
                self.z_min, self.z_max
            )));
        }
        if !(0.0..=1.0).contains(&self.rho) || !(0.0..=1.0).contains(&self.lambda_e) {
            return Err(Error::Config("rho and lambda_e must lie in [0, 1]".into()));
        }
        if self.w < 1.0 {
            return Err(Error::Config("axial weight w must be >= 1".into()));
        }
        if !(0.0 < self.edge_percentile && self.edge_percentile < 100.0) {
            return Err(Error::Config("edge_percentile must lie in (0, 100)".into()));
        }
        Ok(())
    }
}

/// Which pipeline stages run; mirrors the preprocessing ablations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineToggles {
    pub self_occlusion: bool,
    pub crop_resize: bool,
    pub noise_model: bool,
}

impl Default for PipelineToggles {
    fn default() -> PipelineToggles {
        PipelineToggles { self_occlusion: true, crop_resize: true, noise_model: true }
    }
}

/// Bilinear sample at continuous pixel coordinates (x, y), where integer
/// coordinates address pixel centers. Invalid (0.0) pixels are excluded from
/// the interpolation; a sample with all-invalid support stays 0.0.
pub fn bilinear_sample(depth: &DepthImage, x: f64, y: f64) -> f32 {
    let clamp = |v: f64, hi: u32| (v.max(0.0) as u32).min(hi - 1);
    let x0 = clamp(x.floor(), depth.width);
    let y0 = clamp(y.floor(), depth.height);
    let x1 = (x0 + 1).min(depth.width - 1);
    let y1 = (y0 + 1).min(depth.height - 1);
    let fx = (x - x0 as f64).clamp(0.0, 1.0);
    let fy = (y - y0 as f64).clamp(0.0, 1.0);
    let taps = [
        (depth.at(x0, y0), (1.0 - fx) * (1.0 - fy)),
        (depth.at(x1, y0), fx * (1.0 - fy)),
        (depth.at(x0, y1), (1.0 - fx) * fy),
        (depth.at(x1, y1), fx * fy),
    ];
    let mut acc = 0.0f64;
    let mut wsum = 0.0f64;
    for (z, w) in taps {
        if z > 0.0 {
            acc += z as f64 * w;
            wsum += w;
        }
    }
    if wsum > 0.0 {
        (acc / wsum) as f32
    } else {
        0.0
    }
}

/// Crops a fixed margin from all sides and resamples the central region to
/// the target resolution.
pub fn crop_resize(depth: &DepthImage, margin: u32, out_w: u32, out_h: u32) -> Result<DepthImage> {
    if 2 * margin >= depth.width || 2 * margin >= depth.height {
        return Err(Error::InvalidInput(format!(
            "margin {margin} too large for {}x{} image",
            depth.width, depth.height
        )));
    }
    let cw = (depth.width - 2 * margin) as f64;
    let ch = (depth.height - 2 * margin) as f64;
    let mut out = DepthImage::new(out_w, out_h);
    for oy in 0..out_h {
        for ox in 0..out_w {
            let sx = (ox as f64 + 0.5) * cw / out_w as f64 - 0.5 + margin as f64;
            let sy = (oy as f64 + 0.5) * ch / out_h as f64 - 0.5 + margin as f64;
            out.set(ox, oy, bilinear_sample(depth, sx, sy));
        }
    }
    Ok(out)
}

/// Clamps valid pixels into [z_min, z_max]; the invalid sentinel passes
/// through untouched.
pub fn clip_range(depth: &DepthImage, z_min: f64, z_max: f64) -> Result<DepthImage> {
    if !(z_min < z_max) {
        return Err(Error::InvalidInput("z_min must be < z_max".into()));
    }
    let mut out = depth.clone();
    for z in &mut out.data {
        if *z > 0.0 {
            *z = (*z).clamp(z_min as f32, z_max as f32);
        }
    }
    Ok(out)
}

/// Per-pixel axial sigma: a + b (z - mu_z)^2 + c / sqrt(z), with mu_z the
/// mean over valid pixels of the frame.
pub fn axial_sigma(depth: &DepthImage, params: &NoiseParams) -> Result<SigmaMap> {
    let mut sum = 0.0f64;
    let mut count = 0u64;
    for z in depth.valid_values() {
        sum += z as f64;
        count += 1;
    }
    if count == 0 {
        return Err(Error::DegenerateFrame("no valid pixels for axial sigma".into()));
    }
    let mu = sum / count as f64;
    let mut map = PixelMap::zeros(depth.width, depth.height);
    for (s, &z) in map.data.iter_mut().zip(&depth.data) {
        if z > 0.0 {
            let z = z as f64;
            *s = (params.a + params.b * (z - mu) * (z - mu) + params.c / z.sqrt()) as f32;
        }
    }
    Ok(map)
}

/// Adds N(0, sigma^2) to each valid pixel, clamped at 0 from below.
pub fn add_axial_noise(depth: &DepthImage, sigma: &SigmaMap, rng: &RngStream) -> DepthImage {
    let mut out = depth.clone();
    for (idx, (z, &s)) in out.data.iter_mut().zip(&sigma.data).enumerate() {
        if *z > 0.0 && s > 0.0 {
            let normal = Normal::new(0.0f64, s as f64).unwrap();
            let n = normal.sample(&mut rng.pixel_rng(idx as u64));
            *z = ((*z as f64 + n).max(0.0)) as f32;
        }
    }
    out
}

/// Lateral sigma alpha * z * xi with xi ~ U[-1, 1], drawn once per pixel.
/// The sign is immaterial downstream since only sigma_L^2 is used.
pub fn lateral_sigma(depth: &DepthImage, alpha: f64, rng: &RngStream) -> SigmaMap {
    let mut map = PixelMap::zeros(depth.width, depth.height);
    for (idx, (s, &z)) in map.data.iter_mut().zip(&depth.data).enumerate() {
        if z > 0.0 {
            let xi: f64 = rng.pixel_rng(idx as u64).gen_range(-1.0..=1.0);
            *s = (alpha * z as f64 * xi) as f32;
        }
    }
    map
}

/// sigma_tot = sqrt(w sigma_z^2 + sigma_L^2).
pub fn total_sigma(sigma_z: &SigmaMap, sigma_l: &SigmaMap, w: f64) -> Result<SigmaMap> {
    if sigma_z.data.len() != sigma_l.data.len() {
        return Err(Error::InvalidInput("sigma maps are not aligned".into()));
    }
    if w < 1.0 {
        return Err(Error::InvalidInput("axial weight w must be >= 1".into()));
    }
    let mut map = PixelMap::zeros(sigma_z.width, sigma_z.height);
    for ((t, &a), &l) in map.data.iter_mut().zip(&sigma_z.data).zip(&sigma_l.data) {
        *t = ((w * (a as f64) * (a as f64)) + (l as f64) * (l as f64)).sqrt() as f32;
    }
    Ok(map)
}

/// Min-max normalizes sigma_tot over valid pixels and scales by rho. A
/// constant sigma field carries no ranking information and maps to 0.
pub fn sigma_dropout_prob(sigma_tot: &SigmaMap, valid: &DepthImage, rho: f64) -> ProbMap {
    let mut lo = f32::INFINITY;
    let mut hi = f32::NEG_INFINITY;
    for (&s, &z) in sigma_tot.data.iter().zip(&valid.data) {
        if z > 0.0 {
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    let mut map = PixelMap::zeros(sigma_tot.width, sigma_tot.height);
    if !(hi > lo) || rho <= 0.0 {
        return map;
    }
    let span = (hi - lo) as f64;
    for ((p, &s), &z) in map.data.iter_mut().zip(&sigma_tot.data).zip(&valid.data) {
        if z > 0.0 {
            *p = (rho * (s - lo) as f64 / span) as f32;
        }
    }
    map
}

const SOBEL_X: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];

/// Gradient magnitude from standard 3x3 Sobel kernels, replicate padding.
pub fn sobel_gradient(depth: &DepthImage) -> Result<GradientMap> {
    if depth.width < 3 || depth.height < 3 {
        return Err(Error::InvalidInput("image smaller than the Sobel kernel".into()));
    }
    let w = depth.width as i64;
    let h = depth.height as i64;
    let sample = |x: i64, y: i64| {
        depth.at(x.clamp(0, w - 1) as u32, y.clamp(0, h - 1) as u32) as f64
    };
    let mut map = PixelMap::zeros(depth.width, depth.height);
    for y in 0..h {
        for x in 0..w {
            let mut gx = 0.0;
            let mut gy = 0.0;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let v = sample(x + dx, y + dy);
                    gx += SOBEL_X[(dy + 1) as usize][(dx + 1) as usize] * v;
                    gy += SOBEL_X[(dx + 1) as usize][(dy + 1) as usize] * v;
                }
            }
            map.data[(y * w + x) as usize] = (gx * gx + gy * gy).sqrt() as f32;
        }
    }
    Ok(map)
}

/// Percentile (linear interpolation between order statistics) of a non-empty
/// sorted slice.
fn percentile_sorted(sorted: &[f32], q: f64) -> f32 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q / 100.0 * (n - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < n {
        (sorted[i] as f64 * (1.0 - frac) + sorted[i + 1] as f64 * frac) as f32
    } else {
        sorted[n - 1]
    }
}

/// Edge-conditioned dropout: within the edge set (gradients at or above the
/// configured percentile of positive gradients), p_e = lambda_e * G / max G.
pub fn edge_dropout_prob(grad: &GradientMap, params: &NoiseParams) -> ProbMap {
    let mut map = PixelMap::zeros(grad.width, grad.height);
    if params.lambda_e <= 0.0 {
        return map;
    }
    let mut positives: Vec<f32> = grad.data.iter().copied().filter(|&g| g > 0.0).collect();
    if positives.is_empty() {
        return map;
    }
    positives.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let threshold = percentile_sorted(&positives, params.edge_percentile);
    let gmax = *positives.last().unwrap();
    for (p, &g) in map.data.iter_mut().zip(&grad.data) {
        if g > 0.0 && g >= threshold {
            *p = (params.lambda_e * g as f64 / gmax as f64) as f32;
        }
    }
    map
}

/// Final mask: one uniform draw per pixel, dropped where u < min(p_sigma +
/// p_edge, 1). The draw depends only on the stream and pixel index, so
/// sweeping rho with the same seed never un-drops a pixel.
pub fn apply_dropout(
    depth: &DepthImage,
    p_sigma: &ProbMap,
    p_edge: &ProbMap,
    rng: &RngStream,
) -> DepthImage {
    let mut out = depth.clone();
    for (idx, z) in out.data.iter_mut().enumerate() {
        if *z > 0.0 {
            let p = (p_sigma.data[idx] as f64 + p_edge.data[idx] as f64).min(1.0);
            let u: f64 = rng.pixel_rng(idx as u64).gen();
            if u < p {
                *z = 0.0;
            }
        }
    }
    out
}

/// Full corruption pipeline in the fixed stage order: crop/resample, clip,
/// axial sigma, axial noise, lateral sigma, combined uncertainty, sigma
/// dropout, Sobel gradients of the noised image, edge dropout, final mask.
pub fn corrupt(
    depth: &DepthImage,
    params: &NoiseParams,
    toggles: &PipelineToggles,
    seed: u64,
    env: u32,
    frame: u32,
) -> Result<DepthImage> {
    params.validate()?;
    let cropped = if toggles.crop_resize {
        crop_resize(depth, params.margin, depth.width, depth.height)?
    } else {
        depth.clone()
    };
    if !toggles.noise_model {
        return Ok(cropped);
    }
    let clipped = clip_range(&cropped, params.z_min, params.z_max)?;
    let sigma_z = axial_sigma(&clipped, params)?;
    let noised = add_axial_noise(
        &clipped,
        &sigma_z,
        &RngStream::new(seed, env, frame, Stage::AxialNoise),
    );
    let sigma_l = lateral_sigma(
        &noised,
        params.alpha,
        &RngStream::new(seed, env, frame, Stage::LateralSigma),
    );
    let sigma_tot = total_sigma(&sigma_z, &sigma_l, params.w)?;
    let p_sigma = sigma_dropout_prob(&sigma_tot, &noised, params.rho);
    let grad = sobel_gradient(&noised)?;
    let p_edge = edge_dropout_prob(&grad, params);
    Ok(apply_dropout(
        &noised,
        &p_sigma,
        &p_edge,
        &RngStream::new(seed, env, frame, Stage::Dropout),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_image(w: u32, h: u32, z: f32) -> DepthImage {
        DepthImage::from_data(w, h, vec![z; (w * h) as usize]).unwrap()
    }

    #[test]
    fn bilinear_center_of_2x2() {
        let img = DepthImage::from_data(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((bilinear_sample(&img, 0.5, 0.5) - 2.5).abs() < 1e-6);
    }

    #[test]
    fn crop_resize_constant_stays_constant() {
        let img = constant_image(32, 24, 1.7);
        let out = crop_resize(&img, 4, 16, 12).unwrap();
        assert!(out.data.iter().all(|&z| (z - 1.7).abs() < 1e-6));
    }

    #[test]
    fn crop_resize_zero_margin_same_dims_is_identity() {
        let data: Vec<f32> = (0..64).map(|i| 1.0 + i as f32 * 0.01).collect();
        let img = DepthImage::from_data(8, 8, data.clone()).unwrap();
        let out = crop_resize(&img, 0, 8, 8).unwrap();
        assert_eq!(out.data, data);
    }

    #[test]
    fn crop_resize_rejects_large_margin() {
        let img = constant_image(8, 8, 1.0);
        assert!(crop_resize(&img, 4, 8, 8).is_err());
    }

    #[test]
    fn crop_resize_skips_invalid_support() {
        let mut img = constant_image(8, 8, 2.0);
        img.set(3, 3, 0.0);
        let out = crop_resize(&img, 0, 8, 8).unwrap();
        // invalid pixel stays invalid, neighbors unaffected
        assert_eq!(out.at(3, 3), 0.0);
        assert!((out.at(2, 3) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn clip_clamps_but_preserves_sentinel() {
        let img = DepthImage::from_data(2, 2, vec![0.1, 7.0, 0.0, 2.0]).unwrap();
        let out = clip_range(&img, 0.3, 6.0).unwrap();
        assert_eq!(out.data, vec![0.3, 6.0, 0.0, 2.0]);
    }

    #[test]
    fn axial_sigma_at_mean_and_offsets() {
        let params = NoiseParams { a: 0.001, b: 0.002, c: 0.0, ..NoiseParams::default() };
        // half the frame at mu-1, half at mu+1 so mu stays at 2.0
        let img = DepthImage::from_data(2, 1, vec![1.0, 3.0]).unwrap();
        let sig = axial_sigma(&img, &params).unwrap();
        for &s in &sig.data {
            assert!((s - 0.003).abs() < 1e-7);
        }
        // constant frame: quadratic term vanishes
        let c_img = constant_image(4, 4, 2.0);
        let params2 = NoiseParams { a: 0.001, b: 0.5, c: 0.004, ..NoiseParams::default() };
        let sig2 = axial_sigma(&c_img, &params2).unwrap();
        let want = 0.001 + 0.004 / 2.0f64.sqrt();
        for &s in &sig2.data {
            assert!((s as f64 - want).abs() < 1e-7);
        }
    }

    #[test]
    fn axial_sigma_zero_coefficients() {
        let img = constant_image(4, 4, 2.0);
        let params = NoiseParams { a: 0.0, b: 0.0, c: 0.0, ..NoiseParams::default() };
        let sig = axial_sigma(&img, &params).unwrap();
        assert!(sig.data.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn axial_sigma_needs_a_valid_pixel() {
        let img = constant_image(4, 4, 0.0);
        assert!(axial_sigma(&img, &NoiseParams::default()).is_err());
    }

    #[test]
    fn zero_sigma_noise_is_identity() {
        let img = constant_image(8, 8, 2.0);
        let sig = PixelMap::zeros(8, 8);
        let rng = RngStream::new(1, 0, 0, Stage::AxialNoise);
        assert_eq!(add_axial_noise(&img, &sig, &rng).data, img.data);
    }

    #[test]
    fn axial_noise_is_deterministic() {
        let img = constant_image(16, 16, 2.0);
        let params = NoiseParams::default();
        let sig = axial_sigma(&img, &params).unwrap();
        let rng = RngStream::new(9, 0, 0, Stage::AxialNoise);
        let a = add_axial_noise(&img, &sig, &rng);
        let b = add_axial_noise(&img, &sig, &rng);
        assert_eq!(a.data, b.data);
        assert!(a.data != img.data);
    }

    #[test]
    fn lateral_sigma_bounded_by_alpha_z() {
        let img = constant_image(32, 32, 2.0);
        let rng = RngStream::new(5, 0, 0, Stage::LateralSigma);
        let sig = lateral_sigma(&img, 0.01, &rng);
        assert!(sig.data.iter().all(|&s| s.abs() <= 0.02 + 1e-9));
        let zero = lateral_sigma(&img, 0.0, &rng);
        assert!(zero.data.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn total_sigma_three_four_five() {
        let sz = PixelMap { width: 1, height: 1, data: vec![3.0] };
        let sl = PixelMap { width: 1, height: 1, data: vec![4.0] };
        let t = total_sigma(&sz, &sl, 1.0).unwrap();
        assert!((t.data[0] - 5.0).abs() < 1e-6);
        let sz1 = PixelMap { width: 1, height: 1, data: vec![1.0] };
        let sl1 = PixelMap { width: 1, height: 1, data: vec![1.0] };
        let t2 = total_sigma(&sz1, &sl1, 4.0).unwrap();
        assert!((t2.data[0] as f64 - 5.0f64.sqrt()).abs() < 1e-6);
        let t3 = total_sigma(&sz, &PixelMap::zeros(1, 1), 1.0).unwrap();
        assert_eq!(t3.data[0], 3.0);
    }

    #[test]
    fn sigma_dropout_normalization_endpoints() {
        let valid = constant_image(2, 2, 1.0);
        let sig = PixelMap { width: 2, height: 2, data: vec![0.1, 0.2, 0.3, 0.4] };
        let p = sigma_dropout_prob(&sig, &valid, 0.2);
        assert!((p.data[3] - 0.2).abs() < 1e-6, "frame-max pixel gets rho");
        assert_eq!(p.data[0], 0.0);
        // constant field and rho = 0 both degenerate to zero
        let flat = PixelMap { width: 2, height: 2, data: vec![0.3; 4] };
        assert!(sigma_dropout_prob(&flat, &valid, 0.2).data.iter().all(|&x| x == 0.0));
        assert!(sigma_dropout_prob(&sig, &valid, 0.0).data.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sobel_of_constant_is_zero() {
        let img = constant_image(8, 8, 2.0);
        let g = sobel_gradient(&img).unwrap();
        assert!(g.data.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sobel_step_peak_is_four_h() {
        // vertical step of height h between columns 3 and 4
        let h = 0.5f32;
        let mut img = constant_image(8, 8, 1.0);
        for y in 0..8 {
            for x in 4..8 {
                img.set(x, y, 1.0 + h);
            }
        }
        let g = sobel_gradient(&img).unwrap();
        let max = g.data.iter().cloned().fold(0.0f32, f32::max);
        assert!((max - 4.0 * h).abs() < 1e-5, "max {max}");
        // peak sits on the step columns
        assert!((g.at(3, 4) - 4.0 * h).abs() < 1e-5);
        assert!((g.at(4, 4) - 4.0 * h).abs() < 1e-5);
    }

    #[test]
    fn sobel_transpose_swaps_axes() {
        let mut img = constant_image(6, 6, 1.0);
        for y in 3..6 {
            for x in 0..6 {
                img.set(x, y, 2.0);
            }
        }
        let mut transposed = constant_image(6, 6, 1.0);
        for y in 0..6 {
            for x in 0..6 {
                transposed.set(y, x, img.at(x, y));
            }
        }
        let g = sobel_gradient(&img).unwrap();
        let gt = sobel_gradient(&transposed).unwrap();
        for y in 0..6 {
            for x in 0..6 {
                assert!((g.at(x, y) - gt.at(y, x)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn sobel_rejects_tiny_images() {
        assert!(sobel_gradient(&constant_image(2, 8, 1.0)).is_err());
    }

    #[test]
    fn edge_prob_endpoint_and_zero_cases() {
        let params = NoiseParams { lambda_e: 0.4, edge_percentile: 50.0, ..NoiseParams::default() };
        let g = PixelMap { width: 2, height: 2, data: vec![0.0, 1.0, 2.0, 4.0] };
        let p = edge_dropout_prob(&g, &params);
        assert!((p.data[3] - 0.4).abs() < 1e-6, "max-gradient pixel gets lambda_e");
        assert_eq!(p.data[0], 0.0);
        let zeros = PixelMap::zeros(2, 2);
        assert!(edge_dropout_prob(&zeros, &params).data.iter().all(|&x| x == 0.0));
        let off = NoiseParams { lambda_e: 0.0, ..params };
        assert!(edge_dropout_prob(&g, &off).data.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn dropout_zero_prob_is_identity_and_saturated_always_drops() {
        let img = constant_image(4, 4, 2.0);
        let zero = PixelMap::zeros(4, 4);
        let rng = RngStream::new(3, 0, 0, Stage::Dropout);
        assert_eq!(apply_dropout(&img, &zero, &zero, &rng).data, img.data);
        let one = PixelMap { width: 4, height: 4, data: vec![1.0; 16] };
        assert!(apply_dropout(&img, &one, &zero, &rng).data.iter().all(|&z| z == 0.0));
    }

    #[test]
    fn dropout_monotone_in_rho() {
        let img = constant_image(16, 16, 2.0);
        let mut sig = PixelMap::zeros(16, 16);
        for (i, s) in sig.data.iter_mut().enumerate() {
            *s = i as f32;
        }
        let rng = RngStream::new(21, 0, 0, Stage::Dropout);
        let zero = PixelMap::zeros(16, 16);
        let lo = apply_dropout(&img, &sigma_dropout_prob(&sig, &img, 0.2), &zero, &rng);
        let hi = apply_dropout(&img, &sigma_dropout_prob(&sig, &img, 0.6), &zero, &rng);
        for (a, b) in lo.data.iter().zip(&hi.data) {
            // growing rho never un-drops
            assert!(!(*a == 0.0 && *b != 0.0));
        }
    }

    #[test]
    fn corrupt_identity_when_params_are_zero() {
        let img = constant_image(16, 12, 2.0);
        let params = NoiseParams {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            alpha: 0.0,
            rho: 0.0,
            lambda_e: 0.0,
            margin: 0,
            ..NoiseParams::default()
        };
        let out = corrupt(&img, &params, &PipelineToggles::default(), 1, 0, 0).unwrap();
        let clipped = clip_range(&img, params.z_min, params.z_max).unwrap();
        assert_eq!(out.data, clipped.data);
    }

    #[test]
    fn corrupt_is_deterministic() {
        let mut img = constant_image(32, 24, 2.0);
        for y in 0..24 {
            for x in 16..32 {
                img.set(x, y, 3.0);
            }
        }
        let params = NoiseParams { margin: 2, ..NoiseParams::default() };
        let a = corrupt(&img, &params, &PipelineToggles::default(), 7, 1, 3).unwrap();
        let b = corrupt(&img, &params, &PipelineToggles::default(), 7, 1, 3).unwrap();
        assert_eq!(a.data, b.data);
        let c = corrupt(&img, &params, &PipelineToggles::default(), 8, 1, 3).unwrap();
        assert!(a.data != c.data);
    }

    #[test]
    fn corrupt_with_noise_off_is_crop_only() {
        let img = constant_image(32, 24, 2.0);
        let params = NoiseParams { margin: 2, ..NoiseParams::default() };
        let toggles = PipelineToggles { noise_model: false, ..PipelineToggles::default() };
        let out = corrupt(&img, &params, &toggles, 7, 0, 0).unwrap();
        let want = crop_resize(&img, 2, 32, 24).unwrap();
        assert_eq!(out.data, want.data);
    }
}
