//! Short-time singular transform of labeled point-cloud sequences.
//!
//! The sequence is cut into windows of `N_f` frames. Each window becomes a
//! multilayer network with one layer per frame: points in a frame are
//! linked by thresholded Gaussian weights, and a point is linked to the
//! point with the same label in the next frame. The chosen coordinate
//! channel is transformed with the window's singular bases.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{MgspError, Result};
use crate::exec::Exec;
use crate::network::{adjacency, MultilayerNetwork};
use crate::signal::MlnSignal;
use crate::spectral::{hosvd, mgst, TransformMode};
use crate::tensor::Tensor4;

/// One labeled point of a frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub label: i64,
    pub xyz: [f64; 3],
}

pub type Frame = Vec<LabeledPoint>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    X,
    Y,
    Z,
}

impl Channel {
    fn index(self) -> usize {
        match self {
            Channel::X => 0,
            Channel::Y => 1,
            Channel::Z => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StftOptions {
    /// Frames per window (`N_f`).
    pub window: usize,
    /// Frames between window starts; equal to `window` for disjoint windows.
    pub hop: usize,
    /// Squared-distance threshold `τ_s` for intralayer edges.
    pub tau: f64,
    /// Gaussian scale `σ`.
    pub sigma: f64,
    pub channel: Channel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrogram {
    pub window: usize,
    pub hop: usize,
    /// Entity labels in column order.
    pub labels: Vec<i64>,
    pub starts: Vec<usize>,
    /// Joint singular coefficients `W_fᵀ·s·W_e` per window (`N_f × N`).
    pub coefficients: Vec<DMatrix<f64>>,
}

impl Spectrogram {
    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    /// Squared Frobenius norm of each window's coefficients.
    pub fn energies(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm_squared()).collect()
    }

    /// One row per window, coefficients flattened row-major.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.coefficients
            .iter()
            .map(|c| {
                let mut v = Vec::with_capacity(c.len());
                for r in 0..c.nrows() {
                    v.extend(c.row(r).iter());
                }
                v
            })
            .collect()
    }
}

/// `⌊(T − N_f)/hop⌋ + 1`.
pub fn window_count(frames: usize, window: usize, hop: usize) -> usize {
    if window == 0 || hop == 0 || frames < window {
        0
    } else {
        (frames - window) / hop + 1
    }
}

type FrameIndex = BTreeMap<i64, [f64; 3]>;

/// Per-frame lookup `label → coordinates`, over the sorted union of labels.
fn index_frames(frames: &[Frame]) -> Result<(Vec<i64>, Vec<FrameIndex>)> {
    let mut all = BTreeMap::new();
    let mut per = Vec::with_capacity(frames.len());
    for (t, frame) in frames.iter().enumerate() {
        let mut map = BTreeMap::new();
        for p in frame {
            if p.xyz.iter().any(|v| !v.is_finite()) {
                return Err(MgspError::NonFinite(format!("coordinate of label {} in frame {t}", p.label)));
            }
            if map.insert(p.label, p.xyz).is_some() {
                return Err(MgspError::InvalidArgument(format!(
                    "label {} appears twice in frame {t}",
                    p.label
                )));
            }
            all.insert(p.label, ());
        }
        per.push(map);
    }
    Ok((all.into_keys().collect(), per))
}

/// Window network and signal. Points missing from a frame become isolated
/// nodes carrying a zero sample.
fn window_network(
    frames: &[FrameIndex],
    labels: &[i64],
    opts: &StftOptions,
) -> Result<(MultilayerNetwork, MlnSignal)> {
    let (m, n) = (frames.len(), labels.len());
    let mut t = Tensor4::zeros([m, n, m, n]);
    let mut s = DMatrix::zeros(m, n);
    let s2 = opts.sigma * opts.sigma;
    for (a, frame) in frames.iter().enumerate() {
        for (i, li) in labels.iter().enumerate() {
            let Some(xi) = frame.get(li) else { continue };
            s[(a, i)] = xi[opts.channel.index()];
            for (j, lj) in labels.iter().enumerate().skip(i + 1) {
                let Some(xj) = frame.get(lj) else { continue };
                let d2: f64 = xi.iter().zip(xj).map(|(p, q)| (p - q) * (p - q)).sum();
                if d2 <= opts.tau {
                    let w = (-d2 / s2).exp();
                    t.set(a, i, a, j, w);
                    t.set(a, j, a, i, w);
                }
            }
            if a + 1 < m && frames[a + 1].contains_key(li) {
                t.set(a, i, a + 1, i, 1.0);
                t.set(a + 1, i, a, i, 1.0);
            }
        }
    }
    Ok((MultilayerNetwork::from_adjacency(t, false)?, MlnSignal::new(s)?))
}

pub fn short_time_mgst(frames: &[Frame], opts: &StftOptions) -> Result<Spectrogram> {
    short_time_mgst_with(Exec::default(), frames, opts)
}

pub fn short_time_mgst_with(exec: Exec, frames: &[Frame], opts: &StftOptions) -> Result<Spectrogram> {
    if opts.window < 2 {
        return Err(MgspError::InvalidArgument(format!(
            "window must span at least 2 frames, got {}",
            opts.window
        )));
    }
    if opts.hop == 0 {
        return Err(MgspError::InvalidArgument("hop must be positive".into()));
    }
    if opts.window > frames.len() {
        return Err(MgspError::InvalidArgument(format!(
            "window of {} frames exceeds the {}-frame sequence",
            opts.window,
            frames.len()
        )));
    }
    if !(opts.sigma > 0.0) || !opts.tau.is_finite() {
        return Err(MgspError::InvalidArgument("sigma must be positive and tau finite".into()));
    }
    let (labels, indexed) = index_frames(frames)?;
    if labels.is_empty() {
        return Err(MgspError::InvalidArgument("the sequence has no points".into()));
    }
    let count = window_count(frames.len(), opts.window, opts.hop);
    let starts: Vec<usize> = (0..count).map(|w| w * opts.hop).collect();
    let coefficients = exec
        .map_slice(&starts, |&start| -> Result<DMatrix<f64>> {
            let (net, s) = window_network(&indexed[start..start + opts.window], &labels, opts)?;
            let spec = hosvd(&adjacency(&net))?;
            mgst(&spec, &s, TransformMode::Joint)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrogram {
        window: opts.window,
        hop: opts.hop,
        labels,
        starts,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(t: usize, moving: bool) -> Frame {
        (0..4)
            .map(|k| {
                let base = [k as f64, 0.5 * k as f64, 0.1];
                let dz = if moving { 2.0 * ((t as f64) * 1.3 + k as f64).sin() } else { 0.0 };
                LabeledPoint {
                    label: 10 + k as i64,
                    xyz: [base[0], base[1], base[2] + dz],
                }
            })
            .collect()
    }

    fn opts(window: usize, hop: usize) -> StftOptions {
        StftOptions {
            window,
            hop,
            tau: 4.0,
            sigma: 1.0,
            channel: Channel::Z,
        }
    }

    #[test]
    fn static_windows_repeat_exactly() {
        let frames: Vec<Frame> = (0..12).map(|t| frame(t, false)).collect();
        let sg = short_time_mgst(&frames, &opts(3, 3)).unwrap();
        assert_eq!(sg.len(), 4);
        assert_eq!(sg.starts, vec![0, 3, 6, 9]);
        for c in &sg.coefficients[1..] {
            assert!((c - &sg.coefficients[0]).amax() < 1e-10);
        }
        assert_eq!(sg.labels, vec![10, 11, 12, 13]);
    }

    #[test]
    fn window_count_and_single_window() {
        assert_eq!(window_count(10, 3, 2), 4);
        assert_eq!(window_count(10, 10, 7), 1);
        assert_eq!(window_count(2, 3, 1), 0);
        let frames: Vec<Frame> = (0..5).map(|t| frame(t, true)).collect();
        let sg = short_time_mgst(&frames, &opts(5, 99)).unwrap();
        assert_eq!(sg.len(), 1);
        assert!(short_time_mgst(&frames, &opts(6, 1)).is_err());
        assert!(short_time_mgst(&frames, &opts(1, 1)).is_err());
    }

    #[test]
    fn zero_channel_gives_zero_spectrogram() {
        let frames: Vec<Frame> = (0..6)
            .map(|t| {
                frame(t, true)
                    .into_iter()
                    .map(|mut p| {
                        p.xyz[0] = 0.0;
                        p
                    })
                    .collect()
            })
            .collect();
        let o = StftOptions {
            channel: Channel::X,
            ..opts(2, 2)
        };
        let sg = short_time_mgst(&frames, &o).unwrap();
        assert!(sg.energies().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn missing_points_are_padded() {
        let mut frames: Vec<Frame> = (0..4).map(|t| frame(t, true)).collect();
        frames[1].retain(|p| p.label != 12);
        let sg = short_time_mgst(&frames, &opts(2, 1)).unwrap();
        assert_eq!(sg.len(), 3);
        assert_eq!(sg.coefficients[0].shape(), (2, 4));
        // energy is preserved by the orthogonal transform; the missing sample is zero
        let s_energy: f64 = frames[0..2]
            .iter()
            .flat_map(|f| f.iter().map(|p| p.xyz[2] * p.xyz[2]))
            .sum();
        assert!((sg.energies()[0] - s_energy).abs() < 1e-10);

        let mut dup = frames.clone();
        let first = dup[0][0];
        dup[0].push(first);
        assert!(short_time_mgst(&dup, &opts(2, 1)).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let frames: Vec<Frame> = (0..9).map(|t| frame(t, t % 2 == 0)).collect();
        let a = short_time_mgst_with(Exec::Sequential, &frames, &opts(3, 2)).unwrap();
        let b = short_time_mgst_with(Exec::Parallel, &frames, &opts(3, 2)).unwrap();
        assert_eq!(a.rows(), b.rows());
    }
}
