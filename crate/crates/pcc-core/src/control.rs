//! Per-CU perceptual QP control.
//!
//! For every coding unit the encoder compares the rounded per-channel means
//! of the raw and trial-reconstructed blocks in CIELAB and walks the
//! per-channel QP offsets until the color difference lands in a small band
//! around the just-noticeable threshold. Blue is coarsened first and
//! hardest, red second, green last and least — matching the relative
//! sensitivity of human vision to the three channels.

use crate::color::{
    classify_jncd, delta_e_ab, rgb_to_lab, BandClass, ColorError, JncdBand,
};
use crate::image::{Channel, ImagePlanar, SampleBlock};
use crate::quant::QpState;
use core::fmt;

/// One coding unit's raw samples plus the geometry needed to interpret
/// them: where the CU sits, its padded size, and how much of it is real
/// image content (edge CUs are padded by edge replication; padding is
/// excluded from means but flows through the transform).
#[derive(Debug, Clone)]
pub struct CuView {
    origin: (u32, u32),
    size: usize,
    valid_w: usize,
    valid_h: usize,
    bit_depth: u8,
    /// Raw blocks in G, B, R channel order.
    raw: [SampleBlock; 3],
}

impl CuView {
    /// Extract the CU whose top-left corner is `(x0, y0)`.
    pub fn from_image(image: &ImagePlanar, x0: u32, y0: u32, size: usize) -> Self {
        assert!(x0 < image.width() && y0 < image.height(), "CU origin outside image");
        let raw = [
            image.extract_block(Channel::G, x0, y0, size),
            image.extract_block(Channel::B, x0, y0, size),
            image.extract_block(Channel::R, x0, y0, size),
        ];
        let valid_w = (image.width() - x0).min(size as u32) as usize;
        let valid_h = (image.height() - y0).min(size as u32) as usize;
        Self {
            origin: (x0, y0),
            size,
            valid_w,
            valid_h,
            bit_depth: image.bit_depth(),
            raw,
        }
    }

    pub fn origin(&self) -> (u32, u32) {
        self.origin
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Width of the non-padded region.
    pub fn valid_w(&self) -> usize {
        self.valid_w
    }

    /// Height of the non-padded region.
    pub fn valid_h(&self) -> usize {
        self.valid_h
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    /// Raw blocks in G, B, R order.
    pub fn raw(&self) -> &[SampleBlock; 3] {
        &self.raw
    }

    pub fn raw_channel(&self, ch: Channel) -> &SampleBlock {
        &self.raw[ch.index()]
    }
}

/// Rounded per-channel mean samples of a CU.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeanTriple {
    pub g: u16,
    pub b: u16,
    pub r: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlError<E> {
    /// The valid region of a CU contained no samples.
    EmptyValidRegion,
    /// Initial QP outside [0, 51].
    InvalidQp(u8),
    /// Mean samples could not be converted to CIELAB.
    Color(ColorError),
    /// Trial-reconstruction callback failure.
    Callback(E),
}

impl<E: fmt::Display> fmt::Display for ControlError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControlError::EmptyValidRegion => write!(f, "CU has no valid samples"),
            ControlError::InvalidQp(q) => write!(f, "initial QP {q} outside [0, 51]"),
            ControlError::Color(e) => write!(f, "colorimetry failure: {e}"),
            ControlError::Callback(e) => write!(f, "trial reconstruction failed: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl<E: fmt::Debug + fmt::Display> std::error::Error for ControlError<E> {}

impl<E> From<ColorError> for ControlError<E> {
    fn from(e: ColorError) -> Self {
        ControlError::Color(e)
    }
}

/// Rounded (half-up) arithmetic mean of the valid top-left `w × h` region
/// of each block, in G, B, R order.
pub fn cu_means<E>(
    blocks: &[SampleBlock; 3],
    valid_w: usize,
    valid_h: usize,
) -> Result<MeanTriple, ControlError<E>> {
    let mut means = [0u16; 3];
    for (slot, block) in means.iter_mut().zip(blocks) {
        *slot = block_mean(block, valid_w, valid_h)?;
    }
    Ok(MeanTriple {
        g: means[0],
        b: means[1],
        r: means[2],
    })
}

fn block_mean<E>(
    block: &SampleBlock,
    valid_w: usize,
    valid_h: usize,
) -> Result<u16, ControlError<E>> {
    let n = block.size();
    let w = valid_w.min(n);
    let h = valid_h.min(n);
    let count = (w * h) as u64;
    if count == 0 {
        return Err(ControlError::EmptyValidRegion);
    }
    let mut sum = 0u64;
    for y in 0..h {
        let row = &block.samples()[y * n..y * n + w];
        sum += row.iter().map(|&s| s as u64).sum::<u64>();
    }
    // Round half-up without leaving integer arithmetic:
    // floor((2·sum + count) / (2·count)) == round(sum / count) half-up.
    Ok(((2 * sum + count) / (2 * count)) as u16)
}

/// CIELAB distance between two mean triples interpreted as RGB colors.
pub fn cu_delta_e(
    raw: &MeanTriple,
    recon: &MeanTriple,
    bit_depth: u8,
) -> Result<f64, ColorError> {
    let beta = rgb_to_lab(raw.r, raw.g, raw.b, bit_depth)?;
    let eta = rgb_to_lab(recon.r, recon.g, recon.b, bit_depth)?;
    Ok(delta_e_ab(&beta, &eta))
}

/// Tuning knobs of the QP search.
///
/// The per-pass channel budgets are fixed by the search's definition
/// (B and R move up to six units per pass, G up to three; the decrement
/// schedule mirrors them in reverse order) and are exposed as the
/// `INCREMENT_SCHEDULE` / `DECREMENT_SCHEDULE` constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlConfig {
    pub band: JncdBand,
    /// Upper bound on full schedule passes in one direction. Zero disables
    /// the search entirely (every CU keeps zero offsets).
    pub max_passes: u32,
}

impl ControlConfig {
    pub const DEFAULT_MAX_PASSES: u32 = 4;

    /// Channel order and per-pass budgets when coarsening (ΔE below band).
    pub const INCREMENT_SCHEDULE: [(Channel, u32); 3] =
        [(Channel::B, 6), (Channel::R, 6), (Channel::G, 3)];

    /// Channel order and per-pass budgets when refining (ΔE above band).
    pub const DECREMENT_SCHEDULE: [(Channel, u32); 3] =
        [(Channel::G, 3), (Channel::R, 6), (Channel::B, 6)];
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            band: JncdBand::default(),
            max_passes: Self::DEFAULT_MAX_PASSES,
        }
    }
}

/// Result of the per-CU QP search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuOutcome {
    /// The chosen quantization state.
    pub state: QpState,
    /// ΔE between raw and reconstructed means at that state.
    pub delta_e: f64,
    /// Whether the search landed inside the JNCD band (as opposed to
    /// falling back to the closest visited state).
    pub band_reached: bool,
    /// Number of trial reconstructions performed.
    pub evaluations: u32,
}

/// Run the QP search for one CU. See [`pcc_adjust_observed`] for the full
/// contract; this variant discards the per-evaluation trace.
pub fn pcc_adjust<F, E>(
    cu: &CuView,
    iqp: u8,
    cfg: &ControlConfig,
    recon: F,
) -> Result<CuOutcome, ControlError<E>>
where
    F: FnMut(&QpState) -> Result<[SampleBlock; 3], E>,
{
    pcc_adjust_observed(cu, iqp, cfg, recon, |_, _| {})
}

/// Run the QP search for one CU, reporting every evaluated state.
///
/// Starting from zero offsets at `iqp`, the walk direction follows the
/// initial classification: below the band, offsets are incremented in
/// B → R → G order (six, six and three unit steps per pass); above it,
/// decremented in G → R → B order. ΔE is re-evaluated after **every** unit
/// step, and the first state inside the band is returned immediately. A
/// step that lands on the far side of the band stops the walk (the search
/// never crosses the threshold and keeps going). If the band is never hit
/// — budgets exhausted, every channel pinned at the QP range boundary, or
/// an overshooting step — the visited state with ΔE closest to the
/// threshold on the starting side is returned, preferring the latest
/// visited on ties, and `band_reached` is false.
///
/// `recon` must deterministically produce the trial-reconstructed G, B, R
/// blocks for a quantization state; `observe` receives every evaluated
/// `(state, ΔE)` pair in visit order, the initial state included.
pub fn pcc_adjust_observed<F, E, O>(
    cu: &CuView,
    iqp: u8,
    cfg: &ControlConfig,
    mut recon: F,
    mut observe: O,
) -> Result<CuOutcome, ControlError<E>>
where
    F: FnMut(&QpState) -> Result<[SampleBlock; 3], E>,
    O: FnMut(&QpState, f64),
{
    let raw_means = cu_means(cu.raw(), cu.valid_w, cu.valid_h)?;
    let state = QpState::new(iqp).map_err(|_| ControlError::InvalidQp(iqp))?;
    let mut evaluations = 0u32;
    let mut evaluate = |s: &QpState, evals: &mut u32| -> Result<f64, ControlError<E>> {
        let blocks = recon(s).map_err(ControlError::Callback)?;
        let recon_means = cu_means(&blocks, cu.valid_w, cu.valid_h)?;
        *evals += 1;
        Ok(cu_delta_e(&raw_means, &recon_means, cu.bit_depth)?)
    };

    let delta_e = evaluate(&state, &mut evaluations)?;
    observe(&state, delta_e);
    let dir = match classify_jncd(delta_e, &cfg.band) {
        BandClass::Within => {
            return Ok(CuOutcome {
                state,
                delta_e,
                band_reached: true,
                evaluations,
            })
        }
        BandClass::Below => 1,
        BandClass::Above => -1,
    };
    let schedule = if dir > 0 {
        ControlConfig::INCREMENT_SCHEDULE
    } else {
        ControlConfig::DECREMENT_SCHEDULE
    };

    // Closest-to-threshold fallback; on the starting side "closest" means
    // largest ΔE when ascending and smallest when descending, latest
    // visited winning ties.
    let mut best = (state, delta_e);
    let mut current = state;
    'walk: for _pass in 0..cfg.max_passes {
        let mut moved = false;
        for (ch, budget) in schedule {
            for _ in 0..budget {
                let Some(next) = current.stepped(ch, dir) else {
                    break; // Channel pinned at the QP range boundary.
                };
                current = next;
                moved = true;
                let de = evaluate(&current, &mut evaluations)?;
                observe(&current, de);
                if dir > 0 {
                    debug_assert!(
                        current.off_b() >= current.off_r() && current.off_r() >= current.off_g(),
                        "increment order must keep off_b >= off_r >= off_g"
                    );
                }
                match classify_jncd(de, &cfg.band) {
                    BandClass::Within => {
                        return Ok(CuOutcome {
                            state: current,
                            delta_e: de,
                            band_reached: true,
                            evaluations,
                        })
                    }
                    BandClass::Below if dir > 0 => {
                        if de >= best.1 {
                            best = (current, de);
                        }
                    }
                    BandClass::Above if dir < 0 => {
                        if de <= best.1 {
                            best = (current, de);
                        }
                    }
                    // Landed on the far side of the band: overshoot, stop.
                    _ => break 'walk,
                }
            }
        }
        if !moved {
            break; // Every channel saturated; nothing further can change.
        }
    }

    Ok(CuOutcome {
        state: best.0,
        delta_e: best.1,
        band_reached: false,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::JncdBand;
    use alloc::vec;
    use alloc::vec::Vec;
    use core::convert::Infallible;

    fn gray_cu(size: usize, value: u16) -> CuView {
        let image = ImagePlanar::from_planes(
            size as u32,
            size as u32,
            8,
            [
                vec![value; size * size],
                vec![value; size * size],
                vec![value; size * size],
            ],
        )
        .unwrap();
        CuView::from_image(&image, 0, 0, size)
    }

    fn gray_blocks(size: usize, value: u16) -> [SampleBlock; 3] {
        [
            SampleBlock::constant(size, value),
            SampleBlock::constant(size, value),
            SampleBlock::constant(size, value),
        ]
    }

    /// ΔE between two gray levels at depth 8.
    fn gray_delta(a: u16, b: u16) -> f64 {
        cu_delta_e(
            &MeanTriple { g: a, b: a, r: a },
            &MeanTriple { g: b, b: b, r: b },
            8,
        )
        .unwrap()
    }

    /// First gray level below `from` whose ΔE to `from` falls in the band.
    fn gray_level_in_band(from: u16, band: &JncdBand) -> u16 {
        (0..from)
            .rev()
            .find(|&v| classify_jncd(gray_delta(from, v), band) == BandClass::Within)
            .expect("some gray level must land in the band")
    }

    #[test]
    fn means_of_constant_blocks() {
        let blocks = [
            SampleBlock::constant(8, 100),
            SampleBlock::constant(8, 50),
            SampleBlock::constant(8, 200),
        ];
        let m = cu_means::<Infallible>(&blocks, 8, 8).unwrap();
        assert_eq!(m, MeanTriple { g: 100, b: 50, r: 200 });
    }

    #[test]
    fn mean_rounds_half_up() {
        let mut samples = vec![0u16; 64];
        samples[0] = 10;
        samples[1] = 11;
        let block = SampleBlock::new(8, samples);
        let blocks = [block.clone(), block.clone(), block];
        // Valid region is just the two filled samples: mean 10.5 -> 11.
        let m = cu_means::<Infallible>(&blocks, 2, 1).unwrap();
        assert_eq!(m.g, 11);
    }

    #[test]
    fn empty_valid_region_is_rejected() {
        let blocks = gray_blocks(8, 0);
        assert_eq!(
            cu_means::<Infallible>(&blocks, 0, 3).unwrap_err(),
            ControlError::EmptyValidRegion
        );
    }

    #[test]
    fn mean_matches_float_oracle() {
        // Integer half-up mean must agree with the float computation.
        let mut state = 0x2468_ace0u32;
        let mut next = || {
            state = state.wrapping_mul(1664525).wrapping_add(1013904223);
            (state >> 22) as u16 // 10-bit values
        };
        for _ in 0..50 {
            let samples: Vec<u16> = (0..64).map(|_| next()).collect();
            let block = SampleBlock::new(8, samples.clone());
            for (w, h) in [(8usize, 8usize), (5, 8), (8, 3), (1, 1), (7, 2)] {
                let got = block_mean::<Infallible>(&block, w, h).unwrap();
                let mut sum = 0.0;
                for y in 0..h {
                    for x in 0..w {
                        sum += samples[y * 8 + x] as f64;
                    }
                }
                let expected = (sum / (w * h) as f64 + 0.5).floor() as u16;
                assert_eq!(got, expected, "w={w} h={h}");
            }
        }
    }

    #[test]
    fn delta_e_of_identical_means_is_zero() {
        let m = MeanTriple { g: 12, b: 200, r: 77 };
        assert_eq!(cu_delta_e(&m, &m, 8).unwrap(), 0.0);
    }

    #[test]
    fn delta_e_white_black_is_hundred() {
        let white = MeanTriple { g: 255, b: 255, r: 255 };
        let black = MeanTriple { g: 0, b: 0, r: 0 };
        assert!((cu_delta_e(&white, &black, 8).unwrap() - 100.0).abs() < 1e-9);
    }

    // Expected value computed with an independent float64 reference
    // implementation of the same colorimetry pipeline.
    #[test]
    fn delta_e_matches_reference() {
        let beta = MeanTriple { g: 120, b: 64, r: 200 };
        let eta = MeanTriple { g: 118, b: 66, r: 197 };
        let de = cu_delta_e(&beta, &eta, 8).unwrap();
        assert!((de - 2.2240931948).abs() < 1e-9, "got {de}");
    }

    #[test]
    fn within_at_start_returns_zero_offsets() {
        let band = JncdBand::new(0.3).unwrap();
        let cfg = ControlConfig { band, max_passes: 4 };
        let cu = gray_cu(8, 128);
        let target = gray_level_in_band(128, &band);
        let out = pcc_adjust::<_, Infallible>(&cu, 22, &cfg, |_| Ok(gray_blocks(8, target)))
            .unwrap();
        assert!(out.band_reached);
        assert_eq!(out.evaluations, 1);
        assert_eq!(
            (out.state.off_g(), out.state.off_b(), out.state.off_r()),
            (0, 0, 0)
        );
    }

    #[test]
    fn flat_cu_exhausts_all_budgets() {
        // Reconstruction is sample-exact whatever the QPs: ΔE stays zero,
        // so the walk runs to the end of every pass and the fallback keeps
        // the latest visited state -- maximal offsets.
        let cfg = ControlConfig::default();
        let cu = gray_cu(8, 128);
        let out = pcc_adjust::<_, Infallible>(&cu, 22, &cfg, |_| Ok(gray_blocks(8, 128)))
            .unwrap();
        assert!(!out.band_reached);
        assert_eq!(out.state.off_b(), 24);
        assert_eq!(out.state.off_r(), 24);
        assert_eq!(out.state.off_g(), 12);
        assert_eq!(out.evaluations, 1 + 4 * 15);
        assert_eq!(out.delta_e, 0.0);
    }

    #[test]
    fn ascending_walk_follows_schedule_and_stops_in_band() {
        // ΔE grows with every offset step; the expected stopping state is
        // computed here independently by walking the schedule prefix.
        let band = JncdBand::new(0.3).unwrap();
        let cfg = ControlConfig { band, max_passes: 4 };
        let cu = gray_cu(8, 128);
        let recon_value = |s: &QpState| {
            let steps = (s.off_g() + s.off_b() + s.off_r()) as u16;
            128 - steps
        };
        let mut trace = Vec::new();
        let out = pcc_adjust_observed::<_, Infallible, _>(
            &cu,
            22,
            &cfg,
            |s| Ok(gray_blocks(8, recon_value(s))),
            |s, de| trace.push((*s, de)),
        )
        .unwrap();
        assert!(out.band_reached);

        // Independent straight-line replay: step through B×6, R×6, G×3 per
        // pass until the gray-level ΔE enters the band.
        let mut steps = 0u16;
        'replay: loop {
            for (_, budget) in ControlConfig::INCREMENT_SCHEDULE {
                for _ in 0..budget {
                    steps += 1;
                    if classify_jncd(gray_delta(128, 128 - steps), &band) == BandClass::Within {
                        break 'replay;
                    }
                }
            }
        }
        let total =
            (out.state.off_g() + out.state.off_b() + out.state.off_r()) as u16;
        assert_eq!(total, steps);
        // The walk visited exactly one state per step plus the start.
        assert_eq!(trace.len() as u16, steps + 1);
        // B moves first: the first six steps touch only off_b.
        for (i, (s, _)) in trace.iter().enumerate().take(7).skip(1) {
            assert_eq!(s.off_b(), i as i32);
            assert_eq!(s.off_r(), 0);
            assert_eq!(s.off_g(), 0);
        }
    }

    #[test]
    fn overshoot_stops_the_walk_and_falls_back() {
        // Steps 1 and 2 leave the reconstruction exact; step 3 jumps far
        // past the band. The walk must stop and return the latest visited
        // state on the near side.
        let cfg = ControlConfig::default();
        let cu = gray_cu(8, 128);
        let out = pcc_adjust::<_, Infallible>(&cu, 22, &cfg, |s| {
            let steps = s.off_g() + s.off_b() + s.off_r();
            Ok(gray_blocks(8, if steps >= 3 { 60 } else { 128 }))
        })
        .unwrap();
        assert!(!out.band_reached);
        assert_eq!(
            (out.state.off_g(), out.state.off_b(), out.state.off_r()),
            (0, 2, 0)
        );
        assert_eq!(out.evaluations, 4);
        assert_eq!(out.delta_e, 0.0);
    }

    #[test]
    fn descending_walk_decrements_green_first() {
        // Start far above the band; each G decrement closes most of the
        // gap so the band is reached within G's first budget.
        let band = JncdBand::new(0.3).unwrap();
        let cfg = ControlConfig { band, max_passes: 4 };
        let cu = gray_cu(8, 200);
        let target = gray_level_in_band(200, &band);
        let mut trace = Vec::new();
        let out = pcc_adjust_observed::<_, Infallible, _>(
            &cu,
            30,
            &cfg,
            |s| {
                let v = match -(s.off_g() + s.off_b() + s.off_r()) {
                    0 => 150,      // far above the band
                    1 => 170,      // still above
                    _ => target,   // inside
                };
                Ok(gray_blocks(8, v))
            },
            |s, de| trace.push((*s, de)),
        )
        .unwrap();
        assert!(out.band_reached);
        assert_eq!(
            (out.state.off_g(), out.state.off_b(), out.state.off_r()),
            (-2, 0, 0)
        );
        // Green is the first channel to move on the way down.
        assert_eq!(trace[1].0.off_g(), -1);
        assert_eq!(trace[1].0.off_b(), 0);
        assert_eq!(trace[1].0.off_r(), 0);
    }

    #[test]
    fn descending_fallback_picks_smallest_delta_e_above_band() {
        // ΔE decreases per step but never enters the band before budgets
        // run out; the fallback must return the latest(-smallest) state.
        let band = JncdBand::new(0.1).unwrap();
        let cfg = ControlConfig { band, max_passes: 1 };
        let cu = gray_cu(8, 200);
        let out = pcc_adjust::<_, Infallible>(&cu, 30, &cfg, |s| {
            let d = -(s.off_g() + s.off_b() + s.off_r()) as u16;
            // Gray gap shrinks one level per step but stays well above.
            Ok(gray_blocks(8, 150 + d))
        })
        .unwrap();
        assert!(!out.band_reached);
        // One pass of decrements: G 3, R 6, B 6.
        assert_eq!(
            (out.state.off_g(), out.state.off_b(), out.state.off_r()),
            (-3, -6, -6)
        );
        let final_gap_de = gray_delta(200, 165);
        assert!((out.delta_e - final_gap_de).abs() < 1e-12);
    }

    #[test]
    fn zero_passes_disable_the_search() {
        let cfg = ControlConfig {
            band: JncdBand::default(),
            max_passes: 0,
        };
        let cu = gray_cu(8, 128);
        // ΔE far below the band, but no passes are allowed.
        let out = pcc_adjust::<_, Infallible>(&cu, 22, &cfg, |_| Ok(gray_blocks(8, 128)))
            .unwrap();
        assert!(!out.band_reached);
        assert_eq!(out.evaluations, 1);
        assert_eq!(
            (out.state.off_g(), out.state.off_b(), out.state.off_r()),
            (0, 0, 0)
        );
    }

    #[test]
    fn saturated_channels_end_the_walk_early() {
        // iqp 51: no channel can be incremented at all.
        let cfg = ControlConfig::default();
        let cu = gray_cu(8, 128);
        let out = pcc_adjust::<_, Infallible>(&cu, 51, &cfg, |_| Ok(gray_blocks(8, 128)))
            .unwrap();
        assert!(!out.band_reached);
        assert_eq!(out.evaluations, 1);
        assert_eq!(
            (out.state.off_g(), out.state.off_b(), out.state.off_r()),
            (0, 0, 0)
        );

        // iqp 50: exactly one increment per channel fits under the cap.
        let out = pcc_adjust::<_, Infallible>(&cu, 50, &cfg, |_| Ok(gray_blocks(8, 128)))
            .unwrap();
        assert_eq!(
            (out.state.off_g(), out.state.off_b(), out.state.off_r()),
            (1, 1, 1)
        );
        assert_eq!(out.evaluations, 4);
    }

    #[test]
    fn search_is_deterministic() {
        let cfg = ControlConfig::default();
        let cu = gray_cu(16, 140);
        let callback = |s: &QpState| {
            let steps = (s.off_g() + s.off_b() + s.off_r()).unsigned_abs() as u16;
            Ok(gray_blocks(16, 140u16.saturating_sub(steps / 2)))
        };
        let a = pcc_adjust::<_, Infallible>(&cu, 22, &cfg, callback).unwrap();
        let b = pcc_adjust::<_, Infallible>(&cu, 22, &cfg, callback).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn callback_errors_propagate() {
        let cfg = ControlConfig::default();
        let cu = gray_cu(8, 128);
        let result = pcc_adjust::<_, &'static str>(&cu, 22, &cfg, |_| Err("recon failed"));
        assert_eq!(result.unwrap_err(), ControlError::Callback("recon failed"));
    }

    #[test]
    fn invalid_iqp_is_rejected() {
        let cfg = ControlConfig::default();
        let cu = gray_cu(8, 128);
        let result =
            pcc_adjust::<_, Infallible>(&cu, 52, &cfg, |_| Ok(gray_blocks(8, 128)));
        assert_eq!(result.unwrap_err(), ControlError::InvalidQp(52));
    }
}
