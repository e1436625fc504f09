//! The bundled desk-evaluation corpus.
//!
//! Twelve deterministic 256x256 8-bit images. The mix leans deliberately
//! smooth — gradients, soft blobs, broad waves — because that is the regime
//! the perceptual mode is designed for: CU means track the content closely,
//! the ΔE walk lands inside or near the band, and the coarser B/R steps
//! remove real coefficient bits without disturbing structure. Channel
//! slopes stay gentle (roughly a quarter sample per pixel or less in B and
//! R) and fine texture rides mostly in G, mirroring where natural images
//! keep their detail. Everything derives from integer arithmetic and the
//! fixed LCG in [`crate::synth`], so the corpus is bit-identical everywhere.

use pcc_core::{Channel, ImagePlanar};

use crate::synth::{box_blur, from_rgb_fn, noise_image, tri};

/// Edge length of every corpus image.
pub const CORPUS_SIZE: u32 = 256;

/// One named corpus entry.
#[derive(Debug, Clone)]
pub struct CorpusImage {
    pub name: &'static str,
    pub image: ImagePlanar,
}

/// Build the full corpus, in its fixed evaluation order.
pub fn desk_corpus() -> Vec<CorpusImage> {
    let n = CORPUS_SIZE;
    vec![
        CorpusImage { name: "amber-field", image: amber_field(n) },
        CorpusImage { name: "blob-meadow", image: blob_meadow(n) },
        CorpusImage { name: "dawn-vignette", image: dawn_vignette(n) },
        CorpusImage { name: "dune-soft", image: dune_soft(n) },
        CorpusImage { name: "haze-plaid", image: haze_plaid(n) },
        CorpusImage { name: "linen-fold", image: linen_fold(n) },
        CorpusImage { name: "mist-veil", image: mist_veil(n) },
        CorpusImage { name: "pond-rings", image: pond_rings(n) },
        CorpusImage { name: "rose-glow", image: rose_glow(n) },
        CorpusImage { name: "sea-bands", image: sea_bands(n) },
        CorpusImage { name: "sky-ramp", image: sky_ramp(n) },
        CorpusImage { name: "slate-wash", image: slate_wash(n) },
    ]
}

/// Very-low-frequency organic field: twice box-blurred noise, re-centered
/// on 128 and contrast-stretched by `numer/denom`. Double blurring pushes
/// all remaining energy well below the window scale, so the field reads as
/// soft cloud-like patches.
fn soft_field(seed: u32, n: u32, numer: i64, denom: i64) -> ImagePlanar {
    let blurred = box_blur(&box_blur(&noise_image(seed, n, n), 8), 8);
    from_rgb_fn(n, n, |x, y| {
        let s = |ch: Channel| {
            let v = blurred.sample(ch, x, y) as i64;
            128 + (v - 128) * numer / denom
        };
        (s(Channel::R), s(Channel::G), s(Channel::B))
    })
}

/// Warm horizontal sweep with a broad band and soft G-plane patches.
fn amber_field(n: u32) -> ImagePlanar {
    let patches = soft_field(0xA3BE6, n, 3, 1);
    from_rgb_fn(n, n, |x, y| {
        let t = x as i64;
        let band = tri(y as i64, 224) / 9;
        let soft = patches.sample(Channel::G, x, y) as i64 - 128;
        (
            140 + t / 6 + band,
            110 + t / 8 + band + soft / 2,
            60 + t / 12 + band / 2,
        )
    })
}

/// Green-dominant meadow: cloud texture in G over gentle cross ramps.
fn blob_meadow(n: u32) -> ImagePlanar {
    let clouds = box_blur(&soft_field(0xB20B2, n, 2, 1), 8);
    from_rgb_fn(n, n, |x, y| {
        let g_soft = clouds.sample(Channel::G, x, y) as i64 - 128;
        let b_soft = clouds.sample(Channel::B, x, y) as i64 - 128;
        (
            80 + x as i64 / 10 + g_soft / 4,
            105 + y as i64 / 8 + g_soft / 2,
            55 + y as i64 / 10 + b_soft / 5,
        )
    })
}

/// Radial dawn sky: warm center fading outward, mild per-channel spread.
fn dawn_vignette(n: u32) -> ImagePlanar {
    let half = (n / 2) as i64;
    from_rgb_fn(n, n, |x, y| {
        let dx = x as i64 - half;
        let dy = y as i64 - (half + 40);
        let fall = 30 * (dx * dx + dy * dy) / (2 * half * half);
        (190 - fall, 150 - fall * 9 / 10, 120 - fall * 7 / 10)
    })
}

/// Long diagonal ridges: broad triangle waves, no grain.
fn dune_soft(n: u32) -> ImagePlanar {
    from_rgb_fn(n, n, |x, y| {
        let t = x as i64 + 2 * y as i64;
        let ridge = tri(t, 288);
        let cross = tri(y as i64 + 64, 320);
        (
            130 + ridge / 9 + cross / 16,
            110 + ridge / 11 + cross / 20,
            80 + ridge / 16 + cross / 24,
        )
    })
}

/// Ultra-soft plaid: half-period over a hundred pixels in each direction.
fn haze_plaid(n: u32) -> ImagePlanar {
    from_rgb_fn(n, n, |x, y| {
        let wx = tri(x as i64, 192);
        let wy = tri(y as i64 + 32, 160);
        (
            120 + wx / 11 + wy / 16,
            105 + wy / 12 + wx / 18,
            95 + wx / 15 + wy / 14,
        )
    })
}

/// Mid-tone cloth with broad diagonal folds and soft mottling.
fn linen_fold(n: u32) -> ImagePlanar {
    let mottle = soft_field(0x1F0E4, n, 1, 1);
    from_rgb_fn(n, n, |x, y| {
        let m = mottle.sample(Channel::G, x, y) as i64 - 128;
        let fold = tri(x as i64 + 3 * y as i64, 352);
        (168 + fold / 12 + m / 3, 172 + fold / 14 + m / 2, 160 + fold / 18 + m / 4)
    })
}

/// Cool fog: soft clouds in all channels over a vertical fade.
fn mist_veil(n: u32) -> ImagePlanar {
    let fog = soft_field(0x317F, n, 2, 1);
    from_rgb_fn(n, n, |x, y| {
        let t = y as i64;
        let f = |ch: Channel| fog.sample(ch, x, y) as i64 - 128;
        (
            100 + t / 9 + f(Channel::R) / 4,
            110 + t / 8 + f(Channel::G) / 3,
            125 + t / 7 + f(Channel::B) / 4,
        )
    })
}

/// Concentric ripples with a long radial period.
fn pond_rings(n: u32) -> ImagePlanar {
    let half = (n / 2) as i64;
    from_rgb_fn(n, n, |x, y| {
        let dx = x as i64 - half;
        let dy = y as i64 - half;
        let radius = int_sqrt(dx * dx + dy * dy);
        let wave = tri(radius, 144);
        (60 + wave / 13, 85 + wave / 11, 110 + wave / 15)
    })
}

/// Two overlapping soft glows on a dim ground.
fn rose_glow(n: u32) -> ImagePlanar {
    let half = (n / 2) as i64;
    from_rgb_fn(n, n, |x, y| {
        let d1x = x as i64 - half + 50;
        let d1y = y as i64 - half + 30;
        let d2x = x as i64 - half - 60;
        let d2y = y as i64 - half - 45;
        let g1 = (22 * 2 * half * half - 22 * (d1x * d1x + d1y * d1y)).max(0) / (2 * half * half);
        let g2 = (17 * 2 * half * half - 17 * (d2x * d2x + d2y * d2y)).max(0) / (2 * half * half);
        (90 + g1 + g2 / 2, 60 + g1 * 7 / 10 + g2 * 4 / 5, 70 + g1 / 3 + g2)
    })
}

/// Horizontal sea-and-sky bands, long periods, cool palette.
fn sea_bands(n: u32) -> ImagePlanar {
    from_rgb_fn(n, n, |x, y| {
        let t = y as i64;
        let b1 = tri(t, 176);
        let b2 = tri(t + 56, 240);
        let drift = x as i64 / 16;
        (
            70 + b1 / 12 + drift / 2,
            95 + b1 / 9 + b2 / 18,
            135 + b2 / 9 + b1 / 16 - drift / 2,
        )
    })
}

/// Broad sky sweep with a soft horizon band.
fn sky_ramp(n: u32) -> ImagePlanar {
    from_rgb_fn(n, n, |x, y| {
        let t = y as i64;
        let horizon = tri(t, 200) / 9;
        let drift = (x as i64 * 12) / n as i64;
        (70 + t / 6 + horizon + drift, 110 + t / 5 + horizon, 170 + t / 8 + horizon - drift)
    })
}

/// Muted near-flat wash: the rate-floor case where per-CU signalling can
/// rival the coefficient savings.
fn slate_wash(n: u32) -> ImagePlanar {
    let blotch = soft_field(0x51A7E, n, 1, 1);
    from_rgb_fn(n, n, |x, y| {
        let m = blotch.sample(Channel::B, x, y) as i64 - 128;
        let wx = tri(x as i64, 512) / 14;
        let wy = tri(y as i64 + 100, 384) / 16;
        (112 + wx + m / 4, 118 + wy + m / 3, 126 + wx / 2 + m / 2)
    })
}

/// Floor integer square root.
fn int_sqrt(v: i64) -> i64 {
    if v < 2 {
        return v.max(0);
    }
    let mut x = (v as f64).sqrt() as i64;
    while (x + 1) * (x + 1) <= v {
        x += 1;
    }
    while x * x > v {
        x -= 1;
    }
    x
}
