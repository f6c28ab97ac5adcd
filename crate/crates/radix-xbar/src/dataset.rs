//! Deterministic synthetic digit images in the IDX container format.
//!
//! The sandbox ships no image corpus, so experiments draw from a seeded
//! renderer instead: classic 5x7 digit glyphs placed with random offsets,
//! optional stroke dilation, intensity jitter and background speckle.
//! Strokes stay saturated (>= 230) so the brightest activation level is
//! always exercised, and glyph borders get a half-intensity rim so the
//! middle levels appear too.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conv::ImageU8;
use crate::error::Result;

const GLYPHS: [[&str; 7]; 10] = [
    [".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."],
    ["..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."],
    [".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"],
    ["#####", "....#", "...#.", "..##.", "....#", "#...#", ".###."],
    ["...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."],
    ["#####", "#....", "####.", "....#", "....#", "#...#", ".###."],
    ["..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."],
    ["#####", "....#", "...#.", "..#..", "..#..", "..#..", "..#.."],
    [".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."],
    [".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."],
];

fn glyph_mask(digit: u8) -> [[bool; 5]; 7] {
    let rows = GLYPHS[digit as usize];
    let mut mask = [[false; 5]; 7];
    for (y, row) in rows.iter().enumerate() {
        for (x, ch) in row.bytes().enumerate() {
            mask[y][x] = ch == b'#';
        }
    }
    mask
}

struct Canvas {
    pixels: Vec<u8>,
    side: usize,
}

impl Canvas {
    fn new(side: usize) -> Self {
        Self {
            pixels: vec![0; side * side],
            side,
        }
    }

    fn stamp(&mut self, x: usize, y: usize, value: u8) {
        if x < self.side && y < self.side {
            let p = &mut self.pixels[y * self.side + x];
            *p = (*p).max(value);
        }
    }

    fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.side + x]
    }
}

fn render_digit(digit: u8, side: usize, rng: &mut ChaCha8Rng) -> ImageU8 {
    let mask = glyph_mask(digit);
    let mut canvas = Canvas::new(side);
    let stroke: u8 = rng.gen_range(230..=255);

    if side >= 20 {
        // Scale the glyph up 3x, jitter position, sometimes thicken.
        let scale = 3usize;
        let (gw, gh) = (5 * scale, 7 * scale);
        let x0 = rng.gen_range(2..=side - gw - 2);
        let y0 = rng.gen_range(2..=side - gh - 2);
        let dilate = rng.gen_bool(0.5);
        for (gy, row) in mask.iter().enumerate() {
            for (gx, &on) in row.iter().enumerate() {
                if !on {
                    continue;
                }
                for sy in 0..scale {
                    for sx in 0..scale {
                        let px = x0 + gx * scale + sx;
                        let py = y0 + gy * scale + sy;
                        canvas.stamp(px, py, stroke);
                        if dilate {
                            canvas.stamp(px + 1, py, stroke);
                            canvas.stamp(px, py + 1, stroke);
                        }
                    }
                }
            }
        }
    } else {
        // Place the raw 5x7 glyph with a small jitter.
        let x0 = rng.gen_range(0..=side.saturating_sub(5));
        let y0 = rng.gen_range(0..=side.saturating_sub(7));
        for (gy, row) in mask.iter().enumerate() {
            for (gx, &on) in row.iter().enumerate() {
                if on {
                    canvas.stamp(x0 + gx, y0 + gy, stroke);
                }
            }
        }
    }

    // Half-intensity rim around the strokes.
    let rim = (stroke as f64 * 0.45) as u8;
    let mut rimmed = canvas.pixels.clone();
    for y in 0..side {
        for x in 0..side {
            if canvas.get(x, y) > 0 {
                continue;
            }
            let mut near = false;
            for (dx, dy) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let nx = x as i64 + dx;
                let ny = y as i64 + dy;
                if nx >= 0 && ny >= 0 && (nx as usize) < side && (ny as usize) < side {
                    near |= canvas.get(nx as usize, ny as usize) > 0;
                }
            }
            if near {
                rimmed[y * side + x] = rim;
            }
        }
    }

    // Dim background speckle; stays below the first activation level.
    for p in rimmed.iter_mut() {
        if *p == 0 && rng.gen_bool(0.05) {
            *p = rng.gen_range(1..=25);
        }
    }

    ImageU8::new(rimmed, side, side).unwrap()
}

/// Generate `n` labeled digit images of `side x side` pixels. Labels cycle
/// through 0..=9 and the whole set is shuffled, so classes stay balanced.
pub fn synth_digits(n: usize, side: usize, seed: u64) -> (Vec<ImageU8>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u8> = (0..n).map(|i| (i % 10) as u8).collect();
    // Fisher-Yates shuffle.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        labels.swap(i, j);
    }
    let images = labels
        .iter()
        .map(|&d| render_digit(d, side, &mut rng))
        .collect();
    (images, labels)
}

/// Write a generated dataset as an IDX image/label file pair.
pub fn write_idx_pair<P: AsRef<std::path::Path>>(
    images_path: P,
    labels_path: P,
    images: &[ImageU8],
    labels: &[u8],
) -> Result<()> {
    crate::io::idx::write_images_file(images_path, images)?;
    crate::io::idx::write_labels_file(labels_path, labels)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let (a_imgs, a_labels) = synth_digits(50, 28, 7);
        let (b_imgs, b_labels) = synth_digits(50, 28, 7);
        assert_eq!(a_imgs, b_imgs);
        assert_eq!(a_labels, b_labels);
        let (c_imgs, _) = synth_digits(50, 28, 8);
        assert_ne!(a_imgs, c_imgs);
    }

    #[test]
    fn labels_are_balanced() {
        let (_, labels) = synth_digits(200, 8, 1);
        let mut counts = [0usize; 10];
        for &l in &labels {
            counts[l as usize] += 1;
        }
        assert!(counts.iter().all(|&c| c == 20));
    }

    #[test]
    fn large_digits_contain_saturated_strokes() {
        // Every 28x28 digit must carry a 3-wide run of top-level pixels so
        // the brightest read voltage is exercised.
        let (imgs, _) = synth_digits(100, 28, 42);
        for img in &imgs {
            let mut found = false;
            'scan: for y in 0..img.h() {
                for x in 0..img.w() - 2 {
                    if (0..3).all(|d| img.at(y, x + d) >= 230) {
                        found = true;
                        break 'scan;
                    }
                }
            }
            assert!(found);
        }
    }
}
