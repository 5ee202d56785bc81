//! Gray-labeled square QAM alphabets.
//!
//! Point `j` carries the label whose integer value is `j`, most significant
//! bit first. The first half of the label selects the in-phase level and the
//! second half the quadrature level, each through a reflected binary Gray
//! code. Bit value 0 on an axis's leading bit maps to the positive half of that
//! axis.

use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    bits_per_symbol: usize,
    points: Vec<Complex64>,
}

impl Constellation {
    /// Square M-QAM with unit average energy, `M` in {4, 16, 64}.
    pub fn qam(order: usize) -> Result<Self> {
        let bits_per_symbol = match order {
            4 => 2,
            16 => 4,
            64 => 6,
            _ => return Err(Error::UnsupportedOrder(order)),
        };
        let axis_bits = bits_per_symbol / 2;
        let levels = 1usize << axis_bits;
        // amplitude of the level whose Gray label is g
        let mut amp_of_label = vec![0.0; levels];
        for i in 0..levels {
            let gray = i ^ (i >> 1);
            amp_of_label[gray] = (levels - 1) as f64 - 2.0 * i as f64;
        }
        let mut points: Vec<Complex64> = (0..order)
            .map(|j| {
                let li = j >> axis_bits;
                let lq = j & (levels - 1);
                Complex64::new(amp_of_label[li], amp_of_label[lq])
            })
            .collect();
        let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
        let scale = energy.sqrt().recip();
        for p in &mut points {
            *p *= scale;
        }
        Ok(Self {
            order,
            bits_per_symbol,
            points,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    /// Bit `m` (0 = most significant) of the label of point `index`.
    #[inline]
    pub fn label_bit(&self, index: usize, m: usize) -> u8 {
        ((index >> (self.bits_per_symbol - 1 - m)) & 1) as u8
    }

    pub fn label(&self, index: usize) -> Vec<u8> {
        (0..self.bits_per_symbol)
            .map(|m| self.label_bit(index, m))
            .collect()
    }

    /// Index of the point labeled by `bits` (MSB first).
    pub fn index_of(&self, bits: &[u8]) -> usize {
        bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
    }

    /// Smallest distance between two distinct points.
    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        best
    }

    /// Maps a bit string onto symbols, `bits_per_symbol` bits at a time.
    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        if !bits.len().is_multiple_of(self.bits_per_symbol) {
            return Err(Error::LengthNotMultiple {
                len: bits.len(),
                multiple: self.bits_per_symbol,
            });
        }
        Ok(bits
            .chunks_exact(self.bits_per_symbol)
            .map(|label| self.points[self.index_of(label)])
            .collect())
    }

    /// Minimum-distance decision; ties go to the lowest index.
    pub fn demap_hard(&self, y: Complex64) -> (usize, Vec<u8>) {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (j, p) in self.points.iter().enumerate() {
            let d = (y - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        (best, self.label(best))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn energy(c: &Constellation) -> f64 {
        c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.order() as f64
    }

    #[test]
    fn unit_energy_for_all_orders() {
        for m in [4, 16, 64] {
            let c = Constellation::qam(m).unwrap();
            assert!((energy(&c) - 1.0).abs() < 1e-12, "M={m}");
            assert_eq!(c.points().len(), m);
        }
    }

    #[test]
    fn qpsk_geometry() {
        let c = Constellation::qam(4).unwrap();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        for p in c.points() {
            assert!((p.re.abs() - a).abs() < 1e-15);
            assert!((p.im.abs() - a).abs() < 1e-15);
        }
        // label 00 sits in the first quadrant
        assert!(c.point(0).re > 0.0 && c.point(0).im > 0.0);
    }

    #[test]
    fn qam16_grid_scaling() {
        let c = Constellation::qam(16).unwrap();
        let s = 10f64.sqrt();
        let mut amps: Vec<f64> = c.points().iter().map(|p| p.re * s).collect();
        amps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        amps.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let want = [-3.0, -1.0, 1.0, 3.0];
        for (a, w) in amps.iter().zip(want) {
            assert!((a - w).abs() < 1e-12);
        }
    }

    #[test]
    fn unsupported_order() {
        assert!(matches!(Constellation::qam(8), Err(Error::UnsupportedOrder(8))));
        assert!(Constellation::qam(256).is_err());
    }

    #[test]
    fn deterministic_construction() {
        assert_eq!(Constellation::qam(64).unwrap(), Constellation::qam(64).unwrap());
    }

    #[test]
    fn labels_are_a_bijection() {
        for m in [4, 16, 64] {
            let c = Constellation::qam(m).unwrap();
            let mut seen = vec![false; m];
            for j in 0..m {
                let idx = c.index_of(&c.label(j));
                assert!(!seen[idx]);
                seen[idx] = true;
            }
        }
    }

    #[test]
    fn gray_adjacency_exhaustive() {
        for m in [16, 64] {
            let c = Constellation::qam(m).unwrap();
            let step = c.min_distance();
            let mut pairs = 0;
            for i in 0..m {
                for j in 0..m {
                    let d = c.point(i) - c.point(j);
                    let axis_adjacent = ((d.re.abs() - step).abs() < 1e-9 && d.im.abs() < 1e-9)
                        || ((d.im.abs() - step).abs() < 1e-9 && d.re.abs() < 1e-9);
                    if axis_adjacent {
                        pairs += 1;
                        assert_eq!((i ^ j).count_ones(), 1, "M={m} {i} {j}");
                    }
                }
            }
            let side = (m as f64).sqrt() as usize;
            assert_eq!(pairs, 2 * 2 * side * (side - 1));
        }
    }

    #[test]
    fn map_bits_lengths() {
        let c = Constellation::qam(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bits: Vec<u8> = (0..96).map(|_| rng.random_range(0..2)).collect();
        assert_eq!(c.map_bits(&bits).unwrap().len(), 16);
        assert!(matches!(
            c.map_bits(&bits[..95]),
            Err(Error::LengthNotMultiple { len: 95, multiple: 6 })
        ));
        let q = Constellation::qam(4).unwrap();
        assert_eq!(q.map_bits(&[0, 0]).unwrap(), vec![q.point(0)]);
    }

    #[test]
    fn map_demap_round_trip_all_labels() {
        for m in [4, 16, 64] {
            let c = Constellation::qam(m).unwrap();
            for j in 0..m {
                let label = c.label(j);
                let sym = c.map_bits(&label).unwrap()[0];
                assert_eq!(c.demap_hard(sym), (j, label));
            }
        }
    }

    #[test]
    fn demap_tie_goes_to_lower_index() {
        // points mirrored about an axis are exactly equidistant from it
        for m in [4, 16] {
            let c = Constellation::qam(m).unwrap();
            for i in 0..m {
                for j in (i + 1)..m {
                    let (a, b) = (c.point(i), c.point(j));
                    if a.re == b.re && a.im == -b.im && (a.im.abs() - c.min_distance() / 2.0).abs() < 1e-12 {
                        let mid = Complex64::new(a.re, 0.0);
                        assert_eq!(c.demap_hard(mid).0, i, "M={m} {i} {j}");
                    }
                }
            }
        }
        let q = Constellation::qam(4).unwrap();
        assert_eq!(q.demap_hard(Complex64::new(0.0, 0.0)).0, 0);
    }

    #[test]
    fn small_perturbations_demap_to_origin_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in [4, 16, 64] {
            let c = Constellation::qam(m).unwrap();
            let r = 0.5 * c.min_distance() * 0.999;
            for _ in 0..2000 {
                let j = rng.random_range(0..m);
                let rad = r * rng.random::<f64>();
                let ang = std::f64::consts::TAU * rng.random::<f64>();
                let y = c.point(j) + Complex64::from_polar(rad, ang);
                assert_eq!(c.demap_hard(y).0, j);
            }
        }
    }
}
