//! The fast-growing hierarchy A_k and its slow inverses.
//!
//! A_1(j) = 2j, A_k(1) = 2, A_k(j) = A_{k-1}(A_k(j-1)). The one-argument
//! inverse is alpha(n) = min { k >= 1 : A_k(3) >= n }; the two-argument
//! (Tarjan-style) form is alpha2(m, n) = min { k >= 1 : A_k(4*ceil(m/n)) >
//! log2 n }. Values are exact big integers with a blow-up guard; the
//! inverses treat a blown-up A_k as "large enough".

use num_bigint::BigUint;
use serde::Serialize;

use crate::compress::{leaf_count_exact, BigCount};

/// Exact value or an over-budget marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AckValue {
    Exact(BigUint),
    TooLarge,
}

impl AckValue {
    pub fn display(&self) -> String {
        match self {
            AckValue::Exact(v) => v.to_string(),
            AckValue::TooLarge => "too large".into(),
        }
    }

    fn at_least(&self, n: &BigUint) -> bool {
        match self {
            AckValue::Exact(v) => v >= n,
            AckValue::TooLarge => true,
        }
    }
}

/// Cap on the bit length of intermediate values.
const MAX_BITS: u64 = 1 << 21;

/// A_k(j) for k >= 1, j >= 1.
pub fn ackermann(k: u32, j: &BigUint) -> AckValue {
    let one = BigUint::from(1u32);
    if k == 0 || *j < one {
        return AckValue::TooLarge;
    }
    if k == 1 {
        return AckValue::Exact(j * 2u32);
    }
    if *j == one {
        return AckValue::Exact(BigUint::from(2u32));
    }
    if k == 2 {
        // A_2(j) = 2^j
        return match u64::try_from(j) {
            Ok(e) if e < MAX_BITS => AckValue::Exact(one << (e as usize)),
            _ => AckValue::TooLarge,
        };
    }
    // iterate j upward: A_k(1) = 2, A_k(t) = A_{k-1}(A_k(t-1))
    let steps = match u64::try_from(j) {
        Ok(s) => s,
        Err(_) => return AckValue::TooLarge,
    };
    let mut cur = BigUint::from(2u32);
    for _ in 1..steps {
        match ackermann(k - 1, &cur) {
            AckValue::Exact(v) => {
                if v.bits() > MAX_BITS {
                    return AckValue::TooLarge;
                }
                cur = v;
            }
            AckValue::TooLarge => return AckValue::TooLarge,
        }
    }
    AckValue::Exact(cur)
}

pub fn ackermann_u64(k: u32, j: u64) -> AckValue {
    ackermann(k, &BigUint::from(j))
}

/// min { k >= 1 : A_k(3) >= n }.
pub fn alpha(n: &BigUint) -> u32 {
    let three = BigUint::from(3u32);
    let mut k = 1;
    loop {
        if ackermann(k, &three).at_least(n) {
            return k;
        }
        k += 1;
    }
}

pub fn alpha_u64(n: u64) -> u32 {
    alpha(&BigUint::from(n))
}

/// min { k >= 1 : A_k(4*ceil(m/n)) > log2 n }, for m, n >= 1.
pub fn alpha2(m: u64, n: u64) -> u32 {
    let ratio = m.div_ceil(n).max(1);
    let arg = BigUint::from(4 * ratio);
    let log2n = BigUint::from(64 - n.leading_zeros() as u64 - 1); // floor(log2 n)
    let mut k = 1;
    loop {
        let exceeds = match ackermann(k, &arg) {
            AckValue::Exact(v) => v > log2n,
            AckValue::TooLarge => true,
        };
        if exceeds {
            return k;
        }
        k += 1;
    }
}

/// One row of the growth report for a parameter triple.
#[derive(Debug, Serialize)]
pub struct GrowthRow {
    pub i: u32,
    pub j: u64,
    pub c: u32,
    pub leaves: String,
    pub transcript_len: String,
    pub alphabet: String,
    /// |transcript| / alphabet as a decimal, when representable
    pub ratio: Option<f64>,
    pub alpha_of_alphabet: Option<u32>,
}

/// Exact symbolic growth table over a parameter grid; oversized entries get
/// a marker instead of a number.
pub fn growth_table(grid: &[(u32, u64, u32)]) -> Vec<GrowthRow> {
    grid.iter()
        .map(|&(i, j, c)| {
            match leaf_count_exact(i, j, c) {
                BigCount::Exact(l) => {
                    let two = BigUint::from(2u32);
                    let len = BigUint::from(i as u64) * j * &l + &two * &l - 2u32;
                    let alpha_sz = BigUint::from(j) * &l + &two * &l - 2u32;
                    let ratio = to_f64(&len).zip(to_f64(&alpha_sz)).map(|(a, b)| a / b);
                    GrowthRow {
                        i,
                        j,
                        c,
                        leaves: l.to_string(),
                        transcript_len: len.to_string(),
                        alphabet: alpha_sz.to_string(),
                        ratio,
                        alpha_of_alphabet: Some(alpha(&alpha_sz)),
                    }
                }
                BigCount::TooLarge => GrowthRow {
                    i,
                    j,
                    c,
                    leaves: "too large".into(),
                    transcript_len: "too large".into(),
                    alphabet: "too large".into(),
                    ratio: None,
                    alpha_of_alphabet: None,
                },
            }
        })
        .collect()
}

fn to_f64(v: &BigUint) -> Option<f64> {
    if v.bits() > 1000 {
        return None;
    }
    let s = v.to_string();
    s.parse::<f64>().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(v: AckValue) -> u64 {
        match v {
            AckValue::Exact(b) => u64::try_from(&b).unwrap(),
            AckValue::TooLarge => panic!("too large"),
        }
    }

    #[test]
    fn base_rows() {
        assert_eq!(exact(ackermann_u64(1, 3)), 6);
        assert_eq!(exact(ackermann_u64(2, 3)), 8);
        assert_eq!(exact(ackermann_u64(3, 1)), 2);
    }

    #[test]
    fn second_row_is_powers_of_two() {
        // unrolled recursion A_2(j) = A_1(A_2(j-1)) = 2 A_2(j-1)
        let mut v = 2u64;
        for j in 1..=10u64 {
            assert_eq!(exact(ackermann_u64(2, j)), v);
            v *= 2;
        }
    }

    #[test]
    fn third_row_is_a_tower() {
        assert_eq!(exact(ackermann_u64(3, 2)), 4);
        assert_eq!(exact(ackermann_u64(3, 3)), 16);
        assert_eq!(exact(ackermann_u64(3, 4)), 65536);
        assert_eq!(ackermann_u64(3, 6), AckValue::TooLarge);
    }

    #[test]
    fn fourth_row() {
        assert_eq!(exact(ackermann_u64(4, 2)), 4);
        assert_eq!(exact(ackermann_u64(4, 3)), 65536);
    }

    #[test]
    fn alpha_thresholds() {
        // A_1(3)=6, A_2(3)=8, A_3(3)=16, A_4(3)=65536
        assert_eq!(alpha_u64(1), 1);
        assert_eq!(alpha_u64(6), 1);
        assert_eq!(alpha_u64(7), 2);
        assert_eq!(alpha_u64(8), 2);
        assert_eq!(alpha_u64(9), 3);
        assert_eq!(alpha_u64(16), 3);
        assert_eq!(alpha_u64(17), 4);
        assert_eq!(alpha_u64(65536), 4);
        assert_eq!(alpha_u64(65537), 5);
    }

    #[test]
    fn alpha2_small() {
        // alpha2 is tiny for any desk-scale arguments
        assert!(alpha2(30, 22) <= 3);
        assert!(alpha2(1 << 20, 10) <= 4);
    }

    #[test]
    fn ratio_grows_with_depth() {
        let rows = growth_table(&[(1, 1, 1), (2, 1, 1), (3, 1, 1)]);
        let ratios: Vec<f64> = rows.iter().map(|r| r.ratio.unwrap()).collect();
        assert!(ratios[0] < ratios[1] && ratios[1] < ratios[2], "{ratios:?}");
    }

    #[test]
    fn oversized_rows_get_markers() {
        let rows = growth_table(&[(2, 2, 2), (3, 2, 1)]);
        assert_eq!(rows[0].leaves, (BigUint::from(64u32) << 64u32).to_string());
        assert_eq!(rows[1].leaves, "too large");
    }
}
