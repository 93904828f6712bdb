//! Boolean functions f: {0,1}^n_x × {0,1}^n_y → {0,1} as truth tables, their
//! combinators, and the XOR-of-ANDs rank factorization over GF(2).

use serde::{Deserialize, Serialize};

use crate::error::{QError, QResult};
use crate::linalg::CMatrix;

/// Truth table stored as one row bitmap per x value; bit y of `rows[x]` is
/// f(x, y).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub n_x: usize,
    pub n_y: usize,
    rows: Vec<u64>,
}

impl TruthTable {
    pub fn from_fn(n_x: usize, n_y: usize, f: impl Fn(u64, u64) -> bool) -> QResult<Self> {
        if n_x > 6 || n_y > 6 {
            return Err(QError::InvalidArgument(
                "truth tables support at most 6 input bits per side".into(),
            ));
        }
        let rows = (0..1u64 << n_x)
            .map(|x| {
                let mut row = 0u64;
                for y in 0..1u64 << n_y {
                    if f(x, y) {
                        row |= 1 << y;
                    }
                }
                row
            })
            .collect();
        Ok(TruthTable { n_x, n_y, rows })
    }

    pub fn from_rows(n_x: usize, n_y: usize, rows: Vec<u64>) -> QResult<Self> {
        if rows.len() != 1 << n_x {
            return Err(QError::InvalidArgument(format!(
                "expected {} rows, got {}",
                1 << n_x,
                rows.len()
            )));
        }
        let mask = if n_y == 64 { u64::MAX } else { (1u64 << (1 << n_y)) - 1 };
        let _ = mask;
        for &r in &rows {
            if n_y < 6 && r >= 1u64 << (1 << n_y) {
                return Err(QError::InvalidArgument(
                    "row bitmap has bits beyond 2^n_y".into(),
                ));
            }
        }
        Ok(TruthTable { n_x, n_y, rows })
    }

    pub fn x_values(&self) -> u64 {
        1 << self.n_x
    }

    pub fn y_values(&self) -> u64 {
        1 << self.n_y
    }

    pub fn evaluate(&self, x: u64, y: u64) -> QResult<bool> {
        if x >= self.x_values() || y >= self.y_values() {
            return Err(QError::InvalidArgument(format!(
                "input ({x}, {y}) out of range for widths ({}, {})",
                self.n_x, self.n_y
            )));
        }
        Ok((self.rows[x as usize] >> y) & 1 == 1)
    }

    pub fn eval(&self, x: u64, y: u64) -> bool {
        self.evaluate(x, y).expect("inputs in range")
    }

    /// All (x, y) pairs, with the function value.
    pub fn inputs(&self) -> impl Iterator<Item = (u64, u64, bool)> + '_ {
        (0..self.x_values()).flat_map(move |x| {
            (0..self.y_values()).map(move |y| (x, y, self.eval(x, y)))
        })
    }

    pub fn is_constant(&self) -> Option<bool> {
        let first = self.eval(0, 0);
        for (_, _, v) in self.inputs() {
            if v != first {
                return None;
            }
        }
        Some(first)
    }

    /// Hex-packed row bitmaps, one string per row.
    pub fn to_hex_rows(&self) -> Vec<String> {
        self.rows.iter().map(|r| format!("{r:x}")).collect()
    }

    pub fn from_hex_rows(n_x: usize, n_y: usize, rows: &[String]) -> QResult<Self> {
        let parsed: Result<Vec<u64>, _> = rows.iter().map(|s| u64::from_str_radix(s, 16)).collect();
        let parsed =
            parsed.map_err(|e| QError::InvalidArgument(format!("bad hex row: {e}")))?;
        TruthTable::from_rows(n_x, n_y, parsed)
    }
}

/// How `combine` merges tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    Xor,
    And,
    NotF,
    /// Appends a fresh single-bit input z and returns f ∧ z. The new bit is
    /// the least-significant bit of the chosen side's input.
    ExtendAndBit,
}

/// Side that receives the appended z bit in `ExtendAndBit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Alice,
    Bob,
}

pub fn combine(f: &TruthTable, g: Option<&TruthTable>, mode: CombineMode, side: Side) -> QResult<TruthTable> {
    match mode {
        CombineMode::Xor | CombineMode::And => {
            let g = g.ok_or_else(|| {
                QError::InvalidArgument("binary combine mode needs a second table".into())
            })?;
            if f.n_x != g.n_x || f.n_y != g.n_y {
                return Err(QError::DimensionMismatch(
                    "combine requires matching input widths".into(),
                ));
            }
            TruthTable::from_fn(f.n_x, f.n_y, |x, y| match mode {
                CombineMode::Xor => f.eval(x, y) ^ g.eval(x, y),
                CombineMode::And => f.eval(x, y) & g.eval(x, y),
                _ => unreachable!(),
            })
        }
        CombineMode::NotF => TruthTable::from_fn(f.n_x, f.n_y, |x, y| !f.eval(x, y)),
        CombineMode::ExtendAndBit => match side {
            Side::Bob => TruthTable::from_fn(f.n_x, f.n_y + 1, |x, yz| {
                let z = yz & 1;
                let y = yz >> 1;
                f.eval(x, y) && z == 1
            }),
            Side::Alice => TruthTable::from_fn(f.n_x + 1, f.n_y, |xz, y| {
                let z = xz & 1;
                let x = xz >> 1;
                f.eval(x, y) && z == 1
            }),
        },
    }
}

/// XOR-of-ANDs factorization: f(x,y) = ⊕_i h_i(x) ∧ h'_i(y) with m minimal
/// (the GF(2) rank of the truth-table matrix). Each h is stored as a bitmask
/// over that side's input values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDecomposition {
    pub m: usize,
    pub h: Vec<u64>,
    pub h_prime: Vec<u64>,
    pub n_x: usize,
    pub n_y: usize,
}

impl RankDecomposition {
    pub fn h_eval(&self, i: usize, x: u64) -> bool {
        (self.h[i] >> x) & 1 == 1
    }

    pub fn h_prime_eval(&self, i: usize, y: u64) -> bool {
        (self.h_prime[i] >> y) & 1 == 1
    }

    /// Rebuilds the table from the factors.
    pub fn reconstruct(&self) -> QResult<TruthTable> {
        TruthTable::from_fn(self.n_x, self.n_y, |x, y| {
            let mut acc = false;
            for i in 0..self.m {
                acc ^= self.h_eval(i, x) && self.h_prime_eval(i, y);
            }
            acc
        })
    }
}

/// Rank-one peeling over GF(2): repeatedly subtract (xor) the outer product
/// of a pivot row and pivot column. The number of peeled terms equals the
/// GF(2) rank, which is the minimal m.
pub fn gf2_rank_decompose(f: &TruthTable) -> RankDecomposition {
    let mut residual = f.rows.clone();
    let mut h = Vec::new();
    let mut h_prime = Vec::new();
    loop {
        let pivot_row = match residual.iter().position(|&r| r != 0) {
            Some(p) => p,
            None => break,
        };
        let b = residual[pivot_row];
        let pivot_col = b.trailing_zeros() as u64;
        let mut a = 0u64;
        for (x, &r) in residual.iter().enumerate() {
            if (r >> pivot_col) & 1 == 1 {
                a |= 1 << x;
            }
        }
        for (x, r) in residual.iter_mut().enumerate() {
            if (a >> x) & 1 == 1 {
                *r ^= b;
            }
        }
        h.push(a);
        h_prime.push(b);
    }
    RankDecomposition {
        m: h.len(),
        h,
        h_prime,
        n_x: f.n_x,
        n_y: f.n_y,
    }
}

/// Rank of the 0/1 truth-table matrix over the rationals, by fraction-free
/// Gaussian elimination in exact integer arithmetic.
pub fn real_rank(f: &TruthTable) -> usize {
    let rows = f.x_values() as usize;
    let cols = f.y_values() as usize;
    let mut m = vec![vec![0i128; cols]; rows];
    for x in 0..rows {
        for y in 0..cols {
            m[x][y] = f.eval(x as u64, y as u64) as i128;
        }
    }
    let mut rank = 0;
    let mut prev_pivot: i128 = 1;
    let mut row = 0;
    for col in 0..cols {
        let pivot_row = (row..rows).find(|&r| m[r][col] != 0);
        let pr = match pivot_row {
            Some(p) => p,
            None => continue,
        };
        m.swap(row, pr);
        let pivot = m[row][col];
        for r in row + 1..rows {
            for c in col + 1..cols {
                m[r][c] = (m[r][c] * pivot - m[r][col] * m[row][c]) / prev_pivot;
            }
            m[r][col] = 0;
        }
        prev_pivot = pivot;
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// JSON function spec: explicit table or a named builtin.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Named(String),
    Table {
        n_x: usize,
        n_y: usize,
        rows: Vec<String>,
    },
}

pub const BUILTIN_NAMES: [&str; 7] = ["and", "xor", "eq", "ip2", "const0", "const1", "maj3"];

pub fn builtin(name: &str) -> QResult<TruthTable> {
    match name {
        "and" => TruthTable::from_fn(1, 1, |x, y| x == 1 && y == 1),
        "xor" => TruthTable::from_fn(1, 1, |x, y| x ^ y == 1),
        "eq" => TruthTable::from_fn(1, 1, |x, y| x == y),
        "ip2" => TruthTable::from_fn(2, 2, |x, y| (x & y).count_ones() % 2 == 1),
        "const0" => TruthTable::from_fn(1, 1, |_, _| false),
        "const1" => TruthTable::from_fn(1, 1, |_, _| true),
        "maj3" => TruthTable::from_fn(2, 1, |x, y| {
            let bits = (x & 1) + ((x >> 1) & 1) + (y & 1);
            bits >= 2
        }),
        _ => Err(QError::InvalidArgument(format!(
            "unknown builtin `{name}`; known: {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

impl FunctionSpec {
    pub fn resolve(&self) -> QResult<TruthTable> {
        match self {
            FunctionSpec::Named(name) => builtin(name),
            FunctionSpec::Table { n_x, n_y, rows } => TruthTable::from_hex_rows(*n_x, *n_y, rows),
        }
    }

    pub fn of_table(t: &TruthTable) -> FunctionSpec {
        FunctionSpec::Table {
            n_x: t.n_x,
            n_y: t.n_y,
            rows: t.to_hex_rows(),
        }
    }
}

/// All sixteen single-bit-per-side functions.
pub fn all_n1_functions() -> Vec<TruthTable> {
    (0..16u64)
        .map(|code| {
            TruthTable::from_fn(1, 1, |x, y| (code >> (x * 2 + y)) & 1 == 1).unwrap()
        })
        .collect()
}

/// Truth-table matrix as a complex 0/1 matrix (rows = x, cols = y).
pub fn table_matrix(f: &TruthTable) -> CMatrix {
    CMatrix::from_fn(f.x_values() as usize, f.y_values() as usize, |x, y| {
        crate::linalg::cf(if f.eval(x as u64, y as u64) { 1.0 } else { 0.0 })
    })
}

/// Brute-force minimal m: the smallest subset of table columns whose GF(2)
/// span contains every column. Spans of column subsets exhaust all candidate
/// factor sets, so this is an exhaustive search over decompositions.
pub fn brute_force_min_terms(f: &TruthTable, max_m: usize) -> Option<usize> {
    let cols: Vec<u64> = (0..f.y_values())
        .map(|y| {
            let mut c = 0u64;
            for x in 0..f.x_values() {
                if f.eval(x, y) {
                    c |= 1 << x;
                }
            }
            c
        })
        .collect();
    let distinct: Vec<u64> = {
        let mut d: Vec<u64> = cols.iter().copied().filter(|&c| c != 0).collect();
        d.sort_unstable();
        d.dedup();
        d
    };
    let spans_all = |basis: &[u64]| -> bool {
        cols.iter().all(|&c| {
            (0..1usize << basis.len()).any(|mask| {
                let mut acc = 0u64;
                for (i, &b) in basis.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        acc ^= b;
                    }
                }
                acc == c
            })
        })
    };
    for m in 0..=max_m {
        let mut chosen = vec![0usize; m];
        // enumerate m-subsets of distinct columns
        fn rec(
            distinct: &[u64],
            chosen: &mut Vec<usize>,
            depth: usize,
            start: usize,
            spans_all: &dyn Fn(&[u64]) -> bool,
        ) -> bool {
            if depth == chosen.len() {
                let basis: Vec<u64> = chosen.iter().map(|&i| distinct[i]).collect();
                return spans_all(&basis);
            }
            for i in start..distinct.len() {
                chosen[depth] = i;
                if rec(distinct, chosen, depth + 1, i + 1, spans_all) {
                    return true;
                }
            }
            false
        }
        if m > distinct.len() {
            if spans_all(&distinct) {
                return Some(distinct.len());
            }
            continue;
        }
        if rec(&distinct, &mut chosen, 0, 0, &spans_all) {
            return Some(m);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_and() {
        let f = builtin("and").unwrap();
        assert!(f.eval(1, 1));
        assert!(!f.eval(0, 1));
    }

    #[test]
    fn evaluate_ip2() {
        // inner product n=2 at (x=11, y=11) → 0
        let f = builtin("ip2").unwrap();
        assert!(!f.eval(0b11, 0b11));
        assert!(f.eval(0b01, 0b01));
    }

    #[test]
    fn out_of_range_is_reported() {
        let f = builtin("and").unwrap();
        assert!(f.evaluate(2, 0).is_err());
    }

    #[test]
    fn combine_xor_self_is_constant_zero() {
        let f = builtin("and").unwrap();
        let z = combine(&f, Some(&f), CombineMode::Xor, Side::Bob).unwrap();
        assert_eq!(z.is_constant(), Some(false));
    }

    #[test]
    fn combine_not() {
        let f = builtin("and").unwrap();
        let g = combine(&f, None, CombineMode::NotF, Side::Bob).unwrap();
        assert!(!g.eval(1, 1));
        assert!(g.eval(0, 1));
    }

    #[test]
    fn extend_and_bit_appends_z() {
        // f(x, (y,z)) = and(x,y) ∧ z with z the low bit of Bob's input
        let f = builtin("and").unwrap();
        let g = combine(&f, None, CombineMode::ExtendAndBit, Side::Bob).unwrap();
        assert_eq!(g.n_y, 2);
        // x=1, y=1, z=0 → 0
        assert!(!g.eval(1, 0b10));
        // x=1, y=1, z=1 → 1
        assert!(g.eval(1, 0b11));
    }

    #[test]
    fn rank_of_and_is_one() {
        let d = gf2_rank_decompose(&builtin("and").unwrap());
        assert_eq!(d.m, 1);
        assert_eq!(d.reconstruct().unwrap(), builtin("and").unwrap());
    }

    #[test]
    fn rank_of_xor_is_two() {
        let f = builtin("xor").unwrap();
        let d = gf2_rank_decompose(&f);
        assert_eq!(d.m, 2);
        assert_eq!(brute_force_min_terms(&f, 2), Some(2));
        assert_eq!(d.reconstruct().unwrap(), f);
    }

    #[test]
    fn rank_of_eq_is_two() {
        // identity matrix over GF(2)
        let f = builtin("eq").unwrap();
        assert_eq!(gf2_rank_decompose(&f).m, 2);
    }

    #[test]
    fn decomposition_matches_brute_force_for_all_n1() {
        for f in all_n1_functions() {
            let d = gf2_rank_decompose(&f);
            assert_eq!(d.reconstruct().unwrap(), f);
            assert_eq!(brute_force_min_terms(&f, 2), Some(d.m));
        }
    }

    #[test]
    fn decomposition_round_trips_on_random_tables() {
        for n in [2usize, 3] {
            for trial in 0..200u64 {
                let mut rng = crate::rng::stream(60 + n as u64, trial);
                use rand::Rng;
                let f = TruthTable::from_fn(n, n, |_, _| rng.gen_bool(0.5)).unwrap();
                let d = gf2_rank_decompose(&f);
                assert_eq!(d.reconstruct().unwrap(), f, "round trip failed at n={n}");
            }
        }
    }

    #[test]
    fn real_rank_examples() {
        let const1 = builtin("const1").unwrap();
        assert_eq!(real_rank(&const1), 1);
        assert_eq!(real_rank(&builtin("eq").unwrap()), 2);
    }

    #[test]
    fn real_rank_matches_svd_on_random_tables() {
        for trial in 0..50u64 {
            let mut rng = crate::rng::stream(88, trial);
            use rand::Rng;
            let f = TruthTable::from_fn(2, 2, |_, _| rng.gen_bool(0.5)).unwrap();
            let exact = real_rank(&f);
            let svd_rank = crate::linalg::singular_values(&table_matrix(&f))
                .iter()
                .filter(|&&s| s > 1e-9)
                .count();
            assert_eq!(exact, svd_rank);
        }
    }

    #[test]
    fn hex_round_trip() {
        let f = builtin("ip2").unwrap();
        let rows = f.to_hex_rows();
        let g = TruthTable::from_hex_rows(2, 2, &rows).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn spec_parsing() {
        let spec: FunctionSpec = serde_json::from_str("\"and\"").unwrap();
        assert_eq!(spec.resolve().unwrap(), builtin("and").unwrap());
        let spec: FunctionSpec =
            serde_json::from_str(r#"{"n_x":1,"n_y":1,"rows":["0","2"]}"#).unwrap();
        let t = spec.resolve().unwrap();
        assert!(t.eval(1, 1));
        assert!(!t.eval(0, 0));
    }
}
