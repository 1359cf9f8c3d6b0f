//! Brute-force solver for the soft-margin SVM dual on tiny problems, and a
//! fixed suite of 2-to-6-point fixtures. Independent of the crate under test.

#![allow(dead_code, clippy::needless_range_loop)]

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleKernel {
    Linear,
    Rbf(f64),
}

impl OracleKernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            OracleKernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            OracleKernel::Rbf(gamma) => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub points: Vec<Vec<f64>>,
    /// `true` for the positive class.
    pub labels: Vec<bool>,
    pub c: f64,
    pub kernel: OracleKernel,
}

fn signs(labels: &[bool]) -> Vec<f64> {
    labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect()
}

fn gram(points: &[Vec<f64>], kernel: OracleKernel) -> Vec<Vec<f64>> {
    points.iter().map(|a| points.iter().map(|b| kernel.eval(a, b)).collect()).collect()
}

/// `sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij`.
pub fn dual_objective(f: &Fixture, alpha: &[f64]) -> f64 {
    let y = signs(&f.labels);
    let k = gram(&f.points, f.kernel);
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * k[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Maximum of the dual over `0 <= alpha <= C`, `sum y alpha = 0`, found by
/// trying every assignment of points to {at 0, at C, free} and solving the
/// stationarity system on the free set.
pub fn brute_force_dual(f: &Fixture) -> (f64, Vec<f64>) {
    let n = f.points.len();
    let y = signs(&f.labels);
    let k = gram(&f.points, f.kernel);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..3usize.pow(n as u32) {
        // 0 -> alpha = 0, 1 -> alpha = C, 2 -> free
        let state: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut alpha: Vec<f64> = state.iter().map(|&s| if s == 1 { f.c } else { 0.0 }).collect();
        if !free.is_empty() {
            // rows: sum_j Q_ij alpha_j + y_i b = 1 for free i; sum_j y_j alpha_j = 0
            let m = free.len();
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            let mut rhs = vec![0.0; m + 1];
            for (r, &i) in free.iter().enumerate() {
                for (c, &j) in free.iter().enumerate() {
                    a[r][c] = y[i] * y[j] * k[i][j];
                }
                a[r][m] = y[i];
                let fixed: f64 = (0..n).filter(|j| state[*j] == 1).map(|j| y[i] * y[j] * k[i][j] * f.c).sum();
                rhs[r] = 1.0 - fixed;
            }
            for (c, &j) in free.iter().enumerate() {
                a[m][c] = y[j];
            }
            rhs[m] = -(0..n).filter(|j| state[*j] == 1).map(|j| y[j] * f.c).sum::<f64>();
            let Some(sol) = solve(a, rhs) else { continue };
            for (c, &j) in free.iter().enumerate() {
                alpha[j] = sol[c];
            }
        }
        let feasible = alpha.iter().all(|&a| (-1e-9..=f.c + 1e-9).contains(&a))
            && alpha.iter().zip(&y).map(|(a, y)| a * y).sum::<f64>().abs() < 1e-9;
        if !feasible {
            continue;
        }
        let w = dual_objective(f, &alpha);
        if best.as_ref().is_none_or(|(b, _)| w > *b) {
            best = Some((w, alpha));
        }
    }
    best.expect("alpha = 0 is always feasible")
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn uniform(state: &mut u64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * (splitmix(state) >> 11) as f64 / (1u64 << 53) as f64
}

/// Hand-built cases plus seeded random ones; every fixture has both classes.
pub fn fixture_suite() -> Vec<Fixture> {
    let mut out = vec![
        Fixture {
            name: "pair-1d".into(),
            points: vec![vec![1.0], vec![-1.0]],
            labels: vec![true, false],
            c: 10.0,
            kernel: OracleKernel::Linear,
        },
        Fixture {
            name: "xor".into(),
            points: vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]],
            labels: vec![false, false, true, true],
            c: 100.0,
            kernel: OracleKernel::Rbf(1.0),
        },
        Fixture {
            name: "duplicate-conflict".into(),
            points: vec![vec![0.0, 0.0], vec![0.0, 0.0], vec![2.0, 0.0], vec![-2.0, 1.0]],
            labels: vec![true, false, true, false],
            c: 0.5,
            kernel: OracleKernel::Linear,
        },
        Fixture {
            name: "collinear-overlap".into(),
            points: vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0], vec![1.5]],
            labels: vec![false, false, true, true, false],
            c: 1.0,
            kernel: OracleKernel::Linear,
        },
    ];
    let mut state = 20_240_501u64;
    for case in 0..60 {
        let n = 2 + case % 5;
        let dim = 1 + case % 3;
        let mut labels: Vec<bool> = (0..n).map(|_| splitmix(&mut state).is_multiple_of(2)).collect();
        labels[0] = true;
        labels[1] = false;
        let points = (0..n)
            .map(|i| {
                let shift = if labels[i] { 0.7 } else { -0.7 };
                (0..dim).map(|_| uniform(&mut state, -1.5, 1.5) + shift).collect()
            })
            .collect();
        let c = [0.05, 0.3, 1.0, 5.0, 50.0][case % 5];
        let kernel = if case % 2 == 0 {
            OracleKernel::Linear
        } else {
            OracleKernel::Rbf(uniform(&mut state, 0.2, 2.0))
        };
        out.push(Fixture { name: format!("random-{case}"), points, labels, c, kernel });
    }
    out
}
