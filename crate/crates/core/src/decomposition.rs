//! The `H · K` expansions of the gap `F(f)`.
//!
//! For `N = 2` and `N = 3` the gap splits into an `f`-dependent positive
//! weight `H^f` evaluated at eigenvalue tuples and an `f`-independent
//! combinatorial coefficient `K` built from eigenframe entries:
//!
//! ```text
//! N = 1:  F = Σ_{ij} m_f̃(λ_i,λ_j) |a_ij|²
//! N = 2:  F = ½ Σ_{ijkl}   H^f(λ_i,λ_j,λ_k,λ_l) K_{ijkl}
//! N = 3:  F = ⅙ Σ_{ijhklm} H^f(λ_i,λ_j,λ_h,λ_k,λ_l,λ_m) K_{ijhklm}
//! ```

use crate::error::{Error, Result};
use crate::matrix::EigenframeMatrix;
use crate::monotone::MonotoneFunction;
use crate::volume::GramSpec;
use crate::RMatrix;

/// Largest state dimension accepted by [`decompose_f`] for `N = 3`; the
/// sextuple sum is `O(n⁶)`.
pub const MAX_DIM_ORDER3: usize = 6;

const S3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
const A3: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];

/// Four-argument weight
/// `½(x+y) m̃(w,z) + ½(w+z) m̃(x,y) − m̃(x,y) m̃(w,z)` with `m̃ = m_f̃`.
pub fn h2(tilde: &MonotoneFunction, x: f64, y: f64, w: f64, z: f64) -> f64 {
    let m1 = tilde.mean(x, y);
    let m2 = tilde.mean(w, z);
    0.5 * (x + y) * m2 + 0.5 * (w + z) * m1 - m1 * m2
}

/// Six-argument weight in product form,
/// `⅛[(x+y)(h+k)(w+z) − Π_{(u,v)} (u−v)² f(0)/m_f(u,v)]`.
pub fn h3(f: &MonotoneFunction, x: f64, y: f64, h: f64, k: f64, w: f64, z: f64) -> f64 {
    let f0 = f.value_at_zero();
    let d = |u: f64, v: f64| {
        let diff = u - v;
        diff * diff * f0 / f.mean(u, v)
    };
    0.125 * ((x + y) * (h + k) * (w + z) - d(x, y) * d(h, k) * d(w, z))
}

/// `H^f` of order 2 (four arguments) or 3 (six arguments). All arguments
/// must be positive and `f` regular.
pub fn h_term(f: &MonotoneFunction, order: usize, args: &[f64]) -> Result<f64> {
    if let Some(bad) = args.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidParameter(format!("H arguments must be positive, got {bad}")));
    }
    match (order, args) {
        (2, &[x, y, w, z]) => Ok(h2(&f.tilde()?, x, y, w, z)),
        (3, &[x, y, h, k, w, z]) => {
            if !f.is_regular() {
                return Err(Error::NonRegular(f.id().to_string()));
            }
            Ok(h3(f, x, y, h, k, w, z))
        }
        (2 | 3, _) => Err(Error::InvalidParameter(format!(
            "order {order} needs {} arguments, got {}",
            2 * order,
            args.len()
        ))),
        _ => Err(Error::UnsupportedOrder(order)),
    }
}

/// `K_{ijkl} = |a_ij|²|b_kl|² + |a_kl|²|b_ij|² − 2 Re{a_ij b_ji} Re{a_kl b_lk}`.
pub fn k2(a: &EigenframeMatrix, b: &EigenframeMatrix, i: usize, j: usize, k: usize, l: usize) -> f64 {
    a.get(i, j).norm_sqr() * b.get(k, l).norm_sqr() + a.get(k, l).norm_sqr() * b.get(i, j).norm_sqr()
        - 2.0 * (a.get(i, j) * b.get(j, i)).re * (a.get(k, l) * b.get(l, k)).re
}

/// The six pairings `Re{p_ij q_ji}` of three eigenframe matrices at one
/// index pair.
#[derive(Debug, Clone, Copy, Default)]
struct PairGram {
    aa: f64,
    bb: f64,
    cc: f64,
    ab: f64,
    ac: f64,
    bc: f64,
}

impl PairGram {
    fn at(a: &EigenframeMatrix, b: &EigenframeMatrix, c: &EigenframeMatrix, i: usize, j: usize) -> Self {
        let (aij, bij, cij) = (a.get(i, j), b.get(i, j), c.get(i, j));
        Self {
            aa: aij.norm_sqr(),
            bb: bij.norm_sqr(),
            cc: cij.norm_sqr(),
            ab: (aij * b.get(j, i)).re,
            ac: (aij * c.get(j, i)).re,
            bc: (bij * c.get(j, i)).re,
        }
    }
}

fn k3_pairs(p: [&PairGram; 3]) -> f64 {
    let mut first = 0.0;
    for s in S3 {
        first += p[s[0]].aa * p[s[1]].bb * p[s[2]].cc + 2.0 * p[s[0]].ac * p[s[1]].ab * p[s[2]].bc;
    }
    let mut mixed = 0.0;
    for s in A3 {
        mixed += p[s[0]].aa * p[s[1]].bc * p[s[2]].bc
            + p[s[0]].bb * p[s[1]].ac * p[s[2]].ac
            + p[s[0]].cc * p[s[1]].ab * p[s[2]].ab;
    }
    first - 2.0 * mixed
}

/// `K_{ijhklm}`: the full permutation sum over `S₃` with the three mixed
/// blocks summed over `A₃`. Pairs are `(i,j)`, `(h,k)`, `(l,m)`.
pub fn k3(a: &EigenframeMatrix, b: &EigenframeMatrix, c: &EigenframeMatrix, idx: [usize; 6]) -> f64 {
    let [i, j, h, k, l, m] = idx;
    let p1 = PairGram::at(a, b, c, i, j);
    let p2 = PairGram::at(a, b, c, h, k);
    let p3 = PairGram::at(a, b, c, l, m);
    k3_pairs([&p1, &p2, &p3])
}

/// `K` of order 2 (two frames, four indices) or 3 (three frames, six
/// indices), with range checks.
pub fn k_term(order: usize, frames: &[&EigenframeMatrix], indices: &[usize]) -> Result<f64> {
    if order != 2 && order != 3 {
        return Err(Error::UnsupportedOrder(order));
    }
    if frames.len() != order || indices.len() != 2 * order {
        return Err(Error::InvalidParameter(format!(
            "order {order} needs {order} frames and {} indices",
            2 * order
        )));
    }
    let dim = frames[0].dim();
    if let Some(f) = frames.iter().find(|f| f.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
    }
    if let Some(&index) = indices.iter().find(|&&v| v >= dim) {
        return Err(Error::IndexOutOfRange { index, dim });
    }
    Ok(match order {
        2 => k2(frames[0], frames[1], indices[0], indices[1], indices[2], indices[3]),
        _ => k3(
            frames[0],
            frames[1],
            frames[2],
            [indices[0], indices[1], indices[2], indices[3], indices[4], indices[5]],
        ),
    })
}

/// `F(f)` through the `H · K` sum, with prefactor 1, ½ or ⅙ for
/// `N = 1, 2, 3`. Needs a faithful state; `N = 3` is capped at
/// [`MAX_DIM_ORDER3`].
pub fn decompose_f(spec: &GramSpec) -> Result<f64> {
    let n_obs = spec.observables().len();
    if !(1..=3).contains(&n_obs) {
        return Err(Error::UnsupportedOrder(n_obs));
    }
    let state = spec.state();
    if !state.is_faithful() {
        return Err(Error::NonFaithful);
    }
    let dim = state.dim();
    if n_obs == 3 && dim > MAX_DIM_ORDER3 {
        return Err(Error::InvalidParameter(format!(
            "order-3 decomposition capped at dimension {MAX_DIM_ORDER3}, got {dim}"
        )));
    }
    let f = spec.function();
    let tilde = f.tilde()?;
    let l = state.eigenvalues();
    let frames = spec
        .observables()
        .iter()
        .map(|a| crate::matrix::to_eigenframe(a, state))
        .collect::<Result<Vec<_>>>()?;

    let mt = RMatrix::from_fn(dim, dim, |h, j| tilde.mean(l[h], l[j]));
    match n_obs {
        1 => {
            let a = &frames[0];
            let mut acc = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    acc += mt[(i, j)] * a.get(i, j).norm_sqr();
                }
            }
            Ok(acc)
        }
        2 => {
            let (a, b) = (&frames[0], &frames[1]);
            let mut acc = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    let (s1, m1) = (0.5 * (l[i] + l[j]), mt[(i, j)]);
                    for k in 0..dim {
                        for q in 0..dim {
                            let (s2, m2) = (0.5 * (l[k] + l[q]), mt[(k, q)]);
                            let h = s1 * m2 + s2 * m1 - m1 * m2;
                            acc += h * k2(a, b, i, j, k, q);
                        }
                    }
                }
            }
            Ok(0.5 * acc)
        }
        _ => {
            let (a, b, c) = (&frames[0], &frames[1], &frames[2]);
            let f0 = f.value_at_zero();
            let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).collect();
            let grams: Vec<PairGram> = pairs.iter().map(|&(i, j)| PairGram::at(a, b, c, i, j)).collect();
            let sum: Vec<f64> = pairs.iter().map(|&(i, j)| l[i] + l[j]).collect();
            let gap: Vec<f64> = pairs
                .iter()
                .map(|&(i, j)| {
                    let d = l[i] - l[j];
                    d * d * f0 / f.mean(l[i], l[j])
                })
                .collect();
            let np = pairs.len();
            let mut acc = 0.0;
            for p in 0..np {
                for q in 0..np {
                    let sp = sum[p] * sum[q];
                    let dp = gap[p] * gap[q];
                    for r in 0..np {
                        let h = 0.125 * (sp * sum[r] - dp * gap[r]);
                        acc += h * k3_pairs([&grams[p], &grams[q], &grams[r]]);
                    }
                }
            }
            Ok(acc / 6.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{to_eigenframe, DensityMatrix, HermitianMatrix};
    use crate::monotone::builtins;
    use crate::random::{sample_density, sample_hermitian, Ensemble, RandomSpec};
    use approx::assert_relative_eq;

    /// The seven-term definition of the six-argument weight.
    fn h3_definition(f: &MonotoneFunction, x: f64, y: f64, h: f64, k: f64, w: f64, z: f64) -> f64 {
        let t = f.tilde().unwrap();
        let (mxy, mhk, mwz) = (t.mean(x, y), t.mean(h, k), t.mean(w, z));
        0.25 * (x + y) * (h + k) * mwz + 0.25 * (w + z) * (x + y) * mhk + 0.25 * (h + k) * (w + z) * mxy
            - 0.5 * (x + y) * mhk * mwz
            - 0.5 * (w + z) * mxy * mhk
            - 0.5 * (h + k) * mwz * mxy
            + mxy * mhk * mwz
    }

    #[test]
    fn h3_product_form_matches_definition() {
        let args = [
            [0.1, 0.4, 0.2, 0.2, 0.7, 0.05],
            [0.9, 0.01, 0.3, 0.6, 0.2, 0.25],
            [1e-4, 0.5, 0.5, 1e-3, 0.33, 0.33],
        ];
        for f in builtins().into_iter().filter(|f| f.is_regular()) {
            for a in args {
                let closed = h3(&f, a[0], a[1], a[2], a[3], a[4], a[5]);
                let def = h3_definition(&f, a[0], a[1], a[2], a[3], a[4], a[5]);
                assert_relative_eq!(closed, def, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn h3_equal_pairs() {
        let f = MonotoneFunction::wy();
        assert_relative_eq!(h_term(&f, 3, &[0.2, 0.2, 0.3, 0.3, 0.5, 0.5]).unwrap(), 0.2 * 0.3 * 0.5, max_relative = 1e-14);
    }

    #[test]
    fn h_term_errors() {
        let f = MonotoneFunction::sld();
        assert!(h_term(&f, 3, &[0.2, 0.0, 0.3, 0.3, 0.5, 0.5]).is_err());
        assert!(h_term(&f, 2, &[0.2, 0.3]).is_err());
        assert!(matches!(h_term(&f, 4, &[0.1; 8]), Err(Error::UnsupportedOrder(4))));
        assert!(h_term(&MonotoneFunction::rld(), 2, &[0.1, 0.2, 0.3, 0.4]).is_err());
    }

    #[test]
    fn k2_with_zero_b() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let a = to_eigenframe(&HermitianMatrix::from_real_rows(3, &[1.0, 2.0, 0.0, 2.0, 0.0, 1.0, 0.0, 1.0, 3.0]).unwrap(), &rho).unwrap();
        let b = to_eigenframe(&HermitianMatrix::identity(3), &rho).unwrap();
        for idx in [[0, 1, 2, 0], [1, 1, 0, 2], [2, 2, 2, 2]] {
            assert_eq!(k_term(2, &[&a, &b], &idx).unwrap(), 0.0);
        }
        assert!(matches!(k_term(2, &[&a, &b], &[0, 3, 0, 0]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn decompose_n1_is_tilde_sum() {
        let rho = sample_density(&RandomSpec::new(5, 3, Ensemble::Density), 0).unwrap();
        let a = sample_hermitian(&RandomSpec::new(5, 3, Ensemble::ComplexHermitian), 0).unwrap();
        let f = MonotoneFunction::wy();
        let spec = GramSpec::new(rho.clone(), vec![a.clone()], f.clone()).unwrap();
        let t = f.tilde().unwrap();
        let fr = to_eigenframe(&a, &rho).unwrap();
        let l = rho.eigenvalues();
        let mut expected = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                expected += t.mean(l[i], l[j]) * fr.get(i, j).norm_sqr();
            }
        }
        assert_eq!(decompose_f(&spec).unwrap(), expected);
    }

    #[test]
    fn decompose_rejects_bad_inputs() {
        let pure = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let sx = HermitianMatrix::pauli_x();
        let spec = GramSpec::new(pure, vec![sx.clone()], MonotoneFunction::sld()).unwrap();
        assert_eq!(decompose_f(&spec), Err(Error::NonFaithful));
        let rho = DensityMatrix::maximally_mixed(2);
        let spec = GramSpec::new(rho, vec![sx.clone(); 4], MonotoneFunction::sld()).unwrap();
        assert_eq!(decompose_f(&spec), Err(Error::UnsupportedOrder(4)));
    }
}
