use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::domain::{Partition, StepGraphon};
use crate::error::{Error, Result};

/// Largest cell count accepted by [`cut_norm_exact`].
pub const MAX_EXACT_CELLS: usize = 20;

/// Gray-code steps handled per parallel work unit.
const CHUNK_BITS: u32 = 12;

/// A cut-norm value with the cell sets attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct CutNorm {
    pub value: f64,
    pub s_cells: Vec<usize>,
    pub t_cells: Vec<usize>,
}

/// `M[i,j] = B[i,j] μ_i μ_j`.
fn weighted(w: &StepGraphon) -> DMatrix<f64> {
    let mu = w.partition().measures();
    DMatrix::from_fn(mu.len(), mu.len(), |i, j| w.values()[(i, j)] * mu[i] * mu[j])
}

fn column_sums(m: &DMatrix<f64>, s: &[bool]) -> Vec<f64> {
    let k = m.nrows();
    (0..k)
        .map(|j| (0..k).filter(|&i| s[i]).map(|i| m[(i, j)]).sum())
        .collect()
}

/// Best value over T for fixed column sums; returns (value, positive side).
fn greedy_value(c: &[f64]) -> (f64, bool) {
    let pos: f64 = c.iter().map(|&x| x.max(0.0)).sum();
    let neg: f64 = c.iter().map(|&x| (-x).max(0.0)).sum();
    if pos >= neg {
        (pos, true)
    } else {
        (neg, false)
    }
}

fn result_for(m: &DMatrix<f64>, s: &[bool]) -> CutNorm {
    let c = column_sums(m, s);
    let (value, positive) = greedy_value(&c);
    let t_cells = (0..c.len())
        .filter(|&j| if positive { c[j] > 0.0 } else { c[j] < 0.0 })
        .collect();
    let s_cells = (0..s.len()).filter(|&i| s[i]).collect();
    CutNorm { value, s_cells, t_cells }
}

fn mask_to_set(mask: u32, k: usize) -> Vec<bool> {
    (0..k).map(|i| mask >> i & 1 == 1).collect()
}

/// Prefers the larger value, then the smaller subset encoding.
fn better(a: (f64, u32), b: (f64, u32)) -> (f64, u32) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// `‖W‖_□` of a step graphon by enumerating every union of cells `S`, with
/// the optimal `T` for each `S` chosen column by column.
pub fn cut_norm_exact(w: &StepGraphon) -> Result<CutNorm> {
    let k = w.partition().len();
    if k > MAX_EXACT_CELLS {
        return Err(Error::Budget(format!(
            "{k} cells exceeds the exact limit {MAX_EXACT_CELLS}; use the heuristic"
        )));
    }
    let m = weighted(w);
    let total: u64 = 1 << k;
    let chunk: u64 = 1 << CHUNK_BITS.min(k as u32);
    let chunks = total / chunk;
    let (_, mask) = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let start = ci * chunk;
            let gray = |i: u64| (i ^ (i >> 1)) as u32;
            let mut mask = gray(start);
            let mut c = column_sums(&m, &mask_to_set(mask, k));
            let mut best = (greedy_value(&c).0, mask);
            for i in (start + 1)..(start + chunk) {
                let next = gray(i);
                let bit = (mask ^ next).trailing_zeros() as usize;
                let sign = if next >> bit & 1 == 1 { 1.0 } else { -1.0 };
                for (j, cj) in c.iter_mut().enumerate() {
                    *cj += sign * m[(bit, j)];
                }
                mask = next;
                best = better(best, (greedy_value(&c).0, mask));
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, u32::MAX), better);
    Ok(result_for(&m, &mask_to_set(mask, k)))
}

/// Local search for one sign: alternate best-response updates of `S` and
/// `T`, then single-cell flips of `S` with `T` re-optimized.
fn local_search(m: &DMatrix<f64>, mut s: Vec<bool>, sign: f64) -> f64 {
    let k = s.len();
    let score = |s: &[bool]| -> f64 {
        column_sums(m, s).iter().map(|&x| (sign * x).max(0.0)).sum()
    };
    let mut value = score(&s);
    loop {
        // alternating step: T from S, then S from T
        let c = column_sums(m, &s);
        let t: Vec<bool> = c.iter().map(|&x| sign * x > 0.0).collect();
        let alt: Vec<bool> = (0..k)
            .map(|i| sign * (0..k).filter(|&j| t[j]).map(|j| m[(i, j)]).sum::<f64>() > 0.0)
            .collect();
        let alt_value = score(&alt);
        let mut improved = false;
        if alt_value > value + 1e-15 {
            s = alt;
            value = alt_value;
            improved = true;
        }
        for i in 0..k {
            s[i] = !s[i];
            let v = score(&s);
            if v > value + 1e-15 {
                value = v;
                improved = true;
            } else {
                s[i] = !s[i];
            }
        }
        if !improved {
            return value;
        }
    }
}

/// A lower bound on `‖W‖_□` from randomized local search over cell unions.
pub fn cut_norm_heuristic(w: &StepGraphon, restarts: usize, seed: u64) -> f64 {
    let k = w.partition().len();
    let m = weighted(w);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = vec![vec![true; k]];
    for _ in 0..restarts {
        starts.push((0..k).map(|_| rng.random::<bool>()).collect());
    }
    starts
        .into_iter()
        .flat_map(|s| [local_search(&m, s.clone(), 1.0), local_search(&m, s, -1.0)])
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignMode {
    Exact,
    Heuristic,
}

/// Largest size accepted by [`AlignMode::Exact`].
pub const MAX_EXACT_ALIGN: usize = 8;

fn aligned_diff(a: &DMatrix<f64>, b: &DMatrix<f64>, p: &[usize]) -> DMatrix<f64> {
    // cell i of b moves to p[i]; compare a with the moved copy
    let n = a.nrows();
    let mut d = a.clone();
    for i in 0..n {
        for j in 0..n {
            d[(p[i], p[j])] -= b[(i, j)];
        }
    }
    d
}

/// Upper bound on the cut distance: the smallest `‖a − π(b)‖_□` over cell
/// permutations `π` (all of them in exact mode).
pub fn cut_distance_aligned(a: &StepGraphon, b: &StepGraphon, mode: AlignMode) -> Result<f64> {
    let n = a.partition().len();
    if b.partition().len() != n {
        return Err(Error::Dimension { expected: n, got: b.partition().len() });
    }
    let uniform = Partition::uniform(n)?;
    if !a.partition().same_as(&uniform) || !b.partition().same_as(&uniform) {
        return Err(Error::PartitionMismatch);
    }
    let cut = |d: DMatrix<f64>| -> Result<f64> {
        let g = StepGraphon::new(uniform.clone(), d)?;
        if n <= 12 {
            Ok(cut_norm_exact(&g)?.value)
        } else {
            Ok(cut_norm_heuristic(&g, 16, 0))
        }
    };
    let (av, bv) = (a.values(), b.values());
    match mode {
        AlignMode::Exact => {
            if n > MAX_EXACT_ALIGN {
                return Err(Error::Budget(format!(
                    "exact alignment supports n <= {MAX_EXACT_ALIGN}, got {n}"
                )));
            }
            let mut best = f64::INFINITY;
            let mut p: Vec<usize> = (0..n).collect();
            heap_permutations(&mut p, &mut |p| {
                let v = cut(aligned_diff(av, bv, p))?;
                best = best.min(v);
                Ok(())
            })?;
            Ok(best)
        }
        AlignMode::Heuristic => {
            let order = |m: &DMatrix<f64>| {
                let mut idx: Vec<usize> = (0..n).collect();
                let deg: Vec<f64> = (0..n).map(|i| m.row(i).sum()).collect();
                idx.sort_by(|&x, &y| deg[y].total_cmp(&deg[x]).then(x.cmp(&y)));
                idx
            };
            let (oa, ob) = (order(av), order(bv));
            let mut p = vec![0; n];
            for r in 0..n {
                p[ob[r]] = oa[r];
            }
            let mut best = cut(aligned_diff(av, bv, &p))?;
            loop {
                let mut improved = false;
                for i in 0..n {
                    for j in (i + 1)..n {
                        p.swap(i, j);
                        let v = cut(aligned_diff(av, bv, &p))?;
                        if v < best - 1e-15 {
                            best = v;
                            improved = true;
                        } else {
                            p.swap(i, j);
                        }
                    }
                }
                if !improved {
                    return Ok(best);
                }
            }
        }
    }
}

/// Heap's algorithm, visiting every permutation of `p` in place.
fn heap_permutations(p: &mut [usize], visit: &mut dyn FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let n = p.len();
    let mut c = vec![0usize; n];
    visit(p)?;
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            visit(p)?;
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Permutation;

    /// Oracle: all (S, T) pairs of cell unions.
    fn brute_cut(w: &StepGraphon) -> f64 {
        let m = weighted(w);
        let k = m.nrows();
        let mut best: f64 = 0.0;
        for s in 0u32..(1 << k) {
            for t in 0u32..(1 << k) {
                let mut v = 0.0;
                for i in 0..k {
                    for j in 0..k {
                        if s >> i & 1 == 1 && t >> j & 1 == 1 {
                            v += m[(i, j)];
                        }
                    }
                }
                best = best.max(v.abs());
            }
        }
        best
    }

    fn random_step(k: usize, rng: &mut ChaCha8Rng) -> StepGraphon {
        let mut b = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v: f64 = rng.random_range(-1.0..1.0);
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        StepGraphon::uniform(b).unwrap()
    }

    #[test]
    fn exact_examples() {
        let c = cut_norm_exact(&StepGraphon::constant(-0.4)).unwrap();
        assert!((c.value - 0.4).abs() < 1e-15);
        assert_eq!((c.s_cells.clone(), c.t_cells.clone()), (vec![0], vec![0]));
        let w = StepGraphon::uniform(DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])).unwrap();
        let c = cut_norm_exact(&w).unwrap();
        assert!((c.value - 0.25).abs() < 1e-15);
        assert!((brute_cut(&w) - 0.25).abs() < 1e-15);
        assert_eq!((c.s_cells, c.t_cells), (vec![0], vec![0]));
        let z = StepGraphon::zero(Partition::uniform(5).unwrap());
        assert_eq!(cut_norm_exact(&z).unwrap().value, 0.0);
        let big = StepGraphon::zero(Partition::uniform(21).unwrap());
        assert!(matches!(cut_norm_exact(&big), Err(Error::Budget(_))));
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..=6 {
            let w = random_step(k, &mut rng);
            assert!((cut_norm_exact(&w).unwrap().value - brute_cut(&w)).abs() < 1e-14);
        }
        // non-uniform partition
        let p = Partition::from_breakpoints(vec![0.0, 0.1, 0.45, 1.0]).unwrap();
        let b = random_step(3, &mut rng).values().clone();
        let w = StepGraphon::new(p, b).unwrap();
        assert!((cut_norm_exact(&w).unwrap().value - brute_cut(&w)).abs() < 1e-14);
    }

    #[test]
    fn exact_chunks_agree_with_single_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = random_step(14, &mut rng);
        let c = cut_norm_exact(&w).unwrap();
        let m = weighted(&w);
        let single = (0u32..1 << 14)
            .map(|s| greedy_value(&column_sums(&m, &mask_to_set(s, 14))).0)
            .fold(0.0, f64::max);
        assert!((c.value - single).abs() < 1e-13);
    }

    #[test]
    fn heuristic_examples() {
        assert!((cut_norm_heuristic(&StepGraphon::constant(0.7), 2, 0) - 0.7).abs() < 1e-15);
        let z = StepGraphon::zero(Partition::uniform(6).unwrap());
        assert_eq!(cut_norm_heuristic(&z, 4, 0), 0.0);
    }

    #[test]
    fn heuristic_tracks_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut hits = 0;
        for t in 0..100 {
            let w = random_step(10, &mut rng);
            let exact = cut_norm_exact(&w).unwrap().value;
            let h = cut_norm_heuristic(&w, 8, t);
            assert!(h <= exact + 1e-12);
            if (exact - h).abs() <= 1e-12 {
                hits += 1;
            }
        }
        assert!(hits >= 90, "{hits}");
    }

    #[test]
    fn heap_visits_all() {
        let mut p: Vec<usize> = (0..5).collect();
        let mut seen = std::collections::HashSet::new();
        heap_permutations(&mut p, &mut |p| {
            seen.insert(p.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 120);
    }

    #[test]
    fn aligned_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_step(6, &mut rng);
        assert_eq!(cut_distance_aligned(&a, &a, AlignMode::Exact).unwrap(), 0.0);
        let p = Permutation::new(vec![3, 0, 5, 1, 2, 4]).unwrap();
        let b = a.relabel(&p).unwrap();
        assert!(cut_distance_aligned(&a, &b, AlignMode::Exact).unwrap() < 1e-15);
        let c = random_step(6, &mut rng);
        let exact = cut_distance_aligned(&a, &c, AlignMode::Exact).unwrap();
        let heur = cut_distance_aligned(&a, &c, AlignMode::Heuristic).unwrap();
        let plain = cut_norm_exact(&a.sub(&c).unwrap()).unwrap().value;
        assert!(exact <= heur + 1e-15 && exact <= plain + 1e-15);
        let small = random_step(5, &mut rng);
        assert!(cut_distance_aligned(&a, &small, AlignMode::Exact).is_err());
        let nine = random_step(9, &mut rng);
        assert!(cut_distance_aligned(&nine, &nine, AlignMode::Exact).is_err());
    }
}
