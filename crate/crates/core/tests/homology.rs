use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lietaut::homology::{injectivity_defects, kuiper_scan, kuiper_scan_exhaustive, sublevel, SimplicialComplex};

/// Dense GF(2) rank by row reduction.
fn dense_rank(mut rows: Vec<Vec<u8>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] == 1 {
                let pivot = rows[rank].clone();
                rows[r].iter_mut().zip(pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

/// Boundary matrix rows indexed by faces, built from the raw simplex lists.
fn boundary(faces: &[Vec<usize>], cells: &[Vec<usize>]) -> Vec<Vec<u8>> {
    let mut m = vec![vec![0u8; cells.len()]; faces.len()];
    for (j, c) in cells.iter().enumerate() {
        for skip in 0..c.len() {
            let f: Vec<usize> = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            let i = faces.iter().position(|g| *g == f).unwrap();
            m[i][j] = 1;
        }
    }
    m
}

fn oracle_betti(k: &SimplicialComplex) -> Vec<usize> {
    let lists: Vec<Vec<Vec<usize>>> = (0..=2).map(|d| k.simplices(d).to_vec()).collect();
    let rank = |d: usize| -> usize {
        if d == 0 || d > 2 || lists[d].is_empty() || lists[d - 1].is_empty() {
            0
        } else {
            dense_rank(boundary(&lists[d - 1], &lists[d]))
        }
    };
    (0..=2).map(|d| lists[d].len() - rank(d) - rank(d + 1)).collect()
}

fn random_complex(rng: &mut ChaCha8Rng, nv: usize) -> SimplicialComplex {
    let mut tops = Vec::new();
    for a in 0..nv {
        tops.push(vec![a]);
        for b in a + 1..nv {
            if rng.random_bool(0.4) {
                tops.push(vec![a, b]);
            }
            for c in b + 1..nv {
                if rng.random_bool(0.15) {
                    tops.push(vec![a, b, c]);
                }
            }
        }
    }
    SimplicialComplex::from_top_simplices(nv, &tops).unwrap()
}

#[test]
fn betti_numbers_match_dense_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let k = random_complex(&mut rng, 7);
        let mut got = k.betti_numbers();
        got.resize(3, 0);
        assert_eq!(got, oracle_betti(&k));
    }
}

#[test]
fn euler_characteristic_is_alternating_betti_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let k = random_complex(&mut rng, 8);
        let alt: i64 = k.betti_numbers().iter().enumerate().map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        assert_eq!(alt, k.euler_characteristic());
    }
}

#[test]
fn sublevel_filtration_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let k = random_complex(&mut rng, 9);
    let values: Vec<f64> = (0..9).map(|_| rng.random()).collect();
    let mut levels: Vec<f64> = values.clone();
    levels.sort_by(f64::total_cmp);
    for w in levels.windows(2) {
        let low = sublevel(&k, &values, w[0]).unwrap();
        let high = sublevel(&k, &values, w[1]).unwrap();
        assert!(low.is_subcomplex_of(&high));
    }
}

/// dim ker(H_d(S) → H_d(K)) by dense ranks: cycles of S that bound in K.
fn oracle_defects(k: &SimplicialComplex, mask: &[bool]) -> Vec<usize> {
    let inside = |s: &Vec<usize>| s.iter().all(|&v| mask[v]);
    let full: Vec<Vec<Vec<usize>>> = (0..=2).map(|d| k.simplices(d).to_vec()).collect();
    let sub: Vec<Vec<Vec<usize>>> = full.iter().map(|l| l.iter().filter(|s| inside(s)).cloned().collect()).collect();
    let mut out = Vec::new();
    for d in 0..=2 {
        if sub[d].is_empty() {
            out.push(0);
            continue;
        }
        // cycles of S written in the full d-simplex basis
        let cycles: Vec<Vec<u8>> = if d == 0 {
            sub[0].iter().map(|s| full[0].iter().map(|t| (t == s) as u8).collect()).collect()
        } else {
            let b = boundary(&full[d - 1], &sub[d]);
            let n = sub[d].len();
            // brute-force kernel basis over GF(2) for small n
            let mut basis: Vec<Vec<u8>> = Vec::new();
            for mask_bits in 1u64..(1 << n.min(16)) {
                let combo: Vec<u8> = (0..n).map(|j| ((mask_bits >> j) & 1) as u8).collect();
                let zero = b.iter().all(|row| row.iter().zip(&combo).map(|(a, c)| a & c).fold(0, |x, y| x ^ y) == 0);
                if zero {
                    let mut cand = basis.clone();
                    cand.push(combo.clone());
                    if dense_rank(cand) > basis.len() {
                        basis.push(combo);
                    }
                }
            }
            basis
                .iter()
                .map(|c| {
                    full[d]
                        .iter()
                        .map(|t| sub[d].iter().position(|s| s == t).map_or(0, |j| c[j]))
                        .collect()
                })
                .collect()
        };
        let bounds_k: Vec<Vec<u8>> = if d + 1 <= 2 && !full[d + 1].is_empty() {
            let m = boundary(&full[d], &full[d + 1]);
            (0..full[d + 1].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
        } else {
            Vec::new()
        };
        let bounds_s: Vec<Vec<u8>> = bounds_k
            .iter()
            .zip(&full.get(d + 1).cloned().unwrap_or_default())
            .filter(|(_, s)| inside(s))
            .map(|(c, _)| c.clone())
            .collect();
        let rz = dense_rank(cycles.clone());
        let rbk = dense_rank(bounds_k.clone());
        let rbs = dense_rank(bounds_s.clone());
        let mut joint = bounds_k.clone();
        joint.extend(cycles);
        let rj = dense_rank(joint);
        // kernel = (Z_S ∩ B_K) / B_S
        out.push(rz + rbk - rj - rbs);
    }
    out
}

#[test]
fn injectivity_defects_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..60 {
        let k = random_complex(&mut rng, 6);
        let values: Vec<f64> = (0..6).map(|_| rng.random()).collect();
        let r = rng.random();
        let mask: Vec<bool> = values.iter().map(|&v| v <= r).collect();
        let s = sublevel(&k, &values, r).unwrap();
        let mut got = injectivity_defects(&s);
        got.resize(3, 0);
        assert_eq!(got, oracle_defects(&k, &mask));
    }
}

#[test]
fn persistence_scan_agrees_with_exhaustive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let k = random_complex(&mut rng, 8);
        let values: Vec<f64> = (0..8).map(|_| rng.random()).collect();
        let fast = kuiper_scan(&k, &values).unwrap();
        let slow = kuiper_scan_exhaustive(&k, &values).unwrap();
        assert_eq!(fast.injective, slow.injective);
    }
}
